"""Reservoir hyperparameter models."""

from pydantic import BaseModel, ConfigDict, Field, model_validator


class Seeds(BaseModel):
    """Seeds for one reservoir realisation."""

    network_seed: int = Field(default=0, ge=0, description="Seed of the internal matrix M")
    input_seed: int = Field(default=0, ge=0, description="Seed of the input matrix W_in")
    ic_seed: int = Field(default=0, ge=0, description="Base seed of random initial states")

    model_config = ConfigDict(frozen=True)


class RCConfig(BaseModel):
    """All scalar hyperparameters of one reservoir computer."""

    N: int = Field(default=100, ge=1, description="Number of neurons")
    D: int = Field(default=3, ge=1, description="Input/output dimension")
    rho: float = Field(default=0.5, ge=0.0, description="Target spectral radius of M")
    sigma: float = Field(default=0.2, ge=0.0, description="Input strength")
    gamma: float = Field(default=10.0, gt=0.0, description="Decay rate per unit time")
    beta: float = Field(default=0.001, ge=0.0, description="Ridge regularisation")
    tau: float = Field(default=0.01, gt=0.0, description="RK4 timestep")
    P: float = Field(default=0.05, gt=0.0, le=1.0, description="Connection probability of M")
    t_listen: float = Field(default=100.0, gt=0.0)
    t_train: float = Field(default=200.0, gt=0.0)
    t_predict: float = Field(default=300.0, gt=0.0)
    t_trans_offset: float = Field(
        default=70.0, ge=0.0, description="Classification transient, measured from t_train"
    )
    b: float = Field(default=0.0, description="Bias magnitude (0 when unused)")
    seeds: Seeds = Field(default_factory=Seeds)

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={
            "example": {
                "N": 100,
                "rho": 0.5,
                "sigma": 0.2,
                "gamma": 10.0,
                "beta": 0.001,
                "t_listen": 100.0,
                "t_train": 200.0,
                "t_predict": 300.0,
            }
        },
    )

    @model_validator(mode="after")
    def check_times(self) -> "RCConfig":
        if not 0 < self.t_listen < self.t_train < self.t_predict:
            raise ValueError("times must satisfy 0 < t_listen < t_train < t_predict")
        if self.t_train + self.t_trans_offset >= self.t_predict:
            raise ValueError("t_trans = t_train + t_trans_offset must lie before t_predict")
        return self

    @property
    def t_trans(self) -> float:
        return self.t_train + self.t_trans_offset

    def steps(self, duration: float) -> int:
        """Number of RK4 steps covering `duration` model units."""
        return int(round(duration / self.tau))

    @property
    def l_star(self) -> int:
        return self.steps(self.t_listen)

    @property
    def t_star(self) -> int:
        return self.steps(self.t_train)
