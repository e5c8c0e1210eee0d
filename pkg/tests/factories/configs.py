"""Small reservoir configurations that train in well under a second."""

from typing import Any

from app.models.config import RCConfig, Seeds


def small_config(**overrides: Any) -> RCConfig:
    values: dict[str, Any] = {
        "N": 30,
        "rho": 0.5,
        "sigma": 0.2,
        "beta": 0.001,
        "t_listen": 5.0,
        "t_train": 10.0,
        "t_predict": 20.0,
        "t_trans_offset": 1.0,
        "seeds": Seeds(network_seed=3, input_seed=4, ic_seed=5),
    }
    values.update(overrides)
    return RCConfig(**values)
