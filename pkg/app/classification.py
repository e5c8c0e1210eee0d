"""Closed-loop output classifier, period counting, signatures and attractor dedup."""

import logging
from collections.abc import Sequence

import numpy as np

from app.exceptions import InsufficientDataError
from app.models.classification import (
    AttractorRecord,
    Box,
    C1Class,
    ClassifiedOutput,
    ClassLabel,
    ExtremaSignature,
    LabelValue,
    ReferenceFit,
    Scenario,
    SignatureMode,
    WingLine,
)
from app.models.series import ExtremaKind, Trajectory
from app.numerics import local_extrema

logger = logging.getLogger(__name__)

EPS_FIXED_POINT = 1e-4
EPS_PERIODIC = 1e-3
MAX_PERIOD = 16
EPS_CLUSTER = 0.05
MIN_WINDOW = 30.0
MIN_WING_MAXIMA = 10
ALPHA = 3.75

CYCLE_TOLERANCE = 0.5
BAND_TOLERANCE = 2.0
CENTROID_TOLERANCE = 1.0
BAND_CENTROID_TOLERANCE = 4.0
BAND_QUANTILES = np.linspace(0.1, 0.9, 9)


def post_transient(outputs: Trajectory, t_trans: float) -> Trajectory:
    """Samples after t_trans; the window must cover MIN_WINDOW time units."""
    window = outputs.after(t_trans)
    _require_window(window)
    return window


def _require_window(window: Trajectory) -> None:
    if window.n_samples < 3 or window.duration < MIN_WINDOW - 1e-9:
        raise InsufficientDataError(
            f"classification window covers {max(window.duration, 0.0):g} time units, "
            f"need {MIN_WINDOW:g}"
        )


def _primary_coordinate(window: Trajectory) -> int:
    return min(2, window.dimension - 1)


def fit_reference(
    reference: Trajectory, box: Box | None = None, alpha: float = ALPHA
) -> ReferenceFit:
    """Least-squares lines through the (x1, x3-maximum) points of each wing."""
    maxima = local_extrema(
        reference.coordinate(2),
        ExtremaKind.MAXIMA,
        companion=reference.coordinate(0),
        coordinate_index=2,
    )
    x1, x3 = maxima.companion_values, maxima.values
    lines = []
    for name, mask in (("negative", x1 < 0), ("positive", x1 >= 0)):
        if int(mask.sum()) < MIN_WING_MAXIMA:
            raise InsufficientDataError(
                f"{name} wing has {int(mask.sum())} maxima, need {MIN_WING_MAXIMA} to fit a line"
            )
        slope, intercept = np.polyfit(x1[mask], x3[mask], 1)
        lines.append(WingLine(slope=float(slope), intercept=float(intercept)))
    return ReferenceFit(
        negative_wing=lines[0], positive_wing=lines[1], box=box or Box(), alpha=alpha
    )


def _repeats_with_period(values: np.ndarray, eps: float, max_period: int) -> int | None:
    tail = values[len(values) // 2 :] if len(values) >= 4 else values
    for p in range(1, max_period + 1):
        if len(tail) < 2 * p:
            break
        if np.max(np.abs(tail[p:] - tail[:-p])) < eps:
            return p
    return None


def detect_c1_with_period(window: Trajectory) -> tuple[C1Class, int | None]:
    """C1 class plus the repetition length of the maxima sequence for limit cycles."""
    _require_window(window)
    ranges = np.ptp(window.states, axis=0)
    if np.max(ranges) < EPS_FIXED_POINT:
        return C1Class.FIXED_POINT, None

    index = _primary_coordinate(window)
    maxima = local_extrema(window.coordinate(index), ExtremaKind.MAXIMA).values
    if len(maxima) < 3:
        # x3 can be flat on a planar orbit
        index = int(np.argmax(ranges))
        maxima = local_extrema(window.coordinate(index), ExtremaKind.MAXIMA).values
    if len(maxima) < 3:
        # moving but without a repeating maxima sequence (drift, very long period)
        return C1Class.APERIODIC, None

    period = _repeats_with_period(maxima, EPS_PERIODIC, MAX_PERIOD)
    if period is not None:
        return C1Class.LIMIT_CYCLE, period
    return C1Class.APERIODIC, None


def detect_c1(window: Trajectory) -> C1Class:
    return detect_c1_with_period(window)[0]


def detect_c2(window: Trajectory, box: Box) -> bool:
    return box.contains(window.states)


def c3_distances(window: Trajectory, ref: ReferenceFit) -> tuple[np.ndarray, np.ndarray]:
    """Vertical distances of the x3-maxima to their wing line, split (negative, positive)."""
    maxima = local_extrema(
        window.coordinate(2), ExtremaKind.MAXIMA, companion=window.coordinate(0), coordinate_index=2
    )
    x1, x3 = maxima.companion_values, maxima.values
    negative = x1 < 0
    d_neg = np.abs(x3[negative] - ref.negative_wing(x1[negative]))
    d_pos = np.abs(x3[~negative] - ref.positive_wing(x1[~negative]))
    return d_neg, d_pos


def detect_c3(window: Trajectory, ref: ReferenceFit) -> bool:
    d_neg, d_pos = c3_distances(window, ref)
    if d_neg.size == 0 or d_pos.size == 0:
        return False
    return bool(max(d_neg.max(), d_pos.max()) < ref.alpha)


def classify_output(window: Trajectory, ref: ReferenceFit) -> ClassLabel:
    """C1 first, then C2/C3; leftovers go to manual review."""
    c1, _ = detect_c1_with_period(window)
    c2 = detect_c2(window, ref.box)
    d_neg, d_pos = c3_distances(window, ref)
    distances = np.concatenate([d_neg, d_pos])
    max_distance = float(distances.max()) if distances.size else None
    c3 = bool(d_neg.size and d_pos.size and max_distance < ref.alpha)

    if c1 in (C1Class.FIXED_POINT, C1Class.LIMIT_CYCLE):
        value = LabelValue.UA
    elif c2 and c3:
        value = LabelValue.GOOD
    elif c2:
        value = LabelValue.POOR
    else:
        value = LabelValue.REVIEW
    return ClassLabel(value=value, c1=c1, c2=c2, c3=c3, max_c3_distance=max_distance)


def _clusters(values: np.ndarray, eps: float) -> tuple[np.ndarray, list[np.ndarray]]:
    """Single-linkage clusters of scalar values: ids in input order and sorted members."""
    order = np.argsort(values, kind="stable")
    ordered = values[order]
    breaks = np.nonzero(np.diff(ordered) > eps)[0] + 1
    groups = np.split(ordered, breaks)
    ids_sorted = np.repeat(np.arange(len(groups)), [len(g) for g in groups])
    ids = np.empty_like(ids_sorted)
    ids[order] = ids_sorted
    return ids, groups


def count_period(
    window: Trajectory,
    coordinate_index: int,
    kind: ExtremaKind,
    eps_cluster: float = EPS_CLUSTER,
    max_period: int = MAX_PERIOD,
) -> int | None:
    """Number of extrema clusters per cycle, or None when the extrema are not periodic."""
    values = local_extrema(window.coordinate(coordinate_index), kind).values
    return _period_of_values(values, eps_cluster, max_period)


def _period_of_values(values: np.ndarray, eps_cluster: float, max_period: int) -> int | None:
    if len(values) < 3:
        raise InsufficientDataError(f"{len(values)} extrema, need at least 3 to count a period")
    ids, groups = _clusters(values, eps_cluster)
    k = len(groups)
    if k > max_period or any(np.ptp(g) > eps_cluster for g in groups):
        return None
    if len(values) < 3 * k:
        raise InsufficientDataError(
            f"{len(values)} extrema cover fewer than 3 cycles of period {k}"
        )
    if np.any(ids[k:] != ids[:-k]):
        return None
    return k


def extrema_signature(
    window: Trajectory,
    coordinate_index: int,
    kind: ExtremaKind,
    c1: C1Class | None = None,
) -> tuple[ExtremaSignature, tuple[float, ...]]:
    """Signature of one window plus the extrema values it summarises."""
    series = window.coordinate(coordinate_index)
    centroid = tuple(float(v) for v in window.centroid())
    values = local_extrema(series, kind).values

    if c1 is C1Class.FIXED_POINT or len(values) < 3:
        level = float(series.mean())
        signature = ExtremaSignature(
            coordinate_index, kind, SignatureMode.POINT, (level,), centroid, CYCLE_TOLERANCE
        )
        return signature, (level,)

    try:
        period = _period_of_values(values, EPS_CLUSTER, MAX_PERIOD)
    except InsufficientDataError:
        period = None
    if period is not None:
        _, groups = _clusters(values, EPS_CLUSTER)
        centers = tuple(float(g.mean()) for g in groups)
        signature = ExtremaSignature(
            coordinate_index, kind, SignatureMode.CYCLE, centers, centroid, CYCLE_TOLERANCE
        )
        return signature, centers

    deciles = tuple(float(q) for q in np.quantile(values, BAND_QUANTILES))
    signature = ExtremaSignature(
        coordinate_index, kind, SignatureMode.BAND, deciles, centroid, BAND_TOLERANCE
    )
    return signature, tuple(float(v) for v in values)


def shape_label(signature: ExtremaSignature) -> str:
    match signature.mode:
        case SignatureMode.POINT:
            return "fixed_point"
        case SignatureMode.CYCLE:
            return f"period-{signature.n_clusters}"
    return "aperiodic"


def signatures_match(
    a: ExtremaSignature,
    b: ExtremaSignature,
    tolerance: float | None = None,
    same_family: bool = True,
) -> bool:
    """Hausdorff distance of the supports and centroid distance both within tolerance.

    With same_family, a fixed point never matches an oscillating output.
    """
    banded = SignatureMode.BAND in (a.mode, b.mode)
    if tolerance is None:
        tolerance = max(a.tolerance, b.tolerance)
    centroid_tolerance = BAND_CENTROID_TOLERANCE if banded else CENTROID_TOLERANCE
    if same_family and (a.mode is SignatureMode.POINT) != (b.mode is SignatureMode.POINT):
        return False
    return a.distance_to(b) <= tolerance and a.centroid_distance(b) <= centroid_tolerance


def classify_window(
    window: Trajectory,
    ref: ReferenceFit | None,
    coordinate_index: int,
    kind: ExtremaKind,
    ic_index: int = 0,
    final_state: np.ndarray | None = None,
) -> ClassifiedOutput:
    """C1 class, period, signature and (with a reference fit) the full label of one window."""
    c1, _ = detect_c1_with_period(window)
    signature, _ = extrema_signature(window, coordinate_index, kind, c1)
    label = classify_output(window, ref) if ref is not None else None
    period = signature.n_clusters if signature.mode is SignatureMode.CYCLE else None
    return ClassifiedOutput(
        ic_index=ic_index,
        c1=c1,
        period=period,
        signature=signature,
        outputs=window,
        final_state=final_state if final_state is not None else window.final,
        label=label,
    )


def dedup_attractors(outputs: Sequence[ClassifiedOutput]) -> list[AttractorRecord]:
    """Merge outputs with the same C1 class and matching signatures, first come first kept."""
    groups: list[list[ClassifiedOutput]] = []
    for output in outputs:
        for group in groups:
            head = group[0]
            if head.c1 is output.c1 and signatures_match(head.signature, output.signature):
                group.append(output)
                break
        else:
            groups.append([output])
    records = [
        AttractorRecord(
            record_id=i,
            representative=group[0],
            count=len(group),
            ic_indices=tuple(o.ic_index for o in group),
        )
        for i, group in enumerate(groups)
    ]
    logger.debug(f"Deduplicated {len(outputs)} outputs into {len(records)} attractors")
    return records


def _effective_label(label: ClassLabel) -> LabelValue:
    if label.value is LabelValue.REVIEW:
        # Maxima on the wing lines but outside the box reads as a poor reconstruction.
        return LabelValue.POOR if (not label.c2 and label.c3) else LabelValue.UA
    return label.value


def assign_scenario(records: Sequence[AttractorRecord]) -> Scenario:
    if not records:
        raise ValueError("scenario assignment needs at least one attractor record")
    labels = set()
    for record in records:
        if record.label is None:
            raise ValueError(f"record {record.record_id} carries no classification label")
        labels.add(_effective_label(record.label))
    has_ua = LabelValue.UA in labels
    if LabelValue.GOOD in labels:
        return Scenario.GOOD_WITH_UA if has_ua else Scenario.GOOD_ONLY
    if LabelValue.POOR in labels:
        return Scenario.POOR_WITH_UA if has_ua else Scenario.POOR_ONLY
    return Scenario.UA_ONLY
