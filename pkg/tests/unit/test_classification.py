import numpy as np
import pytest

from app.classification import (
    assign_scenario,
    c3_distances,
    classify_output,
    classify_window,
    count_period,
    dedup_attractors,
    detect_c1_with_period,
    detect_c2,
    detect_c3,
    extrema_signature,
    fit_reference,
    post_transient,
    shape_label,
    signatures_match,
)
from app.exceptions import InsufficientDataError
from app.models.classification import (
    Box,
    C1Class,
    ExtremaSignature,
    LabelValue,
    Scenario,
    SignatureMode,
)
from app.models.config import RCConfig
from app.models.series import ExtremaKind
from app.models.systems import SourceSystem, SystemName
from app.systems import generate_training_signal
from tests.factories import trajectories
from tests.factories.records import labelled_record


@pytest.fixture(scope="module")
def reference():
    return fit_reference(trajectories.lorenz())


class TestClassifyOutput:
    def test_ground_truth_is_good(self, reference):
        label = classify_output(trajectories.lorenz(), reference)
        assert label.value is LabelValue.GOOD
        assert label.c1 is C1Class.APERIODIC
        assert label.c2 and label.c3

    def test_shifted_copy_is_poor(self, reference):
        shifted = trajectories.lorenz().shifted([0.0, 0.0, 5.0])
        label = classify_output(shifted, reference)
        assert label.value is LabelValue.POOR
        assert label.c2
        assert not label.c3
        assert label.max_c3_distance > reference.alpha

    def test_limit_cycle_is_untrained(self, reference):
        label = classify_output(trajectories.circle(), reference)
        assert label.value is LabelValue.UA
        assert label.c1 is C1Class.LIMIT_CYCLE

    def test_fixed_point_is_untrained(self, reference):
        label = classify_output(trajectories.constant(), reference)
        assert label.value is LabelValue.UA
        assert label.c1 is C1Class.FIXED_POINT

    def test_far_aperiodic_output_needs_review(self, reference):
        outside = trajectories.lorenz().shifted([0.0, 0.0, 40.0])
        label = classify_output(outside, reference)
        assert label.value is LabelValue.REVIEW
        assert not label.c2


class TestWindows:
    def test_short_window(self):
        with pytest.raises(InsufficientDataError):
            post_transient(trajectories.circle(duration=40.0), 20.0)

    def test_window_starts_at_transient(self):
        window = post_transient(trajectories.circle(duration=60.0), 20.0)
        assert window.t0 == pytest.approx(20.0)
        assert window.duration == pytest.approx(40.0)

    def test_reference_needs_maxima_on_both_wings(self):
        with pytest.raises(InsufficientDataError):
            fit_reference(trajectories.constant())

    def test_box_is_closed(self):
        box = Box(lower=(0.0, 0.0, 0.0), upper=(1.0, 1.0, 1.0))
        assert detect_c2(trajectories.constant((1.0, 0.0, 1.0)), box)
        assert not detect_c2(trajectories.constant((1.0, 0.0, 1.5)), box)


class TestPeriods:
    def test_period_two(self):
        window = trajectories.period_two()
        assert detect_c1_with_period(window) == (C1Class.LIMIT_CYCLE, 2)
        assert count_period(window, 2, ExtremaKind.MAXIMA) == 2
        signature, values = extrema_signature(window, 2, ExtremaKind.MAXIMA)
        assert signature.mode is SignatureMode.CYCLE
        assert shape_label(signature) == "period-2"
        assert sorted(values) == pytest.approx([0.662, 1.368], abs=0.01)

    def test_circle_is_period_one(self):
        signature, _ = extrema_signature(trajectories.circle(), 2, ExtremaKind.MAXIMA)
        assert shape_label(signature) == "period-1"
        assert signature.support == pytest.approx((25.0,), abs=1e-4)

    def test_slow_orbit_without_repeats_is_aperiodic(self):
        window = trajectories.circle(duration=60.0, omega=2.0 * np.pi / 100.0)
        assert np.ptp(window.states, axis=0).max() > 1.0
        assert detect_c1_with_period(window) == (C1Class.APERIODIC, None)

    def test_quasi_periodic_is_a_band(self):
        window = trajectories.quasi_periodic()
        assert detect_c1_with_period(window)[0] is C1Class.APERIODIC
        assert count_period(window, 2, ExtremaKind.MAXIMA) is None
        signature, _ = extrema_signature(window, 2, ExtremaKind.MAXIMA)
        assert signature.mode is SignatureMode.BAND
        assert len(signature.support) == 9
        assert shape_label(signature) == "aperiodic"

    def test_fixed_point_signature(self):
        window = trajectories.constant((1.0, 2.0, 3.0))
        signature, values = extrema_signature(window, 2, ExtremaKind.MAXIMA, C1Class.FIXED_POINT)
        assert signature.mode is SignatureMode.POINT
        assert values == (3.0,)
        assert shape_label(signature) == "fixed_point"


class TestSignatures:
    def test_same_cycle_matches(self):
        a, _ = extrema_signature(trajectories.circle(), 2, ExtremaKind.MAXIMA)
        b, _ = extrema_signature(trajectories.circle(duration=80.0), 2, ExtremaKind.MAXIMA)
        assert signatures_match(a, b)
        assert a.digest() == b.digest()

    def test_displaced_cycle_does_not_match(self):
        a, _ = extrema_signature(trajectories.circle(), 2, ExtremaKind.MAXIMA)
        b, _ = extrema_signature(trajectories.circle(height=22.0), 2, ExtremaKind.MAXIMA)
        assert not signatures_match(a, b)

    def test_family_check(self):
        point = ExtremaSignature(2, ExtremaKind.MAXIMA, SignatureMode.POINT, (5.0,), (0, 0, 5), 0.5)
        cycle = ExtremaSignature(2, ExtremaKind.MAXIMA, SignatureMode.CYCLE, (5.1,), (0, 0, 5), 0.5)
        assert not signatures_match(point, cycle)
        assert signatures_match(point, cycle, same_family=False)

    def test_hausdorff_distance(self):
        a = ExtremaSignature(2, ExtremaKind.MAXIMA, SignatureMode.CYCLE, (1.0, 3.0), (0,), 0.5)
        b = ExtremaSignature(2, ExtremaKind.MAXIMA, SignatureMode.CYCLE, (1.0,), (0,), 0.5)
        assert a.distance_to(b) == pytest.approx(2.0)
        assert b.distance_to(a) == pytest.approx(2.0)


class TestWingCriterion:
    def test_one_wing_fails(self, reference):
        one_wing = trajectories.circle().shifted([10.0, 0.0, 0.0])
        d_neg, d_pos = c3_distances(one_wing, reference)
        assert d_neg.size == 0 and d_pos.size > 0
        assert not detect_c3(one_wing, reference)

    @pytest.mark.parametrize("shift", [0.0, 1.0, 3.0, 5.0])
    def test_monotone_in_alpha(self, reference, shift):
        window = trajectories.lorenz().shifted([0.0, 0.0, shift])
        passed = [
            detect_c3(window, reference.model_copy(update={"alpha": alpha}))
            for alpha in (0.5, 1.0, 2.0, 3.75, 6.0, 10.0)
        ]
        assert passed == sorted(passed)
        assert passed[-1]


class TestDedup:
    def test_merges_matching_outputs(self):
        outputs = [
            classify_window(trajectories.circle(), None, 2, ExtremaKind.MAXIMA, ic_index=0),
            classify_window(trajectories.constant(), None, 2, ExtremaKind.MAXIMA, ic_index=1),
            classify_window(trajectories.circle(), None, 2, ExtremaKind.MAXIMA, ic_index=2),
        ]
        records = dedup_attractors(outputs)
        assert [r.count for r in records] == [2, 1]
        assert records[0].ic_indices == (0, 2)
        assert records[1].c1 is C1Class.FIXED_POINT

    @pytest.mark.slow
    def test_chaotic_outputs_from_many_states_are_one_attractor(self):
        config = RCConfig(t_listen=50.0, t_train=100.0, t_predict=150.0, t_trans_offset=10.0)
        rng = np.random.default_rng(4)
        lorenz = SourceSystem(name=SystemName.LORENZ)
        outputs = [
            classify_window(
                generate_training_signal(
                    lorenz, config, x0=rng.uniform(-10.0, 10.0, 3) + [0.0, 0.0, 25.0]
                ).trajectory,
                None,
                2,
                ExtremaKind.MAXIMA,
                ic_index=j,
            )
            for j in range(10)
        ]
        records = dedup_attractors(outputs)
        assert len(records) == 1
        assert records[0].count == 10
        assert records[0].signature.mode is SignatureMode.BAND

    def test_window_label_uses_reference(self, reference):
        output = classify_window(trajectories.circle(), reference, 2, ExtremaKind.MAXIMA)
        assert output.label.value is LabelValue.UA
        assert output.period == 1


class TestScenario:
    @pytest.mark.parametrize(
        "labels, expected",
        [
            ([LabelValue.GOOD], Scenario.GOOD_ONLY),
            ([LabelValue.POOR], Scenario.POOR_ONLY),
            ([LabelValue.UA, LabelValue.UA], Scenario.UA_ONLY),
            ([LabelValue.GOOD, LabelValue.UA], Scenario.GOOD_WITH_UA),
            ([LabelValue.UA, LabelValue.POOR], Scenario.POOR_WITH_UA),
            ([LabelValue.POOR, LabelValue.GOOD], Scenario.GOOD_ONLY),
        ],
    )
    def test_compositions(self, labels, expected):
        records = [labelled_record(i, value) for i, value in enumerate(labels)]
        assert assign_scenario(records) is expected

    def test_review_on_the_wings_counts_as_poor(self):
        record = labelled_record(0, LabelValue.REVIEW, c2=False, c3=True)
        assert assign_scenario([record]) is Scenario.POOR_ONLY

    def test_other_review_counts_as_untrained(self):
        record = labelled_record(0, LabelValue.REVIEW, c2=False, c3=False)
        assert assign_scenario([record]) is Scenario.UA_ONLY

    def test_empty(self):
        with pytest.raises(ValueError):
            assign_scenario([])
