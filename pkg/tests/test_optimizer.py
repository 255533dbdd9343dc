import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from uwbnotch.circuit import Cascade, S11Trace, UniformLine, frequency_grid, sweep
from uwbnotch.design import AntennaModel, reference_design
from uwbnotch.notch import FR4_EPS_EFF, WLAN_BAND, NotchSpec, notch_frequency_from_length, resonator_element
from uwbnotch.optimizer import (
    TuneError,
    TuneProblem,
    _parabola_vertex,
    match_centers,
    notch_centers,
    objective,
    round_sig,
    tune,
    tune_report,
)

FREQS = frequency_grid(2e9, 12e9, 10e6)
TARGETS = [3.5e9, 5.5e9, 7.5e9]


def lorentzian_trace(centers, freqs=FREQS, width=0.1e9):
    """Synthetic |S11| with one peak of 0.9 per center, slightly shifted from
    the half-wave frequency so the optimizer has real work to do."""
    gamma = np.zeros(len(freqs))
    for c in centers:
        gamma = np.maximum(gamma, 0.9 / (1 + ((freqs - c) / width) ** 2))
    return S11Trace(freqs, gamma.astype(complex))


def synthetic_trace_for(lengths):
    return lorentzian_trace([0.97 * notch_frequency_from_length(x, FR4_EPS_EFF) + 40e6 for x in lengths])


def problem(initial, trace_for=synthetic_trace_for, **kw):
    return TuneProblem(
        initial_lengths_mm=initial,
        targets=TARGETS,
        bounds_mm=[(0.5 * x, 1.5 * x) for x in initial],
        sweep=FREQS,
        trace_for=trace_for,
        **kw,
    )


def reference_problem(scale=1.0, **kw):
    params = reference_design()
    model = AntennaModel(params, FREQS)
    x0 = [scale * n.slot_length_mm for n in params.notches]
    return problem(x0, trace_for=model.trace, **kw)


class TestCenters:
    def test_matched_trace_has_no_centers(self):
        assert notch_centers(S11Trace(FREQS, np.zeros(len(FREQS), complex))) == []

    def test_single_resonator(self):
        spec = NotchSpec(5.5e9, WLAN_BAND, "U", 16.58617, 1.6, q_factor=20)
        v = 299792458.0 / math.sqrt(FR4_EPS_EFF)
        net = Cascade([resonator_element(spec, 50), UniformLine(50, 1.0, v)])
        centers = notch_centers(sweep(net, 50, 50, FREQS))
        assert len(centers) == 1
        assert centers[0] == pytest.approx(5.5e9, abs=25e6)

    @given(st.floats(3.2e9, 10.4e9))
    def test_refines_between_grid_points(self, c):
        centers = notch_centers(lorentzian_trace([c]))
        assert len(centers) == 1
        assert abs(centers[0] - c) < 2e6

    def test_peaks_outside_uwb_ignored(self):
        assert notch_centers(lorentzian_trace([2.5e9, 11.5e9])) == []

    def test_parabola_vertex(self):
        # y = -(x - 1.3)^2
        ys = [-((x - 1.3) ** 2) for x in (1.0, 2.0, 3.0)]
        assert _parabola_vertex(1.0, 2.0, 3.0, *ys) == pytest.approx(1.3)
        assert _parabola_vertex(0.0, 1.0, 2.0, 0.0, 1.0, 4.0) == 1.0


class TestMatchingAndObjective:
    def test_match_prefers_distinct_centers(self):
        assert match_centers([3.6e9, 3.4e9], [3.5e9, 3.7e9]) == [3.4e9, 3.6e9]

    def test_missing_centers(self):
        assert match_centers([], TARGETS) == [None, None, None]
        assert match_centers([5.4e9], TARGETS) == [None, 5.4e9, None]

    def test_objective_penalty(self):
        assert objective([None, 5.5e9, 7.5e9], TARGETS) == 1e3
        assert objective([3.6e9, 5.5e9, 7.5e9], TARGETS) == pytest.approx(0.01)

    @given(st.lists(st.floats(-1e9, 1e9), min_size=3, max_size=3))
    def test_objective_zero_iff_exact(self, offsets):
        achieved = [t + d for t, d in zip(TARGETS, offsets)]
        value = objective(achieved, TARGETS)
        assert value >= 0
        assert (value == 0) == all(a == t for a, t in zip(achieved, TARGETS))


class TestProblemValidation:
    def test_start_outside_bounds(self):
        with pytest.raises(ValueError, match="outside bounds"):
            TuneProblem([10.0], [5e9], [(11.0, 12.0)], FREQS, synthetic_trace_for)

    def test_targets_must_increase(self):
        with pytest.raises(ValueError, match="increasing"):
            TuneProblem([10.0, 20.0], [5e9, 4e9], [(5, 15), (10, 30)], FREQS, synthetic_trace_for)

    def test_sweep_margin(self):
        with pytest.raises(ValueError, match="margin"):
            TuneProblem([10.0], [11.8e9], [(5, 15)], FREQS, synthetic_trace_for)


class TestTune:
    def test_synthetic_from_half_wave_start(self):
        x0 = [26.06398, 16.58617, 12.16319]
        result = tune(problem(x0))
        assert result.converged
        assert all(abs(e) <= 5e6 for e in result.errors_hz(TARGETS))
        # the synthetic model pulls notches down ~3%, so every slot shortens
        assert all(t < x for t, x in zip(result.tuned_lengths_mm, x0))

    def test_fixed_point(self):
        p = reference_problem()
        result = tune(p)
        assert result.iterations == 0
        assert result.tuned_lengths_mm == p.initial_lengths_mm
        assert all(type(x) is float for x in result.tuned_lengths_mm)

    def test_recovers_from_perturbation(self):
        result = tune(reference_problem(scale=1.1))
        assert result.converged and result.iterations > 0
        assert all(abs(e) <= 5e6 for e in result.errors_hz(TARGETS))

    def test_history_never_increases(self):
        result = tune(reference_problem(scale=1.1))
        assert all(b <= a for a, b in zip(result.history, result.history[1:]))

    def test_deterministic(self):
        a = tune(reference_problem(scale=0.93))
        b = tune(reference_problem(scale=0.93))
        assert a.tuned_lengths_mm == b.tuned_lengths_mm
        assert a.history == b.history

    def test_reports_failure_with_best_point(self):
        p = reference_problem(scale=1.1, max_iterations=1, tolerance_hz=1.0)
        with pytest.raises(TuneError) as info:
            tune(p)
        result = info.value.result
        assert not result.converged
        assert result.iterations <= 1
        assert len(result.tuned_lengths_mm) == 3

    def test_report_rounding(self):
        p = reference_problem(scale=1.1)
        report = tune_report(p, tune(p))
        assert report["converged"] is True
        assert all(x == round_sig(x) for x in report["tuned_lengths_mm"])
        assert round_sig(26.0639812345) == 26.0640
