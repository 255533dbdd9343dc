"""Deterministic tuning of slot lengths so model notches land on targets.

The search is a bounded Nelder-Mead simplex (scipy) from a fixed initial
simplex, stopped as soon as every notch is within tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import OptimizeResult, linear_sum_assignment, minimize

from .circuit import S11Trace
from .notch import REJECT_VSWR, UWB_BAND, ServiceBand

GHZ = 1e9
MISSING_NOTCH_PENALTY = 1e3
SIMPLEX_EDGE_FRACTION = 0.02
MAX_ITERATIONS = 500
SWEEP_MARGIN_HZ = 0.5e9


class TuneError(RuntimeError):
    """Search ended without meeting tolerance; ``result`` holds the best point."""

    def __init__(self, message: str, result: TuneResult):
        super().__init__(message)
        self.result = result


def _parabola_vertex(x0, x1, x2, y0, y1, y2) -> float:
    den = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / den
    b = (x2**2 * (y0 - y1) + x1**2 * (y2 - y0) + x0**2 * (y1 - y2)) / den
    if a >= 0:
        return x1
    return min(max(-b / (2 * a), x0), x2)


def notch_centers(trace: S11Trace, uwb_band: ServiceBand = UWB_BAND) -> list[float]:
    """Frequencies of VSWR peaks (VSWR >= 2) inside ``uwb_band``, ascending.

    Each peak is refined by a parabola through it and its two neighbours.
    """
    f, v = trace.freq_hz, trace.vswr
    centers = []
    for i in range(1, len(f) - 1):
        if not uwb_band.contains(f[i]) or v[i] < REJECT_VSWR:
            continue
        if not (v[i] >= v[i - 1] and v[i] > v[i + 1]):
            continue
        if np.isfinite(v[i - 1 : i + 2]).all():
            centers.append(float(_parabola_vertex(*f[i - 1 : i + 2], *v[i - 1 : i + 2])))
        else:
            centers.append(float(f[i]))
    return sorted(centers)


def match_centers(centers: Sequence[float], targets: Sequence[float]) -> list[float | None]:
    """Pair each target with a distinct nearest center (None when unpaired)."""
    if not centers:
        return [None] * len(targets)
    cost = np.abs(np.subtract.outer(np.asarray(targets, float), np.asarray(centers, float)))
    rows, cols = linear_sum_assignment(cost)
    out: list[float | None] = [None] * len(targets)
    for r, c in zip(rows, cols):
        out[r] = float(centers[c])
    return out


def objective(achieved: Sequence[float | None], targets: Sequence[float]) -> float:
    """Sum of squared GHz errors plus a fixed penalty per missing notch."""
    total = 0.0
    for a, t in zip(achieved, targets):
        total += MISSING_NOTCH_PENALTY if a is None else ((a - t) / GHZ) ** 2
    return total


@dataclass
class TuneProblem:
    initial_lengths_mm: Sequence[float]
    targets: Sequence[float]
    bounds_mm: Sequence[tuple[float, float]]
    sweep: np.ndarray
    trace_for: Callable[[Sequence[float]], S11Trace]
    tolerance_hz: float = 5e6
    uwb_band: ServiceBand = UWB_BAND
    max_iterations: int = MAX_ITERATIONS

    def __post_init__(self):
        self.initial_lengths_mm = [float(x) for x in self.initial_lengths_mm]
        self.targets = [float(x) for x in self.targets]
        self.bounds_mm = [(float(lo), float(hi)) for lo, hi in self.bounds_mm]
        self.sweep = np.asarray(self.sweep, float)
        n = len(self.initial_lengths_mm)
        if not (len(self.targets) == len(self.bounds_mm) == n) or n == 0:
            raise ValueError("lengths, targets and bounds must have the same non-zero length")
        for x, (lo, hi) in zip(self.initial_lengths_mm, self.bounds_mm):
            if not 0 < lo <= x <= hi:
                raise ValueError(f"initial length {x} outside bounds ({lo}, {hi})")
        if any(b <= a for a, b in zip(self.targets, self.targets[1:])):
            raise ValueError("targets must be strictly increasing")
        if self.sweep[0] > self.targets[0] - SWEEP_MARGIN_HZ or self.sweep[-1] < self.targets[-1] + SWEEP_MARGIN_HZ:
            raise ValueError("sweep must cover every target with 0.5 GHz margin")
        if not self.tolerance_hz > 0:
            raise ValueError("tolerance_hz must be > 0")


@dataclass
class TuneResult:
    tuned_lengths_mm: list[float]
    achieved_centers: list[float | None]
    objective_value: float
    iterations: int
    converged: bool
    history: list[float] = field(default_factory=list)

    def errors_hz(self, targets) -> list[float]:
        return [math.inf if a is None else a - t for a, t in zip(self.achieved_centers, targets)]


def round_sig(x: float, digits: int = 6) -> float:
    return float(f"{x:.{digits}g}")


def tune_report(problem: TuneProblem, result: TuneResult) -> dict:
    """JSON-ready summary at six significant digits."""
    return {
        "schema_version": 1,
        "targets_hz": [round_sig(t) for t in problem.targets],
        "initial_lengths_mm": [round_sig(x) for x in problem.initial_lengths_mm],
        "tuned_lengths_mm": [round_sig(x) for x in result.tuned_lengths_mm],
        "achieved_centers_hz": [None if a is None else round_sig(a) for a in result.achieved_centers],
        "tolerance_hz": round_sig(problem.tolerance_hz),
        "objective_value": round_sig(result.objective_value),
        "iterations": result.iterations,
        "converged": result.converged,
    }


def tune(problem: TuneProblem) -> TuneResult:
    """Tune slot lengths until every notch is within ``tolerance_hz``.

    Raises:
        TuneError: not converged after ``max_iterations`` simplex iterations.
    """
    targets = problem.targets
    cache: dict[tuple, tuple[float, list]] = {}

    def evaluate(x) -> tuple[float, list]:
        key = tuple(float(v) for v in x)
        if key not in cache:
            centers = notch_centers(problem.trace_for(list(key)), problem.uwb_band)
            achieved = match_centers(centers, targets)
            cache[key] = (objective(achieved, targets), achieved)
        return cache[key]

    def within_tolerance(achieved) -> bool:
        return all(a is not None and abs(a - t) <= problem.tolerance_hz for a, t in zip(achieved, targets))

    x0 = np.array(problem.initial_lengths_mm)
    f0, achieved0 = evaluate(x0)
    if within_tolerance(achieved0):
        return TuneResult([float(v) for v in x0], achieved0, f0, 0, True, [f0])

    history = [f0]
    state = {"iterations": 0}

    def callback(intermediate_result: OptimizeResult):
        state["iterations"] += 1
        history.append(float(intermediate_result.fun))
        if within_tolerance(evaluate(intermediate_result.x)[1]):
            raise StopIteration

    simplex = np.vstack([x0] + [x0 + np.eye(len(x0))[i] * SIMPLEX_EDGE_FRACTION * x0[i] for i in range(len(x0))])
    res = minimize(
        lambda x: evaluate(x)[0],
        x0,
        method="Nelder-Mead",
        bounds=problem.bounds_mm,
        callback=callback,
        options={
            "initial_simplex": simplex,
            "maxiter": problem.max_iterations,
            "maxfev": 20 * problem.max_iterations,
            "xatol": 0.0,
            "fatol": 0.0,
        },
    )
    fun, achieved = evaluate(res.x)
    result = TuneResult([float(v) for v in res.x], achieved, fun, state["iterations"], within_tolerance(achieved), history)
    if not result.converged:
        raise TuneError(f"no convergence after {result.iterations} iterations", result)
    return result
