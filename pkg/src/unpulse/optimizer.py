"""Numerical search for composite-pulse phases that minimize the band width
at a fixed pulse count.

The search works on the feasibility form of the problem: for a candidate
half-width, minimize the largest excitation on the outside region
[0, pi(1-w)] u [pi(1+w), 2pi] (smoothed with a high-order power mean so it
has useful gradients) and shrink the candidate width as long as the true
outside maximum stays below the leakage threshold. A continuation schedule
with warm starts, followed by bisection between the last feasible and first
infeasible width, refines the result. The first phase is gauged to zero and
restarts are seeded in the reflection-symmetric subspace
(phi_k + phi_{N+1-k} = const), which the best known sequences occupy;
symmetry is a starting heuristic, not a constraint, and a full-space polish
runs afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .profiles import AlphaResult, DegenerateProfileError, alpha_of
from .pulses import PhaseSequence, excitation_profile

SOFTMAX_ORDER = 40


@dataclass(frozen=True)
class OptimizationSpec:
    """Search configuration; identical specs (including seed) give identical results."""

    n_pulses: int
    threshold: float = 0.01
    restarts: int = 6
    seed: int = 0
    alpha_tol: float = 1e-3
    shrink: float = 0.985
    inner_maxiter: int = 120
    scan_points: int = 1024
    check_points: int = 4096

    def __post_init__(self):
        if self.n_pulses < 2:
            raise ValueError("need at least 2 pulses")
        if not (0.0 < self.threshold < 0.5):
            raise ValueError(f"threshold must lie in (0, 0.5), got {self.threshold}")
        if self.restarts < 1:
            raise ValueError("need at least 1 restart")


def _phases_from_symmetric(theta: np.ndarray, n_pulses: int) -> np.ndarray:
    """Map reduced parameters (inner phases + reflection constant, units of pi)
    to the full phase vector in radians, with phi_1 = 0."""
    half = n_pulses // 2
    const = theta[-1]
    phis = np.zeros(n_pulses)
    for k in range(2, half + 1):
        phis[k - 1] = theta[k - 2]
    if n_pulses % 2:
        phis[half] = const / 2.0
    for k in range(1, half + 1):
        phis[n_pulses - k] = const - phis[k - 1]
    return phis * math.pi


def _outside_grid(width: float, points: int) -> np.ndarray:
    half = points // 2
    return np.concatenate([
        np.linspace(0.0, math.pi * (1.0 - width), half),
        np.linspace(math.pi * (1.0 + width), 2.0 * math.pi, half),
    ])


def _excitation_for(phases: np.ndarray, areas: np.ndarray) -> np.ndarray:
    seq = PhaseSequence(tuple(phases))
    return excitation_profile(seq, areas)


def _soft_objective(phases: np.ndarray, areas: np.ndarray) -> float:
    p = _excitation_for(phases, areas)
    return float(np.mean(p ** SOFTMAX_ORDER) ** (1.0 / SOFTMAX_ORDER))


def _outside_max(phases: np.ndarray, width: float, points: int) -> float:
    return float(_excitation_for(phases, _outside_grid(width, points)).max())


def _minimize_at_width(x0: np.ndarray, width: float, to_phases, spec,
                       maxiter: int) -> np.ndarray:
    areas = _outside_grid(width, spec.scan_points)
    res = minimize(lambda th: _soft_objective(to_phases(th), areas), x0,
                   method="L-BFGS-B", options={"maxiter": maxiter})
    return res.x


def _descend(x0: np.ndarray, to_phases, spec: OptimizationSpec,
             start_width: float = 0.95):
    """Continuation from a wide band down to the narrowest feasible width
    reachable from this start, then bisection refinement between the last
    feasible and first infeasible width. Returns (width, params) or None."""
    x = x0
    width = start_width
    feasible = None
    infeasible = None
    while width > 0.02:
        x_try = _minimize_at_width(x, width, to_phases, spec, spec.inner_maxiter)
        if _outside_max(to_phases(x_try), width, spec.check_points) > spec.threshold:
            x_try = _minimize_at_width(x_try, width, to_phases, spec,
                                       4 * spec.inner_maxiter)
        if _outside_max(to_phases(x_try), width, spec.check_points) <= spec.threshold:
            x = x_try
            feasible = (width, x.copy())
            width *= spec.shrink
        else:
            infeasible = width
            break
    if feasible is None:
        return None
    if infeasible is not None:
        w_ok, x_ok = feasible
        w_bad = infeasible
        while w_ok - w_bad > spec.alpha_tol / 2.0:
            mid = 0.5 * (w_ok + w_bad)
            x_try = _minimize_at_width(x_ok, mid, to_phases, spec,
                                       4 * spec.inner_maxiter)
            if _outside_max(to_phases(x_try), mid, spec.check_points) <= spec.threshold:
                w_ok, x_ok = mid, x_try
            else:
                w_bad = mid
        feasible = (w_ok, x_ok)
    return feasible


def _certify(seq: PhaseSequence, alpha: float, threshold: float,
             points: int = 40960) -> AlphaResult:
    grid = np.linspace(0.0, 2.0 * math.pi, points)
    outside = (grid < math.pi * (1.0 - alpha)) | (grid > math.pi * (1.0 + alpha))
    max_outside = float(excitation_profile(seq, grid[outside]).max())
    return AlphaResult(alpha=alpha, threshold=threshold,
                       certified=max_outside <= threshold * (1.0 + 1e-9),
                       max_outside=max_outside)


def optimize(spec: OptimizationSpec) -> tuple[PhaseSequence, AlphaResult]:
    """Find a composite sequence of ``spec.n_pulses`` pulses minimizing the
    band half-width at the given leakage threshold.

    Deterministic under a fixed spec; restarts use independently derived
    seeds and are merged by best width with lexicographic phase tie-break.
    """
    n = spec.n_pulses
    half = n // 2
    to_sym = lambda th: _phases_from_symmetric(th, n)
    best: tuple[float, np.ndarray] | None = None

    for restart in range(spec.restarts):
        rng = np.random.default_rng(np.random.SeedSequence((spec.seed, restart)))
        x0 = rng.uniform(0.0, 2.0, half)
        got = _descend(x0, to_sym, spec)
        if got is None:
            continue
        width, x = got
        phases = to_sym(x)
        if (best is None or width < best[0] - 1e-12
                or (abs(width - best[0]) <= 1e-12
                    and tuple(phases) < tuple(best[1]))):
            best = (width, phases)

    if best is None:
        raise RuntimeError("no feasible sequence found; increase restarts")

    # full-space polish from the symmetric optimum (symmetry was a heuristic)
    width, phases = best
    to_full = lambda q: np.concatenate([[0.0], q]) * math.pi
    got = _descend(phases[1:] / math.pi, to_full, spec, start_width=width)
    if got is not None and got[0] < width:
        width, phases = got[0], to_full(got[1])

    seq = PhaseSequence(tuple(phases - phases[0]), name=f"opt{n}").canonical()
    try:
        result = alpha_of(seq, spec.threshold, strict=True)
        if result.alpha > width + spec.alpha_tol:
            # grid-level disagreement; fall back to the verified search width
            result = _certify(seq, width, spec.threshold)
    except DegenerateProfileError:
        # even pulse counts cannot reach full transfer at area pi; report the
        # verified search width directly (exploratory output)
        result = _certify(seq, width, spec.threshold)
    return seq, result


def verify_table(entries: list[tuple[PhaseSequence, float]],
                 threshold: float = 0.01, tol: float = 0.002) -> list[dict]:
    """Recompute the band width of tabulated sequences and compare with the
    published values.

    Returns one report row per sequence with the recomputed width, the
    deviation, and whether it falls within ``tol``.
    """
    report = []
    for seq, claimed in entries:
        result = alpha_of(seq, threshold)
        report.append({
            "name": seq.name or f"{len(seq)}-pulse",
            "n_pulses": len(seq),
            "claimed_alpha": float(claimed),
            "computed_alpha": result.alpha,
            "error": result.alpha - float(claimed),
            "passed": abs(result.alpha - float(claimed)) <= tol,
            "certified": result.certified,
            "max_outside": result.max_outside,
        })
    return report
