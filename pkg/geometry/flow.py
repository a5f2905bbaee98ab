"""
Inverse Gauss curvature flow

    u̇ = (K̄_u − K_u)/K_u   (positive cone),   u̇ = (K_u − K̄_u)/K_u   (negative cone),

integrated with an embedded Dormand–Prince 5(4) pair.  Steps are accepted
only when the local error is below ``rtol`` and the trial state stays in the
cone with at least a tenth of the current margin.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .conformal import (
    NEGATIVE,
    POSITIVE,
    admissible,
    cone_sign,
    grad_F,
    liouville_energy,
    normalized_energy,
    require_admissible,
    snapshot,
)
from .exceptions import FlowError
from .geodesic_solver import solve_geodesic
from .surface import DiscreteSurface, as_vertex_field, laplacian_apply

logger = logging.getLogger(__name__)

# ────────────────────────────────────────────────────────────────────────────
# Constants
# ────────────────────────────────────────────────────────────────────────────

MIN_STEP: float = 1e-12
MARGIN_FRACTION: float = 0.1
CONVERGENCE_TOL: float = 1e-6
MAX_GROWTH: float = 5.0

# Dormand–Prince 5(4) tableau (the flow is autonomous, so no stage times)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])

SERIES_FIELDS = (
    "t", "dt", "F", "J", "area", "min_K", "max_K", "min_u", "max_u",
    "deviation", "margin", "curvature_evolution_error",
)


@dataclass(eq=False)
class FlowTrace:
    """Accepted-step series, sampled snapshots and the step log of one run."""

    cone: str
    sample_times: List[float] = field(default_factory=list)
    snapshots: List[np.ndarray] = field(default_factory=list)
    series: Dict[str, List[float]] = field(default_factory=lambda: {name: [] for name in SERIES_FIELDS})
    rejections: List[Dict[str, Any]] = field(default_factory=list)
    converged: bool = False
    convergence_time: Optional[float] = None
    initial_curvature: Optional[np.ndarray] = None
    euler_characteristic: int = 0

    @property
    def accepted_steps(self) -> int:
        return max(len(self.series["t"]) - 1, 0)

    @property
    def final(self) -> np.ndarray:
        return self.snapshots[-1]

    def record(self, **values: float) -> None:
        for name in SERIES_FIELDS:
            self.series[name].append(float(values.get(name, math.nan)))

    def rows(self):
        """Per-step rows in SERIES_FIELDS order (CSV export)."""
        return zip(*(self.series[name] for name in SERIES_FIELDS))

    def summary(self) -> Dict[str, Any]:
        return {
            "cone": self.cone,
            "accepted_steps": self.accepted_steps,
            "rejected_steps": len(self.rejections),
            "t_final": self.series["t"][-1] if self.series["t"] else 0.0,
            "converged": self.converged,
            "convergence_time": self.convergence_time,
            "final_deviation": self.series["deviation"][-1] if self.series["deviation"] else None,
            "F": {"initial": self.series["F"][0], "final": self.series["F"][-1]} if self.series["F"] else {},
            "sample_times": self.sample_times,
        }


# ────────────────────────────────────────────────────────────────────────────
# Right-hand side
# ────────────────────────────────────────────────────────────────────────────

def igcf_rhs(surface: DiscreteSurface, u, cone: str) -> np.ndarray:
    """Flow velocity; equal to −½ grad_F, the weighted gradient flow of ½F."""
    return -0.5 * grad_F(surface, u, cone)


def _curvature_rate(surface: DiscreteSurface, u: np.ndarray, K: np.ndarray, ut: np.ndarray) -> np.ndarray:
    """∂K/∂t = −2u̇K − e^{−2u}Δ0u̇."""
    return -2.0 * ut * K - np.exp(-2.0 * u) * laplacian_apply(surface, ut)


def _state(surface: DiscreteSurface, u: np.ndarray, cone: str) -> Dict[str, Any]:
    snap = snapshot(surface, u)
    K = snap.curvature
    return {
        "K": K,
        "F": normalized_energy(surface, u),
        "J": liouville_energy(surface, u),
        "area": snap.total_area,
        "min_K": float(K.min()),
        "max_K": float(K.max()),
        "min_u": float(u.min()),
        "max_u": float(u.max()),
        "deviation": float(np.abs(K - snap.mean_curvature).max() / abs(snap.mean_curvature)),
        "margin": float((cone_sign(cone) * K).min()),
    }


# ────────────────────────────────────────────────────────────────────────────
# Integrator
# ────────────────────────────────────────────────────────────────────────────

def _dopri_step(surface: DiscreteSurface, u: np.ndarray, k1: np.ndarray, dt: float, cone: str):
    """One Dormand–Prince step; returns (u_new, error, k7) or None if a stage leaves the cone."""
    stages = [k1]
    for row in _A[1:]:
        y = u + dt * sum(coeff * k for coeff, k in zip(row, stages))
        if not admissible(surface, y, cone).admissible:
            return None
        stages.append(igcf_rhs(surface, y, cone))
    stacked = np.stack(stages)
    u_new = u + dt * (_B5 @ stacked)
    error = dt * ((_B5 - _B4) @ stacked)
    return u_new, error, stages[-1]


def integrate(
    surface: DiscreteSurface,
    u0,
    cone: str,
    t_final: float,
    rtol: float = 1e-7,
    sample_every: int = 10,
    sample_times: Optional[Sequence[float]] = None,
    convergence_tol: Optional[float] = None,
    initial_step: float = 1e-2,
    max_steps: int = 1_000_000,
) -> FlowTrace:
    """
    Integrate the flow from u0 up to *t_final*.

    Snapshots are stored every *sample_every* accepted steps, or exactly at
    *sample_times* when given (steps are clipped to land on them).  With
    *convergence_tol* the run stops once max|K − K̄|/|K̄| drops below it.

    Raises
    ------
    InadmissibleError
        u0 is outside the cone.
    FlowError
        The step size fell below 1e-12; ``trace`` holds the run so far.
    """
    u = np.array(as_vertex_field(surface, u0, "u0"))
    require_admissible(surface, u, cone)
    if t_final < 0:
        raise ValueError("t_final must be nonnegative")
    targets = sorted(float(s) for s in sample_times) if sample_times is not None else []
    if targets and (targets[0] < 0 or targets[-1] > t_final + 1e-12):
        raise ValueError("sample times must lie in [0, t_final]")

    trace = FlowTrace(cone=cone, euler_characteristic=surface.euler_characteristic)
    state = _state(surface, u, cone)
    trace.initial_curvature = state["K"]
    trace.record(t=0.0, dt=0.0, curvature_evolution_error=0.0, **{k: v for k, v in state.items() if k != "K"})
    trace.sample_times.append(0.0)
    trace.snapshots.append(u.copy())
    while targets and targets[0] <= 0.0:
        targets.pop(0)

    t = 0.0
    dt = min(initial_step, t_final) if t_final > 0 else 0.0
    k1 = igcf_rhs(surface, u, cone)
    steps = 0
    if convergence_tol is not None and state["deviation"] < convergence_tol:
        trace.converged, trace.convergence_time = True, 0.0
        return trace

    while t < t_final - 1e-14:
        if steps >= max_steps:
            raise FlowError(f"step budget of {max_steps} exhausted at t={t:.6g}", trace=trace)
        step = min(dt, t_final - t)
        if targets:
            step = min(step, targets[0] - t)
        attempt = _dopri_step(surface, u, k1, step, cone)
        reason = None
        if attempt is None:
            reason = "stage left the cone"
        else:
            u_new, error, k_last = attempt
            scale = rtol * np.maximum(1.0, np.abs(u_new))
            error_ratio = float(np.max(np.abs(error) / scale))
            new_margin = float((cone_sign(cone) * snapshot(surface, u_new).curvature).min())
            if error_ratio > 1.0:
                reason = f"local error ratio {error_ratio:.2f}"
            elif new_margin < MARGIN_FRACTION * state["margin"]:
                reason = f"margin fell to {new_margin:.3e}"
        if reason is not None:
            trace.rejections.append({"t": t, "dt": step, "reason": reason})
            logger.debug("flow step rejected at t=%.6g dt=%.3e: %s", t, step, reason)
            dt = 0.5 * step
            if dt < MIN_STEP:
                raise FlowError(f"step size underflow at t={t:.6g}", trace=trace)
            continue

        new_state = _state(surface, u_new, cone)
        predicted = 0.5 * (
            _curvature_rate(surface, u, state["K"], k1) + _curvature_rate(surface, u_new, new_state["K"], k_last)
        )
        observed = (new_state["K"] - state["K"]) / step
        evolution_error = float(np.abs(observed - predicted).max() / max(np.abs(new_state["K"]).max(), 1e-300))

        t = t + step
        steps += 1
        u, state, k1 = u_new, new_state, k_last
        trace.record(t=t, dt=step, curvature_evolution_error=evolution_error,
                     **{k: v for k, v in state.items() if k != "K"})

        landed = bool(targets) and abs(t - targets[0]) <= 1e-12 * max(1.0, t)
        if landed:
            t = targets.pop(0)
        if landed or (not sample_times and steps % max(sample_every, 1) == 0):
            trace.sample_times.append(t)
            trace.snapshots.append(u.copy())

        if convergence_tol is not None and state["deviation"] < convergence_tol:
            trace.converged, trace.convergence_time = True, t
            logger.info("flow converged at t=%.4f (deviation %.2e)", t, state["deviation"])
            break

        growth = MAX_GROWTH if error_ratio == 0.0 else min(MAX_GROWTH, max(1.0, 0.9 * error_ratio ** -0.2))
        dt = step * growth if not landed else max(dt, step)

    if trace.sample_times[-1] != t:
        trace.sample_times.append(t)
        trace.snapshots.append(u.copy())
    if convergence_tol is None:
        trace.converged = state["deviation"] < CONVERGENCE_TOL
        if trace.converged:
            trace.convergence_time = t
    logger.info("flow finished: t=%.4f, %d accepted, %d rejected", t, trace.accepted_steps, len(trace.rejections))
    return trace


# ────────────────────────────────────────────────────────────────────────────
# Monitors
# ────────────────────────────────────────────────────────────────────────────

def _monitor(passed: bool, worst: float, asserted: bool = True, **extra: Any) -> Dict[str, Any]:
    return {"pass": bool(passed) if asserted else None, "worst": worst, "asserted": asserted, **extra}


def flow_monitors(
    trace: FlowTrace,
    tol: Optional[float] = None,
    rtol: float = 1e-7,
    conservation_tol: float = 1e-5,
) -> Dict[str, Any]:
    """
    Check every flow estimate on a finished trace.

    ``tol`` defaults to 10·rtol·√(accepted steps).  Area law and conservation
    of J are asserted on the positive cone and reported on the negative cone.
    """
    if not trace.series["t"]:
        raise ValueError("empty trace")
    steps = max(trace.accepted_steps, 1)
    tol = 10.0 * rtol * math.sqrt(steps) if tol is None else tol
    series = {name: np.asarray(values) for name, values in trace.series.items()}
    t, F, J, area = series["t"], series["F"], series["J"], series["area"]
    F_scale = 1.0 + float(np.abs(F).max())
    monitors: Dict[str, Any] = {}

    increments = np.diff(F)
    worst_increase = float(increments.max()) if increments.size else 0.0
    monitors["F_nonincreasing"] = _monitor(worst_increase <= tol * F_scale, worst_increase)

    if t.size >= 3:
        slopes = np.diff(F) / np.diff(t)
        curvature_terms = np.diff(slopes) * 0.5 * (t[2:] - t[:-2])
        worst_convexity = float(curvature_terms.min())
    else:
        worst_convexity = 0.0
    monitors["F_convexity"] = _monitor(worst_convexity >= -tol * F_scale, worst_convexity)

    K_start = trace.initial_curvature
    K_lo, K_hi = float(K_start.min()), float(K_start.max())
    K_scale = max(abs(K_lo), abs(K_hi))
    chi_term = 2.0 * math.pi * trace.euler_characteristic
    predicted_area = area[0] * np.exp((F[0] - F) / chi_term) if chi_term != 0 else area
    area_error = float(np.max(np.abs(area - predicted_area) / area))
    J_drift = float(np.max(np.abs(J - J[0])))
    J_bound = conservation_tol * (1.0 + abs(J[0]))
    positive = trace.cone == POSITIVE

    if trace.cone == NEGATIVE:
        below = float(K_lo - series["min_K"].min())
        above = float(series["max_K"].max() - K_hi)
        worst = max(below, above)
        monitors["curvature_envelope"] = _monitor(worst <= tol * K_scale, worst, bounds=[K_lo, K_hi])
        u_abs = float(max(abs(series["min_u"].min()), abs(series["max_u"].max())))
        monitors["u_bound"] = _monitor(True, u_abs, asserted=False)
    else:
        growth = series["max_K"] / (K_hi * np.exp(2.0 * t)) - 1.0
        worst_growth = float(growth.max())
        monitors["curvature_growth"] = _monitor(worst_growth <= tol, worst_growth)
        floor = series["min_u"] - (series["min_u"][0] - t)
        worst_floor = float(floor.min())
        monitors["u_lower_bound"] = _monitor(worst_floor >= -tol, worst_floor)

    monitors["area_law"] = _monitor(area_error <= conservation_tol, area_error, asserted=positive)
    monitors["dirichlet_conservation"] = _monitor(J_drift <= J_bound, J_drift, asserted=positive, bound=J_bound)
    evolution = series["curvature_evolution_error"]
    monitors["curvature_evolution"] = _monitor(True, float(np.nanmax(evolution)) if evolution.size else 0.0, asserted=False)
    monitors["convergence"] = _monitor(True, float(series["deviation"][-1]), asserted=False, converged=trace.converged)

    asserted = [m["pass"] for m in monitors.values() if m["asserted"]]
    return {"tol": tol, "monitors": monitors, "pass": all(asserted)}


# ────────────────────────────────────────────────────────────────────────────
# Distance along two flows
# ────────────────────────────────────────────────────────────────────────────

def flow_distance_monotonicity(
    surface: DiscreteSurface,
    u0,
    v0,
    cone: str,
    sample_times: Sequence[float],
    rtol: float = 1e-7,
    intervals: int = 32,
    epsilon_min: float = 1e-3,
    residual_tol: float = 1e-9,
    tol: Optional[float] = None,
    max_workers: int = 4,
) -> Dict[str, Any]:
    """
    d(u(t), v(t)) at each sample time along the flows started at u0 and v0.

    The two flows run concurrently, then the distance solves run
    concurrently.  The series must be nonincreasing within *tol*.
    """
    times = sorted(float(s) for s in sample_times)
    if not times:
        raise ValueError("need at least one sample time")
    t_final = times[-1]

    with ThreadPoolExecutor(max_workers=2) as ex:
        futures = {
            ex.submit(integrate, surface, start, cone, t_final, rtol=rtol, sample_times=times): name
            for name, start in (("u", u0), ("v", v0))
        }
        traces = {futures[fut]: fut.result() for fut in as_completed(futures)}

    def snapshot_at(trace: FlowTrace, s: float) -> np.ndarray:
        index = int(np.argmin(np.abs(np.asarray(trace.sample_times) - s)))
        return trace.snapshots[index]

    pairs = [(snapshot_at(traces["u"], s), snapshot_at(traces["v"], s)) for s in times]
    with ThreadPoolExecutor(max_workers=min(max_workers, len(pairs))) as ex:
        futures = {
            ex.submit(
                solve_geodesic, surface, a, b, cone,
                intervals=intervals, epsilon_min=epsilon_min, residual_tol=residual_tol,
            ): i
            for i, (a, b) in enumerate(pairs)
        }
        reports = {}
        for fut in as_completed(futures):
            reports[futures[fut]] = fut.result()

    raw = [reports[i].distance for i in range(len(times))]
    distances = [reports[i].extrapolated_distance for i in range(len(times))]
    scale = max(distances) if distances else 0.0
    tol = 5e-3 * (1.0 + scale) if tol is None else tol
    increases = np.diff(distances)
    worst = float(increases.max()) if increases.size else 0.0
    return {
        "check": "flow_distance_monotonicity",
        "cone": cone,
        "times": times,
        "distances": distances,
        "distances_at_epsilon_min": raw,
        "worst_increase": worst,
        "tol": tol,
        "pass": bool(worst <= tol),
    }
