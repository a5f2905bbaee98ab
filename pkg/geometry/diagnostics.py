"""
Structure checks on solver and flow outputs.

Each check returns a JSON-ready report ``{"check", "inputs", "margins"...,
"pass"}``; nothing here raises on a failed inequality.  Checks that need
several distances run their geodesic solves concurrently.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .conformal import (
    POSITIVE,
    curvature,
    curvature_density,
    energy_differential,
    grad_F,
    normalized_energy,
    require_admissible,
    sectional_curvature,
    snapshot,
    weighted_inner,
)
from .geodesic_solver import SolveReport, solve_geodesic
from .path import TimePath, energy_density, second_difference, velocity
from .surface import DiscreteSurface, as_vertex_field, face_average, face_gradients
from .utils import array_digest

logger = logging.getLogger(__name__)

GAUSS_BONNET_RTOL = 1e-10
RIESZ_STEP = 1e-5
RIESZ_TOL = 1e-5
METRIC_TOL_FACTOR = 5e-3
# C in the audit tolerance C·(ε‖f0‖∞ + h²); set on the shift geodesic
AUDIT_CONSTANT = 10.0


def _distance_tol(distances: Sequence[float], squared: bool = False) -> float:
    scale = 1.0 + max(distances, default=0.0)
    return METRIC_TOL_FACTOR * (scale ** 2 if squared else scale)


def _solve_many(
    surface: DiscreteSurface,
    pairs: Sequence[Tuple[np.ndarray, np.ndarray]],
    cone: str,
    solver_options: Dict[str, Any],
    max_workers: int = 4,
) -> List[SolveReport]:
    """Run independent geodesic solves concurrently, preserving input order."""
    reports: Dict[int, SolveReport] = {}
    with ThreadPoolExecutor(max_workers=max(1, min(max_workers, len(pairs)))) as ex:
        futures = {
            ex.submit(solve_geodesic, surface, a, b, cone, **solver_options): i
            for i, (a, b) in enumerate(pairs)
        }
        for fut in as_completed(futures):
            reports[futures[fut]] = fut.result()
    return [reports[i] for i in range(len(pairs))]


# ────────────────────────────────────────────────────────────────────────────
# Background and pointwise checks
# ────────────────────────────────────────────────────────────────────────────

def gauss_bonnet_check(surface: DiscreteSurface, fields: Sequence[np.ndarray] = ()) -> Dict[str, Any]:
    """Σ a K0 = 2πχ, and Σ K_u e^{2u} a = 2πχ for each of *fields*."""
    target = surface.total_curvature
    scale = max(abs(target), 1.0)
    background = abs(float(np.dot(surface.area_masses, surface.background_curvature)) - target) / scale
    conformal = [abs(float(np.dot(curvature(surface, u), np.exp(2 * u) * surface.area_masses)) - target) / scale
                 for u in fields]
    worst = max([background, *conformal])
    return {
        "check": "gaussbonnet",
        "inputs": {"surface": surface.summary(), "fields": len(fields)},
        "background_error": background,
        "worst_conformal_error": max(conformal, default=0.0),
        "tol": GAUSS_BONNET_RTOL,
        "pass": bool(worst <= GAUSS_BONNET_RTOL),
    }


def gradient_check(
    surface: DiscreteSurface,
    u,
    cone: str,
    directions: Sequence[np.ndarray],
    step: float = RIESZ_STEP,
) -> Dict[str, Any]:
    """⟨⟨grad_F, v⟩⟩_u against central differences of F along each v."""
    u = as_vertex_field(surface, u, "u")
    gradient = grad_F(surface, u, cone)
    worst = 0.0
    for v in directions:
        riesz = weighted_inner(surface, u, gradient, v, cone)
        fd = (normalized_energy(surface, u + step * v) - normalized_energy(surface, u - step * v)) / (2 * step)
        dF = energy_differential(surface, u, v)
        worst = max(worst, abs(riesz - fd) / (1.0 + abs(dF)))
    return {
        "check": "gradF",
        "inputs": {"u": array_digest(u), "directions": len(directions)},
        "worst_error": worst,
        "tol": RIESZ_TOL,
        "pass": bool(worst <= RIESZ_TOL),
    }


def sectional_check(
    surface: DiscreteSurface,
    u,
    cone: str,
    pairs: Sequence[Tuple[np.ndarray, np.ndarray]],
    tol: float = 1e-12,
) -> Dict[str, Any]:
    """Sectional curvature of each (φ, ψ) plane is ≤ tol."""
    values = [sectional_curvature(surface, u, phi, psi, cone) for phi, psi in pairs]
    worst = max(values, default=0.0)
    return {
        "check": "sectional",
        "inputs": {"u": array_digest(u), "pairs": len(pairs), "cone": cone},
        "max_value": worst,
        "tol": tol,
        "pass": bool(worst <= tol),
    }


# ────────────────────────────────────────────────────────────────────────────
# Metric-space checks
# ────────────────────────────────────────────────────────────────────────────

def nondegeneracy_bound(surface: DiscreteSurface, u0, u1) -> float:
    """
    Lower bound for d(u0, u1) on the positive cone:
    (2πχ)^{-1/2} max{Σ_{u0>u1}(u0−u1) K_{u1} dA_{u1}, Σ_{u1>u0}(u1−u0) K_{u0} dA_{u0}}.
    """
    u0 = as_vertex_field(surface, u0, "u0")
    u1 = as_vertex_field(surface, u1, "u1")
    require_admissible(surface, u0, POSITIVE)
    require_admissible(surface, u1, POSITIVE)
    # K_u e^{2u} a = (K0 − Δ0 u) a
    weight0 = curvature_density(surface, u0) * surface.area_masses
    weight1 = curvature_density(surface, u1) * surface.area_masses
    diff = u0 - u1
    first = float(np.sum(np.where(diff > 0, diff, 0.0) * weight1))
    second = float(np.sum(np.where(diff < 0, -diff, 0.0) * weight0))
    return max(first, second) / math.sqrt(surface.total_curvature)


def triangle_check(
    surface: DiscreteSurface,
    a,
    b,
    c,
    cone: str = POSITIVE,
    tol: Optional[float] = None,
    **solver_options: Any,
) -> Dict[str, Any]:
    """Each of d(A,B), d(B,C), d(A,C) is at most the sum of the other two plus tol."""
    a, b, c = (as_vertex_field(surface, x) for x in (a, b, c))
    ab, bc, ac = (r.extrapolated_distance for r in _solve_many(surface, [(a, b), (b, c), (a, c)], cone, solver_options))
    tol = _distance_tol([ab, bc, ac]) if tol is None else tol
    slacks = {
        "ab": bc + ac - ab,
        "bc": ab + ac - bc,
        "ac": ab + bc - ac,
    }
    worst = min(slacks.values())
    return {
        "check": "triangle",
        "inputs": {"a": array_digest(a), "b": array_digest(b), "c": array_digest(c), "cone": cone},
        "distances": {"ab": ab, "bc": bc, "ac": ac},
        "slacks": slacks,
        "worst_slack": worst,
        "tol": tol,
        "pass": bool(worst >= -tol),
    }


def _grid_for(s_values: Sequence[float], intervals: int) -> int:
    """Smallest N ≥ *intervals* whose grid contains every s exactly."""
    denominators = [Fraction(float(s)).limit_denominator(1000).denominator for s in s_values]
    lcm = 1
    for d in denominators:
        lcm = lcm * d // math.gcd(lcm, d)
    return int(math.ceil(intervals / lcm) * lcm)


def npc_check(
    surface: DiscreteSurface,
    a,
    b,
    c,
    s_values: Sequence[float] = (0.25, 0.5, 0.75),
    cone: str = POSITIVE,
    intervals: int = 64,
    tol: Optional[float] = None,
    **solver_options: Any,
) -> Dict[str, Any]:
    """
    d²(A, BC(s)) ≤ (1−s) d²(A,B) + s d²(A,C) − s(1−s) d²(B,C) + tol,
    with BC(s) read off the grid node of the B→C geodesic.
    """
    a, b, c = (as_vertex_field(surface, x) for x in (a, b, c))
    if any(not 0.0 <= s <= 1.0 for s in s_values):
        raise ValueError("s values must lie in [0, 1]")
    grid = _grid_for(s_values, intervals)
    options = dict(solver_options, intervals=grid)
    ab, ac, bc_report = _solve_many(surface, [(a, b), (a, c), (b, c)], cone, options)
    d_ab, d_ac, d_bc = ab.extrapolated_distance, ac.extrapolated_distance, bc_report.extrapolated_distance
    midpoints = [bc_report.path.at(s) for s in s_values]
    to_mid = _solve_many(surface, [(a, m) for m in midpoints], cone, options)

    tol = _distance_tol([d_ab, d_ac, d_bc], squared=True) if tol is None else tol
    rows = []
    for s, report in zip(s_values, to_mid):
        lhs = report.extrapolated_distance ** 2
        rhs = (1 - s) * d_ab ** 2 + s * d_ac ** 2 - s * (1 - s) * d_bc ** 2
        rows.append({"s": s, "lhs": lhs, "rhs": rhs, "slack": rhs - lhs})
    worst = min(row["slack"] for row in rows)
    return {
        "check": "npc",
        "inputs": {"a": array_digest(a), "b": array_digest(b), "c": array_digest(c), "cone": cone, "N": grid},
        "distances": {"ab": d_ab, "ac": d_ac, "bc": d_bc},
        "samples": rows,
        "worst_slack": worst,
        "tol": tol,
        "pass": bool(worst >= -tol),
    }


def symmetry_check(
    surface: DiscreteSurface,
    a,
    b,
    cone: str = POSITIVE,
    tol: Optional[float] = None,
    **solver_options: Any,
) -> Dict[str, Any]:
    """d(A,B) and d(B,A), solved independently, agree."""
    a, b = as_vertex_field(surface, a), as_vertex_field(surface, b)
    forward, backward = _solve_many(surface, [(a, b), (b, a)], cone, solver_options, max_workers=2)
    gap = abs(forward.extrapolated_distance - backward.extrapolated_distance)
    tol = 1e-6 * (1.0 + forward.extrapolated_distance) if tol is None else tol
    return {
        "check": "symmetry",
        "inputs": {"a": array_digest(a), "b": array_digest(b), "cone": cone},
        "distances": [forward.extrapolated_distance, backward.extrapolated_distance],
        "gap": gap,
        "tol": tol,
        "pass": bool(gap <= tol),
    }


# ────────────────────────────────────────────────────────────────────────────
# Andrews inequality and geodesic audit
# ────────────────────────────────────────────────────────────────────────────

def andrews_gap(surface: DiscreteSurface, u, phi) -> float:
    """
    ∫|∇_u φ|²_u / K_u dA_u − 2∫φ² dA_u for φ projected to dA_u-mean zero;
    nonnegative in the continuum, zero for first harmonics on the round sphere.
    """
    u = as_vertex_field(surface, u, "u")
    phi = as_vertex_field(surface, phi, "phi")
    require_admissible(surface, u, POSITIVE)
    snap = snapshot(surface, u)
    phi = phi - np.dot(phi, snap.area_form) / snap.total_area
    grads = face_gradients(surface, phi)
    # A_f^u e^{-2u}|∇0φ|² = A_f |∇0φ|² per face
    dirichlet = float(np.sum(surface.face_areas * np.einsum("ij,ij->i", grads, grads) / face_average(surface, snap.curvature)))
    return dirichlet - 2.0 * float(np.dot(phi * phi, snap.area_form))


def geodesic_audit(
    surface: DiscreteSurface,
    path: TimePath,
    epsilon: float = 0.0,
    forcing_scale: float = 1.0,
    audit_constant: float = AUDIT_CONSTANT,
) -> Dict[str, Any]:
    """
    Invariants of a (regularized) geodesic: constant energy density,
    constant sup/inf of u̇, u_tt ≤ 0 and convexity of F in t, each within
    tol = C·(ε‖f0‖∞ + h²) with h = 1/N.

    The tolerance is absolute: a path bent by more than O(ε + h²) fails.
    """
    ut = velocity(path)
    density = energy_density(surface, path)
    utt = second_difference(path)
    F = np.array([normalized_energy(surface, u) for u in path.nodes])
    h = path.step
    tol = audit_constant * (epsilon * forcing_scale + h * h)

    drifts = {
        "energy_density": float(density.max() - density.min()),
        "sup_velocity": float(np.ptp(ut.max(axis=1))),
        "inf_velocity": float(np.ptp(ut.min(axis=1))),
    }
    max_utt = float(utt.max())
    F_second = (F[2:] - 2.0 * F[1:-1] + F[:-2]) / path.step ** 2
    min_F_second = float(F_second.min())
    F_scale = 1.0 + float(np.abs(F).max())
    checks = {
        "energy_density": drifts["energy_density"] <= tol,
        "sup_velocity": drifts["sup_velocity"] <= tol,
        "inf_velocity": drifts["inf_velocity"] <= tol,
        "utt_sign": max_utt <= tol,
        "F_convexity": min_F_second >= -tol * F_scale,
    }
    return {
        "check": "geodesic_audit",
        "inputs": {
            "path": array_digest(path.nodes),
            "epsilon": epsilon,
            "forcing_scale": forcing_scale,
            "N": path.intervals,
            "audit_constant": audit_constant,
        },
        "tol": tol,
        "drifts": drifts,
        "max_utt": max_utt,
        "min_F_second_difference": min_F_second,
        "checks": {name: bool(ok) for name, ok in checks.items()},
        "pass": bool(all(checks.values())),
    }


def andrews_check(
    surface: DiscreteSurface,
    u,
    fields: Sequence[np.ndarray],
    floor: float = -0.02,
    equality_tol: Optional[float] = None,
) -> Dict[str, Any]:
    """
    andrews_gap ≥ floor for every field; on the round sphere also the
    equality case |gap(ξ)| ≤ equality_tol for the height function.

    equality_tol defaults to max(0.1, 8h²), h the mean edge length.
    """
    u = as_vertex_field(surface, u, "u")
    gaps = [andrews_gap(surface, u, phi) for phi in fields]
    worst = min(gaps, default=0.0)
    report: Dict[str, Any] = {
        "check": "andrews",
        "inputs": {"u": array_digest(u), "fields": len(fields)},
        "worst_gap": worst,
        "floor": floor,
    }
    passed = worst >= floor
    if surface.curvature_mode == "sphere" and surface.positions is not None and not np.any(u):
        equality = andrews_gap(surface, u, surface.positions[:, 2])
        if equality_tol is None:
            equality_tol = max(0.1, 8.0 * surface.mean_edge_length ** 2)
        report["equality_gap"] = equality
        report["equality_tol"] = equality_tol
        passed = passed and abs(equality) <= equality_tol
    report["pass"] = bool(passed)
    return report
