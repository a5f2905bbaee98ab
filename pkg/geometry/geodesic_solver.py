"""
geodesic_solver.py
───────────────────────────────────────────────────────────────────────────────
Regularized geodesic boundary value problem

    G_f(u) = u_tt (K0 − Δ0 u) + |∇0 u̇|² + f = 0,   u(·,0) = u0,  u(·,1) = u1,

solved as one space–time Newton system over the interior time nodes, with
ε-continuation f = ε f0 down to ε_min.  Negative-cone problems are solved in
the positive formulation for w = −u against the background density −K0.

Internally every routine takes ``kappa0`` (the background density K̃0 of the
formulation being solved) instead of building a second surface.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as sparse_linalg

from .conformal import POSITIVE, cone_sign, require_admissible
from .exceptions import FieldShapeError, GeometryError, InadmissibleError, SolverError
from .path import TimePath, path_length
from .surface import DiscreteSurface, as_vertex_field, gradient_inner_matrix, gradient_norm_sq

logger = logging.getLogger(__name__)

# ────────────────────────────────────────────────────────────────────────────
# Constants
# ────────────────────────────────────────────────────────────────────────────

PLAN_MARGIN: float = 1.0
LINEAR_RTOL: float = 1e-10
MIN_LINE_SEARCH_STEP: float = 1e-12
MAX_NEWTON_ITERATIONS: int = 50
DEFAULT_RESIDUAL_TOL: float = 1e-9
COMPARISON_TOL: float = 1e-7


# ────────────────────────────────────────────────────────────────────────────
# Data types
# ────────────────────────────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class RegularizationPlan:
    """
    ``f0`` holds the forcing at the interior nodes t_k = k/N, k = 1..N−1
    (shape (N−1, V)); it is affine in t and bounded below by ``margin``.
    """

    A0: float
    f0: np.ndarray
    schedule: Tuple[float, ...]
    margin: float
    delta0: float
    kappa0: np.ndarray

    @property
    def intervals(self) -> int:
        return self.f0.shape[0] + 1

    def forcing(self, epsilon: float) -> np.ndarray:
        return epsilon * self.f0

    def summary(self) -> Dict[str, Any]:
        return {
            "A0": self.A0,
            "delta0": self.delta0,
            "margin": self.margin,
            "min_f0": float(self.f0.min()),
            "schedule": list(self.schedule),
            "N": self.intervals,
        }


@dataclass(frozen=True)
class NewtonResult:
    path: TimePath
    iterations: int
    residual: float
    margin: float
    history: Tuple[float, ...]


@dataclass(frozen=True)
class StageRecord:
    epsilon: float
    iterations: int
    residual: float
    margin: float
    distance: float

    def as_dict(self) -> Dict[str, float]:
        return {
            "epsilon": self.epsilon,
            "newton_iterations": self.iterations,
            "residual": self.residual,
            "margin": self.margin,
            "distance": self.distance,
        }


@dataclass(eq=False)
class SolveReport:
    """Certificate of one continuation run; ``path`` is in the caller's cone."""

    path: TimePath
    plan: RegularizationPlan
    stages: List[StageRecord] = field(default_factory=list)
    ordering_gap: float = 0.0

    @property
    def epsilon_reached(self) -> float:
        return self.stages[-1].epsilon

    @property
    def newton_iterations(self) -> List[int]:
        return [stage.iterations for stage in self.stages]

    @property
    def residual(self) -> float:
        return self.stages[-1].residual

    @property
    def margin(self) -> float:
        return self.stages[-1].margin

    @property
    def distance(self) -> float:
        return self.stages[-1].distance

    @property
    def extrapolated_distance(self) -> float:
        """Linear extrapolation of d(ε) to ε = 0 from the last two stages."""
        if len(self.stages) < 2:
            return self.distance
        first, last = self.stages[-2], self.stages[-1]
        slope = (first.distance - last.distance) / (first.epsilon - last.epsilon)
        return max(last.distance - slope * last.epsilon, 0.0)

    @property
    def cauchy_ratios(self) -> List[float]:
        """|d(ε_j) − d(ε_{j+1})| / |d(ε_{j+1}) − d(ε_{j+2})| over the schedule."""
        gaps = [abs(a.distance - b.distance) for a, b in zip(self.stages, self.stages[1:])]
        return [g0 / g1 if g1 > 0 else float("inf") for g0, g1 in zip(gaps, gaps[1:])]

    def summary(self) -> Dict[str, Any]:
        return {
            "cone": self.path.cone,
            "epsilon_reached": self.epsilon_reached,
            "newton_iterations": self.newton_iterations,
            "residual": self.residual,
            "margin": self.margin,
            "distance": self.distance,
            "extrapolated_distance": self.extrapolated_distance,
            "ordering_gap": self.ordering_gap,
            "cauchy_ratios": self.cauchy_ratios,
            "plan": self.plan.summary(),
            "stages": [stage.as_dict() for stage in self.stages],
        }


# ────────────────────────────────────────────────────────────────────────────
# Operator pieces
# ────────────────────────────────────────────────────────────────────────────

def _kappa0(surface: DiscreteSurface, kappa0: Optional[np.ndarray]) -> np.ndarray:
    return surface.background_curvature if kappa0 is None else np.asarray(kappa0, dtype=float)


def _densities(surface: DiscreteSurface, nodes: np.ndarray, kappa0: np.ndarray) -> np.ndarray:
    return kappa0[None, :] + (surface.stiffness @ nodes.T).T / surface.area_masses[None, :]


def _interior_kinematics(nodes: np.ndarray, step: float) -> Tuple[np.ndarray, np.ndarray]:
    """Second difference and central first difference at interior nodes."""
    utt = (nodes[2:] - 2.0 * nodes[1:-1] + nodes[:-2]) / step ** 2
    ut = (nodes[2:] - nodes[:-2]) / (2.0 * step)
    return utt, ut


def _lifted_norm_sq(surface: DiscreteSurface, fields: np.ndarray) -> np.ndarray:
    grads = (surface.gradient_operator @ fields.T).T.reshape(fields.shape[0], surface.face_count, 3)
    return (surface.vertex_lift @ np.einsum("kfc,kfc->kf", grads, grads).T).T


def _forcing(path: TimePath, f) -> np.ndarray:
    shape = (path.intervals - 1, path.vertex_count)
    f = np.asarray(f, dtype=float)
    if f.ndim == 0:
        return np.full(shape, float(f))
    if f.shape != shape:
        raise FieldShapeError(f"forcing has shape {f.shape}, expected {shape}")
    return f


def _apply_operator(surface: DiscreteSurface, nodes: np.ndarray, f: np.ndarray, kappa0: np.ndarray) -> np.ndarray:
    step = 1.0 / (nodes.shape[0] - 1)
    utt, ut = _interior_kinematics(nodes, step)
    kappa = _densities(surface, nodes[1:-1], kappa0)
    return utt * kappa + _lifted_norm_sq(surface, ut) + f


def geodesic_operator(surface: DiscreteSurface, path: TimePath, f, kappa0: Optional[np.ndarray] = None) -> np.ndarray:
    """G_f(u) at interior nodes, shape (N−1, V)."""
    return _apply_operator(surface, path.nodes, _forcing(path, f), _kappa0(surface, kappa0))


def linearized_apply(
    surface: DiscreteSurface, path: TimePath, phi, kappa0: Optional[np.ndarray] = None
) -> np.ndarray:
    """
    L_u φ = φ_tt (K0 − Δ0 u) − u_tt Δ0 φ + 2⟨∇0 u̇, ∇0 φ̇⟩ at interior nodes.

    *phi* is a full (N+1, V) space–time field that must vanish on the two
    boundary rows.
    """
    phi = np.asarray(phi, dtype=float)
    if phi.shape != path.nodes.shape:
        raise FieldShapeError(f"phi has shape {phi.shape}, expected {path.nodes.shape}")
    if np.any(phi[0] != 0.0) or np.any(phi[-1] != 0.0):
        raise ValueError("phi must vanish at t = 0 and t = 1")
    kappa0 = _kappa0(surface, kappa0)
    step = path.step
    utt, ut = _interior_kinematics(path.nodes, step)
    ptt, pt = _interior_kinematics(phi, step)
    kappa = _densities(surface, path.nodes[1:-1], kappa0)
    neg_laplacian = (surface.stiffness @ phi[1:-1].T).T / surface.area_masses[None, :]
    grads_u = (surface.gradient_operator @ ut.T).T.reshape(ut.shape[0], surface.face_count, 3)
    grads_p = (surface.gradient_operator @ pt.T).T.reshape(pt.shape[0], surface.face_count, 3)
    cross = (surface.vertex_lift @ np.einsum("kfc,kfc->kf", grads_u, grads_p).T).T
    return ptt * kappa + utt * neg_laplacian + 2.0 * cross


def linearization_matrix(surface: DiscreteSurface, path: TimePath, kappa0: Optional[np.ndarray] = None) -> sparse.csr_matrix:
    """
    Jacobian of G with respect to the interior unknowns, ordered node-major.

    Diagonal blocks −(2/h²) diag(κ_k) + diag(u_tt,k) a⁻¹W, off-diagonal
    blocks diag(κ_k)/h² ± C(u̇_k)/h.
    """
    kappa0 = _kappa0(surface, kappa0)
    nodes = path.nodes
    step = path.step
    interior = path.intervals - 1
    utt, ut = _interior_kinematics(nodes, step)
    kappa = _densities(surface, nodes[1:-1], kappa0)
    scaled_stiffness = sparse.diags(1.0 / surface.area_masses) @ surface.stiffness

    blocks: List[List[Optional[sparse.spmatrix]]] = [[None] * interior for _ in range(interior)]
    for j in range(interior):
        blocks[j][j] = sparse.diags(-2.0 * kappa[j] / step ** 2) + sparse.diags(utt[j]) @ scaled_stiffness
        if interior == 1:
            continue
        coupling = gradient_inner_matrix(surface, ut[j]) / step
        neighbour = sparse.diags(kappa[j] / step ** 2)
        if j + 1 < interior:
            blocks[j][j + 1] = neighbour + coupling
        if j > 0:
            blocks[j][j - 1] = neighbour - coupling
    return sparse.bmat(blocks, format="csr")


# ────────────────────────────────────────────────────────────────────────────
# Linear algebra
# ────────────────────────────────────────────────────────────────────────────

def _relative_residual(matrix: sparse.spmatrix, x: np.ndarray, rhs: np.ndarray) -> float:
    scale = float(np.linalg.norm(rhs))
    return float(np.linalg.norm(matrix @ x - rhs)) / (scale if scale > 0 else 1.0)


def solve_linear(matrix: sparse.spmatrix, rhs: np.ndarray) -> np.ndarray:
    """
    Sparse LU with one refinement step; GMRES with an incomplete-LU
    preconditioner when the factorization fails or is inaccurate.
    """
    matrix = matrix.tocsc()
    x: Optional[np.ndarray] = None
    try:
        lu = sparse_linalg.splu(matrix, permc_spec="COLAMD")
        x = lu.solve(rhs)
        if _relative_residual(matrix, x, rhs) > LINEAR_RTOL:
            x = x + lu.solve(rhs - matrix @ x)
    except RuntimeError as exc:
        logger.warning("sparse LU failed (%s); falling back to GMRES", exc)
    if x is not None and np.all(np.isfinite(x)) and _relative_residual(matrix, x, rhs) <= LINEAR_RTOL:
        return x

    ilu = sparse_linalg.spilu(matrix, drop_tol=1e-6, fill_factor=20)
    preconditioner = sparse_linalg.LinearOperator(matrix.shape, ilu.solve)
    x, info = sparse_linalg.gmres(matrix, rhs, M=preconditioner, rtol=LINEAR_RTOL * 0.1, restart=200, maxiter=50)
    residual = _relative_residual(matrix, x, rhs)
    if info != 0 or residual > LINEAR_RTOL:
        raise SolverError(f"linear solve stalled at relative residual {residual:.2e}")
    return x


# ────────────────────────────────────────────────────────────────────────────
# Plan and comparison function
# ────────────────────────────────────────────────────────────────────────────

def epsilon_schedule(epsilon_min: float) -> Tuple[float, ...]:
    """1, ½, ¼, … while above ε_min, then ε_min itself."""
    if not 0.0 < epsilon_min <= 1.0:
        raise ValueError(f"epsilon_min must lie in (0, 1], got {epsilon_min}")
    schedule = []
    epsilon = 1.0
    while epsilon > epsilon_min:
        schedule.append(epsilon)
        epsilon *= 0.5
    schedule.append(float(epsilon_min))
    return tuple(schedule)


def build_plan(
    surface: DiscreteSurface,
    u0,
    u1,
    epsilon_min: float,
    intervals: int,
    margin: float = PLAN_MARGIN,
    kappa0: Optional[np.ndarray] = None,
) -> RegularizationPlan:
    """
    Forcing f0 = 2A0[(1−t)κ(u0) + tκ(u1)] − |∇0(u1 − u0)|² with
    A0 = (max|∇0(u1 − u0)|² + margin) / (2δ0), δ0 = min κ at both ends.
    """
    kappa0 = _kappa0(surface, kappa0)
    u0 = as_vertex_field(surface, u0, "u0")
    u1 = as_vertex_field(surface, u1, "u1")
    if intervals < 2:
        raise ValueError(f"need at least 2 time intervals, got {intervals}")
    ends = _densities(surface, np.vstack([u0, u1]), kappa0)
    delta0 = float(ends.min())
    if delta0 <= 0.0:
        raise InadmissibleError(f"boundary data are not admissible (δ0 = {delta0:.3e})", margin=delta0)
    spread = gradient_norm_sq(surface, u1 - u0)
    A0 = (float(spread.max()) + margin) / (2.0 * delta0)
    t = np.arange(1, intervals)[:, None] / intervals
    f0 = 2.0 * A0 * ((1.0 - t) * ends[0][None, :] + t * ends[1][None, :]) - spread[None, :]
    if f0.min() < margin * (1.0 - 1e-12):
        raise GeometryError(f"forcing floor violated: min f0 = {f0.min():.3e} < {margin}")
    f0.setflags(write=False)
    return RegularizationPlan(
        A0=A0,
        f0=f0,
        schedule=epsilon_schedule(epsilon_min),
        margin=margin,
        delta0=delta0,
        kappa0=kappa0,
    )


def comparison_path(plan: RegularizationPlan, u0, u1, cone: str = POSITIVE) -> TimePath:
    """ũ = (1−t)u0 + t u1 + A0 t(1−t); an exact solution of G_{f0}(ũ) = 0."""
    t = np.linspace(0.0, 1.0, plan.intervals + 1)[:, None]
    u0 = np.asarray(u0, dtype=float)[None, :]
    u1 = np.asarray(u1, dtype=float)[None, :]
    nodes = (1.0 - t) * u0 + t * u1 + plan.A0 * t * (1.0 - t)
    nodes[0], nodes[-1] = u0[0], u1[0]
    return TimePath(nodes, cone)


# ────────────────────────────────────────────────────────────────────────────
# Newton
# ────────────────────────────────────────────────────────────────────────────

def newton_solve(
    surface: DiscreteSurface,
    u0,
    u1,
    f,
    init: TimePath,
    residual_tol: float = DEFAULT_RESIDUAL_TOL,
    max_iterations: int = MAX_NEWTON_ITERATIONS,
    kappa0: Optional[np.ndarray] = None,
) -> NewtonResult:
    """
    Damped Newton for G_f(u) = 0 with the boundary rows held at u0, u1.

    Each step solves L_u δ = −G_f(u) over all interior unknowns at once and
    halves the step until the path stays admissible and the residual
    ∞-norm decreases.

    Raises
    ------
    SolverError
        Line-search failure, inadmissible start or iteration cap; ``best``
        carries the iterate with the smallest residual.
    """
    kappa0 = _kappa0(surface, kappa0)
    u0 = as_vertex_field(surface, u0, "u0")
    u1 = as_vertex_field(surface, u1, "u1")
    f = _forcing(init, f)
    if not (np.allclose(init.nodes[0], u0, rtol=0, atol=1e-12) and np.allclose(init.nodes[-1], u1, rtol=0, atol=1e-12)):
        raise ValueError("initial path does not match the boundary data")
    nodes = np.array(init.nodes)
    nodes[0], nodes[-1] = u0, u1

    def margin_of(candidate: np.ndarray) -> float:
        return float(_densities(surface, candidate[1:-1], kappa0).min())

    margin = margin_of(nodes)
    if margin <= 0.0:
        raise SolverError(f"initial path is not admissible (margin {margin:.3e})", best=init)
    residual = _apply_operator(surface, nodes, f, kappa0)
    norm = float(np.abs(residual).max())
    history = [norm]
    iterations = 0
    logger.debug("newton start: residual %.3e margin %.3e", norm, margin)

    while norm > residual_tol:
        if iterations >= max_iterations:
            raise SolverError(
                f"Newton did not converge in {max_iterations} iterations (residual {norm:.3e})",
                best=init.with_nodes(nodes),
                diagnostics={"history": history, "margin": margin},
            )
        jacobian = linearization_matrix(surface, init.with_nodes(nodes), kappa0)
        delta = solve_linear(jacobian, -residual.ravel()).reshape(residual.shape)
        step = 1.0
        while True:
            trial = np.array(nodes)
            trial[1:-1] += step * delta
            trial_margin = margin_of(trial)
            if trial_margin > 0.0:
                trial_residual = _apply_operator(surface, trial, f, kappa0)
                trial_norm = float(np.abs(trial_residual).max())
                if trial_norm < norm or trial_norm <= residual_tol:
                    break
            step *= 0.5
            if step < MIN_LINE_SEARCH_STEP:
                raise SolverError(
                    f"line search failed at residual {norm:.3e}",
                    best=init.with_nodes(nodes),
                    diagnostics={"history": history, "margin": margin},
                )
        nodes, residual, norm, margin = trial, trial_residual, trial_norm, trial_margin
        iterations += 1
        history.append(norm)
        logger.debug("newton iteration %d: step %.3g residual %.3e margin %.3e", iterations, step, norm, margin)

    return NewtonResult(
        path=init.with_nodes(nodes),
        iterations=iterations,
        residual=norm,
        margin=margin,
        history=tuple(history),
    )


# ────────────────────────────────────────────────────────────────────────────
# Continuation
# ────────────────────────────────────────────────────────────────────────────

def solve_geodesic(
    surface: DiscreteSurface,
    u0,
    u1,
    cone: str = POSITIVE,
    intervals: int = 64,
    epsilon_min: float = 1e-3,
    residual_tol: float = DEFAULT_RESIDUAL_TOL,
    max_iterations: int = MAX_NEWTON_ITERATIONS,
) -> SolveReport:
    """
    Regularizable geodesic between u0 and u1 and the induced distance.

    Stages run over ε = 1, ½, …, ε_min, each warm-started from the previous
    solution; the first stage starts from the exact comparison path.  On the
    negative cone the problem is solved for w = −u against −K0.
    """
    sign = cone_sign(cone)
    u0 = as_vertex_field(surface, u0, "u0")
    u1 = as_vertex_field(surface, u1, "u1")
    require_admissible(surface, u0, cone)
    require_admissible(surface, u1, cone)
    kappa0 = sign * surface.background_curvature
    w0, w1 = sign * u0, sign * u1

    plan = build_plan(surface, w0, w1, epsilon_min, intervals, kappa0=kappa0)
    current = comparison_path(plan, w0, w1)
    report: Optional[SolveReport] = None
    ordering_gap = float("inf")

    for epsilon in plan.schedule:
        try:
            result = newton_solve(
                surface, w0, w1, plan.forcing(epsilon), current,
                residual_tol=residual_tol, max_iterations=max_iterations, kappa0=kappa0,
            )
        except SolverError as exc:
            logger.warning("continuation stage ε=%.4g failed: %s", epsilon, exc)
            raise SolverError(
                f"continuation failed at ε={epsilon:.4g}: {exc}",
                best=exc.best,
                report=report,
                diagnostics=exc.diagnostics,
            ) from exc
        if report is not None:
            # boundary rows are fixed at u0, u1
            ordering_gap = min(ordering_gap, float((current.nodes[1:-1] - result.path.nodes[1:-1]).min()))
        current = result.path
        path = TimePath(sign * current.nodes, cone)
        stage = StageRecord(
            epsilon=epsilon,
            iterations=result.iterations,
            residual=result.residual,
            margin=result.margin,
            distance=path_length(surface, path),
        )
        logger.info(
            "stage ε=%.4g: %d Newton steps, residual %.2e, distance %.6f",
            epsilon, stage.iterations, stage.residual, stage.distance,
        )
        if report is None:
            report = SolveReport(path=path, plan=plan)
        report.path = path
        report.stages.append(stage)

    assert report is not None
    report.ordering_gap = 0.0 if ordering_gap == float("inf") else ordering_gap
    return report


def comparison_check(
    surface: DiscreteSurface,
    path_a: TimePath,
    f_a,
    path_b: TimePath,
    f_b,
    tol: float = COMPARISON_TOL,
) -> Dict[str, Any]:
    """
    Ordering of two solutions sharing boundary data with f_a ≤ f_b.

    The larger forcing bends the path further up in t, so the check asserts
    u_b ≥ u_a − tol everywhere.  Returns a report with the worst gap.
    """
    if path_a.nodes.shape != path_b.nodes.shape:
        raise FieldShapeError("paths have different shapes")
    if not (np.array_equal(path_a.nodes[0], path_b.nodes[0]) and np.array_equal(path_a.nodes[-1], path_b.nodes[-1])):
        raise ValueError("paths do not share boundary data")
    f_a = _forcing(path_a, f_a)
    f_b = _forcing(path_b, f_b)
    if np.any(f_a > f_b):
        raise ValueError("comparison requires f_a ≤ f_b pointwise")
    gap = float((path_b.nodes - path_a.nodes).min())
    return {"check": "comparison", "worst_gap": gap, "tol": tol, "pass": bool(gap >= -tol)}
