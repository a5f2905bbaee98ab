"""
Discrete paths t ↦ u(·, t) in a cone on the uniform grid t_k = k/N.

Time derivatives are second order everywhere (central differences inside,
one-sided three-point stencils at the ends) and time integrals use the
trapezoid rule, so every quadrature here is exact for data quadratic in t.
"""
from __future__ import annotations

import logging
import pathlib
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional, Union

import numpy as np

from .conformal import CONES, POSITIVE, UNCONSTRAINED, cone_sign
from .exceptions import FieldShapeError, InadmissibleError
from .surface import DiscreteSurface
from .utils import load_csv_matrix, save_csv

logger = logging.getLogger(__name__)

MIN_INTERVALS = 2


@dataclass(frozen=True, eq=False)
class TimePath:
    """
    ``nodes[k]`` is the conformal factor at t_k = k/N; all nodes share one cone.
    """

    nodes: np.ndarray
    cone: str = POSITIVE

    def __post_init__(self) -> None:
        nodes = np.array(self.nodes, dtype=float)
        if nodes.ndim != 2:
            raise FieldShapeError(f"path nodes must be a (N+1, V) array, got shape {nodes.shape}")
        if nodes.shape[0] - 1 < MIN_INTERVALS:
            raise ValueError(f"a path needs at least {MIN_INTERVALS} time intervals, got {nodes.shape[0] - 1}")
        if self.cone not in CONES:
            raise ValueError(f"unknown cone {self.cone!r}")
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)

    @property
    def intervals(self) -> int:
        return self.nodes.shape[0] - 1

    @property
    def node_count(self) -> int:
        return self.nodes.shape[0]

    @property
    def vertex_count(self) -> int:
        return self.nodes.shape[1]

    @property
    def step(self) -> float:
        return 1.0 / self.intervals

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.node_count)

    def at(self, s: float) -> np.ndarray:
        """Node at time *s*, which must lie on the grid."""
        k = s * self.intervals
        if abs(k - round(k)) > 1e-9:
            raise ValueError(f"t={s} is not a grid node for N={self.intervals}")
        return np.array(self.nodes[int(round(k))])

    def with_nodes(self, nodes: np.ndarray) -> "TimePath":
        return TimePath(nodes, self.cone)

    def to_json(self) -> Dict[str, Any]:
        return {"N": self.intervals, "V": self.vertex_count, "cone": self.cone, "nodes": self.nodes}

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "TimePath":
        nodes = np.asarray(data["nodes"], dtype=float)
        if nodes.shape != (int(data["N"]) + 1, int(data["V"])):
            raise FieldShapeError(f"path JSON declares N={data['N']}, V={data['V']} but holds {nodes.shape}")
        return cls(nodes, data.get("cone", POSITIVE))

    def save_csv(self, path: Union[str, pathlib.Path]) -> None:
        header = ["t"] + [f"v{i}" for i in range(self.vertex_count)]
        save_csv(path, header, ([t, *row] for t, row in zip(self.times, self.nodes)))

    @classmethod
    def load_csv(cls, path: Union[str, pathlib.Path], cone: str = POSITIVE) -> "TimePath":
        matrix = load_csv_matrix(path)
        return cls(matrix[:, 1:], cone)


def linear_path(u0, u1, intervals: int, cone: str = POSITIVE) -> TimePath:
    """(1 − t) u0 + t u1 sampled on N intervals."""
    t = np.linspace(0.0, 1.0, intervals + 1)[:, None]
    return TimePath((1.0 - t) * np.asarray(u0, float)[None, :] + t * np.asarray(u1, float)[None, :], cone)


def trapezoid_weights(intervals: int) -> np.ndarray:
    weights = np.full(intervals + 1, 1.0 / intervals)
    weights[[0, -1]] *= 0.5
    return weights


# ────────────────────────────────────────────────────────────────────────────
# Time derivatives
# ────────────────────────────────────────────────────────────────────────────

def time_derivative(values: np.ndarray, step: float) -> np.ndarray:
    return np.gradient(values, step, axis=0, edge_order=2)


def velocity(path: TimePath) -> np.ndarray:
    """u̇ at every node, shape (N+1, V)."""
    return time_derivative(path.nodes, path.step)


def second_difference(path: TimePath) -> np.ndarray:
    """u_tt at interior nodes, shape (N−1, V)."""
    u = path.nodes
    return (u[2:] - 2.0 * u[1:-1] + u[:-2]) / path.step ** 2


def _check_path(surface: DiscreteSurface, path: TimePath) -> None:
    if path.vertex_count != surface.vertex_count:
        raise FieldShapeError(f"path has {path.vertex_count} vertices, surface has {surface.vertex_count}")


def node_densities(surface: DiscreteSurface, path: TimePath, kappa0: Optional[np.ndarray] = None) -> np.ndarray:
    """κ_k = K0 − Δ0 u_k at every node, shape (N+1, V)."""
    _check_path(surface, path)
    K0 = surface.background_curvature if kappa0 is None else kappa0
    return K0[None, :] + (surface.stiffness @ path.nodes.T).T / surface.area_masses[None, :]


def node_weights(surface: DiscreteSurface, path: TimePath) -> np.ndarray:
    """|K_u| e^{2u} a = |κ| a at every node; raises on an inadmissible node."""
    sign = 1.0 if path.cone == UNCONSTRAINED else cone_sign(path.cone)
    signed = sign * node_densities(surface, path)
    if path.cone != UNCONSTRAINED:
        bad = np.nonzero(signed.min(axis=1) <= 0.0)[0]
        if bad.size:
            k = int(bad[0])
            margin = float(signed[k].min())
            raise InadmissibleError(f"path node {k} is not in the {path.cone} cone (margin {margin:.3e})", margin=margin)
    return np.abs(signed) * surface.area_masses[None, :]


def _node_gradients(surface: DiscreteSurface, fields: np.ndarray) -> np.ndarray:
    """Face gradients for a stack of vertex fields, shape (K, F, 3)."""
    return (surface.gradient_operator @ fields.T).T.reshape(fields.shape[0], surface.face_count, 3)


def _lifted_inner(surface: DiscreteSurface, first: np.ndarray, second: np.ndarray) -> np.ndarray:
    """Row-wise gradient_inner for stacks of fields, shape (K, V)."""
    dots = np.einsum("kfc,kfc->kf", _node_gradients(surface, first), _node_gradients(surface, second))
    return (surface.vertex_lift @ dots.T).T


# ────────────────────────────────────────────────────────────────────────────
# Energy, length, density
# ────────────────────────────────────────────────────────────────────────────

def energy_density(surface: DiscreteSurface, path: TimePath) -> np.ndarray:
    """E_k = ⟨⟨u̇_k, u̇_k⟩⟩_{u_k} at each node."""
    weights = node_weights(surface, path)
    ut = velocity(path)
    return np.einsum("kv,kv->k", ut * ut, weights)


def path_energy(surface: DiscreteSurface, path: TimePath) -> float:
    """½ ∫₀¹ ⟨⟨u̇, u̇⟩⟩ dt."""
    return 0.5 * float(np.dot(trapezoid_weights(path.intervals), energy_density(surface, path)))


def path_length(surface: DiscreteSurface, path: TimePath) -> float:
    """∫₀¹ ⟨⟨u̇, u̇⟩⟩^{1/2} dt."""
    density = np.clip(energy_density(surface, path), 0.0, None)
    return float(np.dot(trapezoid_weights(path.intervals), np.sqrt(density)))


def geodesic_residual(surface: DiscreteSurface, path: TimePath) -> np.ndarray:
    """
    u_tt + |∇0 u̇|² / (K0 − Δ0 u) at interior nodes, shape (N−1, V).

    The same expression serves both cones.
    """
    node_weights(surface, path)
    kappa = node_densities(surface, path)[1:-1]
    if not np.all(np.abs(kappa) > 0.0):
        raise InadmissibleError("K0 − Δ0 u vanishes on the path", margin=0.0)
    ut = velocity(path)[1:-1]
    return second_difference(path) + _lifted_inner(surface, ut, ut) / kappa


def covariant_derivative(surface: DiscreteSurface, path: TimePath, alpha) -> np.ndarray:
    """Dα/dt = α̇ + ⟨∇0 α, ∇0 u̇⟩ / (K0 − Δ0 u) at every node."""
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != path.nodes.shape:
        raise FieldShapeError(f"alpha has shape {alpha.shape}, path nodes have {path.nodes.shape}")
    node_weights(surface, path)
    kappa = node_densities(surface, path)
    return time_derivative(alpha, path.step) + _lifted_inner(surface, alpha, velocity(path)) / kappa


def conserved_functional(
    surface: DiscreteSurface,
    path: TimePath,
    p: Union[int, Callable[[np.ndarray], np.ndarray]] = 2,
) -> np.ndarray:
    """
    I(t_k) = Σ φ(u̇_k) |K_u| e^{2u} a with φ(x) = x^p, p ∈ {1, 2}, or any callable φ.

    Constant in t along a geodesic.
    """
    if callable(p):
        transform = p
    elif p in (1, 2):
        transform = lambda x: x ** p  # noqa: E731
    else:
        raise ValueError(f"exponent must be 1 or 2, got {p!r}")
    weights = node_weights(surface, path)
    return np.einsum("kv,kv->k", transform(velocity(path)), weights)


def drift(series: np.ndarray) -> float:
    """max − min of a per-node series."""
    return float(np.max(series) - np.min(series))
