"""
Pointwise and integral conformal geometry of g_u = e^{2u} g0.

Curvature, admissibility, the Liouville energies J and F, the
curvature-weighted inner product ⟨⟨·,·⟩⟩_u, the gradient of F in that inner
product, and the sectional curvature form of the cone.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, NamedTuple

import numpy as np

from .exceptions import GeometryError, InadmissibleError
from .surface import DiscreteSurface, as_vertex_field, face_average, face_gradients

logger = logging.getLogger(__name__)

POSITIVE = "positive"
NEGATIVE = "negative"
UNCONSTRAINED = "unconstrained"
CONES = (POSITIVE, NEGATIVE, UNCONSTRAINED)

CONFORMAL_GAUSS_BONNET_RTOL: float = 1e-10


def cone_sign(cone: str) -> float:
    """+1 for the positive cone, −1 for the negative cone."""
    if cone == POSITIVE:
        return 1.0
    if cone == NEGATIVE:
        return -1.0
    raise ValueError(f"cone must be {POSITIVE!r} or {NEGATIVE!r}, got {cone!r}")


@dataclass(frozen=True)
class ConformalFactor:
    """A conformal factor u together with the cone it is meant to live in."""

    u: np.ndarray
    cone: str = UNCONSTRAINED

    def __post_init__(self) -> None:
        if self.cone not in CONES:
            raise ValueError(f"unknown cone {self.cone!r}; expected one of {CONES}")

    def check(self, surface: DiscreteSurface) -> "ConformalFactor":
        """Raise InadmissibleError unless u lies in its cone (no-op when unconstrained)."""
        if self.cone != UNCONSTRAINED:
            require_admissible(surface, self.u, self.cone)
        return self


@dataclass(frozen=True)
class MetricSnapshot:
    curvature: np.ndarray
    area_form: np.ndarray
    total_area: float
    mean_curvature: float

    def summary(self) -> Dict[str, float]:
        return {
            "total_area": self.total_area,
            "mean_curvature": self.mean_curvature,
            "min_K": float(self.curvature.min()),
            "max_K": float(self.curvature.max()),
        }


class Admissibility(NamedTuple):
    admissible: bool
    margin: float


# ────────────────────────────────────────────────────────────────────────────
# Curvature and admissibility
# ────────────────────────────────────────────────────────────────────────────

def curvature_density(surface: DiscreteSurface, u) -> np.ndarray:
    """κ = K0 − Δ0 u, the quantity whose sign defines the cones."""
    u = as_vertex_field(surface, u, "u")
    return surface.background_curvature + (surface.stiffness @ u) / surface.area_masses


def curvature(surface: DiscreteSurface, u) -> np.ndarray:
    """Gauss curvature K_u = e^{-2u}(K0 − Δ0 u) at each vertex."""
    u = as_vertex_field(surface, u, "u")
    return np.exp(-2.0 * u) * curvature_density(surface, u)


def snapshot(surface: DiscreteSurface, u) -> MetricSnapshot:
    """Curvature, area form, total area and mean curvature of g_u."""
    u = as_vertex_field(surface, u, "u")
    area_form = np.exp(2.0 * u) * surface.area_masses
    K = curvature(surface, u)
    total = float(area_form.sum())
    gauss_bonnet = float(np.dot(K, area_form))
    target = surface.total_curvature
    if abs(gauss_bonnet - target) > CONFORMAL_GAUSS_BONNET_RTOL * max(abs(target), 1.0):
        raise GeometryError(
            f"conformal Gauss-Bonnet violated: Σ K_u dA_u = {gauss_bonnet!r}, 2πχ = {target!r}"
        )
    return MetricSnapshot(
        curvature=K,
        area_form=area_form,
        total_area=total,
        mean_curvature=target / total,
    )


def admissible(surface: DiscreteSurface, u, cone: str) -> Admissibility:
    """
    Whether sign(K_u) matches *cone* at every vertex.

    The margin is min_i sign·K_u,i, which equals min_i |K_u,i| for an
    admissible field and is ≤ 0 otherwise.
    """
    sign = cone_sign(cone)
    margin = float((sign * curvature(surface, u)).min())
    return Admissibility(margin > 0.0, margin)


def require_admissible(surface: DiscreteSurface, u, cone: str) -> float:
    ok, margin = admissible(surface, u, cone)
    if not ok:
        raise InadmissibleError(f"field is not in the {cone} cone (margin {margin:.3e})", margin=margin)
    return margin

# ────────────────────────────────────────────────────────────────────────────
# Energies
# ────────────────────────────────────────────────────────────────────────────

def liouville_energy(surface: DiscreteSurface, u) -> float:
    """J[u] = ∫|∇0 u|² dA0 + 2∫K0 u dA0."""
    u = as_vertex_field(surface, u, "u")
    dirichlet = float(u @ (surface.stiffness @ u))
    return dirichlet + 2.0 * float(np.dot(surface.background_curvature * surface.area_masses, u))


def normalized_energy(surface: DiscreteSurface, u) -> float:
    """F[u] = J[u] − 2πχ log(A_u / A_0); invariant under u → u + c."""
    u = as_vertex_field(surface, u, "u")
    ratio = float(np.dot(np.exp(2.0 * u), surface.area_masses)) / surface.total_area
    return liouville_energy(surface, u) - surface.total_curvature * math.log(ratio)


def liouville_differential(surface: DiscreteSurface, u, v) -> float:
    """J'(u)(v) = 2 Σ v K_u e^{2u} a."""
    u = as_vertex_field(surface, u, "u")
    v = as_vertex_field(surface, v, "v")
    return 2.0 * float(np.dot(v, surface.background_curvature * surface.area_masses + surface.stiffness @ u))


def energy_differential(surface: DiscreteSurface, u, v) -> float:
    """dF(u)(v) = 2 Σ v (K_u − K̄_u) e^{2u} a."""
    snap = snapshot(surface, u)
    v = as_vertex_field(surface, v, "v")
    return 2.0 * float(np.dot(v, (snap.curvature - snap.mean_curvature) * snap.area_form))


def grad_F(surface: DiscreteSurface, u, cone: str) -> np.ndarray:
    """
    Gradient of F in the weighted metric ⟨⟨·,·⟩⟩_u.

    Positive cone: 2(K_u − K̄_u)/K_u.  Negative cone: 2(K̄_u − K_u)/K_u.
    In both cases ⟨⟨grad_F, v⟩⟩_u = dF(v).
    """
    require_admissible(surface, u, cone)
    snap = snapshot(surface, u)
    K = snap.curvature
    return 2.0 * cone_sign(cone) * (K - snap.mean_curvature) / K


def polyakov_logdet_ratio(surface: DiscreteSurface, u) -> float:
    """log det(Δ_u)/det(Δ_0) at fixed area, −J[u]/(12π)."""
    return -liouville_energy(surface, u) / (12.0 * math.pi)

# ────────────────────────────────────────────────────────────────────────────
# Weighted metric and curvature of the cone
# ────────────────────────────────────────────────────────────────────────────

def metric_weight(surface: DiscreteSurface, u, cone: str) -> np.ndarray:
    """Per-vertex weight |K_u| e^{2u} a of ⟨⟨·,·⟩⟩_u; requires admissibility."""
    require_admissible(surface, u, cone)
    u = as_vertex_field(surface, u, "u")
    return cone_sign(cone) * curvature_density(surface, u) * surface.area_masses


def weighted_inner(surface: DiscreteSurface, u, alpha, beta, cone: str) -> float:
    """⟨⟨α, β⟩⟩_u = Σ α β |K_u| e^{2u} a."""
    weight = metric_weight(surface, u, cone)
    alpha = as_vertex_field(surface, alpha, "alpha")
    beta = as_vertex_field(surface, beta, "beta")
    return float(np.dot(alpha * beta, weight))


def sectional_curvature(surface: DiscreteSurface, u, phi, psi, cone: str = POSITIVE) -> float:
    """
    Curvature form of the plane spanned by φ, ψ at u.

    −Σ_f A_f e^{−2ū_f} |∇0φ × ∇0ψ|²_f / |K̄|_f with face averages of u and K_u;
    nonpositive term by term.
    """
    require_admissible(surface, u, cone)
    u = as_vertex_field(surface, u, "u")
    wedge = np.cross(face_gradients(surface, phi), face_gradients(surface, psi))
    wedge_sq = np.einsum("ij,ij->i", wedge, wedge)
    u_face = face_average(surface, u)
    K_face = np.abs(face_average(surface, curvature(surface, u)))
    return -float(np.sum(surface.face_areas * np.exp(-2.0 * u_face) * wedge_sq / K_face))


def plane_curvature(surface: DiscreteSurface, u, phi, psi, cone: str = POSITIVE) -> float:
    """Sectional curvature proper: the curvature form over ‖φ‖²‖ψ‖² − ⟨⟨φ,ψ⟩⟩²."""
    pp = weighted_inner(surface, u, phi, phi, cone)
    qq = weighted_inner(surface, u, psi, psi, cone)
    pq = weighted_inner(surface, u, phi, psi, cone)
    gram = pp * qq - pq * pq
    if gram <= 1e-14 * pp * qq or gram <= 0.0:
        return 0.0
    return sectional_curvature(surface, u, phi, psi, cone) / gram
