"""
Vertex-field generation and (de)serialization.

Random fields are low-frequency: a few signed hat functions smoothed by
explicit heat steps, centred, amplitude-capped and, when a cone is given,
halved until they keep at least half of the base field's margin.
"""
from __future__ import annotations

import logging
import pathlib
from typing import Optional, Union

import numpy as np

from .conformal import admissible
from .exceptions import FieldShapeError, InadmissibleError
from .surface import DiscreteSurface, as_vertex_field, laplacian_apply
from .utils import load_csv_matrix, load_json, save_json

logger = logging.getLogger(__name__)

SMOOTHING_STEPS = 10
SMOOTHING_FACTOR = 0.1
MAX_HALVINGS = 60


def smooth(surface: DiscreteSurface, phi: np.ndarray, steps: int = SMOOTHING_STEPS) -> np.ndarray:
    """Apply (I + τΔ0) *steps* times with τ = 0.1·(mean edge length)²."""
    tau = SMOOTHING_FACTOR * surface.mean_edge_length ** 2
    for _ in range(steps):
        phi = phi + tau * laplacian_apply(surface, phi)
    return phi


def random_smooth_field(
    surface: DiscreteSurface,
    rng: np.random.Generator,
    amplitude: float = 0.3,
) -> np.ndarray:
    """Area-weighted mean-zero smooth field with max|φ| = amplitude."""
    count = int(rng.integers(3, 7))
    centres = rng.choice(surface.vertex_count, size=min(count, surface.vertex_count), replace=False)
    phi = np.zeros(surface.vertex_count)
    phi[centres] = rng.uniform(-1.0, 1.0, size=centres.size)
    phi = smooth(surface, phi)
    phi -= np.dot(phi, surface.area_masses) / surface.total_area
    peak = float(np.abs(phi).max())
    if peak == 0.0:
        return phi
    return phi * (amplitude / peak)


def random_admissible_field(
    surface: DiscreteSurface,
    rng: np.random.Generator,
    cone: str,
    base=None,
    amplitude: float = 0.3,
) -> np.ndarray:
    """base + φ for a random smooth φ, halved until the margin is ≥ half the base margin."""
    base = np.zeros(surface.vertex_count) if base is None else as_vertex_field(surface, base, "base")
    ok, base_margin = admissible(surface, base, cone)
    if not ok:
        raise InadmissibleError(f"base field is not in the {cone} cone", margin=base_margin)
    phi = random_smooth_field(surface, rng, amplitude)
    for _ in range(MAX_HALVINGS):
        ok, margin = admissible(surface, base + phi, cone)
        if ok and margin >= 0.5 * base_margin:
            return base + phi
        phi = 0.5 * phi
    logger.warning("random field collapsed to the base field after %d halvings", MAX_HALVINGS)
    return base


# ────────────────────────────────────────────────────────────────────────────
# Serialization
# ────────────────────────────────────────────────────────────────────────────

def load_field(path: Union[str, pathlib.Path], vertex_count: Optional[int] = None) -> np.ndarray:
    """Read a vertex field from a JSON array (or {"values": [...]}) or a single-column CSV."""
    path = pathlib.Path(path)
    if path.suffix.lower() == ".csv":
        matrix = load_csv_matrix(path)
        if matrix.ndim != 2 or matrix.shape[1] != 1:
            raise FieldShapeError(f"{path.name}: expected a single CSV column, got shape {matrix.shape}")
        values = matrix[:, 0]
    else:
        data = load_json(path)
        if data is None:
            raise FileNotFoundError(path)
        if isinstance(data, dict):
            data = data.get("values")
        values = np.asarray(data, dtype=float)
    if values.ndim != 1:
        raise FieldShapeError(f"{path.name}: field must be one-dimensional")
    if vertex_count is not None and values.shape[0] != vertex_count:
        raise FieldShapeError(f"{path.name}: field has {values.shape[0]} values, surface has {vertex_count} vertices")
    return values


def save_field(path: Union[str, pathlib.Path], values, **meta) -> None:
    """Write a vertex field as JSON {"values": [...], **meta}."""
    save_json(path, {"values": np.asarray(values, dtype=float), **meta})
