"""
Discrete background surfaces (M, g0).

A :class:`DiscreteSurface` bundles everything the conformal machinery needs
from a closed triangulated surface: the cotangent stiffness matrix, lumped
vertex areas, per-face gradient operators, the background curvature density
and the Euler characteristic.  Surfaces are immutable once built.

Assembly is vectorised over faces; every reduction is a fixed-order
``np.bincount`` / sparse sum, so results are deterministic.
"""
from __future__ import annotations

import functools
import io
import logging
import math
import pathlib
import tempfile
from dataclasses import dataclass
from typing import BinaryIO, Dict, Iterable, Optional, Tuple, Union

import meshio
import numpy as np
from scipy import sparse

from .exceptions import FieldShapeError, GeometryError, MeshError

logger = logging.getLogger(__name__)

# ────────────────────────────────────────────────────────────────────────────
# Constants
# ────────────────────────────────────────────────────────────────────────────

MAX_ICOSPHERE_LEVEL: int = 8
GAUSS_BONNET_RTOL: float = 1e-10
CURVATURE_MODES = ("angle_defect", "constant")

MeshSource = Union[str, pathlib.Path, bytes, BinaryIO]

_GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0

_ICOSAHEDRON_VERTICES = np.array(
    [
        (-1, _GOLDEN, 0), (1, _GOLDEN, 0), (-1, -_GOLDEN, 0), (1, -_GOLDEN, 0),
        (0, -1, _GOLDEN), (0, 1, _GOLDEN), (0, -1, -_GOLDEN), (0, 1, -_GOLDEN),
        (_GOLDEN, 0, -1), (_GOLDEN, 0, 1), (-_GOLDEN, 0, -1), (-_GOLDEN, 0, 1),
    ],
    dtype=float,
)

_ICOSAHEDRON_FACES = np.array(
    [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ],
    dtype=np.int64,
)

# Outward unit-cube faces as corner offsets, counter-clockwise seen from outside.
_CUBE_FACES = {
    (1, 0, 0): ((1, 0, 0), (1, 1, 0), (1, 1, 1), (1, 0, 1)),
    (-1, 0, 0): ((0, 0, 0), (0, 0, 1), (0, 1, 1), (0, 1, 0)),
    (0, 1, 0): ((0, 1, 0), (0, 1, 1), (1, 1, 1), (1, 1, 0)),
    (0, -1, 0): ((0, 0, 0), (1, 0, 0), (1, 0, 1), (0, 0, 1)),
    (0, 0, 1): ((0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1)),
    (0, 0, -1): ((0, 0, 0), (0, 1, 0), (1, 1, 0), (1, 0, 0)),
}


# ────────────────────────────────────────────────────────────────────────────
# Data type
# ────────────────────────────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class DiscreteSurface:
    """
    Background data of a closed oriented triangulated surface.

    ``stiffness`` is the positive semidefinite cotangent matrix W
    (W_ij = -w_ij on edges, zero row sums), so that the geometer's Laplacian
    is ``-W φ / a``.  ``gradient_operator`` maps a vertex field to stacked
    per-face ambient gradients (row ``3 f + c``); ``vertex_lift`` is the
    one-third area lift from faces to vertices.
    """

    vertex_count: int
    triangles: np.ndarray
    positions: Optional[np.ndarray]
    stiffness: sparse.csr_matrix
    area_masses: np.ndarray
    background_curvature: np.ndarray
    euler_characteristic: int
    face_areas: np.ndarray
    edges: np.ndarray
    edge_weights: np.ndarray
    edge_lengths: np.ndarray
    gradient_operator: sparse.csr_matrix
    vertex_lift: sparse.csr_matrix
    curvature_mode: str
    name: str = ""

    @property
    def face_count(self) -> int:
        return int(self.triangles.shape[0])

    @property
    def edge_count(self) -> int:
        return int(self.edges.shape[0])

    @property
    def total_area(self) -> float:
        return float(self.area_masses.sum())

    @property
    def total_curvature(self) -> float:
        """2πχ, the Gauss–Bonnet total."""
        return 2.0 * math.pi * self.euler_characteristic

    @property
    def mean_edge_length(self) -> float:
        return float(self.edge_lengths.mean())

    def summary(self) -> Dict[str, object]:
        """JSON-ready summary of the surface."""
        return {
            "name": self.name,
            "V": self.vertex_count,
            "E": self.edge_count,
            "F": self.face_count,
            "chi": self.euler_characteristic,
            "total_area": self.total_area,
            "min_K0": float(self.background_curvature.min()),
            "max_K0": float(self.background_curvature.max()),
            "curvature_mode": self.curvature_mode,
        }


# ────────────────────────────────────────────────────────────────────────────
# Field helpers
# ────────────────────────────────────────────────────────────────────────────

def as_vertex_field(surface: DiscreteSurface, values, name: str = "field") -> np.ndarray:
    """Return *values* as a float vector of length V, or raise FieldShapeError."""
    field = np.asarray(values, dtype=float)
    if field.ndim == 0:
        return np.full(surface.vertex_count, float(field))
    if field.shape != (surface.vertex_count,):
        raise FieldShapeError(
            f"{name} has shape {field.shape}, expected ({surface.vertex_count},)"
        )
    return field


def face_average(surface: DiscreteSurface, field: np.ndarray) -> np.ndarray:
    """Per-face mean of a vertex field."""
    return field[surface.triangles].mean(axis=1)


def face_gradients(surface: DiscreteSurface, phi) -> np.ndarray:
    """Ambient gradient of the linear interpolant of *phi*, shape (F, 3)."""
    phi = as_vertex_field(surface, phi)
    return (surface.gradient_operator @ phi).reshape(surface.face_count, 3)


# ────────────────────────────────────────────────────────────────────────────
# Operators
# ────────────────────────────────────────────────────────────────────────────

def laplacian_apply(surface: DiscreteSurface, phi) -> np.ndarray:
    """(Δ0 φ)_i = (1/a_i) Σ_j w_ij (φ_j − φ_i); negative semidefinite."""
    phi = as_vertex_field(surface, phi)
    return -(surface.stiffness @ phi) / surface.area_masses


def dirichlet_energy(surface: DiscreteSurface, phi) -> float:
    """∫|∇0 φ|² dA0 as the edge sum Σ_e w_e (φ_i − φ_j)²."""
    phi = as_vertex_field(surface, phi)
    diff = phi[surface.edges[:, 0]] - phi[surface.edges[:, 1]]
    return float(np.dot(surface.edge_weights, diff * diff))


def gradient_norm_sq(surface: DiscreteSurface, phi) -> np.ndarray:
    """Pointwise |∇0 φ|², per-face values lifted to vertices by the one-third rule."""
    grads = face_gradients(surface, phi)
    return surface.vertex_lift @ np.einsum("ij,ij->i", grads, grads)


def gradient_inner(surface: DiscreteSurface, phi, psi) -> np.ndarray:
    """
    Pointwise ⟨∇0 φ, ∇0 ψ⟩ with the same lift as :func:`gradient_norm_sq`.

    Equal to ¼(|∇(φ+ψ)|² − |∇(φ−ψ)|²) and exactly symmetric in its arguments.
    """
    return surface.vertex_lift @ np.einsum(
        "ij,ij->i", face_gradients(surface, phi), face_gradients(surface, psi)
    )


@functools.lru_cache(maxsize=8)
def _face_collapse(face_count: int) -> sparse.csr_matrix:
    """(F × 3F) matrix summing the three coordinate rows of each face."""
    return sparse.kron(sparse.identity(face_count, format="csr"), np.ones((1, 3)), format="csr")


def gradient_inner_matrix(surface: DiscreteSurface, phi) -> sparse.csr_matrix:
    """Sparse matrix C with C ψ = gradient_inner(surface, phi, ψ)."""
    grads = face_gradients(surface, phi).ravel()
    weighted = sparse.diags(grads) @ surface.gradient_operator
    return (surface.vertex_lift @ (_face_collapse(surface.face_count) @ weighted)).tocsr()


# ────────────────────────────────────────────────────────────────────────────
# Combinatorics and assembly
# ────────────────────────────────────────────────────────────────────────────

def _check_closed_manifold(triangles: np.ndarray, vertex_count: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Validate a closed, consistently oriented triangle manifold.

    Returns the unique undirected edges and, for each directed half-edge
    (face-major order), the index of its undirected edge.
    """
    if triangles.ndim != 2 or triangles.shape[1] != 3 or triangles.shape[0] == 0:
        raise MeshError("mesh must contain at least one triangle")
    if triangles.min() < 0 or triangles.max() >= vertex_count:
        bad = int(np.nonzero((triangles < 0).any(axis=1) | (triangles >= vertex_count).any(axis=1))[0][0])
        raise MeshError("triangle references a missing vertex", simplex=bad)
    repeated = (
        (triangles[:, 0] == triangles[:, 1])
        | (triangles[:, 1] == triangles[:, 2])
        | (triangles[:, 2] == triangles[:, 0])
    )
    if repeated.any():
        raise MeshError("triangle repeats a vertex", simplex=int(np.nonzero(repeated)[0][0]))

    directed = np.stack(
        [triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]], axis=1
    ).reshape(-1, 2)
    undirected = np.sort(directed, axis=1)
    edges, inverse, counts = np.unique(
        undirected, axis=0, return_inverse=True, return_counts=True
    )
    inverse = inverse.reshape(-1)
    face_of_halfedge = np.repeat(np.arange(triangles.shape[0]), 3)

    open_edges = np.nonzero(counts[inverse] == 1)[0]
    if open_edges.size:
        raise MeshError("mesh has an open boundary edge", simplex=int(face_of_halfedge[open_edges[0]]))
    crowded = np.nonzero(counts > 2)[0]
    if crowded.size:
        raise MeshError("non-manifold edge shared by more than two triangles", simplex=int(crowded[0]))

    _, directed_counts = np.unique(directed, axis=0, return_counts=True)
    if (directed_counts > 1).any():
        raise MeshError("triangles are not consistently oriented")

    used = np.zeros(vertex_count, dtype=bool)
    used[triangles.ravel()] = True
    if not used.all():
        raise MeshError("vertex not referenced by any triangle", simplex=int(np.nonzero(~used)[0][0]))
    return edges, inverse


def _assemble(
    metric_positions: np.ndarray,
    triangles: np.ndarray,
    edges: np.ndarray,
    halfedge_edge: np.ndarray,
) -> Dict[str, object]:
    """Cotangent stiffness, lumped areas and face gradients of a polyhedral metric."""
    vertex_count = metric_positions.shape[0]
    face_count = triangles.shape[0]
    p0 = metric_positions[triangles[:, 0]]
    p1 = metric_positions[triangles[:, 1]]
    p2 = metric_positions[triangles[:, 2]]

    normals = np.cross(p1 - p0, p2 - p0)
    double_area = np.linalg.norm(normals, axis=1)
    scale = max(float(np.abs(metric_positions).max()), 1.0)
    degenerate = np.nonzero(double_area <= 1e-14 * scale * scale)[0]
    if degenerate.size:
        raise MeshError("degenerate (zero-area) triangle", simplex=int(degenerate[0]))
    face_areas = 0.5 * double_area

    # cotangent of the corner angle at each vertex of each face
    cot = np.stack(
        [
            np.einsum("ij,ij->i", p1 - p0, p2 - p0),
            np.einsum("ij,ij->i", p2 - p1, p0 - p1),
            np.einsum("ij,ij->i", p0 - p2, p1 - p2),
        ],
        axis=1,
    ) / double_area[:, None]
    # half-edge order is (0,1), (1,2), (2,0); opposite corners are 2, 0, 1
    halfedge_cot = cot[:, [2, 0, 1]].ravel()
    edge_weights = 0.5 * np.bincount(halfedge_edge, weights=halfedge_cot, minlength=edges.shape[0])

    off = sparse.coo_matrix(
        (
            np.concatenate([-edge_weights, -edge_weights]),
            (np.concatenate([edges[:, 0], edges[:, 1]]), np.concatenate([edges[:, 1], edges[:, 0]])),
        ),
        shape=(vertex_count, vertex_count),
    ).tocsr()
    diagonal = np.bincount(edges[:, 0], weights=edge_weights, minlength=vertex_count) + np.bincount(
        edges[:, 1], weights=edge_weights, minlength=vertex_count
    )
    stiffness = (off + sparse.diags(diagonal)).tocsr()

    third = np.repeat(face_areas / 3.0, 3)
    area_masses = np.bincount(triangles.ravel(), weights=third, minlength=vertex_count)

    unit_normals = normals / double_area[:, None]
    opposite = np.stack([p2 - p1, p0 - p2, p1 - p0], axis=1)
    corner_grads = np.cross(unit_normals[:, None, :], opposite) / double_area[:, None, None]
    rows = np.broadcast_to(
        3 * np.arange(face_count)[:, None, None] + np.arange(3)[None, None, :], (face_count, 3, 3)
    )
    cols = np.broadcast_to(triangles[:, :, None], (face_count, 3, 3))
    gradient_operator = sparse.csr_matrix(
        (corner_grads.ravel(), (rows.ravel(), cols.ravel())), shape=(3 * face_count, vertex_count)
    )
    vertex_lift = sparse.csr_matrix(
        (third / area_masses[triangles.ravel()], (triangles.ravel(), np.repeat(np.arange(face_count), 3))),
        shape=(vertex_count, face_count),
    )
    edge_lengths = np.linalg.norm(metric_positions[edges[:, 0]] - metric_positions[edges[:, 1]], axis=1)
    corner_angles = np.arctan2(double_area[:, None], cot * double_area[:, None])
    return {
        "stiffness": stiffness,
        "area_masses": area_masses,
        "face_areas": face_areas,
        "edge_weights": edge_weights,
        "edge_lengths": edge_lengths,
        "gradient_operator": gradient_operator,
        "vertex_lift": vertex_lift,
        "corner_angles": corner_angles,
    }


def _freeze(*arrays: np.ndarray) -> None:
    for array in arrays:
        array.setflags(write=False)


def _check_gauss_bonnet(area_masses: np.ndarray, curvature: np.ndarray, chi: int) -> None:
    target = 2.0 * math.pi * chi
    total = float(np.dot(area_masses, curvature))
    if abs(total - target) > GAUSS_BONNET_RTOL * max(abs(target), 1.0):
        raise GeometryError(f"discrete Gauss-Bonnet violated: Σ a K0 = {total!r}, 2πχ = {target!r}")


def _build(
    positions: np.ndarray,
    triangles: np.ndarray,
    curvature_mode: str,
    name: str,
    metric_scale: float = 1.0,
) -> DiscreteSurface:
    positions = np.array(positions, dtype=float)
    triangles = np.array(triangles, dtype=np.int64)
    vertex_count = positions.shape[0]
    edges, halfedge_edge = _check_closed_manifold(triangles, vertex_count)
    chi = vertex_count - edges.shape[0] + triangles.shape[0]
    parts = _assemble(positions * metric_scale, triangles, edges, halfedge_edge)
    area_masses = parts["area_masses"]

    if curvature_mode == "sphere":
        curvature = np.ones(vertex_count)
    elif curvature_mode == "angle_defect":
        angle_sums = np.bincount(triangles.ravel(), weights=parts["corner_angles"].ravel(), minlength=vertex_count)
        curvature = (2.0 * math.pi - angle_sums) / area_masses
    elif curvature_mode == "constant":
        curvature = np.full(vertex_count, 2.0 * math.pi * chi / area_masses.sum())
    else:
        raise ValueError(f"unknown curvature mode {curvature_mode!r}; expected one of {CURVATURE_MODES}")
    _check_gauss_bonnet(area_masses, curvature, chi)

    _freeze(positions, triangles, area_masses, curvature, edges, parts["face_areas"],
            parts["edge_weights"], parts["edge_lengths"])
    logger.debug("assembled %s: V=%d E=%d F=%d chi=%d", name, vertex_count, edges.shape[0], triangles.shape[0], chi)
    return DiscreteSurface(
        vertex_count=vertex_count,
        triangles=triangles,
        positions=positions,
        stiffness=parts["stiffness"],
        area_masses=area_masses,
        background_curvature=curvature,
        euler_characteristic=int(chi),
        face_areas=parts["face_areas"],
        edges=edges,
        edge_weights=parts["edge_weights"],
        edge_lengths=parts["edge_lengths"],
        gradient_operator=parts["gradient_operator"],
        vertex_lift=parts["vertex_lift"],
        curvature_mode=curvature_mode,
        name=name,
    )


def _midpoint_subdivide(positions: np.ndarray, triangles: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Split every triangle into four at its edge midpoints (orientation kept)."""
    vertex_count = positions.shape[0]
    directed = np.stack(
        [triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]], axis=1
    ).reshape(-1, 2)
    edges, inverse = np.unique(np.sort(directed, axis=1), axis=0, return_inverse=True)
    mids = (vertex_count + inverse.reshape(-1)).reshape(-1, 3)
    m01, m12, m20 = mids[:, 0], mids[:, 1], mids[:, 2]
    a, b, c = triangles[:, 0], triangles[:, 1], triangles[:, 2]
    new_triangles = np.concatenate(
        [
            np.stack([a, m01, m20], axis=1),
            np.stack([b, m12, m01], axis=1),
            np.stack([c, m20, m12], axis=1),
            np.stack([m01, m12, m20], axis=1),
        ]
    )
    midpoints = 0.5 * (positions[edges[:, 0]] + positions[edges[:, 1]])
    return np.vstack([positions, midpoints]), new_triangles


# ────────────────────────────────────────────────────────────────────────────
# Constructors
# ────────────────────────────────────────────────────────────────────────────

def build_icosphere(subdivision_level: int) -> DiscreteSurface:
    """
    Unit icosphere with K0 ≡ 1.

    The polyhedral metric is scaled so that its total area is exactly 4π;
    positions stay on the unit sphere.
    """
    level = int(subdivision_level)
    if level < 0 or level > MAX_ICOSPHERE_LEVEL:
        raise ValueError(f"icosphere level must be in [0, {MAX_ICOSPHERE_LEVEL}], got {level}")
    positions = _ICOSAHEDRON_VERTICES / np.linalg.norm(_ICOSAHEDRON_VERTICES, axis=1)[:, None]
    triangles = _ICOSAHEDRON_FACES.copy()
    for _ in range(level):
        positions, triangles = _midpoint_subdivide(positions, triangles)
        positions = positions / np.linalg.norm(positions, axis=1)[:, None]

    p0, p1, p2 = (positions[triangles[:, k]] for k in range(3))
    normals = np.cross(p1 - p0, p2 - p0)
    inward = np.einsum("ij,ij->i", normals, p0 + p1 + p2) < 0
    triangles[inward] = triangles[inward][:, ::-1]
    raw_area = 0.5 * np.linalg.norm(normals, axis=1).sum()
    return _build(
        positions, triangles, "sphere", name=f"icosphere-{level}",
        metric_scale=math.sqrt(4.0 * math.pi / raw_area),
    )


def _spool(source: MeshSource, file_format: Optional[str]) -> Tuple[pathlib.Path, str, bool]:
    """Resolve *source* to a readable path and a meshio format name."""
    if isinstance(source, (str, pathlib.Path)):
        path = pathlib.Path(source)
        fmt = file_format or path.suffix.lower().lstrip(".")
        return path, fmt, False
    data = source if isinstance(source, bytes) else source.read()
    if file_format is None:
        head = data.lstrip()[:3].upper()
        file_format = "off" if head == b"OFF" else "obj"
    handle = tempfile.NamedTemporaryFile(suffix=f".{file_format}", delete=False)
    with handle:
        handle.write(data)
    return pathlib.Path(handle.name), file_format, True


def load_mesh(
    source: MeshSource,
    curvature_mode: str = "angle_defect",
    file_format: Optional[str] = None,
    name: Optional[str] = None,
) -> DiscreteSurface:
    """
    Read an ASCII OFF or OBJ triangle mesh and build its background surface.

    Parameters
    ----------
    source : path, bytes or binary stream
    curvature_mode : {"angle_defect", "constant"}
        ``angle_defect`` sets K0_i = (2π − Σ angles at i) / a_i, ``constant``
        spreads 2πχ uniformly over the total area.
    file_format : {"off", "obj"}, optional
        Needed only when it cannot be inferred from a path suffix or the
        stream header.

    Raises
    ------
    MeshError
        Parse failure, non-triangle cells, open boundary, non-manifold edge,
        inconsistent orientation or a degenerate triangle.
    """
    if curvature_mode not in CURVATURE_MODES:
        raise ValueError(f"unknown curvature mode {curvature_mode!r}; expected one of {CURVATURE_MODES}")
    path, fmt, spooled = _spool(source, file_format)
    if fmt not in ("off", "obj"):
        raise MeshError(f"unsupported mesh format {fmt!r}; expected off or obj")
    try:
        mesh = meshio.read(path, file_format=fmt)
    except Exception as exc:  # meshio raises a variety of parse errors
        raise MeshError(f"could not parse {fmt.upper()} mesh: {exc}") from exc
    finally:
        if spooled:
            path.unlink(missing_ok=True)

    blocks = [block for block in mesh.cells if len(block.data)]
    if not blocks:
        raise MeshError("mesh contains no faces")
    for block in blocks:
        if block.type != "triangle":
            raise MeshError(f"only triangle meshes are supported, found {block.type!r} cells")
    triangles = np.concatenate([block.data for block in blocks]).astype(np.int64)
    positions = np.asarray(mesh.points, dtype=float)
    if positions.ndim != 2 or positions.shape[1] != 3:
        raise MeshError("mesh vertices must have three coordinates")
    label = name or (path.stem if not spooled else fmt)
    return _build(positions, triangles, curvature_mode, name=label)


def icosphere_level(surface: DiscreteSurface) -> int:
    """Subdivision level of an icosphere, from V = 10·4^level + 2."""
    if surface.curvature_mode != "sphere":
        raise ValueError(f"{surface.name} is not an icosphere")
    return int(round(math.log((surface.vertex_count - 2) / 10.0, 4)))


def subdivide(surface: DiscreteSurface, levels: int = 1) -> DiscreteSurface:
    """Midpoint-refine a surface, re-deriving K0 in the surface's own curvature mode."""
    if surface.curvature_mode == "sphere":
        return build_icosphere(icosphere_level(surface) + levels)
    positions, triangles = np.array(surface.positions), np.array(surface.triangles)
    for _ in range(levels):
        positions, triangles = _midpoint_subdivide(positions, triangles)
    return _build(positions, triangles, surface.curvature_mode, name=f"{surface.name}-sub{levels}")


def build_voxel_surface(
    cells: Iterable[Tuple[int, int, int]],
    curvature_mode: str = "constant",
    name: str = "voxels",
) -> DiscreteSurface:
    """Closed surface of a union of unit cubes, each boundary square split in two."""
    occupied = {tuple(int(x) for x in cell) for cell in cells}
    index: Dict[Tuple[int, int, int], int] = {}
    triangles = []

    def vertex(point: Tuple[int, int, int]) -> int:
        return index.setdefault(point, len(index))

    for cell in sorted(occupied):
        for normal, corners in _CUBE_FACES.items():
            neighbour = tuple(c + n for c, n in zip(cell, normal))
            if neighbour in occupied:
                continue
            p, q, r, s = (vertex(tuple(c + o for c, o in zip(cell, corner))) for corner in corners)
            triangles.append((p, q, r))
            triangles.append((p, r, s))
    positions = np.array(sorted(index, key=index.get), dtype=float)
    return _build(positions, np.array(triangles), curvature_mode, name=name)


def write_off(surface: DiscreteSurface, handle: io.TextIOBase) -> None:
    """Write the surface's positions and triangles as ASCII OFF."""
    handle.write(f"OFF\n{surface.vertex_count} {surface.face_count} {surface.edge_count}\n")
    for x, y, z in surface.positions:
        handle.write(f"{x!r} {y!r} {z!r}\n")
    for a, b, c in surface.triangles:
        handle.write(f"3 {a} {b} {c}\n")


FIXTURES_DIR = pathlib.Path(__file__).resolve().parent / "fixtures"


def fixture_path(name: str) -> pathlib.Path:
    """Path of a bundled fixture mesh (``genus2.off``, ``tetrahedron.off``, ...)."""
    path = FIXTURES_DIR / name
    if not path.exists():
        raise FileNotFoundError(f"no bundled fixture named {name!r} in {FIXTURES_DIR}")
    return path
