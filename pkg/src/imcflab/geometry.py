"""Discrete differential geometry of closed star-shaped hypersurfaces.

A hypersurface is stored as a radial field over a fixed atlas of unit
directions: a uniform angular grid on the circle (n=1) or a subdivided
icosahedron on the sphere (n=2).  All curvature quantities follow the
convention that the mean curvature is the *sum* of principal curvatures,
so a round sphere of radius R has H = n/R with outward normal.

Curvature estimators:
  n=1  closed-form polar-graph formulas with fourth-order periodic finite
       differences of r(phi); exact on circles at any resolution.
  n=2  cotangent mean-curvature normal with mixed-Voronoi dual areas for H,
       plus a local quadric fit for the principal curvature split.  The fit
       eigenvalues are shifted so their sum reproduces the cotangent H
       exactly, which also makes |A|^2 >= H^2/n hold vertexwise as an
       algebraic identity.

All reductions use numpy's deterministic (pairwise) summation, so repeated
runs on the same machine are bit-stable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DegenerateMeshError, DegenerateShapeError

__all__ = [
    "DirectionAtlas",
    "StarSurface",
    "GeometryTensors",
    "Sphere",
    "Ellipsoid",
    "PerturbedSphere",
    "build_atlas",
    "embed",
    "compute_tensors",
    "total_area",
    "star_margin",
    "write_off",
    "read_off",
    "write_curve_csv",
    "read_curve_csv",
]

DEGENERATE_AREA_REL = 1e-14


# ---------------------------------------------------------------------------
# direction atlases
# ---------------------------------------------------------------------------

_GOLDEN = (1.0 + np.sqrt(5.0)) / 2.0

_ICOSA_VERTS = np.array(
    [
        [-1.0, _GOLDEN, 0.0],
        [1.0, _GOLDEN, 0.0],
        [-1.0, -_GOLDEN, 0.0],
        [1.0, -_GOLDEN, 0.0],
        [0.0, -1.0, _GOLDEN],
        [0.0, 1.0, _GOLDEN],
        [0.0, -1.0, -_GOLDEN],
        [0.0, 1.0, -_GOLDEN],
        [_GOLDEN, 0.0, -1.0],
        [_GOLDEN, 0.0, 1.0],
        [-_GOLDEN, 0.0, -1.0],
        [-_GOLDEN, 0.0, 1.0],
    ]
)

_ICOSA_FACES = np.array(
    [
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ],
    dtype=np.int64,
)


def _subdivide(verts, faces):
    """One 4-to-1 loop of midpoint subdivision, new vertices on the unit sphere."""
    cache: dict[tuple[int, int], int] = {}
    verts = [v for v in verts]

    def midpoint(a, b):
        key = (a, b) if a < b else (b, a)
        idx = cache.get(key)
        if idx is None:
            m = verts[a] + verts[b]
            m = m / np.linalg.norm(m)
            idx = len(verts)
            verts.append(m)
            cache[key] = idx
        return idx

    new_faces = np.empty((4 * len(faces), 3), dtype=np.int64)
    for k, (a, b, c) in enumerate(faces):
        ab = midpoint(a, b)
        bc = midpoint(b, c)
        ca = midpoint(c, a)
        new_faces[4 * k + 0] = (a, ab, ca)
        new_faces[4 * k + 1] = (b, bc, ab)
        new_faces[4 * k + 2] = (c, ca, bc)
        new_faces[4 * k + 3] = (ab, bc, ca)
    return np.array(verts), new_faces


@dataclass(frozen=True)
class DirectionAtlas:
    """Immutable atlas of unit directions with closed-manifold connectivity.

    n=1: ``directions`` is (N, 2) on the unit circle in cyclic order and
    ``triangles`` is None.  n=2: ``directions`` is (N, 3) on the unit sphere
    and ``triangles`` is a (T, 3) outward-oriented triangle list.
    """

    n: int
    directions: np.ndarray
    triangles: np.ndarray | None = None

    def __post_init__(self):
        self.directions.flags.writeable = False
        if self.triangles is not None:
            self.triangles.flags.writeable = False
        norms = np.linalg.norm(self.directions, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise ValueError("atlas directions must be unit vectors")

    @property
    def count(self) -> int:
        return self.directions.shape[0]

    @property
    def successors(self) -> np.ndarray:
        """Cyclic successor indices (n=1 connectivity)."""
        if self.n != 1:
            raise ValueError("successors are defined for n=1 atlases only")
        return (np.arange(self.count) + 1) % self.count

    @cached_property
    def edges(self) -> np.ndarray:
        """Unique undirected edges (E, 2), each row sorted."""
        if self.n == 1:
            idx = np.arange(self.count)
            pairs = np.stack([idx, self.successors], axis=1)
        else:
            tri = self.triangles
            pairs = np.concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]])
        pairs = np.sort(pairs, axis=1)
        return np.unique(pairs, axis=0)

    @cached_property
    def vertex_neighbors(self) -> list[np.ndarray]:
        """One-ring neighbor indices per vertex."""
        nbrs: list[set[int]] = [set() for _ in range(self.count)]
        for a, b in self.edges:
            nbrs[a].add(int(b))
            nbrs[b].add(int(a))
        return [np.array(sorted(s), dtype=np.int64) for s in nbrs]

    @cached_property
    def two_ring(self) -> tuple[np.ndarray, np.ndarray]:
        """Padded (N, K) index matrix of the 1+2 ring of each vertex, plus mask.

        Padding entries point at the vertex itself and carry mask 0, so padded
        rows contribute nothing to least-squares fits in local coordinates.
        """
        one = self.vertex_neighbors
        rings: list[np.ndarray] = []
        for i in range(self.count):
            s = set(one[i].tolist())
            for j in one[i]:
                s.update(one[j].tolist())
            s.discard(i)
            rings.append(np.array(sorted(s), dtype=np.int64))
        width = max(len(r) for r in rings)
        idx = np.full((self.count, width), 0, dtype=np.int64)
        mask = np.zeros((self.count, width))
        for i, r in enumerate(rings):
            idx[i, : len(r)] = r
            idx[i, len(r):] = i
            mask[i, : len(r)] = 1.0
        return idx, mask

    def validate(self) -> None:
        """Check the closed-manifold invariants; raises ValueError on failure."""
        if self.n == 1:
            if self.count < 3:
                raise ValueError("circle atlas needs at least 3 directions")
            return
        tri = self.triangles
        pairs = np.concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]])
        pairs = np.sort(pairs, axis=1)
        uniq, counts = np.unique(pairs, axis=0, return_counts=True)
        if not np.all(counts == 2):
            raise ValueError("every edge must be shared by exactly two triangles")
        euler = self.count - len(uniq) + len(tri)
        if euler != 2:
            raise ValueError(f"Euler characteristic is {euler}, expected 2")


def build_atlas(kind: str, resolution: int) -> DirectionAtlas:
    """Build a direction atlas.

    kind="circle": ``resolution`` points uniformly on the unit circle,
    starting at (1, 0) and ordered counterclockwise.
    kind="icosphere": icosahedron subdivided ``resolution`` times and
    projected to the unit sphere; level L has 10*4^L + 2 vertices.
    """
    if kind == "circle":
        if resolution < 3:
            raise ValueError("circle atlas needs resolution >= 3 points")
        phi = 2.0 * np.pi * np.arange(resolution) / resolution
        dirs = np.column_stack([np.cos(phi), np.sin(phi)])
        atlas = DirectionAtlas(n=1, directions=dirs)
    elif kind == "icosphere":
        if resolution < 0:
            raise ValueError("icosphere subdivision level must be >= 0")
        verts = _ICOSA_VERTS / np.linalg.norm(_ICOSA_VERTS, axis=1, keepdims=True)
        faces = _ICOSA_FACES
        for _ in range(resolution):
            verts, faces = _subdivide(verts, faces)
        # outward orientation: triangle normal along the face centroid
        e1 = verts[faces[:, 1]] - verts[faces[:, 0]]
        e2 = verts[faces[:, 2]] - verts[faces[:, 0]]
        centroid = verts[faces].mean(axis=1)
        flip = np.einsum("ij,ij->i", np.cross(e1, e2), centroid) < 0
        if np.any(flip):
            faces = faces.copy()
            faces[flip] = faces[flip][:, [0, 2, 1]]
        atlas = DirectionAtlas(n=2, directions=verts, triangles=faces)
    else:
        raise ValueError(f"unknown atlas kind {kind!r}")
    atlas.validate()
    return atlas


# ---------------------------------------------------------------------------
# radial profiles and embedding
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Sphere:
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("sphere radius must be positive")

    def radii(self, atlas: DirectionAtlas) -> np.ndarray:
        return np.full(atlas.count, float(self.radius))


@dataclass(frozen=True)
class Ellipsoid:
    """Axis-aligned ellipsoid; ``c`` is ignored for curve atlases."""

    a: float
    b: float
    c: float | None = None

    def __post_init__(self):
        axes = [self.a, self.b] + ([self.c] if self.c is not None else [])
        if any(ax <= 0 for ax in axes):
            raise ValueError("ellipsoid semi-axes must be positive")

    def radii(self, atlas: DirectionAtlas) -> np.ndarray:
        d = atlas.directions
        if atlas.n == 1:
            q = (d[:, 0] / self.a) ** 2 + (d[:, 1] / self.b) ** 2
        else:
            c = self.c if self.c is not None else self.b
            q = (d[:, 0] / self.a) ** 2 + (d[:, 1] / self.b) ** 2 + (d[:, 2] / c) ** 2
        return 1.0 / np.sqrt(q)


@dataclass(frozen=True)
class PerturbedSphere:
    """Sphere of the given radius with a smooth seeded radial perturbation.

    The perturbation field is rescaled so its max magnitude equals
    ``amplitude`` exactly, hence radius - amplitude <= r <= radius + amplitude.
    """

    radius: float
    amplitude: float
    seed: int = 0

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("sphere radius must be positive")
        if self.amplitude < 0:
            raise ValueError("perturbation amplitude must be nonnegative")

    def radii(self, atlas: DirectionAtlas) -> np.ndarray:
        if self.amplitude == 0:
            return np.full(atlas.count, float(self.radius))
        rng = np.random.default_rng(self.seed)
        d = atlas.directions
        if atlas.n == 1:
            phi = np.arctan2(d[:, 1], d[:, 0])
            f = np.zeros(atlas.count)
            for k in range(2, 7):
                a, b = rng.standard_normal(2)
                f += a * np.cos(k * phi) + b * np.sin(k * phi)
        else:
            # low-degree polynomials in the direction restrict to smooth
            # spherical harmonics of degree <= 3
            f = np.zeros(atlas.count)
            for _ in range(8):
                axis = rng.standard_normal(3)
                axis /= np.linalg.norm(axis)
                power = rng.integers(2, 4)
                f += rng.standard_normal() * (d @ axis) ** power
        peak = np.max(np.abs(f))
        if peak == 0:
            return np.full(atlas.count, float(self.radius))
        return self.radius + self.amplitude * (f / peak)


RadialProfile = Sphere | Ellipsoid | PerturbedSphere


@dataclass(frozen=True)
class StarSurface:
    """Closed star-shaped hypersurface: radii over an atlas at flow time t."""

    atlas: DirectionAtlas
    radii: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        object.__setattr__(self, "radii", r)
        r.flags.writeable = False
        if r.shape != (self.atlas.count,):
            raise ValueError("radii length must match the atlas vertex count")
        if np.any(r <= 0):
            raise DegenerateShapeError("all radii must be positive (star-shapedness)")
        if self.t < 0:
            raise ValueError("flow time must be nonnegative")

    @property
    def positions(self) -> np.ndarray:
        return self.radii[:, None] * self.atlas.directions

    @property
    def ambient_dim(self) -> int:
        return self.atlas.n + 1

    def with_radii(self, radii: np.ndarray, t: float | None = None) -> "StarSurface":
        return StarSurface(self.atlas, np.array(radii, dtype=float),
                           self.t if t is None else t)


def embed(atlas: DirectionAtlas, shape: RadialProfile) -> StarSurface:
    """Embed a radial profile over the atlas at flow time t = 0."""
    r = shape.radii(atlas)
    if np.any(r <= 0):
        raise DegenerateShapeError("radial profile produced r <= 0")
    return StarSurface(atlas=atlas, radii=r, t=0.0)


# ---------------------------------------------------------------------------
# curvature tensors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GeometryTensors:
    """Per-vertex first/second fundamental form data.

    ``principal_curvatures`` is (N, n), sorted ascending per vertex, and sums
    exactly to ``mean_curvature``.  ``dual_areas`` partition the total area.
    For n=2 the corrected second fundamental form is stored as a 2x2 matrix
    per vertex in the (frame_u, frame_v) graph basis, so that
    S(grad, grad) = [g_u, g_v] @ second_form @ [g_u, g_v] for a tangent
    gradient vector with frame components (g_u, g_v).
    """

    normals: np.ndarray
    mean_curvature: np.ndarray
    principal_curvatures: np.ndarray
    shape_norm_sq: np.ndarray
    dual_areas: np.ndarray
    graph_factor: np.ndarray
    frame_u: np.ndarray | None = None
    frame_v: np.ndarray | None = None
    second_form: np.ndarray | None = None
    tangent: np.ndarray | None = None

    @property
    def kappa_min(self) -> np.ndarray:
        return self.principal_curvatures[:, 0]


def _periodic_diff4(values: np.ndarray, dphi: float, order: int) -> np.ndarray:
    """Fourth-order central finite difference of a periodic sample vector."""
    vp1 = np.roll(values, -1)
    vp2 = np.roll(values, -2)
    vm1 = np.roll(values, 1)
    vm2 = np.roll(values, 2)
    if order == 1:
        return (-vp2 + 8.0 * vp1 - 8.0 * vm1 + vm2) / (12.0 * dphi)
    if order == 2:
        return (-vp2 + 16.0 * vp1 - 30.0 * values + 16.0 * vm1 - vm2) / (12.0 * dphi**2)
    raise ValueError("order must be 1 or 2")


def _curve_tensors(surface: StarSurface) -> GeometryTensors:
    atlas = surface.atlas
    N = atlas.count
    r = surface.radii
    dphi = 2.0 * np.pi / N
    rp = _periodic_diff4(r, dphi, 1)
    rpp = _periodic_diff4(r, dphi, 2)

    speed = np.sqrt(r**2 + rp**2)  # |dX/dphi| for the polar graph
    kappa = (r**2 + 2.0 * rp**2 - r * rpp) / speed**3
    theta = atlas.directions
    theta_perp = np.column_stack([-theta[:, 1], theta[:, 0]])
    normals = (r[:, None] * theta - rp[:, None] * theta_perp) / speed[:, None]
    tangent = (rp[:, None] * theta + r[:, None] * theta_perp) / speed[:, None]
    graph_factor = speed / r

    seg = 0.5 * dphi * (speed + np.roll(speed, -1))  # arclength of segment i->i+1
    if np.any(seg < DEGENERATE_AREA_REL * np.mean(seg)):
        bad = int(np.argmin(seg))
        raise DegenerateMeshError(f"curve segment {bad} has collapsed")
    w = 0.5 * (seg + np.roll(seg, 1))

    return GeometryTensors(
        normals=normals,
        mean_curvature=kappa.copy(),
        principal_curvatures=kappa[:, None].copy(),
        shape_norm_sq=kappa**2,
        dual_areas=w,
        graph_factor=graph_factor,
        tangent=tangent,
    )


def curve_segment_lengths(surface: StarSurface) -> np.ndarray:
    """Arclength of each curve segment i -> i+1, trapezoid rule in the angle.

    Exact on circles; consistent with the dual lengths in GeometryTensors
    (w_i is the mean of the two incident segments).
    """
    if surface.atlas.n != 1:
        raise ValueError("segment lengths are defined for n=1 surfaces")
    N = surface.atlas.count
    dphi = 2.0 * np.pi / N
    r = surface.radii
    rp = _periodic_diff4(r, dphi, 1)
    speed = np.sqrt(r**2 + rp**2)
    return 0.5 * dphi * (speed + np.roll(speed, -1))


def cotangent_weights(positions: np.ndarray, triangles: np.ndarray):
    """Per-triangle cotangents and areas.

    Returns (cots, areas) where cots[:, k] is the cotangent of the angle at
    corner k of each triangle.  Degenerate triangles raise DegenerateMeshError.
    """
    p0 = positions[triangles[:, 0]]
    p1 = positions[triangles[:, 1]]
    p2 = positions[triangles[:, 2]]
    cross = np.cross(p1 - p0, p2 - p0)
    double_area = np.linalg.norm(cross, axis=1)
    areas = 0.5 * double_area
    mean_area = np.mean(areas)
    bad = areas < DEGENERATE_AREA_REL * mean_area
    if np.any(bad):
        raise DegenerateMeshError(
            f"triangle {int(np.flatnonzero(bad)[0])} has degenerate area"
        )
    cot0 = np.einsum("ij,ij->i", p1 - p0, p2 - p0) / double_area
    cot1 = np.einsum("ij,ij->i", p0 - p1, p2 - p1) / double_area
    cot2 = np.einsum("ij,ij->i", p0 - p2, p1 - p2) / double_area
    return np.column_stack([cot0, cot1, cot2]), areas


def mixed_voronoi_areas(positions: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    """Obtuse-safe mixed Voronoi dual areas; they partition the total area."""
    cots, areas = cotangent_weights(positions, triangles)
    N = positions.shape[0]
    p = positions[triangles]  # (T, 3, 3)
    edge_sq = np.stack(
        [
            np.sum((p[:, 1] - p[:, 2]) ** 2, axis=1),  # opposite corner 0
            np.sum((p[:, 2] - p[:, 0]) ** 2, axis=1),
            np.sum((p[:, 0] - p[:, 1]) ** 2, axis=1),
        ],
        axis=1,
    )
    obtuse_corner = np.argmin(cots, axis=1)
    is_obtuse = cots[np.arange(len(cots)), obtuse_corner] < 0.0

    contrib = np.empty_like(cots)
    for k in range(3):
        j, l = (k + 1) % 3, (k + 2) % 3
        contrib[:, k] = 0.125 * (edge_sq[:, j] * cots[:, j] + edge_sq[:, l] * cots[:, l])
    if np.any(is_obtuse):
        half = 0.5 * areas[is_obtuse]
        quarter = 0.25 * areas[is_obtuse]
        contrib[is_obtuse] = quarter[:, None]
        contrib[is_obtuse, obtuse_corner[is_obtuse]] = half

    w = np.zeros(N)
    np.add.at(w, triangles.ravel(), contrib.ravel())
    return w


def _mean_curvature_normal(positions, triangles, cots):
    """Integrated cotangent mean-curvature vector per vertex (outward for convex)."""
    N = positions.shape[0]
    acc = np.zeros((N, 3))
    idx = triangles
    p = positions[triangles]
    for k in range(3):
        j, l = (k + 1) % 3, (k + 2) % 3
        # stiffness row at corner k: cot at l weights edge to j, cot at j weights edge to l
        contrib = 0.5 * (
            cots[:, l, None] * (p[:, k] - p[:, j])
            + cots[:, j, None] * (p[:, k] - p[:, l])
        )
        np.add.at(acc, idx[:, k], contrib)
    return acc


def _vertex_normals(positions, triangles, count):
    p0 = positions[triangles[:, 0]]
    p1 = positions[triangles[:, 1]]
    p2 = positions[triangles[:, 2]]
    face_n = np.cross(p1 - p0, p2 - p0)  # area-weighted, outward by atlas orientation
    acc = np.zeros((count, 3))
    for k in range(3):
        np.add.at(acc, triangles[:, k], face_n)
    return acc / np.linalg.norm(acc, axis=1, keepdims=True)


def _surface_tensors(surface: StarSurface) -> GeometryTensors:
    atlas = surface.atlas
    X = surface.positions
    tri = atlas.triangles
    N = atlas.count

    cots, _ = cotangent_weights(X, tri)
    w = mixed_voronoi_areas(X, tri)
    normals = _vertex_normals(X, tri, N)
    hn = _mean_curvature_normal(X, tri, cots)
    H = np.einsum("ij,ij->i", hn, normals) / w

    graph_factor = 1.0 / np.einsum("ij,ij->i", normals, atlas.directions)

    # local quadric fit z = p x + q y + a/2 x^2 + b xy + c/2 y^2 over the
    # two-ring, in a frame aligned with the vertex normal
    ref = np.where(np.abs(normals[:, :1]) < 0.9,
                   np.tile([1.0, 0.0, 0.0], (N, 1)),
                   np.tile([0.0, 1.0, 0.0], (N, 1)))
    t1 = np.cross(ref, normals)
    t1 /= np.linalg.norm(t1, axis=1, keepdims=True)
    t2 = np.cross(normals, t1)

    ring_idx, ring_mask = atlas.two_ring
    delta = X[ring_idx] - X[:, None, :]  # (N, K, 3)
    x = np.einsum("nkj,nj->nk", delta, t1)
    y = np.einsum("nkj,nj->nk", delta, t2)
    z = np.einsum("nkj,nj->nk", delta, normals)
    scale = np.sqrt(np.sum((x**2 + y**2 + z**2) * ring_mask, axis=1)
                    / np.maximum(ring_mask.sum(axis=1), 1.0))
    x, y, z = x / scale[:, None], y / scale[:, None], z / scale[:, None]

    design = np.stack([x, y, 0.5 * x**2, x * y, 0.5 * y**2], axis=2)  # (N, K, 5)
    design = design * ring_mask[:, :, None]
    zm = z * ring_mask
    gram = np.einsum("nki,nkj->nij", design, design)
    rhs = np.einsum("nki,nk->ni", design, zm)
    coef = np.linalg.solve(gram, rhs[:, :, None])[:, :, 0]  # [p, q, a, b, c] scaled
    p_, q_ = coef[:, 0], coef[:, 1]
    a_ = coef[:, 2] / scale
    b_ = coef[:, 3] / scale
    c_ = coef[:, 4] / scale

    root = np.sqrt(1.0 + p_**2 + q_**2)
    # second fundamental form (outward normal => minus the Hessian), and the
    # graph metric in the same parametrization basis
    ii = np.empty((N, 2, 2))
    ii[:, 0, 0] = -a_ / root
    ii[:, 0, 1] = ii[:, 1, 0] = -b_ / root
    ii[:, 1, 1] = -c_ / root
    gmat = np.empty((N, 2, 2))
    gmat[:, 0, 0] = 1.0 + p_**2
    gmat[:, 0, 1] = gmat[:, 1, 0] = p_ * q_
    gmat[:, 1, 1] = 1.0 + q_**2

    wein = np.linalg.solve(gmat, ii)
    trace = wein[:, 0, 0] + wein[:, 1, 1]
    det = wein[:, 0, 0] * wein[:, 1, 1] - wein[:, 0, 1] * wein[:, 1, 0]
    disc = np.sqrt(np.maximum(trace**2 - 4.0 * det, 0.0))
    k_lo = 0.5 * (trace - disc)
    k_hi = 0.5 * (trace + disc)

    # pin the trace to the cotangent mean curvature; the fit supplies the split
    shift = 0.5 * (H - (k_lo + k_hi))
    kappa = np.stack([k_lo + shift, k_hi + shift], axis=1)
    second_form = ii + shift[:, None, None] * gmat

    return GeometryTensors(
        normals=normals,
        mean_curvature=H,
        principal_curvatures=kappa,
        shape_norm_sq=np.sum(kappa**2, axis=1),
        dual_areas=w,
        graph_factor=graph_factor,
        frame_u=t1,
        frame_v=t2,
        second_form=second_form,
    )


def compute_tensors(surface: StarSurface) -> GeometryTensors:
    """Compute all per-vertex curvature data for a star-shaped surface."""
    if surface.atlas.n == 1:
        return _curve_tensors(surface)
    return _surface_tensors(surface)


def total_area(surface: StarSurface, tensors: GeometryTensors) -> float:
    """Total surface measure (circumference for n=1)."""
    return float(np.sum(tensors.dual_areas))


def star_margin(surface: StarSurface, tensors: GeometryTensors) -> float:
    """min over vertices of min(r, 1/v); positive iff safely star-shaped."""
    inv_v = 1.0 / tensors.graph_factor
    return float(min(np.min(surface.radii), np.min(inv_v)))


# ---------------------------------------------------------------------------
# mesh and curve I/O
# ---------------------------------------------------------------------------


def write_off(surface: StarSurface, path) -> None:
    """Write an n=2 surface as an ASCII OFF mesh."""
    if surface.atlas.n != 2:
        raise ValueError("OFF export is for n=2 surfaces; use write_curve_csv")
    X = surface.positions
    tri = surface.atlas.triangles
    with open(path, "w") as fh:
        fh.write("OFF\n")
        fh.write(f"{len(X)} {len(tri)} 0\n")
        for v in X:
            fh.write(f"{float(v[0])!r} {float(v[1])!r} {float(v[2])!r}\n")
        for f in tri:
            fh.write(f"3 {f[0]} {f[1]} {f[2]}\n")


def read_off(path, t: float = 0.0) -> StarSurface:
    """Read an ASCII OFF mesh back into a star surface about the origin."""
    with open(path) as fh:
        tokens = fh.read().split()
    if tokens[0] != "OFF":
        raise ValueError("not an OFF file")
    nv, nf = int(tokens[1]), int(tokens[2])
    data = np.array(tokens[4:4 + 3 * nv], dtype=float).reshape(nv, 3)
    rest = tokens[4 + 3 * nv:]
    faces = np.empty((nf, 3), dtype=np.int64)
    pos = 0
    for k in range(nf):
        cnt = int(rest[pos])
        if cnt != 3:
            raise ValueError("only triangle meshes are supported")
        faces[k] = [int(rest[pos + 1]), int(rest[pos + 2]), int(rest[pos + 3])]
        pos += 4
    radii = np.linalg.norm(data, axis=1)
    if np.any(radii <= 0):
        raise DegenerateShapeError("OFF mesh contains the origin among vertices")
    atlas = DirectionAtlas(n=2, directions=data / radii[:, None], triangles=faces)
    atlas.validate()
    return StarSurface(atlas=atlas, radii=radii, t=t)


def write_curve_csv(surface: StarSurface, path) -> None:
    """Write an n=1 curve as a CSV of x,y rows in atlas order."""
    if surface.atlas.n != 1:
        raise ValueError("curve CSV export is for n=1 surfaces; use write_off")
    X = surface.positions
    with open(path, "w") as fh:
        fh.write("x,y\n")
        for v in X:
            fh.write(f"{float(v[0])!r},{float(v[1])!r}\n")


def read_curve_csv(path, t: float = 0.0) -> StarSurface:
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    radii = np.linalg.norm(data, axis=1)
    atlas = DirectionAtlas(n=1, directions=data / radii[:, None])
    return StarSurface(atlas=atlas, radii=radii, t=t)
