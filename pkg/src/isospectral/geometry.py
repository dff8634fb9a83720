"""Assemble tiles into domains by repeated mirror reflection.

A base tile is a convex polytope (triangle, tetrahedron, prism, cube) three
of whose facets carry the colors red, blue and black.  Starting from a root
tile, every glued neighbour of the gluing graph is the mirror image of its
parent across the shared colored facet.  The vertex labels travel with the
reflection, so the colored facets of every tile are known.

Reflections are computed in exact rational arithmetic from the float inputs
and rounded once, so integer fixtures produce integer coordinates.
"""

from __future__ import annotations

import io
import itertools
import math
import struct
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.linalg import orthogonal_procrustes

from .tiling import BOUNDARY, COLORS, Color, GluingGraph

__all__ = [
    "EPS_GEOM",
    "GeometryError",
    "BaseTile",
    "Tile",
    "GluedFace",
    "Assembly",
    "IsometryReport",
    "mirror_point",
    "reflect_point_2d",
    "reflect_across",
    "triangle_with_angles",
    "half_square",
    "basic_simplex",
    "wall_tetrahedron",
    "unit_cube",
    "build_assembly",
    "extrude_prism",
    "is_isometric",
    "export_mesh",
    "polygon_loops",
]

EPS_GEOM = 1e-9


class GeometryError(ValueError):
    pass


# -- reflections ----------------------------------------------------------------

def _fractions(p):
    return [Fraction(float(x)) if not isinstance(x, (int, Fraction)) else Fraction(x) for x in p]


def _solve_exact(a: list[list[Fraction]], b: list[Fraction]) -> list[Fraction] | None:
    n = len(b)
    m = [row[:] + [rhs] for row, rhs in zip(a, b)]
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            return None
        m[c], m[p] = m[p], m[c]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c] / m[c][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [m[i][n] / m[i][i] for i in range(n)]


def _mirror_exact(p: list[Fraction], face: list[list[Fraction]]) -> list[Fraction]:
    """Reflect ``p`` across the affine hull of ``face`` (d points in R^d).

    The foot of the perpendicular is ``sum(alpha_k F_k)`` with
    ``sum(alpha_k) = 1`` and ``(foot - p) . (F_k - F_0) = 0`` for k >= 1.
    """
    d = len(p)
    if len(face) != d:
        raise GeometryError(f"a face in R^{d} needs {d} points, got {len(face)}")
    dirs = [[fk - f0 for fk, f0 in zip(face[k], face[0])] for k in range(1, d)]
    rows = []
    rhs = []
    for u in dirs:
        rows.append([sum(fi * ui for fi, ui in zip(face[i], u)) for i in range(d)])
        rhs.append(sum(pi * ui for pi, ui in zip(p, u)))
    rows.append([Fraction(1)] * d)
    rhs.append(Fraction(1))
    alpha = _solve_exact(rows, rhs)
    if alpha is None:
        raise GeometryError("degenerate face: vertices are affinely dependent")
    foot = [sum(alpha[i] * face[i][k] for i in range(d)) for k in range(d)]
    return [2 * f - x for f, x in zip(foot, p)]


def mirror_point(p, face) -> np.ndarray:
    """Mirror image of the 3D point ``p`` across the plane through ``face``."""
    p = _fractions(p)
    face = [_fractions(v) for v in face]
    if len(p) != 3 or len(face) != 3:
        raise GeometryError("mirror_point expects a 3D point and three face vertices")
    return np.array([float(x) for x in _mirror_exact(p, face)])


def reflect_point_2d(p, edge) -> np.ndarray:
    """Mirror image of the 2D point ``p`` across the line through ``edge``."""
    p = _fractions(p)
    edge = [_fractions(v) for v in edge]
    if len(p) != 2 or len(edge) != 2:
        raise GeometryError("reflect_point_2d expects a 2D point and two edge endpoints")
    return np.array([float(x) for x in _mirror_exact(p, edge)])


def reflect_across(points, face) -> np.ndarray:
    """Reflect every row of ``points`` across the hyperplane spanned by ``face``."""
    points = np.asarray(points, dtype=float)
    d = points.shape[1]
    face = [_fractions(v) for v in np.asarray(face, dtype=float)]
    plane = _hyperplane_points(face, d)
    return np.array([[float(x) for x in _mirror_exact(_fractions(p), plane)] for p in points])


def _hyperplane_points(face: list[list[Fraction]], d: int) -> list[list[Fraction]]:
    """Pick d affinely independent points of a (possibly larger) planar face."""
    if len(face) == d:
        return face
    for combo in itertools.combinations(range(len(face)), d):
        pts = [face[k] for k in combo]
        vecs = np.array([[float(a - b) for a, b in zip(pts[k], pts[0])] for k in range(1, d)])
        if np.linalg.matrix_rank(vecs, tol=1e-12) == d - 1:
            return pts
    raise GeometryError("degenerate face: vertices are affinely dependent")


# -- base tiles -----------------------------------------------------------------

@dataclass(frozen=True)
class BaseTile:
    """A convex tile with three colored facets.

    ``faces`` lists every facet as vertex indices in cyclic order;
    ``color_faces[c]`` indexes the facet carrying color ``c``.
    """

    vertices: np.ndarray
    faces: tuple[tuple[int, ...], ...]
    color_faces: dict
    name: str = ""

    def __post_init__(self):
        verts = np.asarray(self.vertices, dtype=float)
        object.__setattr__(self, "vertices", verts)
        if not np.all(np.isfinite(verts)):
            raise GeometryError("tile vertices must be finite")
        d = verts.shape[1]
        if d not in (2, 3):
            raise GeometryError("tiles live in 2D or 3D")
        if np.linalg.matrix_rank(verts[1:] - verts[0], tol=1e-12) < d:
            raise GeometryError("degenerate base tile: vertices are affinely dependent")
        if sorted(self.color_faces) != list(COLORS):
            raise GeometryError("every color needs exactly one face")
        if len(set(self.color_faces.values())) != 3:
            raise GeometryError("colors must sit on distinct faces")
        for f in self.faces:
            if len(f) < d:
                raise GeometryError(f"face {f} has too few vertices")

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    def face_of(self, color: Color) -> tuple[int, ...]:
        return self.faces[self.color_faces[Color(color)]]

    @property
    def fixed_faces(self) -> list[int]:
        colored = set(self.color_faces.values())
        return [k for k in range(len(self.faces)) if k not in colored]

    @classmethod
    def simplex(cls, vertices, fixed_face=None, name: str = "") -> "BaseTile":
        """Triangle or tetrahedron; colors go on the facets opposite the
        vertices of ``fixed_face`` in order (red, blue, black).

        In 2D there is no fixed face and edge ``k`` is opposite vertex ``k``.
        """
        verts = np.asarray(vertices, dtype=float)
        d = verts.shape[1]
        if verts.shape[0] != d + 1:
            raise GeometryError(f"a {d}D simplex has {d + 1} vertices")
        faces = tuple(tuple(i for i in range(d + 1) if i != k) for k in range(d + 1))
        if d == 2:
            opposite = (0, 1, 2) if fixed_face is None else tuple(fixed_face)
        else:
            fixed_face = (0, 1, 2) if fixed_face is None else tuple(fixed_face)
            if len(set(fixed_face)) != 3 or not set(fixed_face) <= set(range(4)):
                raise GeometryError("fixed face must name three distinct vertices")
            opposite = fixed_face
        color_faces = {c: opp for c, opp in zip(COLORS, opposite)}
        return cls(verts, faces, color_faces, name)


def triangle_with_angles(angles_deg, edge: float = 1.0) -> np.ndarray:
    """Triangle vertices with the given interior angles (degrees).

    Vertex 0 at the origin, vertex 1 on the positive x axis at distance
    ``edge``.
    """
    a0, a1, a2 = (math.radians(a) for a in angles_deg)
    if abs(a0 + a1 + a2 - math.pi) > 1e-9 or min(a0, a1, a2) <= 0:
        raise GeometryError("triangle angles must be positive and sum to 180")
    # law of sines: side opposite vertex k is proportional to sin(a_k)
    side02 = edge * math.sin(a1) / math.sin(a2)
    return np.array([[0.0, 0.0], [edge, 0.0], [side02 * math.cos(a0), side02 * math.sin(a0)]])


def half_square(leg: float = 1.0) -> BaseTile:
    """Right isosceles triangle (0,0), (leg,0), (0,leg).

    Red on the hypotenuse, blue on the leg x = 0, black on the leg y = 0.
    With this coloring the 7_3 rule gives the Gordon-Webb-Wolpert pair.
    """
    return BaseTile.simplex([[0, 0], [leg, 0], [0, leg]], name="half-square")


def basic_simplex() -> BaseTile:
    """Orthoscheme ``0 <= y <= x <= z <= 1`` with face (P0, P1, P2) fixed."""
    verts = [[0, 0, 0], [0, 0, 1], [1, 0, 1], [1, 1, 1]]
    return BaseTile.simplex(verts, fixed_face=(0, 1, 2), name="simplex")


def wall_tetrahedron() -> BaseTile:
    """Corner tetrahedron with face (P0, P1, P3) fixed."""
    verts = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]]
    return BaseTile.simplex(verts, fixed_face=(0, 1, 3), name="wall")


def unit_cube() -> BaseTile:
    """Unit cube with red on x = 1, blue on y = 1, black on z = 1."""
    verts = np.array(list(itertools.product((0, 1), repeat=3)), dtype=float)

    def idx(x, y, z):
        return 4 * x + 2 * y + z

    faces = (
        (idx(0, 0, 0), idx(0, 1, 0), idx(0, 1, 1), idx(0, 0, 1)),  # x = 0
        (idx(1, 0, 0), idx(1, 1, 0), idx(1, 1, 1), idx(1, 0, 1)),  # x = 1
        (idx(0, 0, 0), idx(1, 0, 0), idx(1, 0, 1), idx(0, 0, 1)),  # y = 0
        (idx(0, 1, 0), idx(1, 1, 0), idx(1, 1, 1), idx(0, 1, 1)),  # y = 1
        (idx(0, 0, 0), idx(1, 0, 0), idx(1, 1, 0), idx(0, 1, 0)),  # z = 0
        (idx(0, 0, 1), idx(1, 0, 1), idx(1, 1, 1), idx(0, 1, 1)),  # z = 1
    )
    return BaseTile(verts, faces, {Color.RED: 1, Color.BLUE: 3, Color.BLACK: 5}, "cube")


# -- assemblies -----------------------------------------------------------------

@dataclass(frozen=True)
class Tile:
    index: int
    vertices: np.ndarray
    transform: np.ndarray  # (d+1, d+1) affine map from base to tile coordinates
    parity: int

    def apply(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return pts @ self.transform[:-1, :-1].T + self.transform[:-1, -1]

    def pull_back(self, points) -> np.ndarray:
        """Map tile coordinates back to base-tile coordinates."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        lin = self.transform[:-1, :-1]
        # rigid motion: inverse of the linear part is its transpose
        return (pts - self.transform[:-1, -1]) @ lin


@dataclass(frozen=True)
class GluedFace:
    tile_i: int
    tile_j: int
    color: Color
    vertices: np.ndarray


@dataclass(frozen=True)
class Assembly:
    base: BaseTile
    graph: GluingGraph
    tiles: tuple[Tile, ...]
    glued_faces: tuple[GluedFace, ...]
    boundary_faces: tuple[tuple[int, int], ...]  # (tile, face index)
    coincident_faces: tuple[tuple[tuple[int, int], tuple[int, int]], ...]
    overlaps: tuple[tuple[int, int], ...] = ()
    name: str = ""

    @property
    def dimension(self) -> int:
        return self.base.dim

    @property
    def overlapping(self) -> bool:
        return bool(self.overlaps)

    def face_vertices(self, tile: int, face: int) -> np.ndarray:
        return self.tiles[tile].vertices[list(self.base.faces[face])]

    def slit_faces(self) -> list[tuple[int, int]]:
        return sorted({f for pair in self.coincident_faces for f in pair})

    def vertices(self) -> np.ndarray:
        """Distinct vertices of all tiles, lexicographically sorted."""
        return _unique_points(np.vstack([t.vertices for t in self.tiles]))

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        allv = np.vstack([t.vertices for t in self.tiles])
        return allv.min(axis=0), allv.max(axis=0)

    def volume(self) -> float:
        return len(self.tiles) * _convex_volume(self.base)

    def summary(self) -> dict:
        return {
            "tiles": len(self.tiles),
            "glued_faces": len(self.glued_faces),
            "boundary_faces": len(self.boundary_faces),
            "slit_pairs": len(self.coincident_faces),
            "overlapping": self.overlapping,
        }


def _unique_points(points: np.ndarray, eps: float = EPS_GEOM) -> np.ndarray:
    keys = {}
    for p in points:
        key = tuple(np.round(p / (eps * 10)).astype(np.int64))
        keys.setdefault(key, p)
    return np.array(sorted(keys.values(), key=tuple))


def _same_point_set(a: np.ndarray, b: np.ndarray, eps: float = EPS_GEOM) -> bool:
    if len(a) != len(b):
        return False
    used = set()
    for p in a:
        d = np.max(np.abs(b - p), axis=1)
        hits = [k for k in np.flatnonzero(d < eps) if k not in used]
        if not hits:
            return False
        used.add(hits[0])
    return True


def _affine_from_frames(base: np.ndarray, image: np.ndarray) -> np.ndarray:
    """Exact affine map sending base vertices onto image vertices."""
    d = base.shape[1]
    frame = None
    for combo in itertools.combinations(range(len(base)), d + 1):
        if np.linalg.matrix_rank(base[list(combo[1:])] - base[combo[0]], tol=1e-12) == d:
            frame = combo
            break
    src = [[Fraction(float(x)) for x in base[k]] + [Fraction(1)] for k in frame]
    out = np.eye(d + 1)
    for row in range(d):
        rhs = [Fraction(float(image[k][row])) for k in frame]
        coeffs = _solve_exact(src, rhs)
        out[row] = [float(c) for c in coeffs]
    return out


def _convex_volume(base: BaseTile) -> float:
    from scipy.spatial import ConvexHull

    return float(ConvexHull(base.vertices).volume)


def build_assembly(graph: GluingGraph, base: BaseTile, root_tile: int = 0,
                   name: str = "") -> Assembly:
    """Unfold ``graph`` breadth first from ``root_tile`` by mirror reflections."""
    n = graph.n_tiles
    if not 0 <= root_tile < n:
        raise GeometryError(f"root tile {root_tile} out of range")
    d = base.dim
    verts: list[np.ndarray | None] = [None] * n
    parity = [0] * n
    verts[root_tile] = base.vertices.copy()
    queue = deque([root_tile])
    tree_edges = set()
    while queue:
        i = queue.popleft()
        for color in COLORS:
            j = graph.neighbor(i, color)
            if j is BOUNDARY or verts[j] is not None:
                continue
            face = verts[i][list(base.face_of(color))]
            verts[j] = reflect_across(verts[i], face)
            parity[j] = 1 - parity[i]
            tree_edges.add((min(i, j), max(i, j), color))
            queue.append(j)

    tiles = tuple(
        Tile(k, verts[k], _affine_from_frames(base.vertices, verts[k]), parity[k])
        for k in range(n)
    )

    glued = []
    for color in COLORS:
        fidx = list(base.face_of(color))
        for i, j in graph.pairs(color):
            fi = verts[i][fidx]
            fj = verts[j][fidx]
            if not _same_point_set(fi, fj):
                raise GeometryError(f"{color.label} face of tiles {i} and {j} do not coincide")
            if (i, j, color) not in tree_edges:
                # closing a cycle of reflections: the whole tile must match
                if not np.allclose(reflect_across(verts[i], fi), verts[j], atol=EPS_GEOM, rtol=0):
                    raise GeometryError(
                        f"reflection cycle through tiles {i}-{j} ({color.label}) does not close")
            glued.append(GluedFace(i, j, color, fi))

    boundary = []
    for k in range(n):
        for f in range(len(base.faces)):
            color = next((c for c, idx in base.color_faces.items() if idx == f), None)
            if color is None or graph.neighbor(k, color) is BOUNDARY:
                boundary.append((k, f))

    coincident = []
    for a, b in itertools.combinations(boundary, 2):
        if a[0] == b[0]:
            continue
        va = verts[a[0]][list(base.faces[a[1]])]
        vb = verts[b[0]][list(base.faces[b[1]])]
        if _same_point_set(va, vb):
            coincident.append((a, b))

    overlaps = tuple(
        (i, j) for i, j in itertools.combinations(range(n), 2)
        if _interiors_overlap(verts[i], verts[j], base)
    )
    return Assembly(base, graph, tiles, tuple(glued), tuple(boundary), tuple(coincident),
                    overlaps, name)


def _face_normals(verts: np.ndarray, base: BaseTile) -> list[np.ndarray]:
    d = base.dim
    normals = []
    for f in base.faces:
        pts = verts[list(f)]
        if d == 2:
            e = pts[1] - pts[0]
            normals.append(np.array([-e[1], e[0]]))
        else:
            nrm = np.cross(pts[1] - pts[0], pts[2] - pts[0])
            k = 3
            while np.linalg.norm(nrm) < 1e-12 and k < len(pts):
                nrm = np.cross(pts[1] - pts[0], pts[k] - pts[0])
                k += 1
            normals.append(nrm)
    return normals


def _edges(verts: np.ndarray, base: BaseTile) -> np.ndarray:
    pairs = {tuple(sorted((a, b))) for f in base.faces for a, b in zip(f, f[1:] + f[:1])}
    return np.array([verts[b] - verts[a] for a, b in sorted(pairs)])


def _interiors_overlap(va: np.ndarray, vb: np.ndarray, base: BaseTile,
                       eps: float = EPS_GEOM) -> bool:
    """Separating-axis test on the open interiors of two convex tiles."""
    if np.any(np.minimum(va.max(0), vb.max(0)) - np.maximum(va.min(0), vb.min(0)) <= eps):
        return False
    axes = _face_normals(va, base) + _face_normals(vb, base)
    if base.dim == 3:
        ea, eb = _edges(va, base), _edges(vb, base)
        axes.extend(np.cross(ea[:, None, :], eb[None, :, :]).reshape(-1, 3))
    axes = np.array(axes)
    norms = np.linalg.norm(axes, axis=1)
    axes = axes[norms > 1e-12] / norms[norms > 1e-12, None]
    pa, pb = va @ axes.T, vb @ axes.T
    gap = np.minimum(pa.max(0), pb.max(0)) - np.maximum(pa.min(0), pb.min(0))
    return bool(np.all(gap > eps))


def extrude_prism(flat: Assembly, height: float) -> Assembly:
    """Sweep a planar assembly ``height`` units along z."""
    if flat.dimension != 2:
        raise GeometryError("only planar assemblies can be extruded")
    if not height > 0:
        raise GeometryError("prism height must be positive")
    base = flat.base
    k = len(base.vertices)
    bottom = np.hstack([base.vertices, np.zeros((k, 1))])
    top = np.hstack([base.vertices, np.full((k, 1), float(height))])
    verts = np.vstack([bottom, top])
    # base polygon vertex order, counterclockwise
    ring = _polygon_order(base)
    side = []
    side_of_edge = {}
    for a, b in zip(ring, ring[1:] + ring[:1]):
        side_of_edge[frozenset((a, b))] = len(side)
        side.append((a, b, b + k, a + k))
    faces = tuple(side) + (tuple(ring), tuple(r + k for r in ring))
    colors = {}
    for c, fidx in base.color_faces.items():
        colors[c] = side_of_edge[frozenset(base.faces[fidx])]
    prism = BaseTile(verts, faces, colors, f"{base.name}-prism")
    root = next(t.index for t in flat.tiles if np.allclose(t.transform, np.eye(3)))
    return build_assembly(flat.graph, prism, root_tile=root, name=f"{flat.name}-prism")


def _polygon_order(base: BaseTile) -> list[int]:
    """Vertex indices of a convex polygon tile in counterclockwise order."""
    v = base.vertices
    c = v.mean(axis=0)
    ang = np.arctan2(v[:, 1] - c[1], v[:, 0] - c[0])
    return [int(i) for i in np.argsort(ang)]


def polygon_loops(assembly: Assembly) -> list[np.ndarray]:
    """Counterclockwise vertex loop of every tile of a planar assembly."""
    if assembly.dimension != 2:
        raise GeometryError("polygon loops exist only for planar assemblies")
    loops = []
    for t in assembly.tiles:
        c = t.vertices.mean(axis=0)
        ang = np.arctan2(t.vertices[:, 1] - c[1], t.vertices[:, 0] - c[0])
        loops.append(t.vertices[np.argsort(ang)])
    return loops


# -- isometry -------------------------------------------------------------------

@dataclass(frozen=True)
class IsometryReport:
    isometric: bool
    distances_match: bool
    orthogonal: np.ndarray | None = None
    translation: np.ndarray | None = None
    correspondence: tuple[int, ...] | None = field(default=None, compare=False)


def _sorted_distances(points: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - points[None, :, :]
    dist = np.sqrt((diff ** 2).sum(-1))
    iu = np.triu_indices(len(points), 1)
    return np.sort(dist[iu])


def is_isometric(a: Assembly, b: Assembly, eps: float = EPS_GEOM,
                 check_boundary: bool = True) -> IsometryReport:
    """Decide congruence of two assemblies.

    Sorted pairwise vertex distances are compared first; when they agree,
    vertex correspondences consistent with the distance matrix are searched
    and each candidate is checked with a best-fit orthogonal alignment.  An
    alignment counts only if it maps tiles onto tiles and, with
    ``check_boundary``, boundary and slit faces onto boundary and slit faces.
    """
    if a.dimension != b.dimension:
        raise GeometryError("assemblies of different dimension")
    pa, pb = a.vertices(), b.vertices()
    if len(pa) != len(pb):
        return IsometryReport(False, False)
    scale = max(1.0, float(np.abs(pa).max()), float(np.abs(pb).max()))
    tol = eps * scale * 10
    da, db = _sorted_distances(pa), _sorted_distances(pb)
    if not np.allclose(da, db, atol=tol, rtol=0):
        return IsometryReport(False, False)

    dist_a = np.sqrt(((pa[:, None] - pa[None]) ** 2).sum(-1))
    dist_b = np.sqrt(((pb[:, None] - pb[None]) ** 2).sum(-1))
    prof_a = np.sort(dist_a, axis=1)
    prof_b = np.sort(dist_b, axis=1)
    d = a.dimension
    n = len(pa)

    # frame: d + 1 affinely independent vertices of a, greedily spread out
    frame = [0]
    for _ in range(d):
        best = None
        for k in range(n):
            if k in frame:
                continue
            trial = frame + [k]
            vol = np.linalg.svd(pa[trial[1:]] - pa[trial[0]], compute_uv=False)
            score = float(np.prod(vol))
            if best is None or score > best[0] + 1e-12:
                best = (score, k)
        frame.append(best[1])

    candidates = []
    for k in frame:
        cand = [m for m in range(n) if np.allclose(prof_a[k], prof_b[m], atol=tol, rtol=0)]
        # try the same coordinates first so self-comparison yields the identity
        cand.sort(key=lambda m: (not np.allclose(pa[k], pb[m], atol=tol), m))
        candidates.append(cand)

    tiles_b = [_unique_points(t.vertices) for t in b.tiles]
    faces_b = _boundary_face_sets(b) if check_boundary else None

    def extend(chosen):
        if len(chosen) == len(frame):
            return _try_alignment(chosen)
        k = frame[len(chosen)]
        for m in candidates[len(chosen)]:
            if m in chosen:
                continue
            if all(abs(dist_a[k, frame[i]] - dist_b[m, chosen[i]]) < tol for i in range(len(chosen))):
                res = extend(chosen + [m])
                if res is not None:
                    return res
        return None

    def _try_alignment(chosen):
        src = pa[frame]
        dst = pb[chosen]
        sc, dc = src.mean(axis=0), dst.mean(axis=0)
        r, _ = orthogonal_procrustes(src - sc, dst - dc)
        q = r.T
        t = dc - q @ sc
        mapped = pa @ q.T + t
        corr = []
        for p in mapped:
            dists = np.max(np.abs(pb - p), axis=1)
            k = int(np.argmin(dists))
            if dists[k] > tol:
                return None
            corr.append(k)
        if len(set(corr)) != n:
            return None
        for tile in a.tiles:
            img = _unique_points(tile.vertices @ q.T + t)
            if not any(_same_point_set(img, tb, tol) for tb in tiles_b):
                return None
        if faces_b is not None:
            for fa in _boundary_face_sets(a):
                img = fa @ q.T + t
                if not any(_same_point_set(img, fb, tol) for fb in faces_b):
                    return None
        return q, t, tuple(corr)

    found = extend([])
    if found is None:
        return IsometryReport(False, True)
    q, t, corr = found
    q = np.where(np.abs(q - np.round(q)) < tol, np.round(q), q)
    t = np.where(np.abs(t - np.round(t)) < tol, np.round(t), t)
    return IsometryReport(True, True, q, t, corr)


def _boundary_face_sets(assembly: Assembly) -> list[np.ndarray]:
    faces = [assembly.face_vertices(t, f) for t, f in assembly.boundary_faces]
    return faces


# -- mesh export ----------------------------------------------------------------

def _oriented_boundary_triangles(assembly: Assembly) -> list[np.ndarray]:
    tris = []
    for t, f in assembly.boundary_faces:
        tile = assembly.tiles[t]
        pts = tile.vertices[list(assembly.base.faces[f])]
        centroid = tile.vertices.mean(axis=0)
        for k in range(1, len(pts) - 1):
            tri = np.array([pts[0], pts[k], pts[k + 1]])
            nrm = np.cross(tri[1] - tri[0], tri[2] - tri[0])
            if np.dot(nrm, tri[0] - centroid) < 0:
                tri = tri[[0, 2, 1]]
            tris.append(tri)
    return tris


def export_mesh(assembly: Assembly, fmt: str = "obj") -> bytes:
    """Outward boundary surface as OBJ (ASCII) or binary STL.

    Glued faces are interior and dropped; slit faces appear once per side.
    """
    if assembly.dimension != 3:
        raise GeometryError("mesh export needs a 3D assembly")
    fmt = fmt.lower()
    tris = _oriented_boundary_triangles(assembly)
    if fmt == "obj":
        index: dict[tuple, int] = {}
        coords = []
        faces = []
        for tri in tris:
            ids = []
            for p in tri:
                key = tuple(np.round(p / EPS_GEOM).astype(np.int64))
                if key not in index:
                    index[key] = len(coords) + 1
                    coords.append(p)
                ids.append(index[key])
            faces.append(ids)
        out = io.StringIO()
        out.write(f"# {assembly.name or 'assembly'}: {len(assembly.tiles)} tiles\n")
        for p in coords:
            out.write("v {:.12g} {:.12g} {:.12g}\n".format(*p))
        for ids in faces:
            out.write("f {} {} {}\n".format(*ids))
        return out.getvalue().encode("ascii")
    if fmt == "stl":
        header = (assembly.name or "isospectral assembly").encode("ascii")[:80].ljust(80, b" ")
        body = [header, struct.pack("<I", len(tris))]
        for tri in tris:
            nrm = np.cross(tri[1] - tri[0], tri[2] - tri[0])
            nrm = nrm / np.linalg.norm(nrm)
            body.append(struct.pack("<12fH", *nrm, *tri[0], *tri[1], *tri[2], 0))
        return b"".join(body)
    raise GeometryError(f"unsupported mesh format {fmt!r}")
