"""Finite-difference Dirichlet spectra of assembled domains.

Domains are sampled on the lattice ``h * Z^d``.  A node carries an unknown
when it lies in some tile and on none of the boundary facets (outer
boundary, forgotten facets, and coincident slit facets).  The operator is
the standard (2d+1)-point stencil with homogeneous Dirichlet data.
"""

from __future__ import annotations

import csv
import io
import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .geometry import EPS_GEOM, Assembly, GeometryError

__all__ = [
    "RasterDomain",
    "DiscreteLaplacian",
    "Spectrum",
    "ComparisonReport",
    "TransplantReport",
    "ConvergenceError",
    "rasterize",
    "assemble_laplacian",
    "lowest_eigenvalues",
    "compare_spectra",
    "box_fd_eigenvalues",
    "transplant_grid_function",
    "spectrum_csv",
    "DENSE_LIMIT",
]

log = logging.getLogger(__name__)

DENSE_LIMIT = 2000


class ConvergenceError(RuntimeError):
    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


@dataclass(frozen=True)
class RasterDomain:
    """Interior lattice nodes of a domain.

    Node ``idx`` (integer array, shape ``(d,)``) sits at ``h * (origin + idx)``.
    ``index[idx]`` is the equation number or -1; numbering follows C order,
    i.e. lexicographic in (x, y, z).
    """

    h: float
    origin: np.ndarray
    mask: np.ndarray
    index: np.ndarray
    n_interior: int

    @property
    def dimension(self) -> int:
        return self.mask.ndim

    @property
    def shape(self) -> tuple[int, ...]:
        return self.mask.shape

    def node_indices(self) -> np.ndarray:
        """Lattice indices (relative to ``origin``) of the interior nodes, in equation order."""
        return np.argwhere(self.mask)

    def coordinates(self) -> np.ndarray:
        return self.h * (self.node_indices() + self.origin)

    def grid_values(self, vector) -> np.ndarray:
        """Scatter an interior vector onto the full lattice box (zero elsewhere)."""
        out = np.zeros(self.shape, dtype=np.asarray(vector).dtype)
        out[self.mask] = vector
        return out


def _halfspaces(vertices: np.ndarray, faces) -> tuple[np.ndarray, np.ndarray]:
    """Outward unit normals and offsets of the facets of a convex tile."""
    d = vertices.shape[1]
    centroid = vertices.mean(axis=0)
    normals, offsets = [], []
    for f in faces:
        pts = vertices[list(f)]
        if d == 2:
            e = pts[1] - pts[0]
            nrm = np.array([-e[1], e[0]])
        else:
            nrm = np.zeros(3)
            for k in range(2, len(pts)):
                nrm = np.cross(pts[1] - pts[0], pts[k] - pts[0])
                if np.linalg.norm(nrm) > 1e-12:
                    break
        nrm = nrm / np.linalg.norm(nrm)
        off = float(nrm @ pts[0])
        if nrm @ centroid > off:
            nrm, off = -nrm, -off
        normals.append(nrm)
        offsets.append(off)
    return np.array(normals), np.array(offsets)


def rasterize(assembly: Assembly, h: float, eps: float = EPS_GEOM) -> RasterDomain:
    """Sample ``assembly`` on the lattice of spacing ``h``."""
    if not h > 0:
        raise ValueError("mesh size h must be positive")
    if assembly.overlapping:
        raise GeometryError(f"assembly {assembly.name!r} has overlapping tiles "
                            f"{list(assembly.overlaps)}; its spectrum is undefined")
    lo, hi = assembly.bounds()
    first = np.ceil(lo / h - 1e-9).astype(int)
    last = np.floor(hi / h + 1e-9).astype(int)
    shape = tuple(last - first + 1)
    verts = np.vstack([t.vertices for t in assembly.tiles])
    off_lattice = np.abs(verts / h - np.round(verts / h)).max()
    if off_lattice > 1e-6:
        warnings.warn(f"domain vertices are off the h={h:g} lattice "
                      f"(max offset {off_lattice * h:.3g}); boundary is resolved to O(h)",
                      stacklevel=2)

    inside = np.zeros(shape, dtype=bool)
    on_boundary = np.zeros(shape, dtype=bool)
    faces = assembly.base.faces
    boundary_by_tile: dict[int, list[int]] = {}
    for t, f in assembly.boundary_faces:
        boundary_by_tile.setdefault(t, []).append(f)

    for tile in assembly.tiles:
        tlo = np.ceil(tile.vertices.min(axis=0) / h - 1e-9).astype(int) - first
        thi = np.floor(tile.vertices.max(axis=0) / h + 1e-9).astype(int) - first
        axes = [np.arange(a, b + 1) for a, b in zip(tlo, thi)]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(shape))
        x = h * (grid + first)
        normals, offsets = _halfspaces(tile.vertices, faces)
        signed = x @ normals.T - offsets  # <= 0 inside
        in_tile = np.all(signed <= eps, axis=1)
        sl = tuple(grid[in_tile].T)
        inside[sl] = True
        for f in boundary_by_tile.get(tile.index, ()):
            on_face = in_tile & (np.abs(signed[:, f]) <= eps)
            on_boundary[tuple(grid[on_face].T)] = True

    mask = inside & ~on_boundary
    index = np.full(shape, -1, dtype=np.int64)
    n = int(mask.sum())
    index[mask] = np.arange(n)
    return RasterDomain(float(h), first, mask, index, n)


@dataclass(frozen=True)
class DiscreteLaplacian:
    matrix: sp.csr_matrix
    h: float
    dimension: int

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


def assemble_laplacian(raster: RasterDomain) -> DiscreteLaplacian:
    """Standard (2d+1)-point Dirichlet Laplacian on the interior nodes."""
    n = raster.n_interior
    if n < 1:
        raise ValueError("empty domain: no interior lattice nodes")
    d = raster.dimension
    h2 = raster.h ** 2
    rows = [np.arange(n)]
    cols = [np.arange(n)]
    vals = [np.full(n, 2.0 * d / h2)]
    idx = raster.index
    for axis in range(d):
        a = [slice(None)] * d
        b = [slice(None)] * d
        a[axis] = slice(0, -1)
        b[axis] = slice(1, None)
        ia, ib = idx[tuple(a)], idx[tuple(b)]
        both = (ia >= 0) & (ib >= 0)
        i, j = ia[both], ib[both]
        rows += [i, j]
        cols += [j, i]
        vals += [np.full(len(i), -1.0 / h2)] * 2
    mat = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                        shape=(n, n)).tocsr()
    return DiscreteLaplacian(mat, raster.h, d)


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = field(default=None, repr=False)
    residuals: np.ndarray | None = None
    h: float | None = None
    tol: float | None = None
    method: str = ""

    def __len__(self):
        return len(self.eigenvalues)


def lowest_eigenvalues(lap: DiscreteLaplacian, m: int, tol: float = 1e-10,
                       seed: int = 20160, method: str = "auto",
                       vectors: bool = False) -> Spectrum:
    """The ``m`` smallest eigenvalues of ``lap``, with multiplicity.

    ``method`` is ``"dense"``, ``"arpack"`` (shift-invert Lanczos about 0),
    ``"lobpcg"``, or ``"auto"`` (dense up to ``DENSE_LIMIT`` unknowns, else
    arpack).  Every pair is checked: ``|L v - lam v| <= tol * lam``.
    """
    n = lap.size
    if not 1 <= m <= n:
        raise ValueError(f"cannot compute {m} eigenvalues of a {n}x{n} operator")
    A = lap.matrix
    if method == "auto":
        method = "dense" if n <= DENSE_LIMIT else "arpack"
    rng = np.random.default_rng(seed)
    if method == "dense":
        w, v = scipy.linalg.eigh(A.toarray(), subset_by_index=[0, m - 1])
    elif method == "arpack":
        v0 = rng.standard_normal(n)
        w, v = spla.eigsh(A.tocsc(), k=m, sigma=0.0, which="LM", v0=v0, tol=tol * 1e-3)
    elif method == "lobpcg":
        x0 = rng.standard_normal((n, m + 5))
        ilu = spla.splu(A.tocsc())
        precond = spla.LinearOperator((n, n), matvec=ilu.solve)
        w, v = spla.lobpcg(A, x0, M=precond, largest=False, tol=tol * 1e-2, maxiter=500)
        w, v = w[:m], v[:, :m]
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    order = np.argsort(w)
    w, v = w[order], v[:, order]
    v = v / np.linalg.norm(v, axis=0)
    res = np.linalg.norm(A @ v - v * w, axis=0)
    bad = res > tol * np.abs(w)
    if np.any(bad):
        raise ConvergenceError(
            f"{int(bad.sum())} eigenpairs above relative residual {tol:g} "
            f"(worst {np.max(res / np.abs(w)):.3g})", res)
    log.debug("%s: %d eigenpairs of n=%d, max rel residual %.2e", method, m, n,
              float(np.max(res / np.abs(w))))
    return Spectrum(w, v if vectors else None, res, lap.h, tol, method)


@dataclass(frozen=True)
class ComparisonReport:
    differences: np.ndarray
    max_abs_diff: float
    l2_diff: float


def compare_spectra(s1: Spectrum, s2: Spectrum, m: int | None = None) -> ComparisonReport:
    if m is None:
        m = min(len(s1), len(s2))
    if len(s1) < m or len(s2) < m:
        raise ValueError(f"need {m} eigenvalues, have {len(s1)} and {len(s2)}")
    diff = np.abs(np.asarray(s1.eigenvalues[:m]) - np.asarray(s2.eigenvalues[:m]))
    return ComparisonReport(diff, float(diff.max(initial=0.0)), float(np.sqrt(np.sum(diff ** 2))))


def box_fd_eigenvalues(counts, h: float) -> np.ndarray:
    """All eigenvalues of the (2d+1)-point Dirichlet stencil on a box.

    ``counts[i]`` is the number of interior nodes along axis ``i``; the box
    side is ``(counts[i] + 1) * h``.  Closed form
    ``sum_i 4/h^2 sin^2(pi p_i / (2 (counts[i] + 1)))``.
    """
    parts = []
    for c in counts:
        p = np.arange(1, c + 1)
        parts.append(4.0 / h ** 2 * np.sin(np.pi * p / (2 * (c + 1))) ** 2)
    total = parts[0]
    for part in parts[1:]:
        total = np.add.outer(total, part).ravel()
    return np.sort(total)


def spectrum_csv(s1: Spectrum, s2: Spectrum | None = None, m: int | None = None) -> str:
    """CSV table ``k,lambda_A[,lambda_B,abs_diff]``."""
    m = len(s1) if m is None else m
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    if s2 is None:
        w.writerow(["k", "lambda_A"])
        for k in range(m):
            w.writerow([k + 1, f"{s1.eigenvalues[k]:.10g}"])
    else:
        w.writerow(["k", "lambda_A", "lambda_B", "abs_diff"])
        for k in range(m):
            a, b = s1.eigenvalues[k], s2.eigenvalues[k]
            w.writerow([k + 1, f"{a:.10g}", f"{b:.10g}", f"{abs(a - b):.6e}"])
    return out.getvalue()


# -- transplantation on the grid -------------------------------------------------

@dataclass(frozen=True)
class TransplantReport:
    vector: np.ndarray
    rayleigh_quotient: float
    residual: float
    missed_nodes: int


def _multilinear(grid: np.ndarray, raster: RasterDomain, points: np.ndarray) -> np.ndarray:
    """Multilinear interpolation of lattice values at arbitrary points."""
    s = points / raster.h - raster.origin
    base = np.floor(s + 1e-9).astype(int)
    frac = np.clip(s - base, 0.0, 1.0)
    frac[frac < 1e-9] = 0.0
    d = raster.dimension
    out = np.zeros(len(points))
    shape = np.array(raster.shape)
    for corner in np.ndindex(*(2,) * d):
        c = np.array(corner)
        w = np.prod(np.where(c == 1, frac, 1.0 - frac), axis=1)
        idx = base + c
        ok = np.all((idx >= 0) & (idx < shape), axis=1) & (w > 0)
        vals = np.zeros(len(points))
        vals[ok] = grid[tuple(idx[ok].T)]
        out += w * vals
    return out


def _tile_membership(assembly: Assembly, points: np.ndarray, eps: float = EPS_GEOM) -> np.ndarray:
    """Index of a tile containing each point (-1 if none)."""
    owner = np.full(len(points), -1, dtype=int)
    for tile in assembly.tiles:
        normals, offsets = _halfspaces(tile.vertices, assembly.base.faces)
        inside = np.all(points @ normals.T - offsets <= eps, axis=1) & (owner < 0)
        owner[inside] = tile.index
    return owner


def transplant_grid_function(src: Assembly, src_raster: RasterDomain, eigenvector,
                             dst: Assembly, dst_raster: RasterDomain, T,
                             normalization: float | None = None) -> TransplantReport:
    """Move a grid eigenfunction of ``src`` onto ``dst`` tile by tile.

    For a node of ``dst`` in tile ``i``, the value is
    ``C * sum_j T[i, j] * u(tile_j(tile_i^{-1}(x)))`` where ``u`` is the
    source eigenvector interpolated multilinearly.  With ``normalization``
    None the result is scaled to unit norm.
    """
    T = np.asarray(T, dtype=float)
    n = src.graph.n_tiles
    if T.shape != (n, n) or dst.graph.n_tiles != n:
        raise ValueError("T must be square with one row per tile")
    grid = src_raster.grid_values(np.asarray(eigenvector, dtype=float))
    x = dst_raster.coordinates()
    owner = _tile_membership(dst, x)
    missed = int(np.sum(owner < 0))
    out = np.zeros(len(x))
    for i in range(n):
        sel = owner == i
        if not np.any(sel):
            continue
        base_pts = dst.tiles[i].pull_back(x[sel])
        acc = np.zeros(int(sel.sum()))
        for j in range(n):
            if T[i, j] == 0:
                continue
            acc += T[i, j] * _multilinear(grid, src_raster, src.tiles[j].apply(base_pts))
        out[sel] = acc
    nrm = np.linalg.norm(out)
    if normalization is None:
        out = out / nrm if nrm > 0 else out
    else:
        out = normalization * out
    lap = assemble_laplacian(dst_raster).matrix
    denom = float(out @ out)
    rq = float(out @ (lap @ out)) / denom if denom > 0 else float("nan")
    res = float(np.linalg.norm(lap @ out - rq * out) / np.sqrt(denom)) if denom > 0 else float("nan")
    return TransplantReport(out, rq, res, missed)
