"""Exact transplantation matrices for a pair of gluing graphs.

A transplantation matrix ``T`` satisfies ``T @ A[c] == B[c] @ T`` for the
three signed gluing matrices of each graph.  The solution space is found
exactly: the ``3 N^2`` scalar constraints on the ``N^2`` entries of ``T`` are
reduced with integer (fraction-free) Gauss-Jordan elimination, and the
nullspace is returned as integer matrices.

Matrices in this module are numpy arrays of ``dtype=object`` holding Python
``int`` or ``fractions.Fraction`` values, so products and residuals are exact.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

__all__ = [
    "TransplantationBasis",
    "ResidualReport",
    "DecompositionSignature",
    "as_exact",
    "solve_transplantation",
    "verify_transplantation",
    "decomposition_signature",
    "is_nontrivial",
    "is_signed_permutation",
    "transplant_coefficients",
    "integer_nullspace",
    "exact_det",
    "format_matrix",
    "parse_matrices",
]


def as_exact(m) -> np.ndarray:
    """Copy ``m`` into an object array of ints/Fractions."""
    arr = np.asarray(m, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        if isinstance(v, Fraction):
            out[idx] = v.numerator if v.denominator == 1 else v
        elif isinstance(v, (int, np.integer)):
            out[idx] = int(v)
        elif isinstance(v, (float, np.floating)):
            f = Fraction(float(v))
            out[idx] = f.numerator if f.denominator == 1 else f
        else:
            out[idx] = v
    return out


# -- fraction-free elimination --------------------------------------------------

def _normalize_row(row: dict[int, int]) -> dict[int, int]:
    g = 0
    for v in row.values():
        g = math.gcd(g, v)
    if g > 1:
        row = {k: v // g for k, v in row.items()}
    return row


def integer_nullspace(rows: list[dict[int, int]], n_cols: int) -> list[list[int]]:
    """Integer basis of ``{x : R x = 0}`` for a sparse integer matrix ``R``.

    ``rows`` maps column index -> nonzero integer coefficient.  Each basis
    vector has content 1 and a positive first nonzero entry.
    """
    pivots: dict[int, dict[int, int]] = {}  # pivot column -> reduced row
    for row in rows:
        row = {k: int(v) for k, v in row.items() if v}
        # reduce against existing pivots (fraction free)
        changed = True
        while changed and row:
            changed = False
            for col in sorted(row):
                prow = pivots.get(col)
                if prow is None:
                    continue
                a, b = prow[col], row[col]
                new = {k: a * v for k, v in row.items()}
                for k, v in prow.items():
                    new[k] = new.get(k, 0) - b * v
                row = _normalize_row({k: v for k, v in new.items() if v})
                changed = True
                break
        if not row:
            continue
        col = min(row)
        # back-substitute into the existing pivot rows that mention col
        a = row[col]
        for pc, prow in list(pivots.items()):
            b = prow.get(col)
            if not b:
                continue
            new = {k: a * v for k, v in prow.items()}
            for k, v in row.items():
                new[k] = new.get(k, 0) - b * v
            pivots[pc] = _normalize_row({k: v for k, v in new.items() if v})
        pivots[col] = row

    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * n_cols
        vec[f] = Fraction(1)
        for pc, prow in pivots.items():
            coeff = prow.get(f)
            if coeff:
                vec[pc] = Fraction(-coeff, prow[pc])
        basis.append(_primitive(vec))
    return basis


def _primitive(vec) -> list[int]:
    """Scale a rational vector to integers with gcd 1 and leading entry > 0."""
    den = 1
    for v in vec:
        den = math.lcm(den, Fraction(v).denominator)
    ints = [int(Fraction(v) * den) for v in vec]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    if g == 0:
        return ints
    ints = [v // g for v in ints]
    lead = next(v for v in ints if v)
    if lead < 0:
        ints = [-v for v in ints]
    return ints


def exact_det(m) -> Fraction:
    a = [[Fraction(v) for v in row] for row in np.asarray(m, dtype=object)]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            if f:
                for k in range(c, n):
                    a[r][k] -= f * a[c][k]
    return det


# -- transplantation space ------------------------------------------------------

@dataclass(frozen=True)
class TransplantationBasis:
    n_tiles: int
    basis: tuple[np.ndarray, ...]

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def combine(self, coeffs) -> np.ndarray:
        coeffs = list(coeffs)
        if len(coeffs) != self.dimension:
            raise ValueError("one coefficient per basis matrix is required")
        out = np.zeros((self.n_tiles, self.n_tiles), dtype=object)
        for c, m in zip(coeffs, self.basis):
            if c:
                out = out + (Fraction(c) if isinstance(c, float) else c) * m
        return out


def _check_triple(mats, name: str) -> np.ndarray:
    mats = as_exact(mats)
    if mats.ndim != 3 or mats.shape[0] != 3 or mats.shape[1] != mats.shape[2]:
        raise ValueError(f"{name} must be three square matrices")
    return mats


def solve_transplantation(A, B) -> TransplantationBasis:
    """All ``T`` with ``T A[c] = B[c] T`` for c = 0, 1, 2, as an exact basis."""
    A = _check_triple(A, "A")
    B = _check_triple(B, "B")
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch: A is {A.shape[1]}x{A.shape[1]}, "
                         f"B is {B.shape[1]}x{B.shape[1]}")
    n = A.shape[1]
    rows = []
    for c in range(3):
        a_nz = [[(k, A[c, k, j]) for k in range(n) if A[c, k, j]] for j in range(n)]
        b_nz = [[(k, B[c, i, k]) for k in range(n) if B[c, i, k]] for i in range(n)]
        for i in range(n):
            for j in range(n):
                # (T A)_ij - (B T)_ij
                row: dict[int, int] = {}
                for k, v in a_nz[j]:
                    row[i * n + k] = row.get(i * n + k, 0) + v
                for k, v in b_nz[i]:
                    row[k * n + j] = row.get(k * n + j, 0) - v
                row = {key: v for key, v in row.items() if v}
                if row:
                    rows.append(row)
    vecs = integer_nullspace(rows, n * n)
    basis = tuple(np.array(v, dtype=object).reshape(n, n) for v in vecs)
    return TransplantationBasis(n, basis)


@dataclass(frozen=True)
class ResidualReport:
    residuals: tuple[np.ndarray, ...]

    @property
    def is_zero(self) -> bool:
        return all(not any(r.flat) for r in self.residuals)

    @property
    def max_abs(self):
        return max((abs(v) for r in self.residuals for v in r.flat), default=0)


def verify_transplantation(T, A, B) -> ResidualReport:
    """Exact ``T A[c] - B[c] T`` for each color."""
    T = as_exact(T)
    A = _check_triple(A, "A")
    B = _check_triple(B, "B")
    n = A.shape[1]
    if T.shape != (n, n) or B.shape != A.shape:
        raise ValueError(f"shape mismatch: T {T.shape}, A {A.shape}, B {B.shape}")
    return ResidualReport(tuple(T.dot(A[c]) - B[c].dot(T) for c in range(3)))


# -- signature ------------------------------------------------------------------

@dataclass(frozen=True)
class DecompositionSignature:
    """Row/column support counts ``(k, m)`` of two canonical basis matrices.

    ``counts`` is ``None`` when no pair of constant-support combinations
    exists.  ``representatives`` holds the integer matrices ``T_k, T_m``.
    """

    counts: tuple[int, int] | None
    representatives: tuple[np.ndarray, ...] = field(default=(), compare=False)
    coefficients: tuple[tuple[int, int], ...] = field(default=(), compare=False)


def _support_count(m: np.ndarray) -> int | None:
    nz = np.vectorize(bool, otypes=[bool])(m)
    rows = set(nz.sum(axis=1).tolist())
    cols = set(nz.sum(axis=0).tolist())
    if len(rows) == 1 and rows == cols:
        k = rows.pop()
        return k if k else None
    return None


def _candidate_directions(b1: np.ndarray, b2: np.ndarray) -> list[tuple[int, int]]:
    """Directions (a, b) for which a*b1 + b*b2 has at least one new zero."""
    dirs = {(1, 0), (0, 1)}
    for u, v in zip(b1.flat, b2.flat):
        if u == 0 and v == 0:
            continue
        a, b = Fraction(v), Fraction(-u)
        den = math.lcm(a.denominator, b.denominator)
        a, b = int(a * den), int(b * den)
        g = math.gcd(a, b)
        a, b = a // g, b // g
        if a < 0 or (a == 0 and b < 0):
            a, b = -a, -b
        dirs.add((a, b))
    return sorted(dirs)


def decomposition_signature(basis: TransplantationBasis) -> DecompositionSignature:
    """Find ``T_k``, ``T_m`` in a two-dimensional transplantation space."""
    if basis.dimension != 2:
        raise ValueError(f"signature needs a 2-dimensional basis, got {basis.dimension}")
    b1, b2 = basis.basis
    found = []
    for a, b in _candidate_directions(b1, b2):
        m = a * b1 + b * b2
        k = _support_count(m)
        if k is not None:
            flat = _primitive(list(m.flat))
            found.append((k, (a, b), np.array(flat, dtype=object).reshape(m.shape)))
    if len(found) < 2:
        return DecompositionSignature(None)

    def disjoint(m1, m2):
        return not any(x and y for x, y in zip(m1.flat, m2.flat))

    pairs = [(f, g) for f, g in itertools.combinations(found, 2) if disjoint(f[2], g[2])]
    if not pairs:
        pairs = list(itertools.combinations(found, 2))
    f, g = min(pairs, key=lambda p: (p[0][0] + p[1][0], p[0][0]))
    if f[0] > g[0]:
        f, g = g, f
    return DecompositionSignature((f[0], g[0]), (f[2], g[2]), (f[1], g[1]))


# -- triviality -------------------------------------------------------------------

def is_signed_permutation(m) -> bool:
    """True if ``m`` is a nonzero scalar times a matrix with one ``±1`` per row and column."""
    m = as_exact(m)
    n = m.shape[0]
    nz = [(i, j) for (i, j), v in np.ndenumerate(m) if v]
    if len(nz) != n:
        return False
    if len({i for i, _ in nz}) != n or len({j for _, j in nz}) != n:
        return False
    scale = abs(m[nz[0]])
    return all(abs(m[p]) == scale for p in nz)


def _solve_affine(eqs, d):
    """Reduce linear equations ``sum(c_k x_k) = rhs`` in ``d`` unknowns.

    Returns None when inconsistent, else (particular solution, nullity).
    """
    rows = [list(map(Fraction, coeffs)) + [Fraction(rhs)] for coeffs, rhs in eqs]
    piv_cols = []
    r = 0
    for c in range(d):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        pv = rows[r][c]
        rows[r] = [v / pv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
    for row in rows[r:]:
        if row[-1] != 0:
            return None
    sol = [Fraction(0)] * d
    for i, c in enumerate(piv_cols):
        sol[c] = rows[i][-1]
    return sol, d - len(piv_cols)


def _span_has_signed_permutation(basis: TransplantationBasis) -> bool:
    d, n = basis.dimension, basis.n_tiles
    mats = basis.basis

    def coeff(i, j):
        return [m[i, j] for m in mats]

    def search(row: int, eqs: list, used: set) -> bool:
        res = _solve_affine(eqs, d)
        if res is None:
            return False
        sol, nullity = res
        if nullity == 0 or row == n:
            # the free directions cannot matter once every row is pinned
            return is_signed_permutation(basis.combine(sol))
        for j in range(n):
            if j in used:
                continue
            for sign in ((1,) if row == 0 else (1, -1)):
                new = [(coeff(row, k), sign if k == j else 0) for k in range(n)]
                if search(row + 1, eqs + new, used | {j}):
                    return True
        return False

    return search(0, [], set())


def is_nontrivial(basis: TransplantationBasis, trials: int = 8, seed: int = 0) -> bool:
    """True iff the span holds an invertible matrix and no scaled signed permutation.

    A transplantation that is merely a signed permutation means the two
    graphs are the same tiling with relabelled tiles.
    """
    if basis.dimension == 0:
        return False
    rng = random.Random(seed)
    invertible = False
    for t in range(trials):
        coeffs = [1] * basis.dimension if t == 0 else [rng.randint(-97, 97) for _ in basis.basis]
        if exact_det(basis.combine(coeffs)) != 0:
            invertible = True
            break
    if not invertible:
        return False
    return not _span_has_signed_permutation(basis)


def transplant_coefficients(T, v, normalization=1):
    """Per-tile transplantation ``normalization * T @ v``."""
    T = np.asarray(T)
    v = np.asarray(v)
    if T.ndim != 2 or T.shape[1] != v.shape[0]:
        raise ValueError(f"length mismatch: T is {T.shape}, v has length {v.shape[0]}")
    return normalization * T.dot(v)


# -- text format ------------------------------------------------------------------

def format_matrix(m) -> str:
    m = as_exact(m)
    lines = [f"matrix {m.shape[0]} {m.shape[1]}"]
    for row in m:
        lines.append(" ".join(str(v) for v in row))
    return "\n".join(lines) + "\n"


def parse_matrices(text: str) -> list[np.ndarray]:
    """Read every ``matrix r c`` block from ``text``."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    out = []
    pos = 0
    while pos < len(lines):
        head = lines[pos].split()
        if len(head) != 3 or head[0] != "matrix":
            raise ValueError(f"expected 'matrix <rows> <cols>', got {lines[pos]!r}")
        r, c = int(head[1]), int(head[2])
        body = lines[pos + 1: pos + 1 + r]
        if len(body) != r:
            raise ValueError("truncated matrix block")
        m = np.empty((r, c), dtype=object)
        for i, ln in enumerate(body):
            vals = ln.split()
            if len(vals) != c:
                raise ValueError(f"row {i} has {len(vals)} entries, expected {c}")
            for j, tok in enumerate(vals):
                f = Fraction(tok)
                m[i, j] = f.numerator if f.denominator == 1 else f
        out.append(m)
        pos += 1 + r
    return out
