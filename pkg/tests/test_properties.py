"""Randomised property checks (hypothesis)."""

import itertools

import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from isospectral.geometry import (
    BaseTile,
    basic_simplex,
    build_assembly,
    mirror_point,
    reflect_point_2d,
    unit_cube,
)
from isospectral.spectra import (
    assemble_laplacian,
    box_fd_eigenvalues,
    lowest_eigenvalues,
    rasterize,
)
from isospectral.tiling import (
    BOUNDARY,
    COLORS,
    FamilyPair,
    GluingGraph,
    SignConvention,
    load_family,
    parse_gluing_file,
    permute_colors,
    serialize_family,
    to_signed_matrices,
)

coord = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
point3 = st.tuples(coord, coord, coord)
point2 = st.tuples(coord, coord)


@st.composite
def faces3(draw):
    face = np.array(draw(st.tuples(point3, point3, point3)))
    normal = np.cross(face[1] - face[0], face[2] - face[0])
    assume(np.linalg.norm(normal) > 1e-2 * max(1.0, np.abs(face).max()) ** 2)
    return face


@st.composite
def gluing_graphs(draw, max_tiles=9):
    """Random connected three-colored graphs: a random tree plus extra edges."""
    rnd = draw(st.randoms(use_true_random=False))
    n = draw(st.integers(1, max_tiles))
    glue = [[BOUNDARY] * n for _ in COLORS]
    for i in range(1, n):
        options = [(p, c) for p in range(i) for c in range(3) if glue[c][p] is BOUNDARY]
        p, c = rnd.choice(options)
        glue[c][p], glue[c][i] = i, p
    for _ in range(rnd.randint(0, n)):
        c = rnd.randrange(3)
        free = [t for t in range(n) if glue[c][t] is BOUNDARY]
        if len(free) >= 2:
            i, j = rnd.sample(free, 2)
            glue[c][i], glue[c][j] = j, i
    return GluingGraph(n, tuple(tuple(r) for r in glue))


@settings(max_examples=300)
@given(point3, faces3())
def test_mirror_involution_3d(p, face):
    q = mirror_point(p, face)
    back = mirror_point(q, face)
    scale = max(1.0, np.abs(p).max(), np.abs(face).max())
    assert np.allclose(back, p, atol=1e-9 * scale)
    # the face vertices are fixed and distances to them are preserved
    for v in face:
        assert np.isclose(np.linalg.norm(q - v), np.linalg.norm(np.array(p) - v),
                          atol=1e-9 * scale)


@settings(max_examples=200)
@given(point2, point2, point2)
def test_reflection_involution_2d(p, a, b):
    assume(np.linalg.norm(np.subtract(a, b)) > 1e-3)
    q = reflect_point_2d(reflect_point_2d(p, (a, b)), (a, b))
    assert np.allclose(q, p, atol=1e-9 * max(1.0, np.abs([p, a, b]).max()))


@settings(max_examples=250)
@given(gluing_graphs(), gluing_graphs(), st.booleans())
def test_parse_roundtrip(g1, g2, verified):
    assume(g1.n_tiles == g2.n_tiles)
    pair = FamilyPair("x_1", g1, g2, verified)
    text = serialize_family(pair)
    back = parse_gluing_file(text.encode("utf-8"))
    assert back == pair
    assert serialize_family(back) == text


@settings(max_examples=120)
@given(gluing_graphs(), st.permutations(list(COLORS)), st.sampled_from(list(SignConvention)))
def test_signed_matrices_and_color_permutation(g, perm, conv):
    mats = to_signed_matrices(g, conv)
    for m in mats:
        assert np.array_equal(m, m.T)
        assert np.all(np.count_nonzero(m, axis=1) == 1)
    pair = FamilyPair("x_1", g, g)
    moved = to_signed_matrices(permute_colors(pair, perm).left, conv)
    for old, new in zip(COLORS, perm):
        assert np.array_equal(moved[int(new) - 1], mats[int(old) - 1])


@settings(max_examples=60)
@given(st.integers(1, 2), st.integers(1, 2), st.integers(1, 2), st.integers(1, 3))
def test_box_oracle(nx, ny, nz, k):
    """Boxes of up to 2 x 2 x 2 unit cubes; grid spectrum equals the closed form."""
    h = 1.0 / (2 * k)
    cells = [(i, j, l) for i in range(nx) for j in range(ny) for l in range(nz)]
    g = _box_graph(nx, ny, nz, cells)
    a = build_assembly(g, unit_cube())
    r = rasterize(a, h)
    counts = [round(n / h) - 1 for n in (nx, ny, nz)]
    assert r.n_interior == np.prod(counts)
    lap = assemble_laplacian(r)
    m = min(6, r.n_interior)
    got = lowest_eigenvalues(lap, m, method="dense").eigenvalues
    want = box_fd_eigenvalues(counts, h)[:m]
    assert np.allclose(got, want, rtol=1e-10)


def _box_graph(nx, ny, nz, cells):
    """Unit cubes reflected across their colored faces x = 1, y = 1, z = 1.

    A reflected cube keeps its colored face on the mirror, so each axis holds
    at most two cells.
    """
    index = {c: k for k, c in enumerate(cells)}
    pairs = {c: [] for c in COLORS}
    for (i, j, l), k in index.items():
        for axis, color in enumerate(COLORS):
            nb = [i, j, l]
            nb[axis] += 1
            nb = tuple(nb)
            if nb in index:
                pairs[color].append((k, index[nb]))
    return GluingGraph.from_pairs(len(cells), pairs)


_SIGNED_PERMS = [np.diag(s) @ np.eye(3)[list(p)]
                 for p in itertools.permutations(range(3))
                 for s in itertools.product((1, -1), repeat=3)]


@settings(max_examples=100)
@given(st.sampled_from(["7_1", "7_2", "7_3"]), st.sampled_from("AB"),
       st.integers(0, len(_SIGNED_PERMS) - 1), st.tuples(*[st.integers(-3, 3)] * 3))
def test_grid_isometry_equivariance(fid, side, q, shift):
    pair = load_family(fid)
    graph, root = pair.side(side), pair.root(side)
    base = basic_simplex()
    Q = _SIGNED_PERMS[q]
    moved = BaseTile(base.vertices @ Q.T + np.array(shift), base.faces, base.color_faces)
    lam = []
    for b in (base, moved):
        lap = assemble_laplacian(rasterize(build_assembly(graph, b, root_tile=root), 0.2))
        lam.append(lowest_eigenvalues(lap, 5, method="dense").eigenvalues)
        m = lap.matrix
        assert (m != m.T).nnz == 0
        assert lam[-1][0] > 0
    assert np.allclose(lam[0], lam[1], rtol=1e-10)


_OPERATORS = {}


def _operator(fid, side, k):
    key = fid, side, k
    if key not in _OPERATORS:
        pair = load_family(fid)
        a = build_assembly(pair.side(side), basic_simplex(), root_tile=pair.root(side))
        _OPERATORS[key] = assemble_laplacian(rasterize(a, 1.0 / k)).matrix
    return _OPERATORS[key]


@settings(max_examples=200)
@given(st.sampled_from(["7_1", "7_2", "7_3"]), st.sampled_from("AB"),
       st.integers(3, 8), st.integers(0, 2**32 - 1))
def test_operator_symmetric_positive(fid, side, k, seed):
    m = _operator(fid, side, k)
    x = np.random.default_rng(seed).standard_normal(m.shape[0])
    assert abs(x @ (m @ x) - (m.T @ x) @ x) <= 1e-9 * abs(x @ (m @ x))
    # Dirichlet rows are strictly dominant somewhere, so the form is positive
    assert x @ (m @ x) > 0
    assert np.all(m.diagonal() >= np.abs(m).sum(axis=1).A1 - m.diagonal())
