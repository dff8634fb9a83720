import struct

import numpy as np
import pytest

from isospectral.geometry import (
    BaseTile,
    GeometryError,
    basic_simplex,
    build_assembly,
    export_mesh,
    extrude_prism,
    half_square,
    is_isometric,
    mirror_point,
    polygon_loops,
    reflect_point_2d,
    triangle_with_angles,
    unit_cube,
    wall_tetrahedron,
)
from isospectral.tiling import Color, GluingGraph, load_family

from oracles import P0, P1, P2, P3, Q0, Q1, Q2, SIMPLEX_7_1_A, SIMPLEX_7_1_B

KERNEL = GluingGraph.from_pairs(4, {Color.RED: [(0, 1)], Color.BLUE: [(0, 2)],
                                    Color.BLACK: [(0, 3)]})


def _point_set(tile):
    return {tuple(int(round(x)) for x in v) for v in tile.vertices}


def test_mirror_points_basic_simplex():
    assert mirror_point(P0, (P1, P2, P3)).tolist() == list(Q0)
    assert mirror_point(P1, (P0, P2, P3)).tolist() == list(Q1)
    assert mirror_point(P2, (P0, P1, P3)).tolist() == list(Q2)


def test_mirror_point_off_axis_plane():
    q = mirror_point((1, 1, 0), ((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    n = np.ones(3) / np.sqrt(3)
    p = np.array([1.0, 1.0, 0.0])
    assert np.allclose(q, p - 2 * (p @ n - 1 / np.sqrt(3)) * n)
    assert np.allclose(q, [1 / 3, 1 / 3, -2 / 3])


def test_mirror_point_on_plane_is_fixed():
    assert mirror_point((0.5, 0, 1), (P1, P2, P3)).tolist() == [0.5, 0, 1]


def test_degenerate_face():
    with pytest.raises(GeometryError):
        mirror_point(P0, ((0, 0, 0), (1, 1, 1), (2, 2, 2)))
    with pytest.raises(GeometryError):
        reflect_point_2d((1, 1), ((0, 0), (0, 0)))


def test_reflect_point_2d():
    assert reflect_point_2d((1, 1), ((0, 0), (1, 0))).tolist() == [1, -1]
    assert reflect_point_2d((3, 0), ((0, 0), (1, 0))).tolist() == [3, 0]
    assert np.allclose(reflect_point_2d((0, 0), ((1, 0), (0, 1))), [1, 1])


def test_triangle_angles():
    v = triangle_with_angles((30, 60, 90))
    e = lambda i, j: np.linalg.norm(v[i] - v[j])
    assert np.isclose(e(1, 2) / e(0, 1), 0.5)
    with pytest.raises(GeometryError):
        triangle_with_angles((90, 90, 10))


def test_7_1_simplex_models(simplex_pair):
    a, b = simplex_pair("7_1")
    assert [_point_set(a.tiles[i]) for i in (4, 5, 6)] == list(SIMPLEX_7_1_A)
    assert [_point_set(b.tiles[i]) for i in (4, 5, 6)] == list(SIMPLEX_7_1_B)
    kernel = [{P0, P1, P2, P3}, {Q0, P1, P2, P3}, {P0, Q1, P2, P3}, {P0, P1, Q2, P3}]
    assert [_point_set(a.tiles[i]) for i in range(4)] == kernel
    assert not a.overlapping and not b.overlapping


def test_7_1_slits(simplex_pair):
    a, b = simplex_pair("7_1")
    (fa, ga), = a.coincident_faces
    assert {tuple(v) for v in a.face_vertices(*fa).astype(int)} == {P1, P3, Q0}
    (fb, gb), = b.coincident_faces
    assert {tuple(v) for v in b.face_vertices(*fb).astype(int)} == {P1, P3, Q2}


def test_assembly_invariants(simplex_pair):
    for fid in ("7_1", "7_2", "7_3"):
        for a in simplex_pair(fid):
            base_edges = _edge_lengths(a.base.vertices)
            for t in a.tiles:
                assert np.allclose(_edge_lengths(t.vertices), base_edges)
                assert np.isclose(np.linalg.det(t.transform[:3, :3]), (-1) ** t.parity)
            glued = {(g.tile_i, g.color) for g in a.glued_faces} | {
                (g.tile_j, g.color) for g in a.glued_faces}
            expected = {(i, c) for c in Color for i in range(7)
                        if i not in a.graph.boundary_tiles(c)}
            assert glued == expected
            assert np.isclose(a.volume(), 7 / 6)


def _edge_lengths(v):
    return np.sort([np.linalg.norm(v[i] - v[j]) for i in range(len(v)) for j in range(i)])


def test_two_tile_assembly():
    g = GluingGraph.from_pairs(2, {Color.RED: [(0, 1)]})
    a = build_assembly(g, basic_simplex())
    assert len(a.glued_faces) == 1 and not a.coincident_faces
    assert _point_set(a.tiles[1]) == {Q0, P1, P2, P3}


def test_wall_7_3():
    pair = load_family("7_3")
    for s in "AB":
        a = build_assembly(pair.side(s), wall_tetrahedron(), root_tile=pair.root(s))
        assert len(a.tiles) == 7 and not a.overlapping
        root = a.tiles[pair.root(s)]
        assert _point_set(root) == {(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)}


def test_degenerate_base():
    with pytest.raises(GeometryError, match="degenerate"):
        BaseTile.simplex([[0, 0, 0], [1, 0, 0], [2, 0, 0], [0, 0, 1]])


def test_isometry_detector(simplex_pair):
    a, b = simplex_pair("7_1")
    rep = is_isometric(a, b)
    assert not rep.isometric and not rep.distances_match
    for x in (a, b):
        same = is_isometric(x, x)
        assert same.isometric
        assert np.allclose(same.orthogonal, np.eye(3)) and np.allclose(same.translation, 0)


def test_unit_cube_models_isometric():
    pair = load_family("7_1")
    a, b = (build_assembly(pair.side(s), unit_cube()) for s in "AB")
    assert is_isometric(a, b).isometric


def test_unit_cube_rotated_copy():
    pair = load_family("7_2")
    a = build_assembly(pair.left, unit_cube())
    rep = is_isometric(a, a)
    assert rep.isometric


def test_kernel_mesh_has_ten_triangles():
    a = build_assembly(KERNEL, basic_simplex())
    obj = export_mesh(a, "obj").decode()
    faces = [ln for ln in obj.splitlines() if ln.startswith("f ")]
    verts = [ln for ln in obj.splitlines() if ln.startswith("v ")]
    assert len(faces) == 4 * 4 - 2 * 3
    assert len(verts) == 7
    stl = export_mesh(a, "stl")
    assert len(stl) == 84 + 50 * 10
    assert struct.unpack("<I", stl[80:84])[0] == 10


def test_single_tetrahedron_mesh():
    a = build_assembly(GluingGraph.from_pairs(1, {}), basic_simplex())
    obj = export_mesh(a).decode().splitlines()
    assert sum(ln.startswith("f ") for ln in obj) == 4
    assert sum(ln.startswith("v ") for ln in obj) == 4


def test_7_1_mesh_counts_and_orientation(simplex_pair):
    a, _ = simplex_pair("7_1")
    stl = export_mesh(a, "stl")
    n = struct.unpack("<I", stl[80:84])[0]
    assert n == 4 * 7 - 2 * len(a.glued_faces)   # slit faces stay, one per side
    # outward orientation: divergence theorem gives the volume back
    vol = 0.0
    for k in range(n):
        vals = struct.unpack("<12f", stl[84 + 50 * k: 84 + 50 * k + 48])
        p, q, r = np.array(vals[3:6]), np.array(vals[6:9]), np.array(vals[9:12])
        assert np.isclose(np.linalg.norm(vals[:3]), 1, atol=1e-6)
        vol += p @ np.cross(q, r) / 6
    assert np.isclose(vol, 7 / 6, atol=1e-6)


def test_mesh_errors():
    flat = build_assembly(KERNEL, half_square())
    with pytest.raises(GeometryError):
        export_mesh(flat)
    with pytest.raises(GeometryError):
        export_mesh(build_assembly(KERNEL, basic_simplex()), "ply")


def test_prism_of_unit_square():
    square = GluingGraph.from_pairs(2, {Color.RED: [(0, 1)]})
    flat = build_assembly(square, half_square())
    prism = extrude_prism(flat, 1.0)
    lo, hi = prism.bounds()
    assert np.allclose(lo, 0) and np.allclose(hi, 1)
    assert np.isclose(prism.volume(), 1.0)
    with pytest.raises(GeometryError):
        extrude_prism(flat, 0)


def test_polygon_loops_ccw():
    pair = load_family("7_3")
    a = build_assembly(pair.left, half_square(), root_tile=pair.root("A"))
    for loop in polygon_loops(a):
        x, y = loop[:, 0], loop[:, 1]
        assert 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y) > 0
