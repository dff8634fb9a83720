"""Command-line behaviour: output shape, determinism and error codes."""

import pytest

from isospectral.cli import main
from oracles import TABLE2_7_2


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_families_lists_catalog(capsys):
    code, out, _ = run(capsys, "families")
    rows = out.strip().splitlines()[1:]
    assert code == 0
    assert len(rows) == 17
    assert all(r.split()[-1] == "verified" for r in rows)


def test_families_filter(capsys):
    code, out, _ = run(capsys, "families", "--family", "7_3")
    assert code == 0
    assert "7_3" in out and "7_1" not in out


def test_unknown_family(capsys):
    code, _, err = run(capsys, "families", "--family", "9_9")
    assert code == 1
    assert err.startswith("E_FAMILY:")


@pytest.mark.parametrize("fid, sig", [("7_1", "(3,4)"), ("21_1", "(5,16)")])
def test_transplant_signature(capsys, fid, sig):
    code, out, _ = run(capsys, "transplant", "--family", fid, "--convention", "neumann")
    assert code == 0
    assert f"signature {sig}" in out
    assert "residual exact zero" in out
    assert "nontrivial yes" in out


def test_transplant_self_pair_is_trivial(capsys):
    code, out, _ = run(capsys, "transplant", "--family", "7_1", "--self")
    assert code == 0
    assert "nontrivial no" in out


def test_build3d_stl(tmp_path, capsys):
    out = tmp_path / "a.stl"
    code, _, _ = run(capsys, "build3d", "--family", "7_1", "--out", str(out))
    assert code == 0
    data = out.read_bytes()
    n_tri = int.from_bytes(data[80:84], "little")
    assert n_tri > 0
    assert len(data) == 84 + 50 * n_tri


def test_unfold2d_21_is_simple(capsys):
    code, out, _ = run(capsys, "unfold2d", "--family", "21_1", "--class", "B")
    assert code == 0
    assert "overlapping no" in out.splitlines()[0]
    assert len(out.strip().splitlines()) == 22


def test_report_table2(capsys):
    code, out, _ = run(capsys, "report", "--table", "2")
    assert code == 0
    rows = [r.split() for r in out.splitlines() if r.strip()[:1].isdigit()]
    assert len(rows) == 25
    for row, ref in zip(rows, TABLE2_7_2):
        assert abs(float(row[1]) - ref) <= 0.01
        assert abs(float(row[1]) - float(row[2])) <= 1e-8


def test_compare_identical_runs(tmp_path, capsys):
    paths = []
    for name in ("a.csv", "b.csv"):
        p = tmp_path / name
        assert run(capsys, "spectrum", "--family", "7_1", "--h", "0.125",
                   "--modes", "5", "--out", str(p))[0] == 0
        paths.append(p)
    assert paths[0].read_bytes() == paths[1].read_bytes()
    code, out, _ = run(capsys, "compare", *map(str, paths))
    assert code == 0
    diffs = [float(line.split(",")[-1]) for line in out.strip().splitlines()[1:]]
    assert diffs == [0.0] * 5


@pytest.mark.parametrize("argv, code, prefix", [
    (["report", "--table", "4"], 2, "E_USAGE"),
    (["spectrum", "--family", "7_1", "--h", "-1"], 2, "E_USAGE"),
    (["frobnicate"], 2, "E_USAGE"),
    (["compare", "missing.csv", "other.csv"], 1, "E_IO"),
    (["build3d", "--family", "7_1", "--base", "no_such_file.txt"], 1, "E_IO"),
])
def test_error_codes(capsys, argv, code, prefix):
    got, _, err = run(capsys, *argv)
    assert got == code
    assert err.startswith(prefix + ":")


def test_degenerate_base(tmp_path, capsys):
    base = tmp_path / "flat.txt"
    base.write_text("0 0 0\n1 0 0\n2 0 0\n3 0 0\n")
    code, _, err = run(capsys, "build3d", "--family", "7_1", "--base", str(base))
    assert code == 1
    assert err.startswith("E_GEOMETRY:")
