"""Command-line front end.

Every failure exits with status 1 (2 for usage errors) and writes a single
line ``CODE: message`` to stderr, where ``CODE`` is one of ``E_USAGE``,
``E_FAMILY``, ``E_GLUING``, ``E_GEOMETRY``, ``E_OVERLAP``, ``E_SPECTRUM``,
``E_IO``.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import geometry, spectra, tiling, transplant
from .geometry import BaseTile, GeometryError
from .tiling import GluingError, SignConvention

DEFAULT_SEED = 20160
TABLE_FAMILIES = {1: "7_1", 2: "7_2", 3: "7_3"}


class CliError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError("E_USAGE", message)


# -- shared helpers ------------------------------------------------------------

def _family(fid: str) -> tiling.FamilyPair:
    try:
        return tiling.load_family(fid)
    except KeyError as exc:
        raise CliError("E_FAMILY", exc.args[0]) from None
    except GluingError as exc:
        raise CliError("E_GLUING", f"{fid}: {exc}") from None


def _read_base_file(path: str) -> BaseTile:
    """Four ``x y z`` lines (or three ``x y``), optionally ``fixed i j k``."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError("E_IO", f"cannot read base tile {path}: {exc.strerror}") from None
    verts, fixed = [], None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        try:
            if line[0] == "fixed":
                fixed = tuple(int(t) for t in line[1:])
            else:
                verts.append([float(t) for t in line])
        except ValueError:
            raise CliError("E_GEOMETRY", f"{path} line {lineno}: not a number") from None
    try:
        return BaseTile.simplex(verts, fixed_face=fixed, name=Path(path).stem)
    except (GeometryError, ValueError) as exc:
        raise CliError("E_GEOMETRY", f"{path}: {exc}") from None


def _base(name: str) -> BaseTile:
    builtin = {
        "simplex": geometry.basic_simplex,
        "wall": geometry.wall_tetrahedron,
        "cube": geometry.unit_cube,
        "half-square": geometry.half_square,
    }
    if name in builtin:
        return builtin[name]()
    return _read_base_file(name)


def _assembly(pair: tiling.FamilyPair, side: str, base: BaseTile) -> geometry.Assembly:
    try:
        return geometry.build_assembly(pair.side(side), base, root_tile=pair.root(side),
                                       name=f"{pair.family_id}{side.upper()}")
    except GeometryError as exc:
        raise CliError("E_GEOMETRY", str(exc)) from None


def _spectrum(assembly, h, modes, tol, seed) -> tuple[spectra.Spectrum, int]:
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            raster = spectra.rasterize(assembly, h)
        lap = spectra.assemble_laplacian(raster)
        return spectra.lowest_eigenvalues(lap, modes, tol=tol, seed=seed), raster.n_interior
    except GeometryError as exc:
        raise CliError("E_OVERLAP" if assembly.overlapping else "E_GEOMETRY", str(exc)) from None
    except (spectra.ConvergenceError, ValueError) as exc:
        raise CliError("E_SPECTRUM", str(exc)) from None


def _emit(text: str | bytes, out: str | None) -> None:
    if out is None:
        if isinstance(text, bytes):
            sys.stdout.buffer.write(text)
        else:
            sys.stdout.write(text)
        return
    try:
        mode = "wb" if isinstance(text, bytes) else "w"
        with open(out, mode) as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError("E_IO", f"cannot write {out}: {exc.strerror}") from None


def _fmt_point(p) -> str:
    return "(" + ", ".join(f"{x:.6g}" for x in p) + ")"


def _convention(name: str) -> SignConvention:
    return SignConvention[name.upper()]


# -- subcommands ---------------------------------------------------------------

def cmd_families(args) -> int:
    ids = tiling.family_ids()
    if args.family is not None:
        _family(args.family)
        ids = [args.family]
    print(f"{'family':<8}{'tiles':>6}  {'signature':<10}status")
    for fid in ids:
        pair = _family(fid)
        k, m = pair.expected_signature
        status = "verified" if pair.verified else "unverified"
        print(f"{fid:<8}{pair.n_tiles:>6}  {f'({k},{m})':<10}{status}")
    return 0


def cmd_transplant(args) -> int:
    pair = _family(args.family)
    conv = _convention(args.convention)
    right = pair.left if args.self_pair else pair.right
    A = tiling.to_signed_matrices(pair.left, conv)
    B = tiling.to_signed_matrices(right, conv)
    basis = transplant.solve_transplantation(A, B)
    lines = [f"family {pair.family_id}  convention {conv.name.lower()}"
             + ("  (left vs left)" if args.self_pair else ""),
             f"dimension {basis.dimension}"]
    residual_ok = all(transplant.verify_transplantation(T, A, B).is_zero for T in basis.basis)
    lines.append(f"residual {'exact zero' if residual_ok else 'NONZERO'}")
    mats = list(basis.basis)
    if basis.dimension == 2:
        sig = transplant.decomposition_signature(basis)
        if sig.counts is None:
            lines.append("signature unknown")
        else:
            lines.append(f"signature ({sig.counts[0]},{sig.counts[1]})")
            mats = list(sig.representatives)
    else:
        lines.append("signature n/a")
    nontrivial = transplant.is_nontrivial(basis) if basis.dimension else False
    lines.append(f"nontrivial {'yes' if nontrivial else 'no'}")
    if not nontrivial:
        lines.append("warning: trivial transplantation (span holds only signed permutations)")
    print("\n".join(lines))
    text = "".join(transplant.format_matrix(T) for T in mats)
    if args.out:
        _emit(text, args.out)
    else:
        print(text, end="")
    return 0


def _triangle(args, pair) -> BaseTile:
    if args.base:
        return _base(args.base)
    if args.angles:
        angles = tuple(float(a) for a in args.angles.split(","))
    else:
        angles = (30.0, 60.0, 90.0) if pair.n_tiles == 21 else (60.0, 60.0, 60.0)
    opposite = (1, 2, 0) if angles == (30.0, 60.0, 90.0) else (0, 1, 2)
    if args.opposite:
        opposite = tuple(int(v) for v in args.opposite.split(","))
    try:
        return BaseTile.simplex(geometry.triangle_with_angles(angles), fixed_face=opposite,
                                name="triangle")
    except (GeometryError, ValueError) as exc:
        raise CliError("E_GEOMETRY", str(exc)) from None


def cmd_unfold2d(args) -> int:
    pair = _family(args.family)
    base = _triangle(args, pair)
    if base.dim != 2:
        raise CliError("E_GEOMETRY", "unfold2d needs a triangle base")
    out = []
    for side in ([args.cls] if args.cls else ["A", "B"]):
        a = _assembly(pair, side, base)
        out.append(f"# {pair.family_id} {side}  tiles {len(a.tiles)}  "
                   f"overlapping {'yes' if a.overlapping else 'no'}")
        for t, loop in zip(a.tiles, geometry.polygon_loops(a)):
            out.append(f"{t.index}: " + " ".join(f"{x:.9g},{y:.9g}" for x, y in loop))
    _emit("\n".join(out) + "\n", args.out)
    return 0


def cmd_build3d(args) -> int:
    pair = _family(args.family)
    base = _base(args.base)
    if base.dim != 3:
        raise CliError("E_GEOMETRY", "build3d needs a tetrahedron or cube base")
    a = _assembly(pair, args.cls, base)
    info = a.summary()
    print(f"{pair.family_id} {args.cls.upper()} on {base.name}: tiles {info['tiles']}, "
          f"glued faces {info['glued_faces']}, boundary faces {info['boundary_faces']}, "
          f"slit pairs {info['slit_pairs']}, overlapping {'yes' if info['overlapping'] else 'no'}")
    for t in a.tiles:
        print(f"  tile {t.index}: " + " ".join(_fmt_point(v) for v in t.vertices))
    for (t1, f1), (t2, f2) in a.coincident_faces:
        pts = " ".join(_fmt_point(v) for v in a.face_vertices(t1, f1))
        print(f"  slit: tile {t1} face {f1} = tile {t2} face {f2}: {pts}")
    if args.out:
        fmt = args.format or Path(args.out).suffix.lstrip(".") or "obj"
        if fmt not in ("obj", "stl"):
            raise CliError("E_USAGE", f"mesh format must be obj or stl, not {fmt!r}")
        _emit(geometry.export_mesh(a, fmt), args.out)
    return 0


def _check_run_args(args):
    if not args.h > 0:
        raise CliError("E_USAGE", "--h must be positive")
    if args.modes < 1:
        raise CliError("E_USAGE", "--modes must be at least 1")
    if not args.tol > 0:
        raise CliError("E_USAGE", "--tol must be positive")


def cmd_spectrum(args) -> int:
    _check_run_args(args)
    pair = _family(args.family)
    a = _assembly(pair, args.cls, _base(args.base))
    spec, n = _spectrum(a, args.h, args.modes, args.tol, args.seed)
    logging.getLogger(__name__).info("%s: %d interior nodes", a.name, n)
    _emit(spectra.spectrum_csv(spec), args.out)
    return 0


def _read_spectrum_csv(path: str) -> spectra.Spectrum:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        return spectra.Spectrum(np.array([float(r["lambda_A"]) for r in rows]))
    except OSError as exc:
        raise CliError("E_IO", f"cannot read {path}: {exc.strerror}") from None
    except (KeyError, ValueError):
        raise CliError("E_IO", f"{path}: not a spectrum CSV") from None


def _pair_spectra(pair, base, args):
    out = []
    for side in "AB":
        a = _assembly(pair, side, base)
        out.append(_spectrum(a, args.h, args.modes, args.tol, args.seed))
    return out


def cmd_compare(args) -> int:
    if args.csv:
        if len(args.csv) != 2:
            raise CliError("E_USAGE", "compare takes exactly two spectrum CSV files")
        s1, s2 = (_read_spectrum_csv(p) for p in args.csv)
    else:
        if args.family is None:
            raise CliError("E_USAGE", "compare needs --family or two CSV files")
        _check_run_args(args)
        (s1, _), (s2, _) = _pair_spectra(_family(args.family), _base(args.base), args)
    try:
        rep = spectra.compare_spectra(s1, s2)
    except ValueError as exc:
        raise CliError("E_SPECTRUM", str(exc)) from None
    _emit(spectra.spectrum_csv(s1, s2, len(rep.differences)), args.out)
    print(f"max_abs_diff {rep.max_abs_diff:.4e}  l2_diff {rep.l2_diff:.4e}",
          file=sys.stderr if args.out is None else sys.stdout)
    return 0


def cmd_report(args) -> int:
    _check_run_args(args)
    if args.table not in TABLE_FAMILIES:
        raise CliError("E_USAGE", f"--table must be 1, 2 or 3, not {args.table}")
    pair = _family(TABLE_FAMILIES[args.table])
    start = time.perf_counter()
    (s1, n1), (s2, n2) = _pair_spectra(pair, _base(args.base), args)
    elapsed = time.perf_counter() - start
    rep = spectra.compare_spectra(s1, s2, args.modes)
    fid = pair.family_id
    print(f"Table {args.table}: class {fid} A vs B, h = {args.h:g}, "
          f"interior nodes {n1} / {n2}")
    print(f"{'k':>3}  {fid + ' A':>12}  {fid + ' B':>12}  {'difference':>12}")
    for k in range(args.modes):
        a, b = s1.eigenvalues[k], s2.eigenvalues[k]
        print(f"{k + 1:>3}  {a:>12.4f}  {b:>12.4f}  {abs(a - b):>12.4e}")
    print(f"max_abs_diff {rep.max_abs_diff:.4e}  l2_diff {rep.l2_diff:.4e}  "
          f"time {elapsed:.1f} s")
    if args.out:
        _emit(spectra.spectrum_csv(s1, s2, args.modes), args.out)
    return 0


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="isospectral", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def run_flags(sp, family=True):
        if family:
            sp.add_argument("--family", required=True)
        sp.add_argument("--base", default="simplex",
                        help="simplex, wall, cube, half-square or a vertex file")
        sp.add_argument("--h", type=float, default=0.05)
        sp.add_argument("--modes", type=int, default=25)
        sp.add_argument("--tol", type=float, default=1e-10)
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        sp.add_argument("--out")
        sp.add_argument("--format", choices=["csv"], default="csv")

    sp = sub.add_parser("families", help="list shipped families")
    sp.add_argument("--family")
    sp.set_defaults(func=cmd_families)

    sp = sub.add_parser("transplant", help="solve T A = B T exactly")
    sp.add_argument("--family", required=True)
    sp.add_argument("--convention", choices=["dirichlet", "neumann"], default="dirichlet")
    sp.add_argument("--self", dest="self_pair", action="store_true",
                    help="solve the left graph against itself")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_transplant)

    sp = sub.add_parser("unfold2d", help="planar polygon loops per tile")
    sp.add_argument("--family", required=True)
    sp.add_argument("--class", dest="cls", choices=["A", "B", "a", "b"])
    sp.add_argument("--angles", help="triangle angles in degrees, e.g. 30,60,90")
    sp.add_argument("--opposite", help="vertex opposite the red, blue, black edges")
    sp.add_argument("--base", help="triangle vertex file")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_unfold2d)

    sp = sub.add_parser("build3d", help="assemble a 3D model and export its surface")
    sp.add_argument("--family", required=True)
    sp.add_argument("--class", dest="cls", choices=["A", "B", "a", "b"], default="A")
    sp.add_argument("--base", default="simplex")
    sp.add_argument("--out")
    sp.add_argument("--format", choices=["obj", "stl"])
    sp.set_defaults(func=cmd_build3d)

    sp = sub.add_parser("spectrum", help="lowest Dirichlet eigenvalues of one model")
    sp.add_argument("--class", dest="cls", choices=["A", "B", "a", "b"], default="A")
    run_flags(sp)
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("compare", help="compare the A and B spectra (or two CSV files)")
    sp.add_argument("csv", nargs="*")
    sp.add_argument("--family")
    run_flags(sp, family=False)
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("report", help="eigenvalue table for class 7_1, 7_2 or 7_3")
    sp.add_argument("--table", type=int, required=True)
    run_flags(sp, family=False)
    sp.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(message)s")
        return args.func(args)
    except CliError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return 2 if exc.code == "E_USAGE" else 1
