"""Reflection rules as three-colored gluing graphs.

A reflection rule says, for every tile and every color, which tile lies on
the other side of that colored edge (face in 3D), or that the edge is part
of the domain boundary.  A pair of such rules with the same tile count is a
candidate isospectral pair.

Gluing files are plain text::

    family 7_1
    tiles 7
    [left]
    red   0 1
    red   3 6
    red   2 -
    ...
    [right]
    ...

Each glued pair is listed once per color; ``-`` marks a boundary edge.
An optional ``labels`` line (global or per section) names the tiles, so
the tile tokens can follow the labelling of a figure; without it tiles are
the integers ``0..N-1``.  An optional ``root <tile>`` line inside a section
names the tile that is placed on the base tile when the domain is built
(default: the first tile).
"""

from __future__ import annotations

import enum
import itertools
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

__all__ = [
    "Color",
    "Boundary",
    "BOUNDARY",
    "SignConvention",
    "GluingGraph",
    "FamilyPair",
    "GluingError",
    "GluingFileError",
    "EXPECTED_SIGNATURES",
    "parse_gluing_file",
    "serialize_family",
    "to_signed_matrices",
    "permute_colors",
    "relabel_tiles",
    "family_ids",
    "load_family",
]


class Color(enum.IntEnum):
    RED = 1
    BLUE = 2
    BLACK = 3

    @property
    def label(self) -> str:
        return self.name.lower()


COLORS = (Color.RED, Color.BLUE, Color.BLACK)


class Boundary(enum.Enum):
    """Marker for an edge that glues to nothing."""

    BOUNDARY = "-"

    def __repr__(self) -> str:
        return "BOUNDARY"


BOUNDARY = Boundary.BOUNDARY


class SignConvention(enum.Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"

    @property
    def boundary_sign(self) -> int:
        return -1 if self is SignConvention.DIRICHLET else 1


# tile count -> unordered pair of row-support counts of the two canonical
# transplantation matrices
EXPECTED_SIGNATURES = {7: (3, 4), 13: (4, 9), 15: (7, 8), 21: (5, 16)}


class GluingError(ValueError):
    """A gluing graph violates one of its structural invariants."""


class GluingFileError(GluingError):
    """A gluing file could not be parsed; ``line`` is 1-based."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class GluingGraph:
    """N tiles with one involution per color.

    ``glue[c][i]`` is the tile glued to tile ``i`` along color ``c + 1``,
    or ``BOUNDARY``.
    """

    n_tiles: int
    glue: tuple[tuple[int | Boundary, ...], ...]
    labels: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.n_tiles < 1:
            raise GluingError("a gluing graph needs at least one tile")
        glue = tuple(tuple(row) for row in self.glue)
        object.__setattr__(self, "glue", glue)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(self.n_tiles)))
        elif len(self.labels) != self.n_tiles or len(set(self.labels)) != self.n_tiles:
            raise GluingError("labels must name every tile exactly once")
        if len(glue) != 3:
            raise GluingError("exactly three colors are required")
        for color, row in zip(COLORS, glue):
            if len(row) != self.n_tiles:
                raise GluingError(f"{color.label}: expected {self.n_tiles} entries, got {len(row)}")
            for i, j in enumerate(row):
                if j is BOUNDARY:
                    continue
                if not isinstance(j, (int, np.integer)) or not 0 <= j < self.n_tiles:
                    raise GluingError(f"{color.label}: tile index {j!r} out of range")
                if j == i:
                    raise GluingError(f"{color.label}: tile {i} glued to itself")
                if row[j] != i:
                    raise GluingError(
                        f"{color.label}: not an involution, {i}->{j} but {j}->{row[j]!r}"
                    )
        if not self._connected():
            raise GluingError("gluing graph is disconnected")

    def _connected(self) -> bool:
        seen = {0}
        stack = [0]
        while stack:
            i = stack.pop()
            for row in self.glue:
                j = row[i]
                if j is not BOUNDARY and j not in seen:
                    seen.add(j)
                    stack.append(j)
        return len(seen) == self.n_tiles

    @classmethod
    def from_pairs(cls, n_tiles: int, pairs: Mapping[Color, Sequence[tuple[int, int]]],
                   labels: Sequence[str] = ()) -> "GluingGraph":
        """Build a graph from per-color lists of glued pairs; the rest is boundary."""
        glue = []
        for color in COLORS:
            row: list[int | Boundary] = [BOUNDARY] * n_tiles
            for i, j in pairs.get(color, ()):
                if row[i] is not BOUNDARY or row[j] is not BOUNDARY:
                    raise GluingError(f"{color.label}: tile glued twice in ({i}, {j})")
                row[i], row[j] = j, i
            glue.append(tuple(row))
        return cls(n_tiles, tuple(glue), tuple(labels))

    def neighbor(self, tile: int, color: Color) -> int | Boundary:
        return self.glue[int(color) - 1][tile]

    def pairs(self, color: Color) -> list[tuple[int, int]]:
        row = self.glue[int(color) - 1]
        return [(i, j) for i, j in enumerate(row) if j is not BOUNDARY and i < j]

    def boundary_tiles(self, color: Color) -> list[int]:
        return [i for i, j in enumerate(self.glue[int(color) - 1]) if j is BOUNDARY]

    @property
    def n_edges(self) -> int:
        return sum(len(self.pairs(c)) for c in COLORS)


@dataclass(frozen=True)
class FamilyPair:
    family_id: str
    left: GluingGraph
    right: GluingGraph
    verified: bool = True
    roots: tuple[int, int] = (0, 0)

    def __post_init__(self):
        if self.left.n_tiles != self.right.n_tiles:
            raise GluingError("left and right graphs have different tile counts")
        if any(not 0 <= r < self.left.n_tiles for r in self.roots):
            raise GluingError(f"root tile out of range: {self.roots}")

    def side(self, name: str) -> GluingGraph:
        """``'A'``/``'left'`` or ``'B'``/``'right'``."""
        key = name.lower()
        if key in ("a", "left"):
            return self.left
        if key in ("b", "right"):
            return self.right
        raise ValueError(f"unknown side {name!r}; use A or B")

    def root(self, name: str) -> int:
        self.side(name)
        return self.roots[0 if name.lower() in ("a", "left") else 1]

    @property
    def n_tiles(self) -> int:
        return self.left.n_tiles

    @property
    def expected_signature(self) -> tuple[int, int] | None:
        return EXPECTED_SIGNATURES.get(self.n_tiles)


# -- file format -------------------------------------------------------------

_COLOR_NAMES = {c.label: c for c in COLORS}


def parse_gluing_file(text: bytes | str) -> FamilyPair:
    """Parse a gluing file into a validated :class:`FamilyPair`."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    family_id = None
    n_tiles = None
    verified = True
    global_labels: list[str] | None = None
    sections: dict[str, dict] = {}
    current = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        key = tokens[0].lower()
        if key in ("[left]", "[right]"):
            name = key[1:-1]
            if name in sections:
                raise GluingFileError(f"duplicate section {key}", lineno)
            if n_tiles is None:
                raise GluingFileError("'tiles' must precede the graph sections", lineno)
            current = sections[name] = {"labels": None, "entries": [], "line": lineno,
                                        "root": None}
        elif key == "family":
            if len(tokens) != 2:
                raise GluingFileError("expected 'family <id>'", lineno)
            family_id = tokens[1]
        elif key == "tiles":
            if len(tokens) != 2 or not tokens[1].isdigit() or int(tokens[1]) < 1:
                raise GluingFileError("expected 'tiles <positive integer>'", lineno)
            n_tiles = int(tokens[1])
        elif key == "status":
            if len(tokens) != 2 or tokens[1] not in ("verified", "unverified"):
                raise GluingFileError("expected 'status verified|unverified'", lineno)
            verified = tokens[1] == "verified"
        elif key == "labels":
            if current is None:
                global_labels = tokens[1:]
            else:
                current["labels"] = tokens[1:]
        elif key == "root":
            if current is None or len(tokens) != 2:
                raise GluingFileError("expected 'root <tile>' inside a section", lineno)
            current["root"] = (tokens[1], lineno)
        elif key in _COLOR_NAMES:
            if current is None:
                raise GluingFileError("color entry outside a [left]/[right] section", lineno)
            if len(tokens) != 3:
                raise GluingFileError(f"expected '{key} <i> <j|->'", lineno)
            current["entries"].append((lineno, _COLOR_NAMES[key], tokens[1], tokens[2]))
        else:
            raise GluingFileError(f"unknown keyword {tokens[0]!r}", lineno)

    if family_id is None:
        raise GluingFileError("missing 'family' line")
    if n_tiles is None:
        raise GluingFileError("missing 'tiles' line")
    for name in ("left", "right"):
        if name not in sections:
            raise GluingFileError(f"missing [{name}] section")
    graphs = [_build_section(sections[name], n_tiles, global_labels) for name in ("left", "right")]
    roots = []
    for name, graph in zip(("left", "right"), graphs):
        spec = sections[name]["root"]
        if spec is None:
            roots.append(0)
        elif spec[0] in graph.labels:
            roots.append(graph.labels.index(spec[0]))
        else:
            raise GluingFileError(f"root tile {spec[0]!r} out of range", spec[1])
    try:
        return FamilyPair(family_id, graphs[0], graphs[1], verified, tuple(roots))
    except GluingError as exc:
        raise GluingFileError(str(exc)) from exc


def _build_section(section: dict, n_tiles: int, global_labels: list[str] | None) -> GluingGraph:
    labels = section["labels"] or global_labels
    if labels is not None:
        if len(labels) != n_tiles or len(set(labels)) != n_tiles:
            raise GluingFileError(f"labels must name {n_tiles} distinct tiles", section["line"])
        index = {lab: k for k, lab in enumerate(labels)}
    else:
        index = {str(k): k for k in range(n_tiles)}

    def resolve(token: str, lineno: int) -> int:
        if token not in index:
            raise GluingFileError(f"tile {token!r} out of range", lineno)
        return index[token]

    glue: list[list] = [[None] * n_tiles for _ in COLORS]
    for lineno, color, a, b in section["entries"]:
        row = glue[int(color) - 1]
        i = resolve(a, lineno)
        j = BOUNDARY if b == "-" else resolve(b, lineno)
        for t in (i,) if j is BOUNDARY else (i, j):
            if row[t] is not None:
                raise GluingFileError(
                    f"tile {a if t == i else b} has two {color.label} entries", lineno)
        if j is not BOUNDARY and i == j:
            raise GluingFileError(f"tile {a} glued to itself", lineno)
        row[i] = j
        if j is not BOUNDARY:
            row[j] = i
    for color, row in zip(COLORS, glue):
        missing = [k for k, v in enumerate(row) if v is None]
        if missing:
            names = ", ".join(labels[k] if labels else str(k) for k in missing)
            raise GluingFileError(f"no {color.label} entry for tile(s) {names}", section["line"])
    try:
        return GluingGraph(n_tiles, tuple(tuple(r) for r in glue), tuple(labels or ()))
    except GluingError as exc:
        raise GluingFileError(str(exc), section["line"]) from exc


def serialize_family(pair: FamilyPair) -> str:
    """Inverse of :func:`parse_gluing_file` (comments are not preserved)."""
    out = [f"family {pair.family_id}", f"tiles {pair.n_tiles}"]
    if not pair.verified:
        out.append("status unverified")
    for name, graph, root in (("left", pair.left, pair.roots[0]),
                              ("right", pair.right, pair.roots[1])):
        out.append(f"[{name}]")
        default = tuple(str(i) for i in range(graph.n_tiles))
        if graph.labels != default:
            out.append("labels " + " ".join(graph.labels))
        lab = graph.labels
        if root:
            out.append(f"root {lab[root]}")
        for color in COLORS:
            for i, j in graph.pairs(color):
                out.append(f"{color.label:<5} {lab[i]} {lab[j]}")
            for i in graph.boundary_tiles(color):
                out.append(f"{color.label:<5} {lab[i]} -")
    return "\n".join(out) + "\n"


# -- matrices and relabelling --------------------------------------------------

def to_signed_matrices(graph: GluingGraph,
                       convention: SignConvention = SignConvention.DIRICHLET) -> np.ndarray:
    """Return the three signed gluing matrices stacked as an array ``(3, N, N)``.

    Entry ``[c, i, j]`` is 1 when color ``c + 1`` glues tile ``i`` to ``j``;
    boundary edges put ``-1`` (Dirichlet) or ``+1`` (Neumann) on the diagonal.
    """
    n = graph.n_tiles
    mats = np.zeros((3, n, n), dtype=np.int64)
    sign = convention.boundary_sign
    for c, row in enumerate(graph.glue):
        for i, j in enumerate(row):
            if j is BOUNDARY:
                mats[c, i, i] = sign
            else:
                mats[c, i, j] = 1
    return mats


def _as_color_map(perm) -> dict[Color, Color]:
    if isinstance(perm, Mapping):
        mapping = {Color(k): Color(v) for k, v in perm.items()}
        for c in COLORS:
            mapping.setdefault(c, c)
    else:
        perm = list(perm)
        if len(perm) != 3:
            raise ValueError("a color permutation lists the new color of red, blue, black")
        mapping = {c: Color(p) for c, p in zip(COLORS, perm)}
    if sorted(mapping.values()) != list(COLORS):
        raise ValueError(f"not a permutation of the three colors: {perm!r}")
    return mapping


def permute_colors(pair: FamilyPair, perm) -> FamilyPair:
    """Relabel colors in both graphs.

    ``perm`` is either a mapping old color -> new color or a sequence giving
    the new colors of red, blue and black in that order.
    """
    mapping = _as_color_map(perm)

    def apply(graph: GluingGraph) -> GluingGraph:
        glue = [None, None, None]
        for old, new in mapping.items():
            glue[int(new) - 1] = graph.glue[int(old) - 1]
        return GluingGraph(graph.n_tiles, tuple(glue), graph.labels)

    return FamilyPair(pair.family_id, apply(pair.left), apply(pair.right), pair.verified,
                      pair.roots)


def relabel_tiles(graph: GluingGraph, perm: Sequence[int]) -> GluingGraph:
    """Rename tile ``i`` to ``perm[i]``."""
    perm = list(perm)
    if sorted(perm) != list(range(graph.n_tiles)):
        raise ValueError("perm must be a permutation of the tile indices")
    glue = []
    for row in graph.glue:
        new = [BOUNDARY] * graph.n_tiles
        for i, j in enumerate(row):
            new[perm[i]] = BOUNDARY if j is BOUNDARY else perm[j]
        glue.append(tuple(new))
    return GluingGraph(graph.n_tiles, tuple(glue))


def color_permutations() -> list[dict[Color, Color]]:
    return [dict(zip(COLORS, p)) for p in itertools.permutations(COLORS)]


# -- shipped catalog -----------------------------------------------------------

def _family_files():
    return resources.files(__package__).joinpath("families")


def _family_sort_key(fid: str):
    n, k = fid.split("_")
    return int(n), int(k)


def family_ids() -> list[str]:
    """Ids of the shipped families, in catalog order (7_1 ... 21_1)."""
    names = [p.name[:-5] for p in _family_files().iterdir() if p.name.endswith(".glue")]
    return sorted(names, key=_family_sort_key)


def load_family(family_id: str) -> FamilyPair:
    path = _family_files().joinpath(f"{family_id}.glue")
    if not path.is_file():
        raise KeyError(f"unknown family {family_id!r}; known: {', '.join(family_ids())}")
    return parse_gluing_file(path.read_bytes())
