"""Regenerate the shipped gluing files from finite projective geometry.

The transplantable pairs with 7, 13, 15 and 21 tiles arise from three
involutions of a collineation group acting on the points (left tiling) and
on the hyperplanes (right tiling) of PG(2,2), PG(2,3), PG(3,2) and PG(2,4).
This script enumerates involution triples, keeps those whose point graph is
a connected tree (a polyform of general triangles) or, for 21 tiles, a
graph realisable with (30, 60, 90) triangles, and prints one canonical
representative per family.

Usage::

    python tools/generate_families.py 13                 # count families
    python tools/generate_families.py 13 src/isospectral/families
"""

import itertools
import sys
from collections import defaultdict

# GF(q) arithmetic for q in {2, 3, 4}; GF(4) = {0, 1, w, w^2} encoded 0..3
_GF4_ADD = [[a ^ b for b in range(4)] for a in range(4)]
_GF4_LOG = {1: 0, 2: 1, 3: 2}
_GF4_EXP = [1, 2, 3]


def _gf4_mul(a, b):
    if a == 0 or b == 0:
        return 0
    return _GF4_EXP[(_GF4_LOG[a] + _GF4_LOG[b]) % 3]


class Field:
    def __init__(self, q):
        self.q = q
        if q == 4:
            self.add = lambda a, b: _GF4_ADD[a][b]
            self.mul = _gf4_mul
            self.frob = lambda a: _gf4_mul(a, a)
        else:
            self.add = lambda a, b: (a + b) % q
            self.mul = lambda a, b: (a * b) % q
            self.frob = lambda a: a
        self.inv = {a: next(b for b in range(1, q) if self.mul(a, b) == 1) for a in range(1, q)}


def points(field, n):
    pts = []
    for v in itertools.product(range(field.q), repeat=n):
        nz = [x for x in v if x]
        if nz and nz[0] == 1:
            pts.append(v)
    return pts


def normalize(field, v):
    lead = next(x for x in v if x)
    inv = field.inv[lead]
    return tuple(field.mul(inv, x) for x in v)


def apply(field, m, v, frob=False):
    if frob:
        v = tuple(field.frob(x) for x in v)
    n = len(v)
    out = []
    for i in range(n):
        s = 0
        for j in range(n):
            s = field.add(s, field.mul(m[i][j], v[j]))
        out.append(s)
    return tuple(out)


def involutions(q, n):
    """Point permutations of all involutory collineations of PG(n-1, q)."""
    field = Field(q)
    pts = points(field, n)
    index = {p: k for k, p in enumerate(pts)}
    seen = set()
    result = []
    frobs = (False, True) if q == 4 else (False,)
    for entries in itertools.product(range(q), repeat=n * n):
        m = [entries[i * n:(i + 1) * n] for i in range(n)]
        for frob in frobs:
            perm = []
            ok = True
            for p in pts:
                img = apply(field, m, p, frob)
                if not any(img):
                    ok = False
                    break
                perm.append(index[normalize(field, img)])
            if not ok or len(set(perm)) != len(perm):
                continue
            perm = tuple(perm)
            if perm in seen:
                continue
            if all(perm[perm[i]] == i for i in range(len(perm))) and perm != tuple(range(len(perm))):
                seen.add(perm)
                result.append(perm)
    return pts, result


def hyperplanes(pts, field, n):
    """Hyperplanes as frozensets of point indices."""
    hps = {}
    for a in points(field, n):
        s = frozenset(k for k, p in enumerate(pts)
                      if _dot(field, a, p) == 0)
        hps[s] = None
    return list(hps)


def _dot(field, a, p):
    s = 0
    for x, y in zip(a, p):
        s = field.add(s, field.mul(x, y))
    return s


def line_action(perm, lines, lindex):
    return tuple(lindex[frozenset(perm[p] for p in L)] for L in lines)


def connected(perms, n):
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for p in perms:
            if p[i] not in seen:
                seen.add(p[i])
                stack.append(p[i])
    return len(seen) == n


def canon_graph(perms):
    n = len(perms[0])
    best = None
    for root in range(n):
        order = {root: 0}
        queue = [root]
        k = 0
        while k < len(queue):
            i = queue[k]
            k += 1
            for p in perms:
                j = p[i]
                if j not in order:
                    order[j] = len(order)
                    queue.append(j)
        code = tuple(tuple(order[p[v]] for v in sorted(order, key=order.get)) for p in perms)
        if best is None or code < best:
            best = code
    return best


def canon_pair(left, right):
    best = None
    for cp in itertools.permutations(range(3)):
        l = canon_graph([left[c] for c in cp])
        r = canon_graph([right[c] for c in cp])
        code = tuple(sorted((l, r)))
        if best is None or code < best:
            best = code
    return best


def n_transpositions(p):
    return sum(1 for i, j in enumerate(p) if i < j)


# realisability of cycles with (30, 60, 90) triangles: colors sit on the
# middle, long and short edge; consecutive edges meet at 30, 60 and 90 deg,
# so an alternating two-color cycle must have length 12, 6 or 4
_ANGLE_ORDER = {frozenset((0, 1)): 6, frozenset((1, 2)): 3, frozenset((0, 2)): 2}


def locally_realisable(perms):
    n = len(perms[0])
    for (a, b), k in ((tuple(sorted(s)), v) for s, v in _ANGLE_ORDER.items()):
        pa, pb = perms[a], perms[b]
        for i in range(n):
            # walk the alternating chain; if it closes it must have period 2k
            x, steps = i, 0
            closed = False
            for step in range(4 * n):
                y = (pa if step % 2 == 0 else pb)[x]
                if y == x:
                    break
                x = y
                steps += 1
                if x == i and steps % 2 == 0:
                    closed = True
                    break
            if closed and steps != 2 * k:
                return False
    return True


def families(N):
    q, n = {7: (2, 3), 13: (3, 3), 15: (2, 4), 21: (4, 3)}[N]
    field = Field(q)
    pts, invs = involutions(q, n)
    lines = hyperplanes(pts, field, n)
    lindex = {L: k for k, L in enumerate(lines)}
    line_of = {p: line_action(p, lines, lindex) for p in invs}
    found = {}
    target = N - 1
    reps = {}
    for p in invs:
        reps.setdefault(sum(1 for i, j in enumerate(p) if i == j), p)
    pairs = itertools.permutations(invs, 2) if N == 21 else itertools.combinations(invs, 2)
    pairs = list(pairs)
    for a in reps.values():
        for b, c in pairs:
            if a in (b, c):
                continue
            edges = n_transpositions(a) + n_transpositions(b) + n_transpositions(c)
            if N != 21 and edges != target:
                continue
            left = (a, b, c)
            if not connected(left, N):
                continue
            if N == 21 and not locally_realisable(left):
                continue
            right = tuple(line_of[p] for p in left)
            if N == 21 and not locally_realisable(right):
                continue
            if canon_graph(left) == canon_graph(right):
                continue
            key = canon_pair(left, right)
            if N == 21:
                # keep every coloring; the global unfolding decides later
                found.setdefault(key, []).append((left, right))
            elif key not in found:
                found[key] = (left, right)
    return found


def _graph(perms):
    from isospectral.tiling import COLORS, GluingGraph

    n = len(perms[0])
    return GluingGraph.from_pairs(
        n, {c: [(i, j) for i, j in enumerate(p) if i < j] for c, p in zip(COLORS, perms)})


def _unfolds_flat(perms):
    """True when the point graph lays out as a simple (30, 60, 90) polyform."""
    from isospectral.geometry import BaseTile, GeometryError, build_assembly, triangle_with_angles

    # red on the middle edge, blue on the hypotenuse, black on the short edge
    tri = BaseTile.simplex(triangle_with_angles((30, 60, 90)), fixed_face=(1, 2, 0))
    try:
        return not build_assembly(_graph(perms), tri).overlapping
    except GeometryError:
        return False


def write_files(N, outdir):
    write_chosen(N, choose(N, families(N)), outdir)


def choose(N, found):
    """One representative per class; for 21 tiles, the color order that unfolds flat.

    Members of a class differ only by tile relabeling and color order, and flat
    unfolding ignores tile labels, so one member times six color orders suffices.
    """
    chosen = []
    for key in sorted(found):
        if N != 21:
            chosen.append(found[key])
            continue
        left, right = found[key][0]
        for cp in itertools.permutations(range(3)):
            cand = tuple(left[i] for i in cp), tuple(right[i] for i in cp)
            if _unfolds_flat(cand[0]) and _unfolds_flat(cand[1]):
                chosen.append(cand)
                break
    return chosen


def write_chosen(N, chosen, outdir):
    from isospectral.tiling import FamilyPair, serialize_family
    from isospectral.transplant import decomposition_signature, solve_transplantation
    from isospectral.tiling import EXPECTED_SIGNATURES, SignConvention, to_signed_matrices

    for k, (left, right) in enumerate(chosen, start=1):
        fid = f"{N}_{k}"
        pair = FamilyPair(fid, _graph(left), _graph(right))
        ok = True
        for conv in SignConvention:
            A = to_signed_matrices(pair.left, conv)
            B = to_signed_matrices(pair.right, conv)
            basis = solve_transplantation(A, B)
            sig = decomposition_signature(basis).counts if basis.dimension == 2 else None
            ok &= sig is not None and sorted(sig) == sorted(EXPECTED_SIGNATURES[N])
        pair = FamilyPair(fid, pair.left, pair.right, verified=ok)
        header = (f"# Family {fid}: {N} tiles, generated by tools/generate_families.py.\n"
                  f"# Tile numbering follows the projective point order, not a figure's labels.\n")
        with open(f"{outdir}/{fid}.glue", "w") as fh:
            fh.write(header + serialize_family(pair))
        print(fid, "verified" if ok else "UNVERIFIED")


if __name__ == "__main__":
    N = int(sys.argv[1])
    if len(sys.argv) > 2:
        write_files(N, sys.argv[2])
    else:
        fams = families(N)
        print(N, len(fams))
