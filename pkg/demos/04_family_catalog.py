"""Walk the whole shipped catalog of isospectral families.

Families come from involutions of small projective planes and spaces.  For
each one we solve for transplantations under both boundary sign conventions
and report the pair of support sizes of its pure solutions.
"""

from isospectral import (
    SignConvention,
    decomposition_signature,
    family_ids,
    load_family,
    solve_transplantation,
    to_signed_matrices,
)

print(f"{'family':8} {'tiles':>5}  dirichlet  neumann")
for fid in family_ids():
    pair = load_family(fid)
    sigs = []
    for conv in SignConvention:
        basis = solve_transplantation(to_signed_matrices(pair.left, conv),
                                      to_signed_matrices(pair.right, conv))
        sigs.append(decomposition_signature(basis).counts)
    print(f"{fid:8} {pair.left.n_tiles:5d}  {str(sigs[0]):9}  {sigs[1]}")
