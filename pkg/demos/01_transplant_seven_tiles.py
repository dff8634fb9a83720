"""Find every transplantation between the two 7-tile Class 7_1 drums.

The reflection rule of each drum is written as three signed permutation
matrices, one per mirror color.  A matrix T with T A = B T for all three
colors carries eigenfunctions of drum A onto eigenfunctions of drum B, so
the two drums must share their spectrum.  We solve for T exactly, then look
for the two "pure" solutions hiding in the answer.
"""

from isospectral import (
    SignConvention,
    decomposition_signature,
    is_nontrivial,
    load_family,
    solve_transplantation,
    to_signed_matrices,
    verify_transplantation,
)
from isospectral.transplant import format_matrix

pair = load_family("7_1")
A = to_signed_matrices(pair.left, SignConvention.DIRICHLET)
B = to_signed_matrices(pair.right, SignConvention.DIRICHLET)

# 147 integer equations in 49 unknowns; the kernel is two-dimensional.
basis = solve_transplantation(A, B)
print(f"solution space has dimension {basis.dimension}")

# Any combination of the basis works, exactly, with no rounding anywhere.
T = basis.combine([3, -1])
print("residual of 3 T_0 - T_1 is zero:", verify_transplantation(T, A, B).is_zero)

# The space is spanned by two matrices with constant support per row/column.
sig = decomposition_signature(basis)
for k, rep in zip(sig.counts, sig.representatives):
    print(f"\nrepresentative with {k} nonzeros in every row and column")
    print(format_matrix(rep))

# A relabeling of tiles would show up as a signed permutation in the span.
print("\ngenuinely different drums:", is_nontrivial(basis))
