"""Two planar drums built from right isosceles triangles, and their prisms.

The 7_3 rule applied to a half-square gives the classic pair of planar
isospectral drums.  We check that they are not congruent, that their grid
spectra coincide, move an eigenfunction from one to the other with the
transplantation matrix, and finally stretch both into prisms of height 1.
"""

import numpy as np

from isospectral import (
    SignConvention,
    assemble_laplacian,
    build_assembly,
    compare_spectra,
    decomposition_signature,
    extrude_prism,
    half_square,
    is_isometric,
    load_family,
    lowest_eigenvalues,
    polygon_loops,
    rasterize,
    solve_transplantation,
    to_signed_matrices,
    transplant_grid_function,
)

pair = load_family("7_3")
base = half_square(2.0)
a, b = (build_assembly(pair.side(s), base, root_tile=pair.root(s)) for s in "AB")
for name, drum in (("A", a), ("B", b)):
    corners = {tuple(np.round(p, 6)) for loop in polygon_loops(drum) for p in loop}
    print(f"drum {name}: area {drum.volume():g}, {len(corners)} distinct corners")
print("congruent?", is_isometric(a, b).isometric)

h = 1 / 20
ra, rb = rasterize(a, h), rasterize(b, h)
sa = lowest_eigenvalues(assemble_laplacian(ra), 8, vectors=True)
sb = lowest_eigenvalues(assemble_laplacian(rb), 8)
print("\nlowest eigenvalues:", np.round(sa.eigenvalues, 5))
print(f"largest A/B difference {compare_spectra(sa, sb).max_abs_diff:.1e}")

# Transplant the ground state with the 3-nonzero solution.
A = to_signed_matrices(pair.left, SignConvention.DIRICHLET)
B = to_signed_matrices(pair.right, SignConvention.DIRICHLET)
T = decomposition_signature(solve_transplantation(A, B)).representatives[0]
moved = transplant_grid_function(a, ra, sa.eigenvectors[:, 0], b, rb, T)
print(f"\ntransplanted ground state: Rayleigh quotient {moved.rayleigh_quotient:.5f}, "
      f"residual {moved.residual:.1e}")

# A prism's modes are a planar mode times sin(m pi z).
prisms = [extrude_prism(build_assembly(pair.side(s), half_square(), root_tile=pair.root(s)), 1.0)
          for s in "AB"]
pa, pb = (lowest_eigenvalues(assemble_laplacian(rasterize(p, h)), 5) for p in prisms)
print("\nprism eigenvalues:", np.round(pa.eigenvalues, 4))
print(f"largest prism A/B difference {compare_spectra(pa, pb).max_abs_diff:.1e}")
