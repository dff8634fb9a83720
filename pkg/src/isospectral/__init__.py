"""Isospectral tilings in two and three dimensions.

Build domains from colored reflection rules, prove transplantability with
exact integer linear algebra, and compare finite-difference Dirichlet
spectra.
"""

from .geometry import (
    Assembly,
    BaseTile,
    GeometryError,
    IsometryReport,
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
from .spectra import (
    ComparisonReport,
    DiscreteLaplacian,
    RasterDomain,
    Spectrum,
    assemble_laplacian,
    compare_spectra,
    lowest_eigenvalues,
    rasterize,
    transplant_grid_function,
)
from .tiling import (
    BOUNDARY,
    Color,
    FamilyPair,
    GluingGraph,
    SignConvention,
    family_ids,
    load_family,
    parse_gluing_file,
    permute_colors,
    serialize_family,
    to_signed_matrices,
)
from .transplant import (
    DecompositionSignature,
    TransplantationBasis,
    decomposition_signature,
    is_nontrivial,
    solve_transplantation,
    transplant_coefficients,
    verify_transplantation,
)

__version__ = "0.1.0"
