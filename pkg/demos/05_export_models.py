"""Write printable surface meshes of the two 7_1 drums and a planar layout.

Run from any directory; files land in ./models.  The OBJ files open in any
mesh viewer, the STL files in slicers.
"""

from pathlib import Path

from isospectral import (
    basic_simplex,
    build_assembly,
    export_mesh,
    load_family,
    polygon_loops,
    triangle_with_angles,
)
from isospectral.geometry import BaseTile

out = Path("models")
out.mkdir(exist_ok=True)

pair = load_family("7_1")
for side in "AB":
    drum = build_assembly(pair.side(side), basic_simplex(), root_tile=pair.root(side))
    for fmt in ("obj", "stl"):
        path = out / f"7_1_{side}.{fmt}"
        path.write_bytes(export_mesh(drum, fmt))
        print("wrote", path)
    print("  ", drum.summary())

# The 21-tile family laid out with a (30, 60, 90) triangle.
tri = BaseTile.simplex(triangle_with_angles((30, 60, 90)), fixed_face=(1, 2, 0))
flat = build_assembly(load_family("21_1").left, tri)
with open(out / "21_1_A.txt", "w") as fh:
    for k, loop in enumerate(polygon_loops(flat)):
        fh.write(f"{k}: " + " ".join(f"{x:.6f},{y:.6f}" for x, y in loop) + "\n")
print("wrote", out / "21_1_A.txt", "overlapping:", flat.overlapping)
