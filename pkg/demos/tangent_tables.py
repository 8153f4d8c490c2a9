"""Higher tangent spaces of a few plane singularities.

Run from the repository root:  python demos/tangent_tables.py
"""
from dtangent.dga import resolve_through
from dtangent.poly import PointedModel
from dtangent.tangent import classify, tangent_dims

models = {
    "parabola": (["y - x^2"], "xy"),
    "node": (["x*y"], "xy"),
    "cusp": (["y^2 - x^3"], "xy"),
    "fat point": (["x^2", "x*y", "y^2"], "xy"),
    "coordinate axes": (["x*y", "y*z", "x*z"], "xyz"),
}

# A smooth point has nothing above T^1.  A complete intersection stops at
# T^2.  Anything else keeps going forever; we can only look at a window.
for name, (gens, variables) in models.items():
    m = PointedModel.from_strings(tuple(variables), gens)
    table = tangent_dims(m, 4)
    c = classify(m, 4, table)
    print(f"{name:16s} T^1..T^4 = {table.dims}   {c}")

# The fat point needs new generators in every degree.  Here is the start of
# its resolution; the degree-3 generators kill cycles built from products
# of the Koszul generators.
print()
print(resolve_through(PointedModel.from_strings(("x", "y"), ["x^2", "x*y", "y^2"]), 3).dump())
