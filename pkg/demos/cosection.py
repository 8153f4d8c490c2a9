"""A cosection kills every curvilinear obstruction.

The section s = (y*x, y*(x-1)) on the plane cuts out the line y = 0, but as a
Kuranishi model it carries an obstruction bundle of rank two.  The cosection
sigma = (x-1, -x) pairs to zero with s, so it should vanish on the normal
cone and on every obstruction class that jets can produce.

Run from the repository root:  python demos/cosection.py
"""
from dtangent.cone import cosection_check, curvilinear_sweep, normal_cone
from dtangent.poly import PointedModel

m = PointedModel.from_strings(("x", "y"), ["y*x", "y*(x-1)"])
cone = normal_cone(m)
print("cone ideal :", cone.cone_strings())
print("fibre at 0 :", cone.fiber_strings())

report = cosection_check(m, ["x - 1", "-x"])
print("sigma at 0 :", [str(c) for c in report.sigma_at_point])
print("descends   :", report.descends)
print("on cone    :", report.vanishes_on_cone)
print("kills jets :", report.kills_classes, f"({report.classes_checked} classes)")

# The node has a genuine obstruction: the diagonal jet (t, t) cannot be
# lifted past order 2, and the swept classes fill the line.
node = PointedModel.from_strings(("x", "y"), ["x*y"])
sweep = curvilinear_sweep(node, 2, 1)
print("node classes at order 2:", sorted({str(c.vector[0]) for c in sweep.classes}))
