"""The bracket T^1 x T^1 -> T^2 recovers the Hessian of a hypersurface.

Run from the repository root:  python demos/brackets.py
"""
from dtangent.poly import PointedModel
from dtangent.tangent import check_bracket_axioms, lie_bracket, tangent_dims

for f in ["x*y", "x^2 + y^3", "x^2 + y^2 + z^2", "x*y*z"]:
    variables = tuple(v for v in "xyz" if v in f)
    m = PointedModel.from_strings(variables, [f])
    matrix = lie_bracket(m, 1, 1, 2).matrix()
    print(f"{f:16s}", [[str(c) for c in row] for row in matrix])

# For the cubic x*y*z the Hessian at the origin is zero, so the bracket
# vanishes: the obstruction only shows up at third order.

# On a non-complete intersection the whole window carries brackets; they obey
# graded antisymmetry and the graded Jacobi identity.
fat = PointedModel.from_strings(("x", "y"), ["x^2", "x*y", "y^2"])
table = tangent_dims(fat, 4)
print("fat point bracket axioms:", check_bracket_axioms(table) or "all hold")
print("[T1, T1] -> T2:")
for row in lie_bracket(fat, 1, 1, 4, table).constants:
    print("   ", [[str(c) for c in v] for v in row])
