"""Dense exact linear algebra over Fraction.

Matrices are lists of rows.  Everything here is small (tens of rows), so
plain Gauss-Jordan elimination is used throughout.
"""
from fractions import Fraction


def zeros(rows, cols):
    return [[Fraction(0)] * cols for _ in range(rows)]


def identity(n):
    m = zeros(n, n)
    for i in range(n):
        m[i][i] = Fraction(1)
    return m


def transpose(a, cols=None):
    if not a:
        return [[] for _ in range(cols or 0)]
    return [list(col) for col in zip(*a)]


def matmul(a, b, inner=None):
    if not a:
        return []
    if not b:
        return [[] for _ in a] if inner is None else zeros(len(a), 0)
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def matvec(a, v):
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def rref(a):
    """Reduced row echelon form.  Returns (matrix, pivot column list)."""
    m = [[Fraction(x) for x in row] for row in a]
    if not m:
        return m, []
    rows, cols = len(m), len(m[0])
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a):
    return len(rref(a)[1])


def nullspace(a, cols=None):
    """Basis of {v : a v = 0}, one vector per free column (free entry = 1)."""
    if not a:
        n = cols or 0
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    m, pivots = rref(a)
    n = len(a[0])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, p in zip(m, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def row_space_basis(vectors):
    m, pivots = rref(vectors)
    return m[: len(pivots)]


def solve(a, b):
    """One solution x of a x = b (free variables set to zero), or None."""
    if not a:
        return [] if all(x == 0 for x in b) else None
    n = len(a[0])
    aug = [list(row) + [Fraction(x)] for row, x in zip(a, b)]
    m, pivots = rref(aug)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for row, p in zip(m, pivots):
        x[p] = row[n]
    return x


def in_span(v, vectors):
    if not any(v):
        return True
    if not vectors:
        return False
    return rank(list(vectors) + [list(v)]) == rank(vectors)


def reduce_mod_span(v, vectors):
    """Canonical coset representative of v modulo span(vectors).

    Eliminates v against the reduced echelon basis of the span, so two
    vectors in the same coset map to the same representative.
    """
    v = [Fraction(x) for x in v]
    if not vectors:
        return v
    m, pivots = rref(vectors)
    for row, p in zip(m, pivots):
        if v[p]:
            f = v[p]
            v = [x - f * y for x, y in zip(v, row)]
    return v
