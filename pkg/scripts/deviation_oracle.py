#!/usr/bin/env python3
"""Deviations of a local ring from its Poincare series.

Standalone: no dependency on the package.  Given the power series of
P(t) = prod_{i odd} (1 + t^i)^e_i / prod_{i even} (1 - t^i)^e_i, peel the
factors off one degree at a time and print e_1 .. e_N.

    python scripts/deviation_oracle.py            # fat point, P = 1/(1 - 2t)
    python scripts/deviation_oracle.py 6 1 -2     # P = 1/(1 - 2t), to order 6

The trailing arguments are the coefficients of the denominator polynomial.
"""
import sys
from fractions import Fraction


def series_inverse(coeffs, order):
    out = [Fraction(0)] * (order + 1)
    out[0] = Fraction(1) / coeffs[0]
    for k in range(1, order + 1):
        acc = sum(coeffs[i] * out[k - i] for i in range(1, min(k, len(coeffs) - 1) + 1))
        out[k] = -acc / coeffs[0]
    return out


def series_mul(a, b, order):
    out = [Fraction(0)] * (order + 1)
    for i, ai in enumerate(a[: order + 1]):
        if ai:
            for j, bj in enumerate(b[: order + 1 - i]):
                out[i + j] += ai * bj
    return out


def binomial_series(sign, k, exponent, order):
    """(1 + sign*t^k)^exponent as a truncated series, exponent any integer."""
    out = [Fraction(0)] * (order + 1)
    coeff = Fraction(1)
    n = 0
    while n * k <= order:
        out[n * k] = coeff * sign**n
        coeff = coeff * (exponent - n) / (n + 1)
        n += 1
    return out


def deviations(poincare, order):
    q = list(poincare[: order + 1])
    eps = []
    for k in range(1, order + 1):
        e = q[k]
        assert e.denominator == 1, (k, e)
        e = int(e)
        eps.append(e)
        # divide out (1 + t^k)^e or (1 - t^k)^(-e)
        if k % 2:
            factor = binomial_series(1, k, -e, order)
        else:
            factor = binomial_series(-1, k, e, order)
        q = series_mul(q, factor, order)
    return eps


def main(argv):
    order = int(argv[0]) if argv else 4
    denom = [Fraction(c) for c in argv[1:]] or [Fraction(1), Fraction(-2)]
    p = series_inverse(denom, order)
    print(" ".join(str(e) for e in deviations(p, order)))


if __name__ == "__main__":
    main(sys.argv[1:])
