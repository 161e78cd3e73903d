"""Independent oracle paths used to cross-check the implementation.

The sign oracle derives the relator exponents through the residue rule
(i*q mod 2p compared with p) instead of the floor formula, and the word
oracle multiplies the generator matrices by balanced binary splitting,
so the product route shares nothing with the left-to-right implementation.
"""

from fractions import Fraction

import mpmath as mp

from rileyslopes.laurent import BivarPoly, Mat2, base_matrices


def oracle_signs(p: int, q: int):
    """e_i via the residue rule: +1 iff (i*q mod 2p) lies in [0, p)."""
    return tuple(1 if (i * q) % (2 * p) < p else -1 for i in range(1, p))


def oracle_word(p: int, q: int) -> Mat2:
    """Balanced-split product of C/D powers from independently derived signs."""
    base = base_matrices()
    factors = []
    for idx, e in enumerate(oracle_signs(p, q)):
        if idx % 2 == 0:
            factors.append(base.c if e == 1 else base.c_inv)
        else:
            factors.append(base.d if e == 1 else base.d_inv)

    def prod(lo, hi):
        if hi - lo == 1:
            return factors[lo]
        mid = (lo + hi) // 2
        return prod(lo, mid) * prod(mid, hi)

    return prod(0, len(factors))


def oracle_riley(p: int, q: int) -> BivarPoly:
    w = oracle_word(p, q)
    t_minus = BivarPoly.t_power(1) - BivarPoly.t_power(-1)
    return w.a - t_minus * w.b


def multiplicative_slope_residual(sys, t, u, r):
    """t^{r-2s} ((t-1/t)^2 - u) B^2 - 1, evaluated directly (no logs)."""
    from rileyslopes import laurent

    tt, uu = mp.mpf(t), mp.mpf(u)
    b = laurent.eval_real(sys.B, tt, uu, dps=mp.mp.dps)
    r = Fraction(r)
    n = mp.mpf(r.numerator) / r.denominator - 2 * sys.sigma
    return tt ** n * ((tt - 1 / tt) ** 2 - uu) * b * b - 1
