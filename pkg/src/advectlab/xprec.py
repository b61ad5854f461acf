"""Error-free transforms and double-word arithmetic.

A :class:`DoubleWord` is an unevaluated sum ``hi + lo`` of two binary64
numbers with ``hi == fl(hi + lo)``; it carries roughly 106 significand
bits. The plain arithmetic helpers (``two_sum``, ``two_prod``, ...) use only
``+``, ``-`` and ``*`` so they work element-wise on numpy arrays and can be
compiled by numba unchanged (see ``advectlab._kernels``).

Python 3.10 has no ``math.fma``, so :func:`two_prod` uses Dekker splitting.
Both routes are exact, so results would be identical either way.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple

# 2**27 + 1, Veltkamp splitter for binary64
_SPLITTER = 134217729.0


class DoubleWord(NamedTuple):
    hi: float
    lo: float


class DWComplex(NamedTuple):
    re: DoubleWord
    im: DoubleWord


# Double-word constants, verified against mpmath in the test-suite.
DW_PI = DoubleWord(3.141592653589793, 1.2246467991473532e-16)
DW_TWO_PI = DoubleWord(6.283185307179586, 2.4492935982947064e-16)
DW_HALF_PI = DoubleWord(1.5707963267948966, 6.123233995736766e-17)


# --------------------------------------------------------------------------
# error-free transforms


def two_sum(a, b):
    """Knuth's TwoSum: ``s = fl(a + b)`` and ``a + b == s + e`` exactly."""
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


def fast_two_sum(a, b):
    """Dekker's FastTwoSum; requires ``|a| >= |b|`` (or ``a == 0``)."""
    s = a + b
    e = b - (s - a)
    return s, e


def split(a):
    """Veltkamp split of ``a`` into two non-overlapping 26-bit halves."""
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def two_prod(a, b):
    """Dekker's TwoProduct: ``p = fl(a * b)`` and ``a * b == p + e`` exactly."""
    p = a * b
    ah, al = split(a)
    bh, bl = split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


# --------------------------------------------------------------------------
# double-word arithmetic


def dw_from(a: float) -> DoubleWord:
    return DoubleWord(float(a), 0.0)


def dw_from_fraction(q: Fraction) -> DoubleWord:
    hi = float(q)
    return DoubleWord(hi, float(q - Fraction(hi)))


def dw_round(a: DoubleWord) -> float:
    return a.hi


def dw_neg(a: DoubleWord) -> DoubleWord:
    return DoubleWord(-a.hi, -a.lo)


def dw_add(a: DoubleWord, b: DoubleWord) -> DoubleWord:
    # AccurateDWPlusDW (Joldes, Muller, Popescu 2017), relative error <= 3u^2
    sh, sl = two_sum(a.hi, b.hi)
    th, tl = two_sum(a.lo, b.lo)
    sl = sl + th
    sh, sl = fast_two_sum(sh, sl)
    sl = sl + tl
    return DoubleWord(*fast_two_sum(sh, sl))


def dw_sub(a: DoubleWord, b: DoubleWord) -> DoubleWord:
    return dw_add(a, dw_neg(b))


def dw_mul(a: DoubleWord, b: DoubleWord) -> DoubleWord:
    # DWTimesDW, relative error <= 5u^2
    ch, cl = two_prod(a.hi, b.hi)
    tl = a.hi * b.lo + a.lo * b.hi
    cl = cl + tl
    return DoubleWord(*fast_two_sum(ch, cl))


def dw_mul_d(a: DoubleWord, b: float) -> DoubleWord:
    ch, cl = two_prod(a.hi, b)
    cl = cl + a.lo * b
    return DoubleWord(*fast_two_sum(ch, cl))


def dw_div_d(a: DoubleWord, b: float) -> DoubleWord:
    th = a.hi / b
    ph, pl = two_prod(th, b)
    dh = a.hi - ph
    dl = a.lo - pl
    tl = (dh + dl) / b
    return DoubleWord(*fast_two_sum(th, tl))


def dw_lt(a: DoubleWord, b: DoubleWord) -> bool:
    return a.hi < b.hi or (a.hi == b.hi and a.lo < b.lo)


# --------------------------------------------------------------------------
# complex products rounded once


def dw_complex_mul_round(w: DWComplex, z: complex) -> complex:
    """Multiply a working-precision complex ``z`` by a double-word ``w``.

    Partial products and the final sum are formed in double-word arithmetic;
    each output component is rounded to binary64 exactly once.
    """
    a = z.real
    b = z.imag
    re = dw_sub(dw_mul_d(w.re, a), dw_mul_d(w.im, b))
    im = dw_add(dw_mul_d(w.re, b), dw_mul_d(w.im, a))
    return complex(re.hi, im.hi)


# --------------------------------------------------------------------------
# angles and trigonometric functions


def exact_sum(terms) -> DoubleWord:
    """Double-word value of an exact sum of binary64 terms.

    ``hi`` is the correctly rounded sum and ``lo`` the correctly rounded
    residual, both from ``math.fsum`` (Shewchuk's exact partials).
    """
    terms = list(terms)
    hi = math.fsum(terms)
    terms.append(-hi)
    return DoubleWord(hi, math.fsum(terms))


def reduce_turns(k: int, v: float, tau: float, period: float) -> DoubleWord:
    """``(k * v * tau) mod period``, as a double-word in ``[-period/2, period/2)``.

    ``k * v * tau`` is split into four binary64 terms whose sum is exact, so
    the only rounding happens when the reduced remainder is stored.
    """
    k = float(k)
    if abs(k) >= 2.0**53:
        raise ValueError("integer multiplier too large to represent exactly")
    p, e = two_prod(v, tau)
    a1, a2 = two_prod(k, p)
    a3, a4 = two_prod(k, e)
    pieces = [a1, a2, a3, a4]
    m = float(round(math.fsum(pieces) / period))
    b1, b2 = two_prod(m, period)
    r = exact_sum(pieces + [-b1, -b2])
    half = 0.5 * period
    if not dw_lt(r, DoubleWord(half, 0.0)):
        r = exact_sum([r.hi, r.lo, -period])
    elif dw_lt(r, DoubleWord(-half, 0.0)):
        r = exact_sum([r.hi, r.lo, period])
    return r


def dw_reduce_angle(k: int, v: float, tau: float, n_period: float) -> DoubleWord:
    """Angle ``-(2 pi k / L) v tau`` reduced into ``(-pi, pi]``.

    Used both for advection phase factors (``L`` the domain length) and for
    FFT twiddles (``k = j, v = tau = 1, L = n`` gives ``-2 pi j / n``).
    """
    if k == 0:
        return DoubleWord(0.0, 0.0)
    r = reduce_turns(k, v, tau, n_period)
    turns = dw_div_d(r, n_period)
    theta = dw_neg(dw_mul(turns, DW_TWO_PI))
    # -(-pi) lands exactly on pi; cancel the sign of zero for k v tau == 0 mod L
    if theta.hi == 0.0:
        return DoubleWord(0.0, 0.0)
    return theta


def _inverse_factorials(count: int) -> list[DoubleWord]:
    return [dw_from_fraction(Fraction(1, math.factorial(j))) for j in range(count)]


_INV_FACT = _inverse_factorials(34)


def _dw_sin_taylor(r: DoubleWord) -> DoubleWord:
    r2 = dw_mul(r, r)
    acc = _INV_FACT[31]
    for j in range(29, 0, -2):
        acc = dw_mul(acc, r2)
        acc = dw_neg(acc)
        acc = dw_add(_INV_FACT[j], acc)
    return dw_mul(acc, r)


def _dw_cos_taylor(r: DoubleWord) -> DoubleWord:
    r2 = dw_mul(r, r)
    acc = _INV_FACT[32]
    for j in range(30, -1, -2):
        acc = dw_mul(acc, r2)
        acc = dw_neg(acc)
        acc = dw_add(_INV_FACT[j], acc)
    return acc


def dw_sincos(theta: DoubleWord) -> tuple[DoubleWord, DoubleWord]:
    """Sine and cosine of a double-word angle to double-word accuracy.

    The angle is reduced by a multiple of pi/2 and the Taylor series is summed
    on ``|r| <= pi/4`` (truncation below 1e-33).
    """
    q = round(theta.hi / DW_HALF_PI.hi)
    r = dw_sub(theta, dw_mul_d(DW_HALF_PI, float(q)))
    s = _dw_sin_taylor(r)
    c = _dw_cos_taylor(r)
    quadrant = q % 4
    if quadrant == 0:
        return s, c
    if quadrant == 1:
        return c, dw_neg(s)
    if quadrant == 2:
        return dw_neg(s), dw_neg(c)
    return dw_neg(c), s


def sincos_corrected(theta: DoubleWord) -> tuple[float, float]:
    """Working-precision sine and cosine with a first-order ``lo`` correction."""
    s = math.sin(theta.hi)
    c = math.cos(theta.hi)
    return s + theta.lo * c, c - theta.lo * s


def dw_expi(theta: DoubleWord) -> DWComplex:
    s, c = dw_sincos(theta)
    return DWComplex(c, s)


def dwc_round(w: DWComplex) -> complex:
    return complex(w.re.hi, w.im.hi)
