"""Compiled inner loops: radix-2 FFT butterflies and the cyclic tridiagonal solve.

Everything here works in place on float64 arrays. The double-word helpers
are the ones from :mod:`advectlab.xprec`, compiled as-is; numba's default
(non-fastmath) mode keeps IEEE semantics, so no multiply-add contraction
can break the error-free transforms.
"""

import numpy as np
from numba import njit

from advectlab import xprec

_two_sum = njit(inline="always")(xprec.two_sum)
_fast_two_sum = njit(inline="always")(xprec.fast_two_sum)
_split = njit(inline="always")(xprec.split)


@njit(inline="always")
def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


@njit(inline="always")
def _dw_mul_d(xh, xl, b):
    ch, cl = _two_prod(xh, b)
    cl = cl + xl * b
    return _fast_two_sum(ch, cl)


@njit(inline="always")
def _dw_add_round(ah, al, bh, bl):
    sh, sl = _two_sum(ah, bh)
    th, tl = _two_sum(al, bl)
    sl = sl + th
    sh, sl = _fast_two_sum(sh, sl)
    sl = sl + tl
    sh, sl = _fast_two_sum(sh, sl)
    return sh


@njit(inline="always")
def _cmul_dw_round(wrh, wrl, wih, wil, a, b):
    # (wr + i wi) * (a + i b), each component rounded once
    p1h, p1l = _dw_mul_d(wrh, wrl, a)
    p2h, p2l = _dw_mul_d(wih, wil, b)
    re = _dw_add_round(p1h, p1l, -p2h, -p2l)
    p3h, p3l = _dw_mul_d(wrh, wrl, b)
    p4h, p4l = _dw_mul_d(wih, wil, a)
    im = _dw_add_round(p3h, p3l, p4h, p4l)
    return re, im


@njit(cache=True)
def bit_reverse_permute(re, im):
    n = re.shape[0]
    j = 0
    for i in range(1, n):
        bit = n >> 1
        while j & bit:
            j ^= bit
            bit >>= 1
        j |= bit
        if i < j:
            re[i], re[j] = re[j], re[i]
            im[i], im[j] = im[j], im[i]


@njit(cache=True)
def fft_inplace(re, im, wrh, wrl, wih, wil, sign, extended):
    """Decimation-in-time radix-2 transform.

    The twiddle table holds exp(-2 pi i j / n) for j < n/2 as double-words;
    ``sign = -1`` uses the conjugate (inverse transform, no scaling).
    """
    n = re.shape[0]
    bit_reverse_permute(re, im)
    size = 2
    while size <= n:
        half = size >> 1
        stride = n // size
        for start in range(0, n, size):
            for j in range(half):
                t_idx = j * stride
                hi_i = start + j + half
                lo_i = start + j
                br = re[hi_i]
                bi = im[hi_i]
                if j == 0:
                    tr = br
                    ti = bi
                elif extended:
                    tr, ti = _cmul_dw_round(
                        wrh[t_idx], wrl[t_idx], sign * wih[t_idx], sign * wil[t_idx], br, bi
                    )
                else:
                    wr = wrh[t_idx]
                    wi = sign * wih[t_idx]
                    tr = wr * br - wi * bi
                    ti = wr * bi + wi * br
                ar = re[lo_i]
                ai = im[lo_i]
                re[hi_i] = ar - tr
                im[hi_i] = ai - ti
                re[lo_i] = ar + tr
                im[lo_i] = ai + ti
        size <<= 1


@njit(cache=True)
def phase_multiply(re, im, prh, prl, pih, pil, extended):
    n = re.shape[0]
    for j in range(n):
        if extended:
            re[j], im[j] = _cmul_dw_round(prh[j], prl[j], pih[j], pil[j], re[j], im[j])
        else:
            a = re[j]
            b = im[j]
            re[j] = prh[j] * a - pih[j] * b
            im[j] = prh[j] * b + pih[j] * a


@njit(cache=True)
def advect_fft_steps(values, nsteps, wrh, wrl, wih, wil, prh, prl, pih, pil, extended):
    """Apply ``nsteps`` spectral advection steps to a real signal in place."""
    n = values.shape[0]
    re = np.empty(n)
    im = np.empty(n)
    inv_n = 1.0 / n
    for _ in range(nsteps):
        for j in range(n):
            re[j] = values[j]
            im[j] = 0.0
        fft_inplace(re, im, wrh, wrl, wih, wil, 1.0, extended)
        phase_multiply(re, im, prh, prl, pih, pil, extended)
        fft_inplace(re, im, wrh, wrl, wih, wil, -1.0, extended)
        for j in range(n):
            values[j] = re[j] * inv_n


@njit(cache=True)
def solve_cyclic_tridiagonal(a, b, c, rhs):
    """Solve a cyclic tridiagonal system with constant bands.

    Row i reads ``a x[i-1] + b x[i] + c x[i+1] = rhs[i]`` with periodic
    indices. Sherman-Morrison reduces it to two Thomas solves.
    """
    n = rhs.shape[0]
    gamma = -b
    diag = np.full(n, b)
    diag[0] = b - gamma
    diag[n - 1] = b - a * c / gamma
    u = np.zeros(n)
    u[0] = gamma
    u[n - 1] = c
    x = _thomas(a, diag, c, rhs)
    z = _thomas(a, diag, c, u)
    fact = (x[0] + a * x[n - 1] / gamma) / (1.0 + z[0] + a * z[n - 1] / gamma)
    return x - fact * z


@njit(cache=True)
def _thomas(a, diag, c, rhs):
    n = rhs.shape[0]
    cp = np.empty(n)
    dp = np.empty(n)
    cp[0] = c / diag[0]
    dp[0] = rhs[0] / diag[0]
    for i in range(1, n):
        m = diag[i] - a * cp[i - 1]
        cp[i] = c / m
        dp[i] = (rhs[i] - a * dp[i - 1]) / m
    x = np.empty(n)
    x[n - 1] = dp[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x
