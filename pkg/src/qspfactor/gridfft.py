"""Power-of-two FFT primitives shared by the grid-evaluation paths.

Twiddle factors come from exact dyadic phases, so each is accurate to
one ulp at the requested precision.
"""

from __future__ import annotations

import mpmath as mp

from .precision import unit_root

_twiddle_cache: dict = {}


def twiddles(d: int, bits: int):
    """e^(-2 pi i m / d) for m = 0 .. d/2 - 1, cached per (d, bits)."""
    key = (d, bits)
    tw = _twiddle_cache.get(key)
    if tw is None:
        with mp.workprec(bits):
            tw = tuple(unit_root(-m, d) for m in range(d // 2))
        _twiddle_cache[key] = tw
        if len(_twiddle_cache) > 48:
            _twiddle_cache.pop(next(iter(_twiddle_cache)))
    return tw


def fft_pow2(vec, tw):
    """In-order forward FFT: X_j = sum_k v_k e^(-2 pi i jk / D)."""
    n = len(vec)
    a = list(vec)
    j = 0
    for i in range(1, n):
        bit = n >> 1
        while j & bit:
            j ^= bit
            bit >>= 1
        j |= bit
        if i < j:
            a[i], a[j] = a[j], a[i]
    length = 2
    while length <= n:
        half = length // 2
        step = n // length
        for start in range(0, n, length):
            for k in range(half):
                w = tw[k * step]
                u = a[start + k]
                v = a[start + k + half] * w
                a[start + k] = u + v
                a[start + k + half] = u - v
        length *= 2
    return a


def next_pow2(n: int) -> int:
    d = 1
    while d < n:
        d <<= 1
    return d


def laurent_values_on_grid(coeffs: dict, d_grid: int, bits: int):
    """Values sum_k c_k z^k at z = e^(2 pi i j / d_grid), j = 0..d_grid-1.

    Exponents fold exactly onto the grid (z^d_grid = 1), so any degree
    is admissible.  One inverse transform replaces d_grid separate
    Horner evaluations.
    """
    with mp.workprec(bits):
        slots = [mp.mpc(0)] * d_grid
        for k, c in coeffs.items():
            slots[k % d_grid] += mp.mpc(c)
        tw = twiddles(d_grid, bits)
        spun = fft_pow2([mp.conj(x) for x in slots], tw)
        return [mp.conj(x) for x in spun]
