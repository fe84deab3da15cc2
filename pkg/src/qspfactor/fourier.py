"""Fourier transform of the SU(2)-valued table into matrix coefficients.

The function F(z) = a I + b iX + c iY + d iZ is tabulated on the D-th
roots of unity and transformed entrywise by a radix-2 FFT at working
precision.  Frequencies outside [-n, n] vanish in exact arithmetic;
their measured size doubles as an empirical noise floor for the
peeling stage.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath as mp

from .completion import ComplementGrid
from .errors import PrecisionInsufficientError, QspError
from .gridfft import fft_pow2, laurent_values_on_grid, twiddles
from .ingest import TruncatedPair
from .mat2 import Mat2
from .precision import PrecisionContext

OUT_OF_BAND_FACTOR = 16


@dataclass(frozen=True)
class MatrixCoeffSeq:
    """Matrix coefficients C_k of t**k for k = -top, -top+2, ..., top."""

    entries: tuple  # Mat2 values, index i holds exponent -top + 2i
    top: int
    bits: int
    noise_floor: object = None  # measured out-of-band content, if known

    def __post_init__(self):
        if len(self.entries) != self.top + 1:
            raise QspError("coefficient list length must be top + 1")

    def exponent(self, i: int) -> int:
        return -self.top + 2 * i

    def coeff(self, k: int) -> Mat2:
        if (k + self.top) % 2 or abs(k) > self.top:
            return Mat2.zero()
        return self.entries[(k + self.top) // 2]

    def evaluate(self, t) -> Mat2:
        t = mp.mpc(t)
        acc = Mat2.zero()
        power = t ** (-self.top)
        t2 = t * t
        for m in self.entries:
            acc = acc + m.scale(power)
            power = power * t2
        return acc


def assemble_F(
    pair: TruncatedPair,
    grid: ComplementGrid,
    ctx: PrecisionContext,
    swap_complement: bool = False,
) -> list:
    """Value table of F = a I + b iX + c iY + d iZ on the Fourier grid.

    With `swap_complement` the reciprocal complement value feeds the iZ
    slot and the anti-reciprocal one the iY slot, which keeps the
    diagonal of F reciprocal for even/odd targets and so preserves the
    equator constraint on the extracted projectors.
    """
    d_grid = grid.grid_size
    table = []
    with ctx.working():
        tol = mp.mpf(2) ** (-ctx.bits // 2)
        a_vals = laurent_values_on_grid(pair.a.to_float(ctx).coeffs, d_grid, ctx.bits)
        b_vals = laurent_values_on_grid(pair.b.to_float(ctx).coeffs, d_grid, ctx.bits)
        for k in range(d_grid):
            av = a_vals[k].real
            bv = b_vals[k].real
            cv, dv = grid.values[k]
            if swap_complement:
                cv, dv = dv, cv
            m = Mat2.from_quaternion(av, bv, cv, dv)
            if abs(m.det() - 1) > tol:
                raise PrecisionInsufficientError(
                    "assemble_F", f"table entry {k} strays from SU(2) by {mp.nstr(abs(m.det()-1), 5)}"
                )
            table.append(m)
    return table


def matrix_fft(table: list, n: int, ctx: PrecisionContext) -> MatrixCoeffSeq:
    """Transform the value table into coefficients C_{2j}, j in [-n, n].

    The four scalar transforms run independently.  Out-of-band
    frequencies must sit below a multiple of the per-coefficient error
    budget; their largest norm is recorded as the sequence's noise
    floor.
    """
    d_grid = len(table)
    if d_grid & (d_grid - 1):
        raise QspError("table length must be a power of two")
    if d_grid <= 2 * n + 1:
        raise QspError("table too short for the requested band")

    with ctx.working():
        tw = twiddles(d_grid, ctx.bits)
        inv = mp.mpf(1) / d_grid
        hats = []
        for pick in (lambda m: m.a, lambda m: m.b, lambda m: m.c, lambda m: m.d):
            hats.append([x * inv for x in fft_pow2([pick(m) for m in table], tw)])

        def coeff(j: int) -> Mat2:
            idx = j % d_grid
            return Mat2(hats[0][idx], hats[1][idx], hats[2][idx], hats[3][idx])

        noise = ctx.ulp * d_grid
        for j in range(n + 1, d_grid - n):
            noise = max(noise, coeff(j).opnorm())
        budget = ctx.fourier_coeff_budget()
        if noise > OUT_OF_BAND_FACTOR * budget:
            raise PrecisionInsufficientError(
                "matrix_fft",
                f"out-of-band content {mp.nstr(noise, 5)} above {OUT_OF_BAND_FACTOR} x budget "
                f"{mp.nstr(budget, 5)}",
            )
        entries = tuple(coeff(j) for j in range(-n, n + 1))
    return MatrixCoeffSeq(entries=entries, top=2 * n, bits=ctx.bits, noise_floor=noise)
