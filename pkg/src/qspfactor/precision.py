"""Working-precision bookkeeping and exact/floating conversions.

All floating arithmetic in a pipeline round runs at a single bit count R,
carried by a :class:`PrecisionContext`.  Exact quantities are dyadic
rationals held as :class:`fractions.Fraction`; converting between the two
representations must never round silently, so every conversion here either
is exact or rounds exactly once at a stated precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp

INITIAL_BITS = 64


def worst_case_bits(degree_bound: int, epsilon) -> int:
    """Bit cap for the doubling schedule: ceil(2N log2(N/eps)) + 64."""
    n = max(int(degree_bound), 1)
    eps = float(epsilon)
    return math.ceil(2 * n * math.log2(n / eps)) + INITIAL_BITS


@dataclass(frozen=True)
class PrecisionContext:
    """One round's working precision plus the error budgets derived from it.

    bits: mantissa bits R used by every floating operation in the round.
    degree_bound: Fourier cutoff N of the target being processed.
    epsilon: accuracy goal of the job, as an exact binary float.
    """

    bits: int
    degree_bound: int = 1
    epsilon: object = field(default_factory=lambda: mp.mpf("0.001"))

    def __post_init__(self):
        if self.bits < 8:
            raise ValueError("working precision below 8 bits is not meaningful")
        object.__setattr__(self, "epsilon", mp.mpf(self.epsilon))

    def working(self):
        """Context manager switching mpmath to this round's precision."""
        return mp.workprec(self.bits)

    @property
    def ulp(self):
        return mp.mpf(2) ** (-self.bits)

    def _n(self) -> int:
        return max(self.degree_bound, 1)

    def fourier_coeff_budget(self):
        """Additive error allowance on each transformed matrix coefficient."""
        with mp.workprec(64):
            return 400 * mp.mpf(self._n()) ** 3 / self.epsilon * self.ulp

    def gamma_budget(self):
        """Worst-case error reaching the final unitary after full peeling."""
        n = self._n()
        with mp.workprec(64):
            growth = (76 * n / self.epsilon) ** (2 * n)
            return self.fourier_coeff_budget() * growth

    def extraction_floor(self):
        """Leading-coefficient norm below which peeling is uncertifiable."""
        with mp.workprec(64):
            return self.epsilon / (2 * self._n())

    def cap(self) -> int:
        return worst_case_bits(self.degree_bound, self.epsilon)

    def doubled(self) -> "PrecisionContext":
        return PrecisionContext(2 * self.bits, self.degree_bound, self.epsilon)


def fraction_to_mpf(q: Fraction):
    """Convert a rational to mpf with exactly one rounding at ambient precision."""
    num, den = q.numerator, q.denominator
    pad = max(num.bit_length(), den.bit_length()) + 8
    with mp.extraprec(pad):
        a = mp.mpf(num)
        b = mp.mpf(den)
    return a / b


def mpf_to_fraction(x) -> Fraction:
    """Exact value of a binary float as a rational."""
    sign, man, exp, _ = mp.mpf(x)._mpf_
    if man == 0:
        return Fraction(0)
    q = Fraction(man, 1) * Fraction(2) ** exp
    return -q if sign else q


def truncate_to_dyadic(x, shift: int) -> Fraction:
    """Drop bits of x below 2**-shift, rounding toward zero.

    The result is an exact dyadic rational with denominator at most
    2**shift, and its magnitude never exceeds |x|.
    """
    sign, man, exp, _ = mp.mpf(x)._mpf_
    if man == 0:
        return Fraction(0)
    e = exp + shift
    n = man << e if e >= 0 else man >> (-e)
    q = Fraction(n, 1 << shift)
    return -q if sign else q


def parse_decimal(text: str, bits: int):
    """Read a decimal string, rounding once to the stated bit count."""
    with mp.workprec(bits):
        return mp.mpf(text)


def decimal_digits(bits: int) -> int:
    return int(math.ceil(bits * math.log10(2))) + 2


def format_mpf(x, bits: int) -> str:
    """Decimal string carrying enough digits to reproduce x at `bits` bits."""
    return mp.nstr(mp.mpf(x), decimal_digits(bits), strip_zeros=True)


def unit_root(k: int, d: int):
    """e^(2 pi i k / d) at ambient precision; d must be a power of two.

    The phase 2k/d is then an exact dyadic number, so argument reduction
    inside the trigonometric evaluation loses nothing.
    """
    if d & (d - 1):
        raise ValueError("grid size must be a power of two")
    return mp.expjpi(mp.mpf(2 * (k % d)) / d)
