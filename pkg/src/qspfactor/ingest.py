"""Input validation and the scaled dyadic truncation of the target.

The target arrives as Fourier coefficients of A + iB on the unit circle.
Truncation multiplies by (1 - 10*epsilon), drops binary digits below the
grain 2**-ceil(log2(N/eps)), and zeroes anything smaller than eps/N, all
in exact rational arithmetic.  Negative exponents are never truncated
directly; they are mirrored from the nonnegative ones so the declared
parity survives exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp

from .errors import DegenerateInputError, InputValidationError
from .gridfft import laurent_values_on_grid, next_pow2
from .poly import EXACT, ExactComplex, LaurentPoly
from .precision import (
    PrecisionContext,
    fraction_to_mpf,
    mpf_to_fraction,
)

EVEN = "even"
ODD = "odd"

MIN_PARSE_BITS = 64


def input_bits(degree_bound: int, epsilon) -> int:
    """Bit width at which decimal inputs are converted to binary."""
    n = max(int(degree_bound), 1)
    with mp.workprec(64):
        need = int(mp.ceil(2 * mp.log(100 * n / mp.mpf(epsilon), 2)))
    return max(MIN_PARSE_BITS, need)


@dataclass(frozen=True)
class TargetSpec:
    """Fourier data of the function to factor.

    coeffs maps exponent k to the complex coefficient of z**k; parity_re
    and parity_im describe the real and imaginary parts of the function
    as even or odd in the circle angle.
    """

    epsilon: object
    coeffs: dict
    parity_re: str
    parity_im: str
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "epsilon", mp.mpf(self.epsilon))
        object.__setattr__(
            self, "coeffs", {int(k): mp.mpc(v) for k, v in self.coeffs.items() if v != 0}
        )

    @property
    def degree_bound(self) -> int:
        if not self.coeffs:
            return 0
        return max(abs(k) for k in self.coeffs)

    def as_poly(self) -> LaurentPoly:
        return LaurentPoly(self.coeffs, kind="float")

    def real_imag_coeffs(self):
        """Coefficient families (alpha, beta) with A = sum alpha_k z^k
        and B = sum beta_k z^k; both families are Hermitian-symmetric."""
        alpha, beta = {}, {}
        ks = set(self.coeffs) | {-k for k in self.coeffs}
        with mp.workprec(input_bits(self.degree_bound, self.epsilon) + 8):
            for k in ks:
                zk = self.coeffs.get(k, mp.mpc(0))
                zmk = self.coeffs.get(-k, mp.mpc(0))
                alpha[k] = (zk + mp.conj(zmk)) / 2
                beta[k] = (zk - mp.conj(zmk)) / (2j)
        return alpha, beta


@dataclass(frozen=True)
class TruncatedPair:
    """Exact dyadic approximations a, b of the scaled target parts."""

    a: LaurentPoly
    b: LaurentPoly
    n: int
    epsilon: object
    degree_bound: int
    parity_re: str
    parity_im: str
    grain_shift: int


def _parity_tolerance(spec: TargetSpec):
    return spec.epsilon / (64 * max(spec.degree_bound, 1))


def _check_family_parity(family: dict, parity: str, tol, label: str):
    # even parity on the circle means real coefficients; odd means
    # purely imaginary ones with nothing at exponent zero.
    for k, v in family.items():
        if parity == EVEN:
            bad = abs(v.imag)
        else:
            bad = abs(v.real)
        if bad > tol:
            raise InputValidationError(
                f"{label} coefficients violate declared {parity} parity at exponent {k}"
            )
    if parity == ODD and abs(family.get(0, mp.mpc(0))) > tol:
        raise InputValidationError(f"{label} has a constant term but odd parity")


def validate(spec: TargetSpec) -> None:
    """Reject specs outside the algorithm's input contract."""
    if not (0 < spec.epsilon < mp.mpf(1) / 100):
        raise InputValidationError("epsilon must lie strictly between 0 and 1/100")
    if spec.parity_re not in (EVEN, ODD) or spec.parity_im not in (EVEN, ODD):
        raise InputValidationError("parity bits must be 'even' or 'odd'")
    if not spec.coeffs:
        raise InputValidationError("no coefficients given")

    alpha, beta = spec.real_imag_coeffs()
    tol = _parity_tolerance(spec)
    _check_family_parity(alpha, spec.parity_re, tol, "real-part")
    _check_family_parity(beta, spec.parity_im, tol, "imaginary-part")

    n = max(spec.degree_bound, 1)
    bits = input_bits(n, spec.epsilon)
    grid = next_pow2(8 * n)
    slack = mp.mpf(2) ** (-bits // 2)
    with mp.workprec(bits + 16):
        values = laurent_values_on_grid(spec.coeffs, grid, bits + 16)
        for j, v in enumerate(values):
            if abs(v) ** 2 > 1 + slack:
                raise InputValidationError(
                    f"|A + iB| exceeds 1 on the unit circle near angle {2 * j}/{grid} pi"
                )


def ceil_log2_fraction(q: Fraction) -> int:
    """Smallest s with 2**s >= q, for positive rational q."""
    if q <= 0:
        raise ValueError("argument must be positive")
    s = q.numerator.bit_length() - q.denominator.bit_length()
    while Fraction(2) ** s < q:
        s += 1
    while s > 0 and Fraction(2) ** (s - 1) >= q:
        s -= 1
    return s


def _truncate_fraction(q: Fraction, shift: int) -> Fraction:
    """Round q toward zero to a multiple of 2**-shift, exactly."""
    return Fraction(int(q * (1 << shift)), 1 << shift)


def _truncate_family(family: dict, parity: str, scale: Fraction, grain_shift: int, floor: Fraction):
    """Truncate the nonnegative-exponent coefficients, mirror the rest."""
    out = {}
    for k in sorted(k for k in family if k >= 0):
        v = family[k]
        part = v.real if parity == EVEN else v.imag
        exact = scale * mpf_to_fraction(part)
        t = _truncate_fraction(exact, grain_shift)
        if abs(t) < floor:
            continue
        if parity == EVEN:
            out[k] = ExactComplex.from_real(t)
            if k > 0:
                out[-k] = ExactComplex.from_real(t)
        else:
            out[k] = ExactComplex.from_imag(t)
            if k > 0:
                out[-k] = ExactComplex.from_imag(-t)
    return LaurentPoly(out, EXACT)


def truncate(spec: TargetSpec) -> TruncatedPair:
    """Scaled dyadic truncation of a validated target.

    Returns exact rational polynomials a, b with a + ib close to
    (1 - 10 eps)(A + iB); every surviving coefficient has magnitude at
    least eps/N and denominator at most 2**ceil(log2(N/eps)).  The spec
    must already have passed validate().
    """
    n_in = max(spec.degree_bound, 1)
    eps_frac = mpf_to_fraction(spec.epsilon)
    scale = 1 - 10 * eps_frac
    floor = eps_frac / n_in
    grain_shift = ceil_log2_fraction(Fraction(n_in) / eps_frac)

    alpha, beta = spec.real_imag_coeffs()
    a = _truncate_family(alpha, spec.parity_re, scale, grain_shift, floor)
    b = _truncate_family(beta, spec.parity_im, scale, grain_shift, floor)

    if a.is_zero() and b.is_zero():
        raise DegenerateInputError("every coefficient truncated to zero")

    pair = TruncatedPair(
        a=a,
        b=b,
        n=max(a.degree, b.degree),
        epsilon=spec.epsilon,
        degree_bound=n_in,
        parity_re=spec.parity_re,
        parity_im=spec.parity_im,
        grain_shift=grain_shift,
    )
    _check_circle_conditions(pair, spec)
    return pair


def _check_circle_conditions(pair: TruncatedPair, spec: TargetSpec) -> None:
    """Dense-grid verification of the closeness and headroom conditions."""
    eps = pair.epsilon
    grid = next_pow2(16 * max(pair.degree_bound, 1))
    bits = input_bits(pair.degree_bound, eps)
    ctx = PrecisionContext(bits, pair.degree_bound, eps)
    with mp.workprec(bits + 16):
        a_vals = laurent_values_on_grid(pair.a.to_float(ctx).coeffs, grid, bits + 16)
        b_vals = laurent_values_on_grid(pair.b.to_float(ctx).coeffs, grid, bits + 16)
        t_vals = laurent_values_on_grid(spec.coeffs, grid, bits + 16)
        worst_sq = mp.mpf(0)
        worst_close = mp.mpf(0)
        for av, bv, tv in zip(a_vals, b_vals, t_vals):
            sq = av.real**2 + bv.real**2
            worst_sq = max(worst_sq, sq)
            close = abs(av + 1j * bv - tv)
            worst_close = max(worst_close, close)
    if worst_sq > 1 - eps:
        raise InputValidationError(
            f"truncated pair exceeds the 1 - eps headroom: max a^2+b^2 = {mp.nstr(worst_sq, 8)}"
        )
    if worst_close > 26 * eps:
        raise InputValidationError(
            f"truncated pair strays more than 26 eps from the target: {mp.nstr(worst_close, 8)}"
        )
