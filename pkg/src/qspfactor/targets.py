"""Generators of decomposable targets.

Two applications are covered: the phase function e^(i tau sin phi),
whose Fourier coefficients are Bessel values, and a bounded polynomial
surrogate for 1/(kappa sin phi) built from binomial averages.  Both
emit a TargetSpec ready for the factorization pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb

import mpmath as mp

from .errors import InputValidationError
from .ingest import EVEN, ODD, TargetSpec, input_bits
from .poly import LaurentPoly
from .precision import PrecisionContext

TAIL_PROBE_LIMIT = 400


def heuristic_degree(tau, epsilon) -> int:
    """Truncation degree for the oscillation target: 1.36 |tau| plus a
    few digits worth of margin."""
    return math.ceil(1.36 * abs(float(tau)) + 2.30 * math.log10(1 / float(epsilon)))


@dataclass(frozen=True)
class JacobiAngerSpec:
    """Evolution-phase target parameters."""

    tau: object
    epsilon: object
    N: int = 0

    def __post_init__(self):
        object.__setattr__(self, "tau", mp.mpf(self.tau))
        object.__setattr__(self, "epsilon", mp.mpf(self.epsilon))
        floor = heuristic_degree(self.tau, self.epsilon)
        n = self.N if self.N else floor
        if n < floor:
            raise InputValidationError(f"truncation degree {n} below required {floor}")
        object.__setattr__(self, "N", n)


def bessel_j(k: int, tau, ctx: PrecisionContext):
    """J_k(tau) by its power series, to additive accuracy 2**-R.

    The series alternates with peak terms near e^|tau|, so the working
    precision carries ~1.5 |tau| guard bits against the cancellation.
    """
    k = int(k)
    tau = mp.mpf(tau)
    sign = 1
    if k < 0:
        k = -k
        if k % 2:
            sign = -sign
    if tau < 0:
        tau = -tau
        if k % 2:
            sign = -sign
    guard = 64 + int(1.5 * float(tau))
    with mp.workprec(ctx.bits + guard):
        if tau == 0:
            total = mp.mpf(1 if k == 0 else 0)
        else:
            half = tau / 2
            term = half**k / mp.factorial(k)
            total = term
            cutoff = mp.mpf(2) ** (-(ctx.bits + 32))
            m = 0
            while abs(term) > cutoff:
                m += 1
                term = -term * half * half / (m * (m + k))
                total += term
    with ctx.working():
        return +total * sign


def _tail_sum(n: int, tau, bits: int):
    """Numerical bound on sum_{|k| > n} |J_k(tau)|."""
    ctx = PrecisionContext(bits, max(n, 1))
    with mp.workprec(bits):
        total = mp.mpf(0)
        cutoff = mp.mpf(2) ** (-bits + 8)
        for k in range(n + 1, n + TAIL_PROBE_LIMIT):
            t = abs(bessel_j(k, tau, ctx))
            total += 2 * t
            if t < cutoff:
                break
        return total


def jacobi_anger(spec: JacobiAngerSpec) -> TargetSpec:
    """TargetSpec for e^(i tau sin phi) truncated at |k| <= N.

    Bessel coefficients are damped by 1/(1 + tail) so the emitted
    function provably stays inside the closed unit disk on the circle;
    the tail is measured per instance and recorded in the metadata.
    """
    n = spec.N
    bits = input_bits(n, spec.epsilon) + 16
    ctx = PrecisionContext(bits, n, spec.epsilon)
    with mp.workprec(bits):
        tail = _tail_sum(n, spec.tau, bits)
        eta = tail + mp.mpf(2) ** (-40) if tail > 0 else mp.mpf(0)
        scale = 1 / (1 + eta)
        coeffs = {}
        for k in range(-n, n + 1):
            v = bessel_j(k, spec.tau, ctx) * scale
            if v != 0:
                coeffs[k] = mp.mpc(v)
    return TargetSpec(
        epsilon=spec.epsilon,
        coeffs=coeffs,
        parity_re=EVEN,
        parity_im=ODD,
        metadata={
            "kind": "jacobi-anger",
            "tau": mp.nstr(spec.tau, 20),
            "tail_bound": mp.nstr(tail, 10),
            "damping": mp.nstr(scale, 25),
        },
    )


@dataclass(frozen=True)
class InverseSpec:
    """Parameters of the bounded reciprocal approximant."""

    kappa: object
    epsilon: object
    b: int
    b_prime: int

    def __post_init__(self):
        object.__setattr__(self, "kappa", mp.mpf(self.kappa))
        object.__setattr__(self, "epsilon", mp.mpf(self.epsilon))
        if not (self.b >= self.b_prime >= 1):
            raise InputValidationError("need b >= b' >= 1")


def inverse_params(kappa, epsilon) -> InverseSpec:
    """Smallest integer parameters meeting the approximation guarantees."""
    kappa = mp.mpf(kappa)
    epsilon = mp.mpf(epsilon)
    if kappa < 1 or not (0 < epsilon < 1):
        raise InputValidationError("need kappa >= 1 and epsilon in (0, 1)")
    with mp.workprec(64):
        b = int(mp.ceil(kappa**2 * mp.log(2 / epsilon)))
        b_prime = min(b, int(mp.ceil(mp.sqrt(b * mp.log(8 / epsilon)))))
    return InverseSpec(kappa=kappa, epsilon=epsilon, b=b, b_prime=b_prime)


def _odd_weights(spec: InverseSpec) -> dict:
    """Exact integer weights m_j = sum_{k >= (j+1)/2} C(2b, b+k)."""
    b, bp = spec.b, spec.b_prime
    weights = {}
    running = 0
    # accumulate from the largest k downward so each m_j is a suffix sum
    for k in range(bp, 0, -1):
        running += comb(2 * b, b + k)
        weights[2 * k - 1] = running
    return weights


def inverse_raw_poly(spec: InverseSpec, bits: int) -> LaurentPoly:
    """The approximant f itself, as a floating Laurent polynomial.

    f(z) = (2i / (2^2b kappa (z - 1/z))) * sum_k C(2b, b+k) (1 - z^2k),
    expanded exactly through the geometric identity for
    (z^k - z^-k)/(z - 1/z); all binomials enter as exact integers.
    """
    weights = _odd_weights(spec)
    coeffs = {}
    with mp.workprec(bits + 2 * spec.b + 16):
        denom = mp.ldexp(mp.mpf(spec.kappa), 2 * spec.b)
        for j, m_j in weights.items():
            u = 2 * mp.mpf(m_j) / denom
            coeffs[-j] = mp.mpc(0, u)
            coeffs[j] = mp.mpc(0, -u)
    with mp.workprec(bits):
        coeffs = {k: +v for k, v in coeffs.items()}
    return LaurentPoly(coeffs, kind="float")


def inverse_poly(spec: InverseSpec) -> TargetSpec:
    """TargetSpec for f / ln(8/eps), an odd real-on-circle function.

    The normalizer is recorded in the metadata so callers can undo it
    after factorization.
    """
    degree = 2 * spec.b_prime - 1
    bits = input_bits(degree, spec.epsilon) + 16
    with mp.workprec(bits):
        norm = mp.log(8 / spec.epsilon)
        norm = norm + mp.ldexp(norm, -bits + 4)  # round up, never below ln(8/eps)
        raw = inverse_raw_poly(spec, bits)
        coeffs = {k: v / norm for k, v in raw.coeffs.items()}
    return TargetSpec(
        epsilon=spec.epsilon,
        coeffs=coeffs,
        parity_re=ODD,
        parity_im=ODD,
        metadata={
            "kind": "inverse",
            "kappa": mp.nstr(spec.kappa, 20),
            "b": spec.b,
            "b_prime": spec.b_prime,
            "normalizer": mp.nstr(norm, 40),
        },
    )
