"""Laurent polynomials with exact-dyadic or floating complex coefficients.

Coefficients are stored sparsely by exponent.  Exact polynomials carry
:class:`ExactComplex` values (pairs of rationals), floating ones carry
``mpmath.mpc``.  A polynomial never mixes the two kinds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import mpmath as mp

from .errors import QspError
from .precision import PrecisionContext, fraction_to_mpf

EXACT = "exact"
FLOAT = "float"


@dataclass(frozen=True)
class ExactComplex:
    """Complex number with exact rational real and imaginary parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __add__(self, other: "ExactComplex") -> "ExactComplex":
        return ExactComplex(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "ExactComplex") -> "ExactComplex":
        return ExactComplex(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "ExactComplex":
        return ExactComplex(-self.re, -self.im)

    def __mul__(self, other: "ExactComplex") -> "ExactComplex":
        return ExactComplex(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def conjugate(self) -> "ExactComplex":
        return ExactComplex(self.re, -self.im)

    def half(self) -> "ExactComplex":
        return ExactComplex(self.re / 2, self.im / 2)

    def div_2i(self) -> "ExactComplex":
        # (a + bi) / (2i) = b/2 - (a/2) i
        return ExactComplex(self.im / 2, -self.re / 2)

    @property
    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    @classmethod
    def from_real(cls, q) -> "ExactComplex":
        return cls(Fraction(q), Fraction(0))

    @classmethod
    def from_imag(cls, q) -> "ExactComplex":
        return cls(Fraction(0), Fraction(q))

    def to_mpc(self):
        return mp.mpc(fraction_to_mpf(self.re), fraction_to_mpf(self.im))


def _as_exact(value) -> ExactComplex:
    if isinstance(value, ExactComplex):
        return value
    if isinstance(value, (int, Fraction)):
        return ExactComplex.from_real(value)
    raise TypeError(f"not an exact coefficient: {value!r}")


def _coeff_is_zero(c) -> bool:
    return c.is_zero if isinstance(c, ExactComplex) else c == 0


@dataclass(frozen=True)
class ParityReport:
    exponents: str  # "even" | "odd" | "none"
    symmetry: str  # "reciprocal" | "anti" | "none"


class LaurentPoly:
    """Finite sum of positive and negative powers of one variable.

    The degree is the largest |k| carrying a nonzero coefficient; it is
    only subadditive under multiplication because leading terms of the
    two factors may cancel.
    """

    __slots__ = ("coeffs", "kind")

    def __init__(self, coeffs: Mapping[int, object], kind: str = EXACT):
        if kind not in (EXACT, FLOAT):
            raise ValueError(f"unknown coefficient kind {kind!r}")
        cleaned = {}
        for k, c in coeffs.items():
            if kind == EXACT:
                c = _as_exact(c)
            else:
                c = mp.mpc(c)
            if not _coeff_is_zero(c):
                cleaned[int(k)] = c
        self.coeffs = cleaned
        self.kind = kind

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, kind: str = EXACT) -> "LaurentPoly":
        return cls({}, kind)

    @classmethod
    def constant(cls, value, kind: str = EXACT) -> "LaurentPoly":
        return cls({0: value}, kind)

    @classmethod
    def from_real_coeffs(cls, pairs: Iterable[tuple[int, object]]) -> "LaurentPoly":
        return cls({k: ExactComplex.from_real(v) for k, v in pairs}, EXACT)

    # -- basic queries -------------------------------------------------

    @property
    def degree(self) -> int:
        if not self.coeffs:
            return 0
        return max(abs(k) for k in self.coeffs)

    def coeff(self, k: int):
        zero = ExactComplex() if self.kind == EXACT else mp.mpc(0)
        return self.coeffs.get(k, zero)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.kind == other.kind and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        terms = ", ".join(f"{k}: {c}" for k, c in sorted(self.coeffs.items()))
        return f"LaurentPoly({{{terms}}}, kind={self.kind})"

    # -- ring operations ----------------------------------------------

    def _check_kind(self, other: "LaurentPoly"):
        if self.kind != other.kind:
            raise QspError("cannot mix exact and floating polynomials")

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        self._check_kind(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out[k] + c if k in out else c
        return LaurentPoly(out, self.kind)

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({k: -c for k, c in self.coeffs.items()}, self.kind)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        self._check_kind(other)
        out: dict[int, object] = {}
        for k1, c1 in self.coeffs.items():
            for k2, c2 in other.coeffs.items():
                k = k1 + k2
                p = c1 * c2
                out[k] = out[k] + p if k in out else p
        return LaurentPoly(out, self.kind)

    def scale(self, factor) -> "LaurentPoly":
        if self.kind == EXACT:
            f = _as_exact(factor)
        else:
            f = mp.mpc(factor)
        return LaurentPoly({k: c * f for k, c in self.coeffs.items()}, self.kind)

    def substitute_squared(self) -> "LaurentPoly":
        """Return q with q(z) = self(z^2); exponents double."""
        return LaurentPoly({2 * k: c for k, c in self.coeffs.items()}, self.kind)

    def to_float(self, ctx: PrecisionContext) -> "LaurentPoly":
        if self.kind == FLOAT:
            return self
        with ctx.working():
            return LaurentPoly({k: c.to_mpc() for k, c in self.coeffs.items()}, FLOAT)

    def real_part_poly(self) -> "LaurentPoly":
        """Exact polynomial with imaginary parts dropped (they must be zero)."""
        if self.kind != EXACT:
            raise QspError("only exact polynomials can be checked for realness")
        for k, c in self.coeffs.items():
            if c.im != 0:
                raise QspError(f"coefficient at exponent {k} is not real: {c}")
        return self


def evaluate(p: LaurentPoly, z, ctx: PrecisionContext):
    """Value of p at z, by Horner on the nonnegative exponents plus Horner
    in 1/z on the negative ones.  z must be nonzero."""
    with ctx.working():
        z = mp.mpc(z)
        if z == 0:
            raise QspError("Laurent polynomials are singular at z = 0")
        if not p.coeffs:
            return mp.mpc(0)
        if p.kind == EXACT:
            p = p.to_float(ctx)

        zero = mp.mpc(0)
        get = p.coeffs.get
        up = max(max(p.coeffs), 0)
        down = min(min(p.coeffs), 0)
        acc = mp.mpc(0)
        for k in range(up, 0, -1):
            acc = (acc + get(k, zero)) * z
        acc = acc + get(0, zero)
        if down < 0:
            zinv = 1 / z
            neg = mp.mpc(0)
            for k in range(down, 0):
                neg = (neg + get(k, zero)) * zinv
            acc = acc + neg
        return acc


def split_parts(f: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    """Even/odd split under z -> 1/z: returns (f_plus, f_minus) with
    f_plus(z) = (f(z) + f(1/z)) / 2 and f_minus(z) = (f(z) - f(1/z)) / (2i).

    When f is real-on-circle both parts have real coefficients and
    f = f_plus + i f_minus.
    """
    plus: dict[int, object] = {}
    minus: dict[int, object] = {}
    exponents = set(f.coeffs) | {-k for k in f.coeffs}
    for k in exponents:
        a = f.coeff(k)
        b = f.coeff(-k)
        if f.kind == EXACT:
            plus[k] = (a + b).half()
            minus[k] = (a - b).div_2i()
        else:
            plus[k] = (a + b) / 2
            minus[k] = (a - b) / (2j)
    return LaurentPoly(plus, f.kind), LaurentPoly(minus, f.kind)


def check_parity(p: LaurentPoly, tol=0) -> ParityReport:
    """Exponent parity and reciprocity of p.

    Exact polynomials are compared coefficientwise with tolerance zero;
    floating ones use `tol` on the larger of |c(k) -+ c(-k)|.
    """
    ks = sorted(p.coeffs)
    if not ks:
        return ParityReport("even", "reciprocal")
    if all(k % 2 == 0 for k in ks):
        exponents = "even"
    elif all(k % 2 != 0 for k in ks):
        exponents = "odd"
    else:
        exponents = "none"

    def close(c, d) -> bool:
        if p.kind == EXACT:
            if tol == 0:
                return c == d
            diff = c - d
            return abs(fraction_to_mpf(diff.re)) <= tol and abs(fraction_to_mpf(diff.im)) <= tol
        return abs(c - d) <= tol

    reciprocal = all(close(p.coeff(k), p.coeff(-k)) for k in ks)
    anti = all(close(p.coeff(k), -p.coeff(-k)) for k in ks)
    if reciprocal:
        symmetry = "reciprocal"
    elif anti:
        symmetry = "anti"
    else:
        symmetry = "none"
    return ParityReport(exponents, symmetry)


def is_real_on_circle(p: LaurentPoly, tol=0) -> bool:
    """True when coeff(k) equals the conjugate of coeff(-k) for every k."""
    for k in set(p.coeffs) | {-k for k in p.coeffs}:
        a = p.coeff(k)
        b = p.coeff(-k)
        if p.kind == EXACT:
            d = a - b.conjugate()
            if tol == 0:
                if not d.is_zero:
                    return False
            else:
                if abs(fraction_to_mpf(d.re)) > tol or abs(fraction_to_mpf(d.im)) > tol:
                    return False
        else:
            if abs(a - mp.conj(b)) > tol:
                return False
    return True
