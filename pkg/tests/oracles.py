"""Independent reference implementations used to pin expected values.

Everything here is deliberately slow and direct: coefficient
convolution for products of primitive factors, an O(D^2) discrete
transform, a quadratic-formula root solver, and a power-series Bessel
sum.  None of it shares code with the library paths it checks.
"""

from __future__ import annotations

import random
from fractions import Fraction

import mpmath as mp

from qspfactor.decompose import Projector2
from qspfactor.fourier import MatrixCoeffSeq
from qspfactor.ingest import TruncatedPair
from qspfactor.mat2 import Mat2
from qspfactor.poly import EXACT, ExactComplex, LaurentPoly, evaluate
from qspfactor.precision import PrecisionContext


def random_bloch_projector(rng: random.Random, equator: bool = False) -> Projector2:
    """Uniform rank-one projector; optionally confined to the equator."""
    if equator:
        phi = rng.uniform(0, 2 * mp.pi)
        return Projector2.from_bloch(mp.cos(phi), mp.sin(phi), mp.mpf(0))
    while True:
        v = [rng.gauss(0, 1) for _ in range(3)]
        n2 = sum(x * x for x in v)
        if n2 > 1e-6:
            break
    n = mp.sqrt(mp.mpf(n2))
    return Projector2.from_bloch(*(mp.mpf(x) / n for x in v))


def random_su2(rng: random.Random) -> Mat2:
    """Haar-ish random special unitary from a normalized quaternion."""
    v = [rng.gauss(0, 1) for _ in range(4)]
    n = mp.sqrt(mp.mpf(sum(x * x for x in v)))
    return Mat2.from_quaternion(*(mp.mpf(x) / n for x in v))


def primitive_product_seq(e0: Mat2, projectors, bits: int) -> MatrixCoeffSeq:
    """Multiply out E0 * prod (t P + (1/t)(I - P)) by direct convolution."""
    with mp.workprec(bits):
        coeffs = {0: e0}
        for p in projectors:
            pm = p.matrix
            qm = Mat2.identity() - pm
            nxt: dict = {}
            for k, m in coeffs.items():
                hi = m @ pm
                lo = m @ qm
                nxt[k + 1] = nxt[k + 1] + hi if k + 1 in nxt else hi
                nxt[k - 1] = nxt[k - 1] + lo if k - 1 in nxt else lo
            coeffs = nxt
        top = len(projectors)
        entries = tuple(coeffs.get(-top + 2 * i, Mat2.zero()) for i in range(top + 1))
    return MatrixCoeffSeq(entries=entries, top=top, bits=bits)


def seq_function_coeffs(seq: MatrixCoeffSeq):
    """Fourier coefficients of <+| F(t) |+> indexed by the z-exponent,
    assuming all t-exponents of the sequence are even."""
    out = {}
    for i, m in enumerate(seq.entries):
        k = seq.exponent(i)
        assert k % 2 == 0
        val = (m.a + m.b + m.c + m.d) / 2
        if val != 0:
            out[k // 2] = val
    return out


def slow_dft(table, bits: int):
    """Plain O(D^2) transform: C_j = (1/D) sum_k table[k] w^(jk)."""
    d = len(table)
    with mp.workprec(bits):
        out = []
        for j in range(d):
            acc = Mat2.zero()
            for k in range(d):
                w = mp.expjpi(mp.mpf(-2 * j * k % (2 * d)) / d)
                acc = acc + table[k].scale(w)
            out.append(acc.scale(mp.mpf(1) / d))
        return out


def quadratic_roots(a, b, c, bits: int):
    """Both roots of a w^2 + b w + c by the quadratic formula."""
    with mp.workprec(bits):
        a, b, c = mp.mpf(a), mp.mpf(b), mp.mpf(c)
        disc = mp.sqrt(mp.mpc(b * b - 4 * a * c))
        return ((-b + disc) / (2 * a), (-b - disc) / (2 * a))


def bessel_series(k: int, tau, bits: int):
    """Reference power-series sum for J_k, independent of the library."""
    k = abs(int(k))
    with mp.workprec(bits + 64 + int(2 * abs(float(tau)))):
        tau = mp.mpf(tau)
        half = tau / 2
        term = half**k / mp.factorial(k)
        total = term
        for m in range(1, 4 * int(abs(float(tau))) + bits):
            term = -term * half * half / (m * (m + k))
            total += term
            if abs(term) < mp.mpf(2) ** (-bits - 32):
                break
    return total


def random_truncated_pair(
    rng: random.Random, max_degree: int = 20, epsilon: str = "0.009"
) -> TruncatedPair:
    """A structurally valid truncated pair with dyadic coefficients.

    Random dyadic coefficients of definite parity are scaled down by an
    exact dyadic factor until a^2 + b^2 stays below 1 - 2 eps on a
    dense grid; every kept coefficient stays above eps/N by
    construction.
    """
    eps = mp.mpf(epsilon)
    shift = 24
    deg = rng.randint(1, max_degree)
    parity_a = rng.choice(("even", "odd"))
    parity_b = rng.choice(("even", "odd"))

    def draw(parity: str) -> dict:
        out = {}
        start = 0 if parity == "even" else 1
        for k in range(start, deg + 1, 2):
            mag = Fraction(rng.randint(2**shift // 10, 2**shift), 2**shift)
            if rng.random() < 0.5:
                mag = -mag
            if parity == "even":
                out[k] = ExactComplex.from_real(mag)
                if k:
                    out[-k] = ExactComplex.from_real(mag)
            else:
                out[k] = ExactComplex.from_imag(mag)
                if k:
                    out[-k] = ExactComplex.from_imag(-mag)
        return out

    a = LaurentPoly(draw(parity_a), EXACT)
    b = LaurentPoly(draw(parity_b), EXACT)
    if rng.random() < 0.2:
        b = LaurentPoly.zero(EXACT)

    with mp.workprec(96):
        worst = mp.mpf(0)
        grid = 32 * (deg + 1)
        ctx = PrecisionContext(96, deg, eps)
        af, bf = a.to_float(ctx), b.to_float(ctx)
        for j in range(grid):
            z = mp.expjpi(mp.mpf(2 * j) / grid)
            worst = max(worst, abs(evaluate(af, z, ctx)) ** 2 + abs(evaluate(bf, z, ctx)) ** 2)
        # sampled maxima undershoot the true peak; leave headroom for it
        scale_f = mp.sqrt((1 - 4 * eps) / worst) / mp.mpf("1.05")
        scale = Fraction(int(scale_f * 2**shift), 2**shift)  # rounds toward zero

    a = a.scale(ExactComplex.from_real(scale))
    b = b.scale(ExactComplex.from_real(scale))
    n = max(a.degree, b.degree)
    return TruncatedPair(
        a=a,
        b=b,
        n=n,
        epsilon=eps,
        degree_bound=n,
        parity_re=parity_a,
        parity_im=parity_b,
        grain_shift=2 * shift,
    )
