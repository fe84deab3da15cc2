"""Roots of 1 - a^2 - b^2 and evaluation of the complementary pair.

The real reciprocal polynomial p = 1 - a^2 - b^2 is bounded between eps
and 1 on the unit circle, so its roots avoid a tube around the circle
and come in (r, 1/r) pairs.  Collecting the inner roots yields a factor
e(z) whose scaled real and imaginary parts on the circle complete
(a, b) to a quaternion of unit norm.  e is only ever handled in
factored form; its expansion happens downstream through a Fourier
transform of the value table.

Root finding runs Durand-Kerner (seeded with companion-matrix
eigenvalues at machine precision) on the exact rational polynomial,
then polishes every root by Newton iteration at twice the working
precision.  Certification is by post-checks: Newton residuals,
reciprocal pairing, conjugation closure, and the separation bound.
Any failed check raises PrecisionInsufficientError so the adaptive
driver can double the bit count and retry.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp
import numpy as np

from .errors import PrecisionInsufficientError, QspError
from .gridfft import laurent_values_on_grid
from .ingest import TruncatedPair
from .poly import EXACT, LaurentPoly, check_parity
from .precision import PrecisionContext, fraction_to_mpf, unit_root

NEWTON_GATE_BITS = 20  # residual gate: Newton step must be below 2**(gate-R)
PAIR_GATE_BITS = 40  # reciprocal pairs must match to 2**(gate-R)


@dataclass(frozen=True)
class RootList:
    """All roots of the polynomial fed to the root finder.

    When `half_applied` is set the roots belong to g with g(z^2) = p(z)
    and `n_prime` is g's Laurent degree, half of p's.  In both cases the
    list holds exactly 2 * n_prime entries and `inner` the n_prime of
    them lying strictly inside the unit disk (populated by
    select_inner).
    """

    roots: tuple
    n_prime: int
    certified_accuracy: object
    half_applied: bool = False
    p_degree: int = 0
    inner: tuple = ()


@dataclass(frozen=True)
class ComplementGrid:
    """Values of the complementary polynomials on the Fourier grid."""

    grid_size: int
    values: tuple  # (c_k, d_k) real pairs at e^(2 pi i k / D)
    alpha: object


def build_real_poly(pair: TruncatedPair) -> LaurentPoly:
    """p = 1 - a^2 - b^2 with exact dyadic coefficients."""
    one = LaurentPoly.constant(1, EXACT)
    p = one - pair.a * pair.a - pair.b * pair.b
    p = p.real_part_poly()
    if check_parity(p).symmetry != "reciprocal":
        raise QspError("1 - a^2 - b^2 is not reciprocal; input conditions were violated")
    return p


def half_degree_reduce(p: LaurentPoly) -> tuple[LaurentPoly, bool]:
    """Substitute w = z^2 when p carries only even exponents.

    Feeding g with g(z^2) = p(z) to the root finder halves the degree;
    the complement factor is then assembled directly from g's inner
    roots without taking square roots.
    """
    if any(k % 2 for k in p.coeffs):
        return p, False
    g = LaurentPoly({k // 2: c for k, c in p.coeffs.items()}, p.kind)
    return g, True


def _laurent_to_monic_coeffs(p: LaurentPoly) -> list[Fraction]:
    """Ascending rational coefficients of z**deg * p(z)."""
    d = p.degree
    out = []
    for j in range(0, 2 * d + 1):
        c = p.coeff(j - d)
        if c.im != 0:
            raise QspError("root target must have real coefficients")
        out.append(c.re)
    return out


def _float_or_none(coeffs_asc: list[Fraction]):
    try:
        vals = np.array([float(c) for c in coeffs_asc[::-1]], dtype=float)
    except (OverflowError, ValueError):
        return None
    if not np.all(np.isfinite(vals)) or vals[0] == 0.0:
        return None
    return vals


class _ExactPolyEval:
    """Horner evaluation of the exact polynomial and its derivative."""

    def __init__(self, coeffs_asc, bits: int):
        self.bits = bits
        with mp.workprec(bits):
            cs = [fraction_to_mpf(c) for c in coeffs_asc]
        self.cs_desc = cs[::-1]
        self.dcs_desc = [j * cs[j] for j in range(1, len(cs))][::-1]

    def value(self, z):
        acc = mp.mpc(0)
        for c in self.cs_desc:
            acc = acc * z + c
        return acc

    def derivative(self, z):
        acc = mp.mpc(0)
        for c in self.dcs_desc:
            acc = acc * z + c
        return acc


def _aberth_refine(coeffs_asc, roots, ctx: PrecisionContext):
    """Simultaneous Newton iteration with pairwise repulsion.

    Unlike root-by-root Newton polishing, the repulsion sum keeps
    nearby iterates from collapsing into one basin, which matters here:
    1 - a^2 - b^2 oscillates at scale eps on the circle and routinely
    has root pairs separated by far less than a double-precision ulp.
    Returns (refined roots, final Newton steps |q/q'| per root).
    """
    work = 2 * ctx.bits + 64
    ev = _ExactPolyEval(coeffs_asc, work)
    with mp.workprec(work):
        rs = [mp.mpc(r) for r in roots]
        # split exact collisions so the repulsion terms stay finite
        seen = {}
        for i, r in enumerate(rs):
            key = (r.real, r.imag)
            if key in seen:
                rs[i] = r + mp.mpc(1, 1) * mp.mpf(2) ** (-ctx.bits // 2) * (1 + abs(r))
            else:
                seen[key] = i
        stop = mp.mpf(2) ** (-(ctx.bits + 16))
        converged = False
        for _ in range(24):
            biggest = mp.mpf(0)
            nxt = list(rs)
            for i, r in enumerate(rs):
                dv = ev.derivative(r)
                if dv == 0:
                    nxt[i] = r + mp.mpf(2) ** (-ctx.bits) * (1 + abs(r))
                    biggest = mp.mpf("inf")
                    continue
                newton = ev.value(r) / dv
                rep = mp.mpc(0)
                for j, s in enumerate(rs):
                    if j != i and r != s:
                        rep += 1 / (r - s)
                denom = 1 - newton * rep
                step = newton if denom == 0 else newton / denom
                nxt[i] = r - step
                biggest = max(biggest, abs(step))
            rs = nxt
            if biggest <= stop:
                converged = True
                break
        steps = []
        for r in rs:
            dv = ev.derivative(r)
            steps.append(abs(ev.value(r) / dv) if dv != 0 else mp.mpf("inf"))
    return rs, steps, converged


def find_roots(p: LaurentPoly, ctx: PrecisionContext) -> RootList:
    """All 2*deg(p) roots of the real reciprocal Laurent polynomial p.

    Requires exact coefficients.  The rescaled polynomial is solved by
    simultaneous (Durand-Kerner) iteration at working precision, then
    every root is polished by Aberth-Ehrlich steps on the exact
    coefficients at twice the working precision.  If the simultaneous
    solve stalls, machine-precision companion eigenvalues seed the
    polish directly.  The result is gated on Newton residuals,
    reciprocal pairing and distance from the unit circle.
    """
    if p.kind != EXACT:
        raise QspError("root finding requires exact coefficients")
    d = p.degree
    if d == 0:
        return RootList(roots=(), n_prime=0, certified_accuracy=ctx.ulp, p_degree=0)

    coeffs_asc = _laurent_to_monic_coeffs(p)
    refined = None
    steps = None

    try:
        raw = _durand_kerner_rescaled(coeffs_asc, d, ctx)
    except PrecisionInsufficientError:
        raw = None
    if raw is not None:
        cand, cand_steps, ok = _aberth_refine(coeffs_asc, raw, ctx)
        if ok:
            refined, steps = cand, cand_steps

    if refined is None:
        seeds = None
        fl = _float_or_none(coeffs_asc)
        if fl is not None:
            try:
                seeds = [mp.mpc(complex(r)) for r in np.roots(fl)]
            except np.linalg.LinAlgError:
                seeds = None
        if seeds is None or len(seeds) != 2 * d:
            raise PrecisionInsufficientError("find_roots", "root iteration stalled")
        refined, steps, ok = _aberth_refine(coeffs_asc, seeds, ctx)
        if not ok:
            raise PrecisionInsufficientError("find_roots", "root iteration stalled")

    gate = mp.mpf(2) ** (NEWTON_GATE_BITS - ctx.bits)
    worst = max(steps) if steps else mp.mpf(0)
    if worst > gate:
        raise PrecisionInsufficientError(
            "find_roots", f"Newton residual {mp.nstr(worst, 5)} above gate {mp.nstr(gate, 5)}"
        )

    with ctx.working():
        roots = sorted((+mp.mpc(r) for r in refined), key=lambda r: (r.real, r.imag))
    rl = RootList(
        roots=tuple(roots),
        n_prime=d,
        certified_accuracy=ctx.ulp,
        p_degree=d,
        inner=(),
    )
    _gate_pairing(rl, ctx)
    _gate_separation(rl, ctx)
    return rl


def _durand_kerner_rescaled(coeffs_asc, d: int, ctx: PrecisionContext):
    """Fallback solve: all roots pulled into the unit disk, then
    Durand-Kerner from scratch at elevated precision."""
    n_big = max(ctx.degree_bound, 1)
    with mp.workprec(64):
        bound = 16 * mp.mpf(n_big) ** 3 / ctx.epsilon**2
        shift = int(mp.ceil(mp.log(bound, 2)))
    with ctx.working():
        rescaled_desc = []
        for j in range(2 * d, -1, -1):
            c = fraction_to_mpf(coeffs_asc[j])
            rescaled_desc.append(mp.ldexp(c, shift * j))
        # the default iteration starts on a ring of unit scale; shrink it
        # to match the rescaled root magnitudes or convergence crawls
        init = [mp.mpc(0.4, 0.9) ** n * mp.mpf(2) ** (-shift) for n in range(2 * d)]
        extra = ctx.bits // 4 + 64
        try:
            ws = mp.polyroots(rescaled_desc, maxsteps=200, extraprec=extra, roots_init=init)
        except (mp.libmp.NoConvergence, ZeroDivisionError) as exc:
            raise PrecisionInsufficientError("find_roots", f"iteration stalled: {exc}")
        back = mp.mpf(2) ** shift
        return [w * back for w in ws]


def _gate_pairing(rl: RootList, ctx: PrecisionContext) -> None:
    with mp.workprec(ctx.bits + 16):
        inner = [r for r in rl.roots if abs(r) < 1]
        outer = [r for r in rl.roots if abs(r) >= 1]
        if len(inner) != len(outer):
            raise PrecisionInsufficientError(
                "find_roots", f"{len(inner)} inner vs {len(outer)} outer roots"
            )
        tol = mp.mpf(2) ** (PAIR_GATE_BITS - ctx.bits)
        unused = list(outer)
        for r in inner:
            best_i, best_err = -1, mp.mpf("inf")
            for i, s in enumerate(unused):
                err = abs(r * s - 1)
                if err < best_err:
                    best_i, best_err = i, err
            if best_i < 0 or best_err > tol:
                raise PrecisionInsufficientError(
                    "find_roots",
                    f"no reciprocal partner for root {mp.nstr(r, 8)} "
                    f"(best defect {mp.nstr(best_err, 4)})",
                )
            unused.pop(best_i)


def separation_bound(rl: RootList, ctx: PrecisionContext):
    """Guaranteed distance of true roots from the unit circle: eps/(4 d^2)."""
    d = max(rl.n_prime, 1)
    with mp.workprec(64):
        return ctx.epsilon / (4 * mp.mpf(d) ** 2)


def _gate_separation(rl: RootList, ctx: PrecisionContext) -> None:
    if not rl.roots:
        return
    with mp.workprec(ctx.bits + 16):
        sep = separation_bound(rl, ctx) - 2 * ctx.ulp
        bad = min(abs(abs(r) - 1) for r in rl.roots)
        if bad < sep:
            raise PrecisionInsufficientError(
                "find_roots",
                f"root at distance {mp.nstr(bad, 5)} from the circle, below {mp.nstr(sep, 5)}",
            )


def select_inner(rl: RootList, ctx: PrecisionContext) -> RootList:
    """Keep the roots strictly inside the unit disk.

    Requires unambiguous membership (margin above 2 ulp) and closure of
    the selection under complex conjugation.
    """
    if not rl.roots:
        return rl
    with mp.workprec(ctx.bits + 16):
        margin = min(abs(abs(r) - 1) for r in rl.roots)
        if margin <= 2 * ctx.ulp:
            raise PrecisionInsufficientError(
                "select_inner", "disk membership ambiguous at this precision"
            )
        inner = [r for r in rl.roots if abs(r) < 1]
        if len(inner) != rl.n_prime:
            raise PrecisionInsufficientError(
                "select_inner", f"expected {rl.n_prime} inner roots, found {len(inner)}"
            )
        tol = mp.mpf(2) ** (PAIR_GATE_BITS - ctx.bits)
        pool = list(inner)
        for r in inner:
            if abs(r.imag) <= tol:
                continue
            match = min(pool, key=lambda s: abs(s - mp.conj(r)))
            if abs(match - mp.conj(r)) > tol:
                raise PrecisionInsufficientError(
                    "select_inner", f"conjugate of {mp.nstr(r, 8)} missing from the inner list"
                )
    return RootList(
        roots=rl.roots,
        n_prime=rl.n_prime,
        certified_accuracy=rl.certified_accuracy,
        half_applied=rl.half_applied,
        p_degree=rl.p_degree,
        inner=tuple(inner),
    )


def _complement_factor(rl: RootList, z):
    """e(z) in factored form at ambient precision."""
    if rl.half_applied:
        zinv = 1 / z
        acc = mp.mpc(1)
        for c in rl.inner:
            acc *= z - c * zinv
        return acc
    acc = z ** (-(rl.p_degree // 2))
    for r in rl.inner:
        acc *= z - r
    return acc


def _exact_value_at_one(poly: LaurentPoly):
    acc = None
    for c in poly.coeffs.values():
        acc = c if acc is None else acc + c
    if acc is None:
        return Fraction(0), Fraction(0)
    return acc.re, acc.im


def complement_on_grid(
    pair: TruncatedPair, rl: RootList, grid_size: int, ctx: PrecisionContext
) -> ComplementGrid:
    """Evaluate sqrt(alpha) * e at the grid and read off (c, d) values.

    c is the reciprocal combination (real part) and d the
    anti-reciprocal one (imaginary part); together they satisfy
    a^2 + b^2 + c^2 + d^2 = 1 on the grid to working accuracy.
    """
    if grid_size & (grid_size - 1) or grid_size <= 2 * pair.n + 1:
        raise QspError("grid size must be a power of two above 2n + 1")
    n_big = max(ctx.degree_bound, 1)
    with mp.workprec(64):
        if 24 * mp.mpf(n_big) ** 2 * ctx.ulp / ctx.epsilon > mp.mpf(1) / (16 * n_big):
            raise PrecisionInsufficientError(
                "complement_on_grid", "working precision too low for the evaluation error model"
            )

    a1_re, a1_im = _exact_value_at_one(pair.a)
    b1_re, b1_im = _exact_value_at_one(pair.b)
    p_one = 1 - (a1_re**2 - a1_im**2) - (b1_re**2 - b1_im**2)

    with ctx.working():
        e_one = _complement_factor(rl, mp.mpc(1))
        denom = (e_one * e_one).real
        if denom == 0:
            raise PrecisionInsufficientError("complement_on_grid", "e(1) vanished")
        alpha = fraction_to_mpf(p_one) / denom
        if alpha <= 0:
            raise PrecisionInsufficientError(
                "complement_on_grid", f"normalizer alpha = {mp.nstr(alpha, 8)} is not positive"
            )
        root_alpha = mp.sqrt(alpha)

        values = []
        worst = mp.mpf(0)
        a_vals = laurent_values_on_grid(pair.a.to_float(ctx).coeffs, grid_size, ctx.bits)
        b_vals = laurent_values_on_grid(pair.b.to_float(ctx).coeffs, grid_size, ctx.bits)
        for k in range(grid_size):
            z = unit_root(k, grid_size)
            v = root_alpha * _complement_factor(rl, z)
            ck, dk = v.real, v.imag
            av = a_vals[k].real
            bv = b_vals[k].real
            defect = abs(av**2 + bv**2 + ck**2 + dk**2 - 1)
            worst = max(worst, defect)
            values.append((ck, dk))

        gate = max(
            mp.mpf(2) ** (-ctx.bits // 2),
            3200 * mp.mpf(n_big) ** 3 / ctx.epsilon * ctx.ulp,
        )
        if worst > gate:
            raise PrecisionInsufficientError(
                "complement_on_grid",
                f"unit-quaternion defect {mp.nstr(worst, 5)} above {mp.nstr(gate, 5)}",
            )
    return ComplementGrid(grid_size=grid_size, values=tuple(values), alpha=alpha)


def grid_size_for(n: int) -> int:
    """Smallest power of two strictly greater than 2n + 1."""
    d = 1
    while d <= 2 * n + 1:
        d <<= 1
    return d


def complete(pair: TruncatedPair, ctx: PrecisionContext):
    """Run Steps 2 and 3: returns (root list, complement grid)."""
    p = build_real_poly(pair)
    target, applied = half_degree_reduce(p)
    rl = find_roots(target, ctx)
    rl = RootList(
        roots=rl.roots,
        n_prime=rl.n_prime,
        certified_accuracy=rl.certified_accuracy,
        half_applied=applied,
        p_degree=p.degree,
        inner=rl.inner,
    )
    rl = select_inner(rl, ctx)
    grid = complement_on_grid(pair, rl, grid_size_for(pair.n), ctx)
    return rl, grid
