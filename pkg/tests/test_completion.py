from fractions import Fraction

import mpmath as mp
import pytest

from qspfactor.completion import (
    RootList,
    build_real_poly,
    complement_on_grid,
    complete,
    find_roots,
    grid_size_for,
    half_degree_reduce,
    select_inner,
    separation_bound,
)
from qspfactor.errors import PrecisionInsufficientError
from qspfactor.ingest import TruncatedPair
from qspfactor.poly import EXACT, ExactComplex, LaurentPoly, check_parity
from qspfactor.precision import PrecisionContext, unit_root

from oracles import quadratic_roots, random_truncated_pair


def const_pair(value: Fraction, epsilon="0.009") -> TruncatedPair:
    a = LaurentPoly({0: ExactComplex.from_real(value)}, EXACT)
    return TruncatedPair(
        a=a,
        b=LaurentPoly.zero(EXACT),
        n=0,
        epsilon=mp.mpf(epsilon),
        degree_bound=1,
        parity_re="even",
        parity_im="odd",
        grain_shift=8,
    )


def cosine_pair() -> TruncatedPair:
    # a(z) = (9/20)(z + 1/z), real even target of degree 1
    a = LaurentPoly(
        {1: ExactComplex.from_real(Fraction(9, 20)), -1: ExactComplex.from_real(Fraction(9, 20))},
        EXACT,
    )
    return TruncatedPair(
        a=a,
        b=LaurentPoly.zero(EXACT),
        n=1,
        epsilon=mp.mpf("0.009"),
        degree_bound=1,
        parity_re="even",
        parity_im="odd",
        grain_shift=24,
    )


def test_build_real_poly_constant():
    p = build_real_poly(const_pair(Fraction(1, 2)))
    assert p == LaurentPoly({0: ExactComplex.from_real(Fraction(3, 4))}, EXACT)


def test_build_real_poly_cosine():
    # direct expansion oracle: 1 - (81/400)(z^2 + 2 + z^-2)
    p = build_real_poly(cosine_pair())
    expected = LaurentPoly(
        {
            0: ExactComplex.from_real(Fraction(119, 200)),
            2: ExactComplex.from_real(Fraction(-81, 400)),
            -2: ExactComplex.from_real(Fraction(-81, 400)),
        },
        EXACT,
    )
    assert p == expected


def test_build_real_poly_properties(rng):
    for _ in range(5):
        pair = random_truncated_pair(rng, max_degree=8)
        p = build_real_poly(pair)
        assert check_parity(p).symmetry == "reciprocal"
        one = sum((c.re for c in p.coeffs.values()), Fraction(0))
        assert one > 0  # p(1) > 0


def test_half_degree_reduce_applies():
    p = build_real_poly(cosine_pair())
    g, applied = half_degree_reduce(p)
    assert applied
    expected = LaurentPoly(
        {
            0: ExactComplex.from_real(Fraction(119, 200)),
            1: ExactComplex.from_real(Fraction(-81, 400)),
            -1: ExactComplex.from_real(Fraction(-81, 400)),
        },
        EXACT,
    )
    assert g == expected
    assert g.substitute_squared() == p


def test_half_degree_reduce_skips_odd_exponents():
    p = LaurentPoly({0: 1, 1: 1, -1: 1})
    g, applied = half_degree_reduce(p)
    assert not applied and g == p


def test_half_degree_reduce_constant_vacuous():
    p = LaurentPoly.constant(Fraction(3, 4))
    g, applied = half_degree_reduce(p)
    assert applied and g == p


def test_find_roots_constant_is_empty(ctx128):
    rl = find_roots(LaurentPoly.constant(Fraction(3, 4)), ctx128)
    assert rl.roots == () and rl.n_prime == 0


def test_find_roots_matches_quadratic_oracle(ctx128):
    # w + 1/w form: roots of 0.595 - 0.2025(z^2 + z^-2) are the square
    # roots of the quadratic 0.2025 w^2 - 0.595 w + 0.2025
    p = build_real_poly(cosine_pair())
    rl = find_roots(p, ctx128)
    assert len(rl.roots) == 2 * p.degree == 4
    w1, w2 = quadratic_roots("0.2025", "-0.595", "0.2025", 160)
    with mp.workprec(160):
        assert abs(w1 * w2 - 1) < mp.mpf(2) ** -140
        expected = sorted(
            [mp.sqrt(w1), -mp.sqrt(w1), mp.sqrt(w2), -mp.sqrt(w2)],
            key=lambda r: (r.real, r.imag),
        )
        for got, want in zip(rl.roots, expected):
            assert abs(got - want) < mp.mpf(2) ** -100


def test_roots_respect_separation_bound(ctx128):
    p = build_real_poly(cosine_pair())
    rl = find_roots(p, ctx128)
    bound = separation_bound(rl, ctx128)
    for r in rl.roots:
        assert abs(abs(r) - 1) >= bound


def test_separation_gate_fires_for_overstated_epsilon():
    # claiming eps close to the headroom limit makes the bound exceed the
    # actual distances only if the polynomial has roots near the circle;
    # craft one: p = (z - r)(1/z - r)/c normalized, r = 1 - 1e-6
    r = Fraction(999999, 1000000)
    p = LaurentPoly(
        {
            1: ExactComplex.from_real(-r),
            -1: ExactComplex.from_real(-r),
            0: ExactComplex.from_real(1 + r * r),
        },
        EXACT,
    )
    ctx = PrecisionContext(128, 1, mp.mpf("0.009"))
    with pytest.raises(PrecisionInsufficientError):
        find_roots(p, ctx)


def test_select_inner_picks_half(ctx128):
    p = build_real_poly(cosine_pair())
    rl = find_roots(p, ctx128)
    rl = select_inner(rl, ctx128)
    assert len(rl.inner) == 2
    assert all(abs(r) < 1 for r in rl.inner)
    with mp.workprec(140):
        w1, w2 = quadratic_roots("0.2025", "-0.595", "0.2025", 160)
        w_in = min(w1.real, w2.real)
        mags = sorted(abs(r) for r in rl.inner)
        assert abs(mags[0] - mp.sqrt(w_in)) < mp.mpf(2) ** -90


def test_select_inner_empty():
    ctx = PrecisionContext(128, 1, mp.mpf("0.009"))
    rl = RootList(roots=(), n_prime=0, certified_accuracy=ctx.ulp)
    assert select_inner(rl, ctx).roots == ()


def test_select_inner_closed_under_conjugation(rng, ctx128):
    for _ in range(3):
        pair = random_truncated_pair(rng, max_degree=6)
        p = build_real_poly(pair)
        target, applied = half_degree_reduce(p)
        rl = find_roots(target, ctx128)
        rl = select_inner(rl, ctx128)
        tol = mp.mpf(2) ** (-80)
        with mp.workprec(160):
            for r in rl.inner:
                assert min(abs(s - mp.conj(r)) for s in rl.inner) <= tol


def test_complement_constant():
    pair = const_pair(Fraction(1, 2))
    ctx = PrecisionContext(128, 1, mp.mpf("0.009"))
    rl, grid = complete(pair, ctx)
    with mp.workprec(128):
        assert abs(grid.alpha - mp.mpf(3) / 4) < mp.mpf(2) ** -100
        root34 = mp.sqrt(mp.mpf(3) / 4)
        for ck, dk in grid.values:
            assert abs(ck - root34) < mp.mpf(2) ** -100
            assert abs(dk) < mp.mpf(2) ** -100


def test_complement_cosine_matches_oracle():
    pair = cosine_pair()
    ctx = PrecisionContext(128, 1, mp.mpf("0.009"))
    rl, grid = complete(pair, ctx)
    with mp.workprec(160):
        w1, w2 = quadratic_roots("0.2025", "-0.595", "0.2025", 160)
        w1 = min(w1.real, w2.real)
        e_one = 1 - w1
        alpha_expected = mp.mpf("0.19") / (e_one * e_one)
        assert abs(grid.alpha - alpha_expected) < mp.mpf(2) ** -90
        # value oracle: c = sqrt(alpha)(1 - w1) cos(theta), d = sqrt(alpha)(1 + w1) sin(theta)
        ra = mp.sqrt(alpha_expected)
        d_grid = grid.grid_size
        for k in range(0, d_grid, max(1, d_grid // 10)):
            theta = 2 * mp.pi * k / d_grid
            ck, dk = grid.values[k]
            assert abs(ck - ra * (1 - w1) * mp.cos(theta)) < mp.mpf(2) ** -80
            assert abs(dk - ra * (1 + w1) * mp.sin(theta)) < mp.mpf(2) ** -80
        # printed constants from the derivation
        assert abs(ra * (1 - w1) / 2 - mp.mpf("0.21795")) < 1e-5
        assert abs(ra * (1 + w1) / 2 - mp.mpf("0.5")) < 1e-4


def test_complement_identity_on_grid(rng):
    ctx = PrecisionContext(128, 20, mp.mpf("0.009"))
    for _ in range(4):
        pair = random_truncated_pair(rng, max_degree=10)
        rl, grid = complete(pair, ctx)
        # recompute the defect directly at a few points
        from qspfactor.poly import evaluate

        with mp.workprec(160):
            for k in range(0, grid.grid_size, max(1, grid.grid_size // 7)):
                z = unit_root(k, grid.grid_size)
                av = evaluate(pair.a, z, ctx).real
                bv = evaluate(pair.b, z, ctx).real
                ck, dk = grid.values[k]
                assert abs(av**2 + bv**2 + ck**2 + dk**2 - 1) < mp.mpf(2) ** -64


def test_complement_value_symmetry(rng):
    # c is reciprocal and d anti-reciprocal as value sequences
    ctx = PrecisionContext(128, 20, mp.mpf("0.009"))
    pair = random_truncated_pair(rng, max_degree=9)
    rl, grid = complete(pair, ctx)
    d_grid = grid.grid_size
    with mp.workprec(140):
        for k in range(1, d_grid):
            ck, dk = grid.values[k]
            cm, dm = grid.values[d_grid - k]
            assert abs(ck - cm) < mp.mpf(2) ** -60
            assert abs(dk + dm) < mp.mpf(2) ** -60


def test_reciprocal_pair_invariant(rng, ctx128):
    pair = random_truncated_pair(rng, max_degree=8)
    p = build_real_poly(pair)
    target, _ = half_degree_reduce(p)
    rl = select_inner(find_roots(target, ctx128), ctx128)
    outer = [r for r in rl.roots if abs(r) >= 1]
    with mp.workprec(160):
        for r in rl.inner:
            assert min(abs(s - 1 / r) for s in outer) < mp.mpf(2) ** -80


def test_grid_size_for():
    assert grid_size_for(0) == 2
    assert grid_size_for(1) == 4
    assert grid_size_for(3) == 8
    assert grid_size_for(20) == 64


def test_alpha_positive(rng):
    ctx = PrecisionContext(128, 20, mp.mpf("0.009"))
    for _ in range(3):
        pair = random_truncated_pair(rng, max_degree=7)
        _, grid = complete(pair, ctx)
        assert grid.alpha > 0
