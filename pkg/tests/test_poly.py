from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qspfactor.poly import (
    EXACT,
    ExactComplex,
    LaurentPoly,
    check_parity,
    evaluate,
    is_real_on_circle,
    split_parts,
)
from qspfactor.precision import PrecisionContext


def test_evaluate_constant(ctx64):
    p = LaurentPoly.constant(1)
    assert evaluate(p, mp.mpc("0.3", "0.4"), ctx64) == 1


def test_evaluate_z_plus_inverse_at_i(ctx64):
    p = LaurentPoly({1: 1, -1: 1})
    assert abs(evaluate(p, mp.mpc(0, 1), ctx64)) < mp.mpf(2) ** -60


def test_evaluate_sine_combination(ctx64):
    # (z - 1/z) / (2i) is sin(theta) on the circle
    p = LaurentPoly(
        {1: ExactComplex(Fraction(0), Fraction(-1, 2)), -1: ExactComplex(Fraction(0), Fraction(1, 2))}
    )
    with mp.workprec(96):
        z = mp.expjpi(mp.mpf(1) / 6)
        assert abs(evaluate(p, z, ctx64) - mp.mpf("0.5")) < mp.mpf(2) ** -60


def test_evaluate_rejects_zero(ctx64):
    from qspfactor.errors import QspError

    with pytest.raises(QspError):
        evaluate(LaurentPoly({1: 1}), 0, ctx64)


def test_split_parts_of_z():
    f = LaurentPoly({1: 1})
    plus, minus = split_parts(f)
    assert plus == LaurentPoly({1: ExactComplex.from_real(Fraction(1, 2)),
                                -1: ExactComplex.from_real(Fraction(1, 2))})
    # (z - 1/z)/(2i) has coefficients -i/2 and +i/2
    assert minus == LaurentPoly({1: ExactComplex(Fraction(0), Fraction(-1, 2)),
                                 -1: ExactComplex(Fraction(0), Fraction(1, 2))})


def test_split_parts_reciprocal_has_no_minus():
    f = LaurentPoly({2: 3, -2: 3, 0: 1})
    plus, minus = split_parts(f)
    assert minus.is_zero()
    assert plus == f


def test_split_parts_constant():
    plus, minus = split_parts(LaurentPoly.constant(3))
    assert plus == LaurentPoly.constant(3)
    assert minus.is_zero()


def test_check_parity_even_reciprocal():
    rep = check_parity(LaurentPoly({2: 1, -2: 1}))
    assert rep.exponents == "even" and rep.symmetry == "reciprocal"


def test_check_parity_odd_anti():
    rep = check_parity(LaurentPoly({1: 1, -1: -1}))
    assert rep.exponents == "odd" and rep.symmetry == "anti"


def test_check_parity_mixed():
    rep = check_parity(LaurentPoly({0: 1, 1: 1}))
    assert rep.exponents == "none" and rep.symmetry == "none"


coeff_fracs = st.fractions(
    min_value=Fraction(-2), max_value=Fraction(2), max_denominator=1 << 12
)


@st.composite
def real_on_circle_polys(draw):
    deg = draw(st.integers(min_value=0, max_value=6))
    coeffs = {}
    for k in range(deg + 1):
        re = draw(coeff_fracs)
        im = draw(coeff_fracs) if k else Fraction(0)
        coeffs[k] = ExactComplex(re, im)
        if k:
            coeffs[-k] = ExactComplex(re, -im)
    return LaurentPoly(coeffs, EXACT)


@st.composite
def arbitrary_polys(draw):
    ks = draw(st.lists(st.integers(min_value=-6, max_value=6), max_size=6, unique=True))
    return LaurentPoly(
        {k: ExactComplex(draw(coeff_fracs), draw(coeff_fracs)) for k in ks}, EXACT
    )


@settings(max_examples=40, deadline=None)
@given(real_on_circle_polys(), st.integers(min_value=0, max_value=997))
def test_real_on_circle_evaluates_real(p, j):
    ctx = PrecisionContext(96, 8, mp.mpf("0.009"))
    assert is_real_on_circle(p)
    with mp.workprec(128):
        z = mp.expjpi(mp.mpf(2 * j) / 998)
        v = evaluate(p, z, ctx)
        scale = 1 + sum(abs(c.to_mpc()) for c in p.coeffs.values())
        assert abs(v.imag) <= scale * mp.mpf(2) ** (-48)


@settings(max_examples=40, deadline=None)
@given(arbitrary_polys())
def test_split_then_recombine_is_exact(f):
    plus, minus = split_parts(f)
    i_unit = ExactComplex(Fraction(0), Fraction(1))
    recombined = plus + minus.scale(i_unit)
    assert recombined == f


@settings(max_examples=40, deadline=None)
@given(arbitrary_polys(), arbitrary_polys())
def test_degree_subadditive_under_product(p, q):
    assert (p * q).degree <= p.degree + q.degree


def test_degree_cancellation_case():
    # (z - 1)(1/z - 2) has degree one: leading terms cancel nothing, but
    # the top exponent of the product is 1 even though both factors have
    # degree 1
    p = LaurentPoly({1: 1, 0: -1})
    q = LaurentPoly({-1: 1, 0: -2})
    assert (p * q).degree == 1


def test_mixed_kind_arithmetic_rejected(ctx64):
    from qspfactor.errors import QspError

    exact = LaurentPoly({0: 1})
    floating = exact.to_float(ctx64)
    with pytest.raises(QspError):
        _ = exact + floating


def test_substitute_squared():
    p = LaurentPoly({2: 5, -2: 5})
    assert p.substitute_squared() == LaurentPoly({4: 5, -4: 5})
