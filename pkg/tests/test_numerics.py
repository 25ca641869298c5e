import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import mpmath

from betadio.errors import DegenerateApproximant, NoRoot, PrecisionExhausted
from betadio.numerics import (
    Comparison,
    Dyadic,
    PolyRoot,
    Scalar,
    compare_with_certification,
    dyadic_from_fraction,
    is_exact_root,
    isolate_root,
    ln,
    ln_int,
    poly_divmod,
    poly_gcd,
    poly_mul,
    refine,
)

F = Fraction


def bisect_oracle(f, lo, hi, steps=300):
    """Plain Fraction bisection, independent of PolyRoot."""
    lo, hi = F(lo), F(hi)
    assert f(lo) < 0 < f(hi)
    for _ in range(steps):
        mid = (lo + hi) / 2
        if f(mid) >= 0:
            hi = mid
        else:
            lo = mid
    return lo, hi


# ---------------------------------------------------------------------------
# dyadic / interval basics


def test_dyadic_normal_form_and_value():
    d = Dyadic.of(12, 0)
    assert (d.man, d.exp) == (3, 2)
    assert d.value == 12
    assert Dyadic.of(0, 5).value == 0


def test_directed_rational_rounding():
    for bits in (8, 64, 200):
        x = F(1, 3)
        lo = dyadic_from_fraction(x, bits, up=False)
        hi = dyadic_from_fraction(x, bits, up=True)
        assert lo.value <= x <= hi.value
        assert hi.value - lo.value <= F(1, 2 ** bits)


def test_interval_arithmetic_contains_exact():
    a = Scalar.from_fraction(F(1, 3))
    b = Scalar.from_fraction(F(2, 7))
    assert (a + b).contains(F(1, 3) + F(2, 7))
    assert (a - b).contains(F(1, 3) - F(2, 7))
    assert (a * b).contains(F(2, 21))
    assert (a / b).contains(F(7, 6))
    assert a.pow_int(5).contains(F(1, 3) ** 5)
    assert a.pow_int(-3).contains(F(27))


@settings(max_examples=200, deadline=None)
@given(
    st.fractions(min_value=-100, max_value=100),
    st.fractions(min_value=-100, max_value=100),
    st.sampled_from(["add", "sub", "mul", "div"]),
)
def test_inclusion_monotonicity(x, y, op):
    a = Scalar.from_fraction(x, 64)
    b = Scalar.from_fraction(y, 64)
    if op == "add":
        assert (a + b).contains(x + y)
    elif op == "sub":
        assert (a - b).contains(x - y)
    elif op == "mul":
        assert (a * b).contains(x * y)
    elif op == "div":
        if y == 0 or (b.lo.man <= 0 <= b.hi.man):
            return
        assert (a / b).contains(F(x) / F(y))


def test_compare_with_certification():
    assert compare_with_certification(Scalar.hull(F(2, 10), F(3, 10)), F(1, 2)) is Comparison.LESS
    assert compare_with_certification(Scalar.hull(F(4, 10), F(6, 10)), F(1, 2)) is Comparison.UNRESOLVED
    golden = isolate_root([1, 1]).as_scalar(64)
    assert compare_with_certification(golden, F(13, 8)) is Comparison.LESS


def test_refine_rational_and_exact():
    x = Scalar.from_fraction(F(1, 3), 8)
    y = refine(x, 64)
    assert y.width <= F(1, 2 ** 64)
    assert y.contains(F(1, 3))
    half = Scalar.exact(Dyadic.of(1, -1))
    z = refine(half, 500)
    assert z.lo == z.hi

    fixed = Scalar.hull(F(1, 4), F(1, 2))  # no defining expression
    with pytest.raises(PrecisionExhausted):
        refine(fixed, 64)


# ---------------------------------------------------------------------------
# certified logarithm (oracle: mpmath at high precision)


@pytest.mark.parametrize("val", [F(2), F(3), F(1, 3), F(10), F(161803, 100000), F(7, 5)])
def test_ln_against_mpmath(val):
    x = Scalar.from_fraction(val, 128)
    out = ln(x, 128)
    with mpmath.workdps(80):
        truth = mpmath.log(mpmath.mpf(val.numerator) / val.denominator)
        assert out.lo.value <= F(str(truth)) <= out.hi.value or \
            (float(out.lo.value) <= float(truth) <= float(out.hi.value))
    assert out.width < F(1, 2 ** 100)


def test_ln_int_huge():
    n = 7 ** 4000
    out = ln_int(n, 128)
    assert out.width < F(1, 2 ** 100)
    approx = 4000 * math.log(7)
    assert abs(float(out.mid) - approx) < 1e-9


def test_ln_requires_positive():
    with pytest.raises(ValueError):
        ln(Scalar.hull(F(-1), F(1)))


# ---------------------------------------------------------------------------
# polynomials


def test_poly_divmod_and_gcd():
    # (z^2 - z - 1)(z - 2) = z^3 - 3z^2 + z + 2
    a = poly_mul([F(-1), F(-1), F(1)], [F(-2), F(1)])
    q, r = poly_divmod(a, [F(-1), F(-1), F(1)])
    assert r == []
    assert q == [F(-2), F(1)]
    g = poly_gcd(a, [F(-1), F(-1), F(1)])
    assert g == [F(-1), F(-1), F(1)]


# ---------------------------------------------------------------------------
# root isolation


def test_golden_ratio_root():
    # hand algebra: 1 = 1/z + 1/z^2  <=>  z^2 = z + 1
    r = isolate_root([1, 1], search=(F(1), F(2)))
    s = r.as_scalar(128)
    lo, hi = bisect_oracle(lambda z: z * z - z - 1, F(1), F(2))
    assert s.lo.value <= hi and lo <= s.hi.value
    assert s.width <= F(1, 2 ** 128)


def test_supergolden_root():
    # oracle: bisection on z^3 = z^2 + 1
    r = isolate_root([1, 0, 1], search=(F(1), F(2)))
    s = r.as_scalar(100)
    lo, hi = bisect_oracle(lambda z: z ** 3 - z ** 2 - 1, F(1), F(2))
    assert s.lo.value <= hi and lo <= s.hi.value
    assert abs(float(s.mid) - 1.4655712318767682) < 1e-12


def test_degenerate_and_missing_roots():
    with pytest.raises(DegenerateApproximant):
        isolate_root([1])
    with pytest.raises(NoRoot):
        isolate_root([2, 1], search=(F(3), F(4)))  # root is 1+sqrt(2) < 3


def test_periodic_tail_root_matches_finite_form():
    # (10)^infty gives the golden ratio, same as the finite word 11
    r = isolate_root([], periodic_tail=[1, 0])
    s = r.as_scalar(128)
    g = isolate_root([1, 1]).as_scalar(128)
    assert s.lo.value <= g.hi.value and g.lo.value <= s.hi.value


def test_refine_polyroot_deep():
    r = isolate_root([1, 1])
    s = refine(r.as_scalar(), 300)
    assert s.width <= F(1, 2 ** 300)
    phi = (1 + F(math.isqrt(5 * 10 ** 40), 10 ** 20)) / 2  # ~20 digits of sqrt5
    assert abs(s.mid - phi) < F(1, 10 ** 18)


def test_residual_small_at_root():
    r = isolate_root([1, 0, 1])
    s = r.as_scalar(128)
    zinv = s.reciprocal()
    residual = Scalar.from_int(1) - (zinv + zinv.pow_int(3))
    assert residual.contains(F(0)) or abs(residual.mid) < F(1, 2 ** 100)


def test_is_exact_root():
    golden = isolate_root([1, 1])
    # z^2 - z - 1 vanishes; z^2 - 2 does not
    assert is_exact_root([F(-1), F(-1), F(1)], golden)
    assert not is_exact_root([F(-2), F(0), F(1)], golden)
    # multiples vanish too
    assert is_exact_root(poly_mul([F(-1), F(-1), F(1)], [F(3), F(7), F(2)]), golden)
