import pytest
import sympy
from hypothesis import given, strategies as st

from twistzhu.formal import LogSeries, TruncationError, solve_u1_coefficients, u1_coefficients
from twistzhu.scalars import QQ, Scalar

X, Y, T = sympy.symbols("x y tau")


def coeffs_of(expr, var, lo, hi):
    ser = sympy.series(expr, var, 0, hi).removeO()
    ser = sympy.expand(ser)
    return {k: sympy.simplify(ser.coeff(var, k)) for k in range(lo, hi)}


def as_sympy(c):
    return sympy.sympify(str(c).replace("^", "**"), locals={"tau": T})


def test_exponential_and_log_match_sympy():
    e = LogSeries.exponential(QQ(3), order=7)
    ref = coeffs_of(sympy.exp(3 * X), X, 0, 7)
    assert all(as_sympy(e.coefficient(k)) == ref[k] for k in range(7))
    lg = LogSeries.log1p(order=7)
    ref = coeffs_of(sympy.log(1 + Y), Y, 0, 7)
    assert all(as_sympy(lg.coefficient(k)) == ref[k] for k in range(7))


@given(st.fractions(min_value=-3, max_value=3, max_denominator=4))
def test_binomial_series(alpha):
    s = LogSeries.binomial_series(QQ(alpha), order=6)
    ref = coeffs_of((1 + Y) ** sympy.Rational(alpha.numerator, alpha.denominator), Y, 0, 6)
    assert all(as_sympy(s.coefficient(k)) == ref[k] for k in range(6))


def test_inverse_of_laurent_series():
    # x^-1 (e^x - 1)  ->  its inverse x / (e^x - 1), the Bernoulli generating function
    e = LogSeries.exponential(QQ(1), order=9) - LogSeries.one(prec=(9,))
    inv = e.inverse()
    ref = coeffs_of(X / (sympy.exp(X) - 1), X, 0, 7)
    for k in range(7):
        assert as_sympy(inv.coefficient(k - 1)) == ref[k]


def test_product_window_tracks_negative_valuation():
    # a series known below x^3 times x^-2 is only known below x^1
    a = LogSeries({(0,): QQ(1), (2,): QQ(1)}, prec=(3,))
    b = LogSeries({(-2,): QQ(1)}, prec=(5,))
    p = a * b
    assert p.prec == (1,)
    assert p.coefficient(0) == 1 and p.coefficient(-2) == 1


def test_product_with_exact_zero_has_no_bound():
    zero = LogSeries({}, prec=(None,))
    a = LogSeries({(0,): QQ(1)}, prec=(3,))
    assert not (a * zero)


@given(st.integers(-3, 3))
def test_compose_log_matches_sympy(m):
    order = 5
    s = LogSeries.compose_log(m, order, tau=Scalar.tau())
    ref = coeffs_of((sympy.log(1 + Y) / T) ** m, Y, m, order)
    for k in range(m, order):
        assert sympy.simplify(as_sympy(s.coefficient(k)) - ref[k]) == 0


def test_expand_binomial_nilpotent():
    s = LogSeries.expand_binomial(QQ(2), order=5, nil_order=3)
    N = sympy.Symbol("N")
    ref = sympy.expand(sympy.series((1 + Y) ** 2 * (1 + N * sympy.log(1 + Y) + N**2 * sympy.log(1 + Y) ** 2 / 2), Y, 0, 5).removeO())
    for k in range(5):
        for j in range(3):
            assert as_sympy(s.coefficient((k, j))) == ref.coeff(Y, k).coeff(N, j)


def test_residue_and_shift():
    s = LogSeries({(-1,): QQ(4), (0,): QQ(1)}, prec=(2,))
    assert s.residue() == 4
    assert s.shift("x", 1).coefficient(0) == 4
    with pytest.raises(TruncationError):
        LogSeries({(-3,): QQ(1)}, prec=(-1,)).residue()


def test_u1_coefficients_define_the_flow():
    # independent check: apply the flow with sympy and compare to tau^-1 (e^{tau y} - 1)
    order = 5
    A = [as_sympy(a) for a in solve_u1_coefficients(order)]
    field = -sum(a * Y ** (j + 2) for j, a in enumerate(A))
    term, total = Y, Y
    for k in range(1, order + 2):
        term = sympy.expand(field * sympy.diff(term, Y) / k)
        total += term
    target = coeffs_of((sympy.exp(T * Y) - 1) / T, Y, 0, order + 2)
    got = sympy.expand(total)
    for k in range(order + 2):
        assert sympy.simplify(got.coeff(Y, k) - target[k]) == 0
    assert [str(a) for a in u1_coefficients(3)] == [str(a) for a in solve_u1_coefficients(3)]


@given(st.lists(st.integers(-3, 3), min_size=3, max_size=3), st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_multiplication_commutes_and_distributes(a, b):
    s = LogSeries({(k,): QQ(c) for k, c in enumerate(a)}, prec=(4,))
    t = LogSeries({(k,): QQ(c) for k, c in enumerate(b)}, prec=(4,))
    assert s * t == t * s
    assert s * (s + t) == s * s + s * t


def test_compose_log_inverse_pair():
    order = 6
    prod = LogSeries.compose_log(1, order, tau=Scalar.tau()) * LogSeries.compose_log(-1, order, tau=Scalar.tau())
    assert prod.coefficient(0) == 1
    for k in range(1, prod.prec[0]):
        assert not prod.coefficient(k)


@pytest.mark.parametrize("r", [QQ(1, 2), QQ(-1, 3), QQ(5)])
def test_binomial_series_inverse_pair(r):
    prod = LogSeries.binomial_series(r, "x", 7) * LogSeries.binomial_series(-r, "x", 7)
    assert prod.prec == (7,)
    assert {e: c for e, c in prod.terms.items() if c} == {(0,): QQ(1)}
