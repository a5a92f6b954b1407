import json
import random

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from examples import lowest_states, mixed_voa, rank_one_module, rank_one_voa, unipotent_module, unipotent_voa, zhu_families
from twistzhu.backends import Virasoro
from twistzhu.scalars import QQ, Scalar
from twistzhu.twisted import o_action
from twistzhu.vectors import sub
from twistzhu.zhu import (
    QuotientPresentation,
    ZhuFamily,
    algebra_table,
    bullet,
    kernel_bracket,
    kernel_plain,
    kernel_tilde,
    law_checks,
    star,
    tilde_row,
    u1_checks,
    z_oracle_checks,
)

x, N = sp.symbols("x N")


def sympy_coefficients(expr, lowest: int, order: int, nil_order: int) -> dict:
    """{(k, j): coefficient of x^k N^j} for lowest <= k < order, j < nil_order."""
    ser = sp.expand(sp.series(expr, x, 0, order).removeO())
    out = {}
    for k in range(lowest, order):
        ck = sp.expand(ser.coeff(x, k))
        for j in range(nil_order):
            c = sp.nsimplify(ck.coeff(N, j))
            if c != 0:
                out[(k, j)] = c
    return out


def as_sympy(series) -> dict:
    return {e: sp.Rational(int(c.numerator), int(c.denominator)) for e, c in series.terms.items() if c}


@pytest.mark.parametrize("m", [-1, 0, 1, 2, 3])
@pytest.mark.parametrize("shift", [QQ(0), QQ(-1, 2)])
@pytest.mark.parametrize("tau", [QQ(1), QQ(2)])
def test_kernel_tilde_against_sympy(m, shift, tau):
    order, nil = 4, 3
    t = sp.Rational(int(tau))
    s = sp.Rational(int(shift.numerator), int(shift.denominator))
    expr = t * sp.exp(t * x * (1 + s)) * (sp.exp(t * x) - 1) ** (-m) * sp.exp(t * x * N)
    got = kernel_tilde(m, shift, order, nil, tau)
    assert got.prec == (order, nil)
    assert as_sympy(got) == sympy_coefficients(expr, -max(m, 0), order, nil)


@pytest.mark.parametrize("m", [0, 1, 2, 3])
@pytest.mark.parametrize("power", [QQ(0), QQ(1), QQ(3, 2), QQ(-1, 2)])
def test_kernel_plain_against_sympy(m, power):
    order, nil = 4, 3
    p = sp.Rational(int(power.numerator), int(power.denominator))
    expr = x ** (-m) * sp.exp((p + N) * sp.log(1 + x))
    assert as_sympy(kernel_plain(m, power, order, nil)) == sympy_coefficients(expr, -m, order, nil)


@pytest.mark.parametrize("a", [QQ(0), QQ(1, 2), QQ(1, 3)])
def test_kernel_bracket_against_sympy(a):
    A = sp.Rational(int(a.numerator), int(a.denominator))
    expr = 3 * sp.exp(3 * x * (A + N))
    assert as_sympy(kernel_bracket(a, 5, 3, QQ(3))) == sympy_coefficients(expr, 0, 5, 3)


@pytest.mark.parametrize("m", [0, 1, 2])
def test_symbolic_tau_kernel_is_homogeneous(m):
    # every factor is a function of tau x, so x^k N^j carries tau^(k+1) after the leading tau
    tau = Scalar.tau()
    sym = kernel_tilde(m, QQ(0), 4, 3, None)
    num = kernel_tilde(m, QQ(0), 4, 3, QQ(1))
    assert set(sym.terms) == {e for e, c in num.terms.items() if c}
    for (k, j), c in num.terms.items():
        assert sym.terms[(k, j)] == tau ** (k + 1) * c


def test_vacuum_is_a_left_identity_before_the_quotient():
    voa = unipotent_voa()
    for v in voa.basis_upto(3):
        V = {v: QQ(1)}
        assert bullet(voa, {voa.vacuum: QQ(1)}, V) == V
        assert star(voa, {voa.vacuum: QQ(1)}, V) == V


def test_right_vacuum_product_has_leading_term_u():
    voa = unipotent_voa()
    u = voa.generator_label(0)  # N u = 0
    out = bullet(voa, {u: QQ(1)}, {voa.vacuum: QQ(1)})
    top = max(voa.weight(k) for k in out)
    assert {k: c for k, c in out.items() if voa.weight(k) == top} == {u: QQ(1)}


def test_classical_star_of_h_with_h():
    # Res x^{-1} (1+x) Y(h,x) h = h_{-1} h + h_0 h, and h_0 h = 0
    voa = rank_one_voa()
    h = voa.generator_label(0)
    hh = voa.mode_vec({h: QQ(1)}, -1, {h: QQ(1)})
    assert star(voa, {h: QQ(1)}, {h: QQ(1)}) == hh
    assert len(hh) == 1 and voa.weight(next(iter(hh))) == 2


def test_nonzero_coset_bullet_is_a_spanning_row():
    voa = mixed_voa()
    t = voa.generator_label(3)
    T = {t: QQ(1)}
    assert bullet(voa, T, {voa.vacuum: QQ(1)}) == T
    for v in voa.basis_upto(2):
        if voa.coset(v) != 0:
            assert tilde_row(voa, T, {v: QQ(1)}, 2) == bullet(voa, T, {v: QQ(1)})


def test_quotient_trivial_cases():
    voa = rank_one_voa()
    q = QuotientPresentation(voa, 4)
    vec = {b: QQ(i + 1) for i, b in enumerate(q.ambient)}
    assert q.reduce(vec) == vec and q.dimension == len(q.ambient)
    full = QuotientPresentation(voa, 4, [{b: QQ(1)} for b in q.ambient])
    assert full.dimension == 0 and full.reduce(vec) == {}


@settings(max_examples=40)
@given(st.integers(0, 10**6))
def test_quotient_reduce_is_idempotent_and_kills_rows(seed):
    voa = unipotent_voa()
    rng = random.Random(seed)
    q0 = QuotientPresentation(voa, 3)
    amb = q0.ambient

    def rand_vec():
        return {b: QQ(rng.randint(-3, 3), rng.randint(1, 3)) for b in rng.sample(amb, 3)}

    rows = [rand_vec() for _ in range(rng.randint(0, 8))]
    q = QuotientPresentation(voa, 3, rows)
    M = sp.Matrix([[sp.Rational(int(r.get(b, 0).numerator), int(r.get(b, 0).denominator)) for b in amb] for r in rows] or [[0] * len(amb)])
    assert q.dimension == len(amb) - M.rank()
    for r in rows:
        assert q.reduce(r) == {}
    v = rand_vec()
    once = q.reduce(v)
    assert q.reduce(once) == once
    assert q.reduce(sub(v, once)) == {}
    assert set(once) <= set(q.basis())


def test_rank_one_plain_algebra_is_a_polynomial_ring():
    # A(M(1)) = C[x]: V_{<= w} maps onto polynomials of degree <= w
    voa, tilde, plain = zhu_families("rank1", 6)
    A = plain.algebra(6)
    for w in range(5):
        assert A.quotient.image_dimension(w) == w + 1
    for u in A.labels(3):
        for v in A.labels(3):
            U, V = {u: QQ(1)}, {v: QQ(1)}
            assert A.is_zero(sub(A.product(U, V), A.product(V, U)))


def test_virasoro_zhu_algebra_is_generated_by_omega():
    # A(V_c) = C[x] with x = [omega]; V_{<= w} maps onto degree <= w // 2
    voa = Virasoro(QQ(1))
    fam = ZhuFamily(voa, 6, "plain")
    A = fam.algebra(6)
    for w in range(5):
        assert A.quotient.image_dimension(w) == w // 2 + 1


@pytest.mark.parametrize("flavour", ["tilde", "plain"])
def test_laws_on_small_cutoffs(flavour):
    voa, tilde, plain = zhu_families("rank1", 6)
    fam = tilde if flavour == "tilde" else plain
    for res in law_checks(fam.algebra(6), 4):
        assert res.passed, res.report()
        assert res.checked > 0 or res.name == "omega-nilpotent"


def test_laws_on_unipotent_example():
    voa = unipotent_voa()
    fam = ZhuFamily(voa, 4, "tilde")
    results = {r.name: r for r in law_checks(fam.algebra(4), 2)}
    for r in results.values():
        assert r.passed, r.report()
    assert results["omega-bracket"].checked > 0


def test_omega_bracket_sign_is_detected():
    # the class of [omega, v] is -tau^2 N v; the opposite sign must be rejected
    voa = unipotent_voa()
    A = ZhuFamily(voa, 4, "tilde").algebra(4)
    v = {voa.generator_label(1): QQ(1)}  # N v = -w is nonzero
    ad = sub(bullet(voa, voa.omega, v), bullet(voa, v, voa.omega))
    assert A.is_zero(sub(ad, {k: -c for k, c in voa.nilpotent(v).items()}))
    assert not A.is_zero(sub(ad, voa.nilpotent(v)))


def test_table_json_is_deterministic_and_has_identity():
    voa, tilde, plain = zhu_families("rank1", 6)
    w0 = plain.stabilized_range([4, 5, 6])
    assert 0 <= w0 <= 2
    t1 = algebra_table(plain.algebra(4), w0)
    t2 = algebra_table(ZhuFamily(voa, 6, "plain").algebra(4), w0)
    assert t1.identity_ok
    s1 = json.dumps(t1.to_json(voa), sort_keys=True)
    assert s1 == json.dumps(t2.to_json(voa), sort_keys=True)


def test_image_dimension_is_monotone_in_cutoff():
    voa, tilde, plain = zhu_families("d3", 6)
    for fam in (tilde, plain):
        dims = [fam.algebra(W).quotient.image_dimension(2) for W in (4, 5, 6)]
        assert dims == sorted(dims, reverse=True)


def test_u1_checks_rank_one_and_d3():
    voa, tilde, plain = zhu_families("rank1", 6)
    for r in u1_checks(tilde, plain, 5, pre_weight=2):
        assert r.passed and r.checked > 0, r.report()
    voa = unipotent_voa()
    t, p = ZhuFamily(voa, 4, "tilde"), ZhuFamily(voa, 4, "plain")
    for r in u1_checks(t, p, 4, pre_weight=2, pre_n=(0, 2)):
        assert r.passed and r.checked > 0, r.report()


def test_z_oracle_rank_one():
    voa, tilde, plain = zhu_families("rank1", 6)
    module = rank_one_module(voa)
    for r in z_oracle_checks(module, lowest_states(module), tilde, plain, 5, product_weight=2):
        assert r.passed and r.checked > 0, r.report()


def test_omega_star_omega_acts_as_square_of_l0():
    voa = unipotent_voa()
    module = unipotent_module(voa)
    om = voa.omega
    one = {voa.vacuum: QQ(1)}
    ww = star(voa, om, om)
    for w in lowest_states(module):
        W = {w: QQ(1)}
        assert o_action(module, one, W) == W
        assert o_action(module, om, o_action(module, om, W)) == o_action(module, ww, W)
