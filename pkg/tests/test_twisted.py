import pytest
from hypothesis import given, settings, strategies as st

from twistzhu.backends import Heisenberg, Virasoro
from twistzhu.scalars import QQ, Scalar
from twistzhu.twisted import (
    InconsistentModule,
    MatrixZeroModes,
    TwistedFockModule,
    VirasoroModule,
    identity_sweep,
    induce,
    jacobi_defect,
    lemma_suite,
    lowering_defect,
    o_action,
    omega_subspace,
)
from twistzhu.vectors import scaled, sub

from examples import JORDAN, DroppedSkew, FlippedNilpotent, lowest_states, mixed_module, rank_one_module, unipotent_module, unipotent_voa

M3 = unipotent_module()
V3 = M3.voa
M4 = mixed_module()


def test_literal_two_dim_module_is_rejected():
    # [v(0), w(0)] is a nonzero scalar, so no finite matrices can represent it
    with pytest.raises(InconsistentModule) as info:
        TwistedFockModule(V3, MatrixZeroModes(V3, 2, {0: JORDAN}))
    assert "[v(0),w(0)]" in str(info.value)


def test_zero_mode_commutator_is_skew_form():
    for b in M3.zero.labels():
        w = {((), b): QQ(1)}
        lhs = sub(M3.mode_vec({V3.generator_label(1): QQ(1)}, 0, M3.mode_vec({V3.generator_label(2): QQ(1)}, 0, w)),
                  M3.mode_vec({V3.generator_label(2): QQ(1)}, 0, M3.mode_vec({V3.generator_label(1): QQ(1)}, 0, w)))
        assert lhs == scaled(w, V3.skew_form(1, 2))


def test_twisted_ground_state_energy():
    # one real boson with sigma = -1 has ground-state energy 1/16
    V = Heisenberg([[1]], cosets=[QQ(1, 2)])
    M = TwistedFockModule(V, MatrixZeroModes(V, 1))
    ground = lowest_states(M)[0]
    assert M.mode_vec(V.omega, 1, {ground: QQ(1)}) == {ground: QQ(1, 16)}


@given(
    st.sampled_from([x for d, xs in M4.states_upto(2).items() for x in xs]),
    st.integers(0, 3),
    st.integers(-2, 2),
)
@settings(max_examples=40)
def test_l0_commutes_with_generators_up_to_n(w, i, k):
    # [L(0), h(m)] = -(m + N) h(m)
    V = M4.voa
    m = V.cosets[i] + k
    h = {V.generator_label(i): QQ(1)}
    vec = {w: QQ(1)}
    L0 = lambda x: M4.mode_vec(V.omega, 1, x)
    lhs = sub(L0(M4.mode_vec(h, m, vec)), M4.mode_vec(h, m, L0(vec)))
    rhs = scaled(M4.mode_vec(h, m, vec), -m)
    rhs = sub(rhs, M4.mode_vec(V.nilpotent(h), m, vec))
    assert lhs == rhs


def test_small_sweep_passes():
    labels = V3.basis_upto(2)
    states = [x for xs in M3.states_upto(1).values() for x in xs][:4]
    res = identity_sweep(M3, labels[:4], labels, states, l_bound=2, mode_bound=2)
    assert all(r.passed for r in res.values())
    assert all(r.checked > 0 for r in res.values())


def test_mixed_sweep_passes():
    V = M4.voa
    labels = V.basis_upto(1)
    res = identity_sweep(M4, labels, labels, lowest_states(M4)[:2], l_bound=2, mode_bound=2)
    assert all(r.passed for r in res.values())


def test_untwisted_sweep_on_vertex_algebra():
    V = Heisenberg([[2]])
    labels = V.basis_upto(2)
    res = identity_sweep(V, labels, labels, labels, l_bound=2, mode_bound=2)
    assert all(r.passed for r in res.values())


def test_jacobi_sweep_detects_missing_skew_term():
    bad = unipotent_module(cls=DroppedSkew)
    labels = V3.basis_upto(1)
    res = identity_sweep(bad, labels, labels, lowest_states(bad), l_bound=1, mode_bound=2)
    assert not res["commutator"].passed
    cx = res["commutator"].counterexample
    assert {"u", "v", "w", "m", "n", "defect"} <= set(cx)


def test_lemma_suite_detects_wrong_module_nilpotent_sign():
    bad = unipotent_module(cls=FlippedNilpotent)
    res = lemma_suite(bad, V3.basis_upto(1), lowest_states(bad)[:2], mode_bound=1)
    assert not res["yg-y0"].passed
    assert not res["g-compatibility"].passed
    good = lemma_suite(M3, V3.basis_upto(1), lowest_states(M3)[:2], mode_bound=1)
    assert all(r.passed for r in good.values())


def test_lemma_suite_on_mixed_module():
    res = lemma_suite(M4, M4.voa.basis_upto(1), lowest_states(M4), mode_bound=1)
    assert all(r.passed for r in res.values())


def test_jacobi_defect_on_single_tuple():
    u, v = V3.generator_label(1), V3.generator_label(2)
    w = lowest_states(M3)[0]
    assert jacobi_defect(M3, u, v, 0, QQ(1), QQ(-1), w) == {}


def test_o_action_of_vacuum_is_identity():
    for w in lowest_states(M3):
        assert o_action(M3, V3.vacuum_vector, {w: QQ(1)}) == {w: QQ(1)}


def test_omega_subspace_of_fock_module():
    M = rank_one_module()
    om = omega_subspace(M, 3)
    assert [len(om[d]) for d in sorted(om)] == [2, 0, 0, 0]
    for w in lowest_states(M):
        assert lowering_defect(M, {w: QQ(1)}) is None
    excited = M.states_upto(1)[QQ(1)][0]
    assert lowering_defect(M, {excited: QQ(1)}) is not None


def colored_partition_counts(colors: int, top: int) -> list:
    coeffs = [1] + [0] * top
    for n in range(1, top + 1):
        for _ in range(colors):
            for k in range(n, top + 1):
                coeffs[k] += coeffs[k - n]
    return coeffs


def test_induced_dimensions_match_word_count():
    M = rank_one_module(matrix=JORDAN)
    ind = induce(M, 4)
    assert [ind.quotient_dims()[QQ(d)] for d in range(5)] == [2 * c for c in colored_partition_counts(1, 4)]
    M = unipotent_module()
    ind = induce(M, 3)
    assert [ind.quotient_dims()[QQ(d)] for d in range(4)] == [4 * c for c in colored_partition_counts(3, 3)]


def test_induce_virasoro_vacuum():
    V = Virasoro(1)
    ind = induce(VirasoroModule(V, [[0]]), 4)
    # Verma words count partitions; the vacuum quotient drops L(-1)
    assert [ind.dims()[QQ(d)] for d in range(5)] == [1, 1, 2, 3, 5]
    assert [ind.quotient_dims()[QQ(d)] for d in range(5)] == [1, 0, 1, 1, 2]
    om = ind.omega()
    assert [len(om[QQ(d)]) for d in range(5)] == [1, 0, 0, 0, 0]


def test_induce_from_empty_seed_is_zero():
    ind = induce(rank_one_module(), 3, seed=[])
    assert ind.dims() == {} and ind.quotient_dims() == {}
