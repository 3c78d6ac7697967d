import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from clonelab.meanking import (
    AttackParams,
    InconsistentConstraints,
    alice_basis,
    bob1_table,
    bob2_table,
    cloner_FB_from_bob,
    disturbance_DI,
    eve1_table,
    eve2_table,
    eve2_table_explicit,
    guessing_function,
    king_basis,
    king_eve_max,
    king_fidelities,
    max_gap,
    mutual_info,
    phi_state,
    printed_king_basis_d2,
    simulate_mean_king,
    simulate_mean_king_d2,
    standard_qkd_eve,
)
from clonelab.phasecov import PHASE_OPTIMAL, mub_cloner, mub_v_range
from conftest import assert_density

# |I> = m d + n rows of the d = 2 outcome table: Bob's result, then Alice's a for bases x (A=0), y (A=1), z (A=2)
D2_TABLE = [
    (0, (0, 0, 0)),
    (1, (1, 1, 0)),
    (2, (0, 1, 1)),
    (3, (1, 0, 1)),
]


def test_guessing_function():
    assert guessing_function(1, 2, 1, 3) == 1
    for d in (2, 3, 5):
        for m in range(d):
            for n in range(d):
                assert guessing_function(m, n, d, d) == m
    with pytest.raises(ValueError):
        guessing_function(0, 0, 4, 3)


def test_d2_table_rows():
    kb = king_basis(2)
    for I, row in D2_TABLE:
        assert tuple(kb.table[I]) == row


@pytest.mark.parametrize("d", [2, 3, 5, 7])
def test_king_basis_constraints(d):
    kb = king_basis(d)
    assert kb.residual < 1e-8
    V = kb.vectors
    assert np.abs(V.conj().T @ V - np.eye(d * d)).max() < 1e-10
    assert np.abs(V @ V.conj().T - np.eye(d * d)).max() < 1e-10
    for A in range(d + 1):
        for a in range(d):
            ov = phi_state(d, A, a).conj() @ V
            expected = (kb.table[:, A] == a) / math.sqrt(d)
            assert np.abs(ov - expected).max() < 1e-8


def test_king_basis_d2_matches_printed():
    P = printed_king_basis_d2()
    V = king_basis(2).vectors
    for I in range(4):
        assert abs(abs(np.vdot(P[:, I], V[:, I])) - 1) < 1e-10


def test_king_basis_rejects_composite():
    with pytest.raises(ValueError):
        king_basis(4)
    assert issubclass(InconsistentConstraints, ArithmeticError)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_alice_bases_unitary(d):
    for A in range(d + 1):
        B = alice_basis(d, A)
        assert np.allclose(B.conj().T @ B, np.eye(d))


def test_no_attack():
    P = AttackParams(2, 1, 0.0, 1.0, 1.0)
    assert king_fidelities(P)[0] == pytest.approx(1)
    assert simulate_mean_king_d2(P)[0] == pytest.approx(1, abs=1e-12)
    P3 = AttackParams(3, 1, 0.0, 1.0, 1.0)
    assert king_fidelities(P3)[0] == pytest.approx(1)


def test_full_swap_d2():
    lo, hi = mub_v_range(2, 1, 0.8)
    v = 0.5 * (lo + hi)
    P = AttackParams(2, 1, 1.0, 0.8, v)
    FB, _ = king_fidelities(P)
    assert FB == pytest.approx(0.5 + (v * v + P.x ** 2) / 2 - 0.25, abs=1e-12)
    assert simulate_mean_king_d2(P)[0] == pytest.approx(FB, abs=1e-10)


def _grid_d2(n_p=10, n_v=5, F_B=0.8):
    lo, hi = mub_v_range(2, 1, F_B)
    for p in np.linspace(0, 1, n_p):
        for v in np.linspace(lo, hi, n_v):
            yield AttackParams(2, 1, float(p), F_B, float(v))


def test_d2_simulation_matches_closed_form():
    worst = 0.0
    for P in _grid_d2():
        sim = simulate_mean_king_d2(P)
        worst = max(worst, *(abs(a - b) for a, b in zip(sim, king_fidelities(P))))
    assert worst < 1e-8


def test_d2_simulated_states_valid():
    for P in list(_grid_d2(4, 3)):
        for rb, re in simulate_mean_king(P)[2]:
            assert_density(rb)
            assert_density(re)


@pytest.mark.xfail(strict=True, reason="closed-form F_Bob/F_Eve disagree with the full simulation for d > 2; see decisions ledger")
@pytest.mark.parametrize("d,g", [(3, 1), (3, 2)])
def test_closed_form_matches_simulation_above_d2(d, g):
    v = mub_cloner(d, g, 0.8)[2]
    P = AttackParams(d, g, 0.3, 0.8, v)
    assert simulate_mean_king(P)[:2] == pytest.approx(king_fidelities(P), abs=1e-8)


def test_eve_fidelity_decreases_with_bob_d5():
    Fs = np.linspace(0.3, 0.95, 6)
    eve = [king_eve_max(5, 1, F, n_p=21) for F in Fs]
    assert all(a > b for a, b in zip(eve, eve[1:]))


def test_cloner_inverse():
    for d in (2, 3, 5):
        for p in (0.0, 0.3, 0.6):
            FB = 0.85
            v = mub_v_range(d, 1, FB)[0]
            F_bob = king_fidelities(AttackParams(d, 1, p, FB, v))[0]
            assert cloner_FB_from_bob(d, F_bob, p) == pytest.approx(FB, abs=1e-12)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_tables_are_distributions(d):
    for p in (0.0, 0.4, 1.0):
        assert np.allclose(bob1_table(d, p).sum(axis=1), 1)
        assert np.allclose(eve1_table(d, p).reshape(d, -1).sum(axis=1), 1)
    assert np.allclose(bob2_table(d, 0.7).sum(axis=1), 1)


@pytest.mark.parametrize("d,g", [(2, 1), (3, 1), (3, 2), (5, 2)])
def test_eve2_table_closed_form_vs_amplitudes(d, g):
    lo, hi = mub_v_range(d, g, 0.75)
    P = AttackParams(d, g, 0.0, 0.75, 0.5 * (lo + hi))
    T = eve2_table(d, g, P.v, P.x, P.y)
    assert np.allclose(T, eve2_table_explicit(P.amplitudes), atol=1e-12)
    assert np.allclose(T.reshape(d, -1).sum(axis=1), 1)


def test_mutual_info_limits():
    for d in (2, 3, 5):
        P = AttackParams(d, 1, 0.0, 1.0, 1.0)
        I_ab, I_ae = mutual_info(P)
        assert I_ab == pytest.approx(math.log2(d), abs=1e-12)
        assert I_ae == pytest.approx(0, abs=1e-12)
    P = AttackParams(3, 1, 1.0, 1 / 3, mub_v_range(3, 1, 1 / 3)[0])
    I_ab, _ = mutual_info(P)
    assert I_ab == pytest.approx(0, abs=1e-9)
    with pytest.raises(ValueError):
        mutual_info(P, "bogus")


def test_crossing_consistency_d2():
    DI = disturbance_DI(2, 1, tol=1e-9)
    assert abs(max_gap(2, 1, 1 - DI / 100)) < 1e-6


def test_standard_qkd():
    assert standard_qkd_eve(1.0, "bb84") == pytest.approx(0.5)
    assert standard_qkd_eve(PHASE_OPTIMAL, "bb84") == pytest.approx(PHASE_OPTIMAL, abs=1e-12)
    six = standard_qkd_eve(5 / 6, "six-state")
    assert six == pytest.approx(5 / 6, abs=1e-12)
    assert standard_qkd_eve(0.8, "d-dim-2basis", 3) == pytest.approx(standard_qkd_eve(0.8, "d-dim-(g+1)basis", 3, 1), abs=1e-8)
    with pytest.raises(ValueError):
        standard_qkd_eve(0.8, "b92")


def test_king_dominates_bb84_and_six_state():
    for F in np.linspace(0.55, 0.99, 12):
        k = king_eve_max(2, 1, F, n_p=101)
        assert k <= standard_qkd_eve(F, "bb84") + 1e-12
        assert k <= standard_qkd_eve(F, "six-state") + 1e-12


def test_attack_params_validation():
    with pytest.raises(ValueError):
        AttackParams(4, 1, 0.1, 0.8, 0.8)
    with pytest.raises(ValueError):
        AttackParams(3, 1, 1.5, 0.8, 0.8)
    with pytest.raises(ValueError):
        AttackParams(3, 4, 0.1, 0.8, 0.8)


@given(p=st.floats(0, 1), t=st.floats(0, 1), F_B=st.floats(0.55, 1.0), g=st.integers(1, 2))
def test_informations_bounded(p, t, F_B, g):
    d = 3
    lo, hi = mub_v_range(d, g, F_B)
    P = AttackParams(d, g, p, F_B, lo + t * (hi - lo))
    for I in mutual_info(P) + mutual_info(P, "standard"):
        assert -1e-12 <= I <= math.log2(d) + 1e-12
