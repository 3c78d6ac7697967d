import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from clonelab.asym import tradeoff_gap
from clonelab.linalg import bell_state, gen_pauli, phi_plus, random_state
from clonelab.phasecov import PHASE_OPTIMAL, qudit_phase_optimal
from clonelab.teleclone import (
    asym_phi,
    asym_teleclone_1to2,
    bell_branches,
    cnot_qudit,
    econ_coefficients,
    econ_fidelity_formula,
    econ_optimal_value,
    econ_phase_teleclone,
    local_clone_bell,
    lruo_asym,
    lruo_symmetric,
    shift_down,
    simulate_asym_teleclone,
    symmetric_resource,
    teleclone_channel,
)
from clonelab.uqcm import buzek_hillery_1to2, universal_fidelity
from conftest import assert_density


def test_qubit_telecloning_matches_buzek_hillery(rng):
    psi = random_state(2, rng)
    res = teleclone_channel(2, 2, psi)
    bh = buzek_hillery_1to2(psi).joint_out.mat
    assert len(res.branches) == 4
    for rho in res.receivers:
        assert np.abs(rho - bh).max() < 1e-9
        assert_density(rho)
    assert sum(b.probability for b in res.branches) == pytest.approx(1)


def test_identity_outcome_needs_no_correction():
    assert np.allclose(lruo_symmetric(3, 2, 0, 0), np.eye(27))


@pytest.mark.parametrize("d,M", [(3, 2), (2, 3)])
def test_symmetric_telecloning(d, M, rng):
    res = teleclone_channel(d, M, random_state(d, rng))
    assert res.max_deviation < 1e-9
    for b in res.branches:
        assert b.probability == pytest.approx(1 / d ** 2, abs=1e-12)


def test_resource_and_lruo_valid():
    for d, M in ((2, 2), (3, 2), (2, 3)):
        xi = symmetric_resource(d, M)
        assert np.linalg.norm(xi) == pytest.approx(1)
        U = lruo_symmetric(d, M, 1, d - 1)
        assert np.allclose(U @ U.conj().T, np.eye(U.shape[0]))
    for d in (2, 3):
        assert np.allclose(np.linalg.norm(asym_phi(d, 0.3, 0.7), axis=1), 1)
        U = lruo_asym(d, 1, 1)
        assert np.allclose(U @ U.conj().T, np.eye(d ** 3))
        assert np.allclose(shift_down(d, 1, 1, 0), gen_pauli(d, 1, 0).T)


def test_asym_formula_points():
    assert asym_teleclone_1to2(0.5, 0.5) == pytest.approx((5 / 6, 5 / 6))
    assert asym_teleclone_1to2(1.0, 0.0) == pytest.approx((1.0, 0.5))
    for d in (3, 4):
        assert asym_teleclone_1to2(0.5, 0.5, d) == pytest.approx((universal_fidelity(d, 1, 2),) * 2)
    with pytest.raises(ValueError):
        asym_teleclone_1to2(0.5, 0.6)


@given(p=st.floats(0, 1))
def test_asym_tradeoff(p):
    FB, FC = asym_teleclone_1to2(p, 1 - p)
    assert tradeoff_gap(FB, FC) == pytest.approx(0, abs=1e-10)


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("p", [0.0, 0.3, 0.5, 0.8])
def test_asym_simulation(d, p, rng):
    psi = random_state(d, rng)
    ref = asym_teleclone_1to2(p, 1 - p, d)
    for m, n, prob, FB, FC in simulate_asym_teleclone(p, 1 - p, d, psi):
        assert prob == pytest.approx(1 / d ** 2, abs=1e-12)
        assert (FB, FC) == pytest.approx(ref, abs=1e-10)


def test_econ_qubit():
    x = econ_coefficients(2)
    assert x[0] == pytest.approx(x[1])
    r = econ_phase_teleclone(2)
    assert r.fidelity == pytest.approx(PHASE_OPTIMAL, abs=1e-12)
    assert r.entropy == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_econ_success_and_fidelity(d):
    r = econ_phase_teleclone(d)
    assert np.linalg.norm(r.x) == pytest.approx(1, abs=1e-12)
    assert r.success_probability == pytest.approx(1 / d, abs=1e-12)
    assert r.fidelity == pytest.approx(econ_fidelity_formula(r.x), abs=1e-12)
    assert r.fidelity == pytest.approx(qudit_phase_optimal(d), abs=1e-12)
    assert econ_optimal_value(d) == qudit_phase_optimal(d)
    for (m, n), (prob, F1, F2) in r.branch_fidelities.items():
        if m == 0:
            assert F1 == pytest.approx(F2, abs=1e-12)


def test_econ_qutrit_value_and_entropy():
    r = econ_phase_teleclone(3)
    assert r.fidelity == pytest.approx((5 + math.sqrt(17)) / 12, abs=1e-12)
    assert r.entropy < math.log2(3)


def test_econ_phase_independent():
    rng = np.random.default_rng(5)
    Fs = [econ_phase_teleclone(3, rng.uniform(0, 2 * math.pi, 3)).fidelity for _ in range(6)]
    assert max(Fs) - min(Fs) < 1e-12


def test_econ_single_correction_misses_second_clone():
    r = econ_phase_teleclone(3, correct_both=False)
    F2 = [v[2] for (m, n), v in r.branch_fidelities.items() if m == 0 and n != 0]
    assert max(F2) < qudit_phase_optimal(3) - 0.1


@pytest.mark.parametrize("d,m", [(2, 0), (2, 1), (3, 1), (3, 2), (5, 3)])
def test_local_bell_copy(d, m):
    out, expected = local_clone_bell(m, d)
    assert abs(np.vdot(expected, out)) == pytest.approx(1, abs=1e-12)


def test_local_bell_copy_named_states():
    out, expected = local_clone_bell(0, 2)
    phi = phi_plus(2).amps
    assert np.allclose(expected, np.kron(phi, phi))
    out, expected = local_clone_bell(1, 2)
    psi_plus = np.array([0, 1, 1, 0]) / math.sqrt(2)
    assert np.allclose(out, np.kron(psi_plus, psi_plus))


def test_cnot_qudit_permutation():
    C = cnot_qudit(3)
    assert np.allclose(C @ C.T, np.eye(9))
    assert np.allclose(np.linalg.matrix_power(C, 3), np.eye(9))


def test_bell_branch_probabilities(rng):
    psi = random_state(3, rng).amps
    xi = symmetric_resource(3, 2)
    probs = [b[2] for b in bell_branches(psi, xi, 3)]
    assert sum(probs) == pytest.approx(1)
    assert bell_state(3, 0, 0).amps.size == 9
