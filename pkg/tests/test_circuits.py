import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from clonelab.circuits import (
    PHASE_ANGLES,
    UQCM_ANGLES,
    Angles,
    cloning_circuit,
    cnot,
    copies,
    copy_fidelities,
    copy_stage,
    operator_copy_relations,
    preparation,
    rotation,
)
from clonelab.linalg import ptrace, random_state
from clonelab.phasecov import equatorial, noneconomic_isometry
from clonelab.uqcm import werner_output
from conftest import assert_density


def _run(angles, psi):
    return cloning_circuit(angles.theta1, angles.theta2, angles.theta3, psi)


def test_rotation_basics():
    assert np.allclose(rotation(0), np.eye(2))
    v = rotation(math.pi / 2) @ np.array([1, 0])
    assert abs(abs(v[1]) - 1) < 1e-12


@given(st.floats(-4, 4), st.floats(-4, 4))
def test_rotation_unitary(t, p):
    R = rotation(t, p)
    assert np.allclose(R.conj().T @ R, np.eye(2), atol=1e-12)


def test_cnot_block_form():
    X = np.array([[0, 1], [1, 0]])
    Z = np.zeros((2, 2))
    assert np.array_equal(cnot(0, 1), np.block([[np.eye(2), Z], [Z, X]]))
    with pytest.raises(ValueError):
        cnot(1, 1)
    with pytest.raises(ValueError):
        cnot(0, 3, 3)


def test_copy_stage_is_permutation():
    U = copy_stage()
    assert np.array_equal(U @ U.T, np.eye(8))
    assert set(U.sum(axis=0)) == {1}


def test_preparation_states():
    s = 1 / math.sqrt(2)
    assert np.allclose(preparation(PHASE_ANGLES), [s, 0.5, 0.5, 0], atol=1e-12)
    assert np.allclose(preparation(UQCM_ANGLES), np.array([2, 1, 1, 0]) / math.sqrt(6), atol=1e-12)


def test_uqcm_angles_give_universal_clones(rng):
    for _ in range(10):
        psi = random_state(2, rng).amps
        out = _run(UQCM_ANGLES, psi)
        F1, F2 = copy_fidelities(out, psi)
        assert abs(F1 - 5 / 6) < 1e-10 and abs(F2 - 5 / 6) < 1e-10
        rho = copies(out)
        assert_density(rho)
        assert np.abs(rho - werner_output(psi, 1, 2, 2)).max() < 1e-10


def test_phase_angles_on_equator():
    target = 0.5 + 1 / math.sqrt(8)
    V = noneconomic_isometry()
    for phi in np.linspace(0, 2 * math.pi, 16, endpoint=False):
        psi = equatorial(phi)
        out = _run(PHASE_ANGLES, psi)
        F1, F2 = copy_fidelities(out, psi)
        assert abs(F1 - target) < 1e-10 and abs(F2 - target) < 1e-10
        w = V @ psi
        ref = ptrace(np.outer(w, w.conj()), (2, 2, 2), [0, 1])
        assert np.abs(copies(out) - ref).max() < 1e-10


def test_circuit_output_normalized_and_validated(rng):
    out = _run(Angles(0.1, 0.2, 0.3), random_state(2, rng).amps)
    assert abs(np.linalg.norm(out) - 1) < 1e-12
    with pytest.raises(ValueError):
        cloning_circuit(0, 0, 0, [1, 1])
    with pytest.raises(ValueError):
        cloning_circuit(0, 0, 0, [1, 0, 0])


def test_operator_copy_relations():
    for name, resid in operator_copy_relations():
        assert resid == 0, name
