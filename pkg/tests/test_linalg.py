import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from clonelab.linalg import (
    DensityMatrix,
    DimensionCapError,
    OccupationVector,
    StateVector,
    basis,
    bell_basis,
    bell_state,
    check_dim,
    fidelity,
    gen_pauli,
    is_broadcastable,
    ket,
    maximally_mixed,
    mub,
    mub_vector,
    omega,
    partial_trace,
    phi_plus,
    ptrace,
    random_state,
    random_unitary,
    sigma_x,
    sigma_z,
    sym_basis,
    sym_dim,
    sym_embed,
    symmetrizer,
    tensor,
)
from conftest import assert_density

s2 = 1 / math.sqrt(2)


def test_tensor_basis():
    out = tensor([basis(2, 0), basis(2, 0)])
    assert out.dims == (2, 2)
    assert np.allclose(out.amps, [1, 0, 0, 0])


def test_phi_plus_from_components():
    v = (tensor([basis(2, 0), basis(2, 0)]).amps + tensor([basis(2, 1), basis(2, 1)]).amps) * s2
    assert np.allclose(v, [s2, 0, 0, s2])
    assert np.allclose(phi_plus(2).amps, v)


def test_bit_flip_on_bob_gives_psi_plus():
    out = np.kron(np.eye(2), sigma_x(2)) @ phi_plus(2).amps
    assert np.allclose(out, [0, s2, s2, 0])


def test_tensor_rejects_mixed_kinds():
    with pytest.raises(TypeError):
        tensor([basis(2, 0), basis(2, 0).dm()])


def test_partial_trace_bell_is_mixed():
    rho = phi_plus(2).dm()
    assert np.allclose(partial_trace(rho, [0]).mat, np.eye(2) / 2)


def test_partial_trace_nothing_is_identity_map(rng):
    psi = random_state(4, rng)
    rho = DensityMatrix(np.outer(psi.amps, psi.amps.conj()), (2, 2))
    assert np.allclose(partial_trace(rho, [0, 1]).mat, rho.mat)


def test_partial_trace_product(rng):
    a, b = random_state(2, rng).dm(), random_state(3, rng).dm()
    assert np.allclose(partial_trace(tensor([a, b]), [1]).mat, b.mat)


def test_partial_trace_out_of_range():
    with pytest.raises(IndexError):
        partial_trace(phi_plus(2).dm(), [2])


def test_fidelity_values(rng):
    psi = random_state(2, rng)
    assert fidelity(psi.dm(), psi) == pytest.approx(1, abs=1e-12)
    assert fidelity(maximally_mixed([2]), psi) == pytest.approx(0.5, abs=1e-12)
    with pytest.raises(ValueError):
        fidelity(maximally_mixed([3]), psi)


def test_sym_basis_qubit_pair():
    b = sym_basis(2, 2)
    assert [n.counts for n in b] == [(2, 0), (1, 1), (0, 2)]
    assert np.allclose(sym_embed(OccupationVector((1, 1))).amps, [0, s2, s2, 0])
    assert sym_dim(2, 3) == 4
    assert [sym_embed(n).amps.tolist() for n in sym_basis(3, 1)] == np.eye(3).tolist()


@pytest.mark.parametrize("d,N", [(2, 3), (3, 2), (3, 3), (4, 2)])
def test_sym_embed_orthonormal_and_invariant(d, N):
    vs = np.column_stack([sym_embed(n).amps for n in sym_basis(d, N)])
    assert vs.shape[1] == math.comb(N + d - 1, N)
    assert np.allclose(vs.conj().T @ vs, np.eye(vs.shape[1]))
    assert np.allclose(symmetrizer(d, N) @ vs, vs)


def test_symmetrizer_qubit_pair():
    expected = np.zeros((4, 4))
    expected[0, 0] = expected[3, 3] = 1
    expected[1:3, 1:3] = 0.5
    assert np.allclose(symmetrizer(2, 2), expected)


@pytest.mark.parametrize("d,M", [(2, 3), (3, 2), (3, 3)])
def test_symmetrizer_projector_and_weyl(d, M, rng):
    s = symmetrizer(d, M)
    assert np.allclose(s @ s, s)
    assert np.allclose(s, s.conj().T)
    assert round(np.trace(s).real) == sym_dim(d, M)
    U = random_unitary(d, rng)
    UU = U
    for _ in range(M - 1):
        UU = np.kron(UU, U)
    assert np.abs(s @ UU - UU @ s).max() < 1e-10


def test_gen_pauli_qubit():
    assert np.allclose(gen_pauli(2, 1, 0), [[0, 1], [1, 0]])
    assert np.allclose(gen_pauli(2, 0, 1), [[1, 0], [0, -1]])


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_bell_basis_orthonormal(d):
    B = np.column_stack([v.amps for _, v in bell_basis(d)])
    assert np.allclose(B.conj().T @ B, np.eye(d * d))
    assert [mn for mn, _ in bell_basis(d)] == [(m, n) for m in range(d) for n in range(d)]


@pytest.mark.parametrize("d", [2, 3, 5])
def test_gen_pauli_action(d):
    w = omega(d)
    for m in range(d):
        for n in range(d):
            U = gen_pauli(d, m, n)
            for k in range(d):
                assert np.allclose(U @ np.eye(d)[k], w ** (k * n) * np.eye(d)[(k + m) % d])


@given(d=st.integers(2, 6), m=st.integers(0, 5), n=st.integers(0, 5), m2=st.integers(0, 5), n2=st.integers(0, 5))
def test_gen_pauli_group_law(d, m, n, m2, n2):
    prod = gen_pauli(d, m % d, n % d) @ gen_pauli(d, m2 % d, n2 % d)
    target = gen_pauli(d, (m + m2) % d, (n + n2) % d)
    ph = np.trace(target.conj().T @ prod) / d
    assert abs(abs(ph) - 1) < 1e-12
    assert np.allclose(prod, ph * target)


def test_mub_qubit_is_six_states():
    fam = mub(2)
    states = [v.amps for b in fam.bases for v in b]
    expected = [[1, 0], [0, 1], [s2, s2], [s2, -s2], [s2, 1j * s2], [s2, -1j * s2]]
    assert np.allclose(states, expected)


@pytest.mark.parametrize("d", [2, 3, 5, 7])
def test_mub_invariants(d):
    fam = mub(d)
    assert len(fam.bases) == d + 1
    for k in range(d + 1):
        U = fam.matrix(k)
        assert np.allclose(U.conj().T @ U, np.eye(d), atol=1e-10)
        for l in range(k + 1, d + 1):
            assert np.allclose(np.abs(U.conj().T @ fam.matrix(l)), 1 / math.sqrt(d), atol=1e-10)


@pytest.mark.parametrize("d", [3, 5, 7])
def test_mub_eigenvectors(d):
    w = omega(d)
    for k in range(d):
        A = sigma_x(d) @ np.linalg.matrix_power(sigma_z(d), k)
        for i in range(d):
            v = mub_vector(d, k, i)
            assert np.abs(A @ v - w ** i * v).max() < 1e-10


def test_mub_rejects_composite():
    with pytest.raises(ValueError, match="not prime"):
        mub(6)


def test_broadcastable_examples():
    z0, z1 = basis(2, 0).dm(), basis(2, 1).dm()
    plus = ket([s2, s2]).dm()
    assert is_broadcastable([z0, z1])
    assert not is_broadcastable([z0, plus])
    assert is_broadcastable([plus])
    with pytest.raises(ValueError):
        is_broadcastable([])


def _random_density(d, rng, eigvecs=None):
    U = random_unitary(d, rng) if eigvecs is None else eigvecs
    p = rng.dirichlet(np.ones(d))
    return (U * p) @ U.conj().T


def simultaneously_diagonalizable(a, b):
    # independent route: diagonalize a generic combination and check that both are diagonal in that basis
    _, V = np.linalg.eigh(a + math.pi * b)
    off = lambda m: np.abs(V.conj().T @ m @ V - np.diag(np.diag(V.conj().T @ m @ V))).max()
    return max(off(a), off(b)) < 1e-8


def test_broadcastable_matches_diagonalization_oracle(rng):
    for trial in range(100):
        d = int(rng.integers(2, 5))
        if trial % 2:
            U = random_unitary(d, rng)
            a, b = _random_density(d, rng, U), _random_density(d, rng, U)
        else:
            a, b = _random_density(d, rng), _random_density(d, rng)
        assert is_broadcastable([a, b]) == simultaneously_diagonalizable(a, b)


def test_state_vector_invariants():
    with pytest.raises(ValueError):
        StateVector(np.array([1, 1]), (2,))
    with pytest.raises(ValueError):
        StateVector(np.array([1, 0, 0]), (2,))


def test_density_matrix_invariants():
    with pytest.raises(ValueError):
        DensityMatrix(np.array([[1, 0], [0, 1]]), (2,))
    with pytest.raises(ValueError):
        DensityMatrix(np.array([[1.2, 0], [0, -0.2]]), (2,))


def test_occupation_vector_invariants():
    n = OccupationVector((2, 1, 0))
    assert (n.d, n.N) == (3, 3)
    with pytest.raises(ValueError):
        OccupationVector((3,))
    with pytest.raises(ValueError):
        OccupationVector((1, -1))


def test_dimension_cap():
    check_dim(2 ** 14)
    with pytest.raises(DimensionCapError):
        check_dim(2 ** 14 + 1)


@given(seed=st.integers(0, 10_000), d1=st.integers(2, 3), d2=st.integers(2, 3), t=st.floats(0, 1))
def test_partial_trace_linear_and_trace_preserving(seed, d1, d2, t):
    rng = np.random.default_rng(seed)
    a = _random_density(d1 * d2, rng)
    b = _random_density(d1 * d2, rng)
    mix = t * a + (1 - t) * b
    red = lambda m: ptrace(m, (d1, d2), [1])
    assert np.allclose(red(mix), t * red(a) + (1 - t) * red(b))
    assert abs(np.trace(red(mix)) - 1) < 1e-12
    assert_density(red(mix))
