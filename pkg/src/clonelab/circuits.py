"""Three-qubit cloning network: a two-qubit preparation stage, then four CNOTs.

Qubits are a1 (input), a2, a3; a1 is the leftmost Kronecker factor.  The
copies appear on a2 and a3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import ptrace

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def rotation(theta: float, phi: float = 0.0) -> np.ndarray:
    """R|0> = cos t |0> + e^{i phi} sin t |1>,  R|1> = -e^{-i phi} sin t |0> + cos t |1>."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -np.exp(-1j * phi) * s], [np.exp(1j * phi) * s, c]], dtype=complex)


def single(U: np.ndarray, k: int, n_qubits: int) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for i in range(n_qubits):
        out = np.kron(out, U if i == k else np.eye(2))
    return out


def cnot(control: int, target: int, n_qubits: int = 2) -> np.ndarray:
    if control == target or not (0 <= control < n_qubits and 0 <= target < n_qubits):
        raise ValueError("invalid control/target")
    D = 2 ** n_qubits
    U = np.zeros((D, D))
    for b in range(D):
        flip = (b >> (n_qubits - 1 - control)) & 1
        U[b ^ (flip << (n_qubits - 1 - target)), b] = 1
    return U


@dataclass(frozen=True)
class Angles:
    theta1: float
    theta2: float
    theta3: float


UQCM_ANGLES = Angles(math.pi / 8, -math.asin(math.sqrt(0.5 - math.sqrt(2) / 3)), math.pi / 8)
_t = math.asin(math.sqrt(0.5 - 1 / (2 * math.sqrt(3))))
PHASE_ANGLES = Angles(_t, -math.asin(math.sqrt(0.5 - math.sqrt(3) / 4)), _t)


def preparation(angles: Angles) -> np.ndarray:
    """R_2(t3) CNOT_32 R_3(t2) CNOT_23 R_2(t1) |00>_{a2 a3}, as a 4-vector."""
    s = np.array([1, 0, 0, 0], dtype=complex)
    for U in (single(rotation(angles.theta1), 0, 2), cnot(0, 1), single(rotation(angles.theta2), 1, 2),
              cnot(1, 0), single(rotation(angles.theta3), 0, 2)):
        s = U @ s
    return s


def copy_stage() -> np.ndarray:
    """CNOT_{a3 a1} CNOT_{a2 a1} CNOT_{a1 a3} CNOT_{a1 a2}."""
    return cnot(2, 0, 3) @ cnot(1, 0, 3) @ cnot(0, 2, 3) @ cnot(0, 1, 3)


def cloning_circuit(theta1: float, theta2: float, theta3: float, psi) -> np.ndarray:
    """Output state on a1 a2 a3."""
    v = np.asarray(getattr(psi, "amps", psi), dtype=complex).ravel()
    if v.size != 2 or abs(np.linalg.norm(v) - 1) > 1e-10:
        raise ValueError("psi must be a normalized qubit")
    prep = preparation(Angles(theta1, theta2, theta3))
    return copy_stage() @ np.kron(v, prep)


def copies(out: np.ndarray) -> np.ndarray:
    """Joint density matrix of a2 a3."""
    return ptrace(np.outer(out, out.conj()), (2, 2, 2), [1, 2])


def copy_fidelities(out: np.ndarray, psi) -> tuple[float, float]:
    v = np.asarray(getattr(psi, "amps", psi), dtype=complex).ravel()
    rho = np.outer(out, out.conj())
    return tuple(float(np.vdot(v, ptrace(rho, (2, 2, 2), [k]) @ v).real) for k in (1, 2))


def operator_copy_relations() -> list[tuple[str, float]]:
    """Residuals of the four CNOT conjugation identities (bit flips forwards, phase flips backwards)."""
    C = cnot(0, 1)
    I = np.eye(2)
    pairs = [
        ("X1 -> X1 X2", np.kron(SIGMA_X, I), np.kron(SIGMA_X, SIGMA_X)),
        ("Z1 -> Z1", np.kron(SIGMA_Z, I), np.kron(SIGMA_Z, I)),
        ("X2 -> X2", np.kron(I, SIGMA_X), np.kron(I, SIGMA_X)),
        ("Z2 -> Z1 Z2", np.kron(I, SIGMA_Z), np.kron(SIGMA_Z, SIGMA_Z)),
    ]
    return [(name, float(np.abs(C @ A @ C - B).max())) for name, A, B in pairs]
