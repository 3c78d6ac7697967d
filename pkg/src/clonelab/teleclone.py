"""Telecloning: a Bell measurement on input and port plus local recovery at the receivers.

Measurements are simulated by enumerating every outcome.  Registers are laid
out as X (input), P (port), then the resource's remaining parties in order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import (
    bell_state,
    check_dim,
    gen_pauli,
    omega,
    phi_plus,
    ptrace,
    sym_dim,
    sym_isometry,
    von_neumann_entropy,
)
from .phasecov import qudit_phase_optimal
from .uqcm import werner_output


def _vec(psi) -> np.ndarray:
    v = np.asarray(getattr(psi, "amps", psi), dtype=complex).ravel()
    if abs(np.linalg.norm(v) - 1) > 1e-10:
        raise ValueError("input must be normalized")
    return v


def shift_down(d: int, m: int, phase_sign: int, n: int) -> np.ndarray:
    """sum_j w^{sign j n} |j><j+m|."""
    w = omega(d)
    U = np.zeros((d, d), dtype=complex)
    for j in range(d):
        U[j, (j + m) % d] = w ** ((phase_sign * j * n) % d)
    return U


@dataclass(frozen=True)
class BellBranch:
    m: int
    n: int
    probability: float
    state: np.ndarray  # normalized receiver-side pure state after correction


def bell_branches(psi: np.ndarray, resource: np.ndarray, d: int) -> list[tuple[int, int, float, np.ndarray]]:
    """Project X P onto each |Phi_mn>; returns (m, n, prob, normalized remainder)."""
    rest = resource.size // d
    R = resource.reshape(d, rest)
    out = []
    for m in range(d):
        for n in range(d):
            B = bell_state(d, m, n).amps.reshape(d, d)
            # <Phi_mn|_{XP} (psi (x) xi)
            branch = np.einsum("xp,x,pr->r", B.conj(), psi, R)
            prob = float(np.vdot(branch, branch).real)
            out.append((m, n, prob, branch / math.sqrt(prob) if prob > 1e-15 else branch))
    return out


# -- symmetric 1 -> M --------------------------------------------------------


def symmetric_resource(d: int, M: int) -> np.ndarray:
    """d[M]^{-1/2} sum_k |xi_k>_{PA} |xi_k>_C on P, M-1 ancillas, M receivers."""
    check_dim(d ** (2 * M + 1))
    S = sym_isometry(d, M)
    return (S @ S.T).ravel() / math.sqrt(sym_dim(d, M))


def lruo_symmetric(d: int, M: int, m: int, n: int) -> np.ndarray:
    """U^A on each of the M-1 ancillas, U^C on each receiver."""
    UA = shift_down(d, m, -1, n)
    UC = shift_down(d, m, 1, n)
    U = np.eye(1)
    for _ in range(M - 1):
        U = np.kron(U, UA)
    for _ in range(M):
        U = np.kron(U, UC)
    return U


@dataclass(frozen=True)
class TelecloneResult:
    branches: tuple[BellBranch, ...]
    receivers: tuple[np.ndarray, ...]  # rho_C per branch, M receivers jointly
    oracle: np.ndarray

    @property
    def max_deviation(self) -> float:
        return max(float(np.abs(r - self.oracle).max()) for r in self.receivers)


def teleclone_channel(d: int, M: int, psi) -> TelecloneResult:
    """Run symmetric 1 -> M telecloning on every Bell outcome and compare with the Werner output."""
    v = _vec(psi)
    if v.size != d:
        raise ValueError("input dimension mismatch")
    xi = symmetric_resource(d, M)
    dims = (d,) * (2 * M - 1)
    branches, rhos = [], []
    for m, n, prob, st in bell_branches(v, xi, d):
        st = lruo_symmetric(d, M, m, n) @ st
        rho = ptrace(np.outer(st, st.conj()), dims, range(M - 1, 2 * M - 1))
        branches.append(BellBranch(m, n, prob, st))
        rhos.append(rho)
    return TelecloneResult(tuple(branches), tuple(rhos), werner_output(v, 1, M, d))


# -- asymmetric 1 -> 2 ---------------------------------------------------------


def asym_teleclone_1to2(p: float, q: float, d: int = 2) -> tuple[float, float]:
    """(F_B, F_C) = ((1+(d-1)p^2), (1+(d-1)q^2)) / (1+(d-1)(p^2+q^2))."""
    if p < 0 or q < 0 or abs(p + q - 1) > 1e-12:
        raise ValueError("need p, q >= 0 with p + q = 1")
    den = 1 + (d - 1) * (p * p + q * q)
    return (1 + (d - 1) * p * p) / den, (1 + (d - 1) * q * q) / den


def asym_phi(d: int, p: float, q: float) -> np.ndarray:
    """|phi_j> on (C1, C2, A) as rows j: a|j>|Phi+> + b|j>_{C2}|Phi+>_{C1 A}, a:b = p:q."""
    s = math.sqrt(p * p + q * q + 2 * p * q / d)
    a, b = p / s, q / s
    ph = phi_plus(d).amps.reshape(d, d)
    out = np.zeros((d, d ** 3), dtype=complex)
    for j in range(d):
        e = np.eye(d)[j]
        t = a * np.einsum("x,ya->xya", e, ph) + b * np.einsum("y,xa->xya", e, ph)
        out[j] = t.ravel()
    return out


def lruo_asym(d: int, m: int, n: int) -> np.ndarray:
    """sum w^{n(j1+j2-j3)} |j1 j2 j3><j1+m, j2+m, j3+m| on (C1, C2, A)."""
    return np.kron(np.kron(shift_down(d, m, 1, n), shift_down(d, m, 1, n)), shift_down(d, m, -1, n))


def simulate_asym_teleclone(p: float, q: float, d: int, psi) -> list[tuple[int, int, float, float, float]]:
    """Per outcome (m, n, prob, F_B, F_C) from the full protocol."""
    v = _vec(psi)
    phi = asym_phi(d, p, q)
    xi = (np.eye(d)[:, :, None] * phi[None, :, :]).sum(axis=1).ravel() / math.sqrt(d)
    out = []
    for m, n, prob, st in bell_branches(v, xi, d):
        st = lruo_asym(d, m, n) @ st
        rho = np.outer(st, st.conj())
        FB = float(np.vdot(v, ptrace(rho, (d, d, d), [0]) @ v).real)
        FC = float(np.vdot(v, ptrace(rho, (d, d, d), [1]) @ v).real)
        out.append((m, n, prob, FB, FC))
    return out


# -- economical phase-covariant 1 -> 2 --------------------------------------------


def econ_coefficients(d: int) -> np.ndarray:
    """x_0 = X(d), x_{j>0} = Y(d) with D = sqrt(d^2 + 4d - 4)."""
    D = math.sqrt(d * d + 4 * d - 4)
    X = math.sqrt(4 * (d - 1) / (D * (D + d - 2)))
    Y = math.sqrt((d * d + (d - 2) * D) / (D * (D + d - 2) * (d - 1)))
    return np.array([X] + [Y] * (d - 1))


def econ_phi(d: int) -> np.ndarray:
    """Rows: |phi_0> = |00>, |phi_j> = (|j0> + |0j>)/sqrt2."""
    out = np.zeros((d, d * d))
    out[0, 0] = 1
    for j in range(1, d):
        out[j, j * d] = out[j, j] = 1 / math.sqrt(2)
    return out


def econ_fidelity_formula(x: np.ndarray) -> float:
    """(1/d)[1 + sqrt2 x_0 sum_{j>=1} x_j + sum_{1<=i<j} x_i x_j]."""
    d = x.size
    tail = x[1:]
    pairs = (tail.sum() ** 2 - (tail ** 2).sum()) / 2
    return float((1 + math.sqrt(2) * x[0] * tail.sum() + pairs) / d)


@dataclass(frozen=True)
class EconTeleclone:
    x: np.ndarray
    success_probability: float
    fidelity: float  # conditional single-clone fidelity on success
    branch_fidelities: dict  # (m, n) -> (prob, F clone 1, F clone 2)
    entropy: float


def econ_phase_teleclone(d: int, phases=None, correct_both: bool = True) -> EconTeleclone:
    """Run the protocol on (1/sqrt d) sum e^{i theta_j}|j>; m = 0 counts as success.

    On success the receivers apply Z^n to both clones.  ``correct_both=False``
    applies it to the first clone only.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    if phases is None:
        phases = np.linspace(0.3, 2.1, d)
    v = np.exp(1j * np.asarray(phases, dtype=float)) / math.sqrt(d)
    x = econ_coefficients(d)
    phi = econ_phi(d)
    xi = np.einsum("j,jk,jc->kc", x, np.eye(d), phi).ravel()
    table = {}
    success, F_success = 0.0, 0.0
    for m, n, prob, st in bell_branches(v, xi, d):
        Z = gen_pauli(d, 0, n)
        U = np.kron(Z, Z) if correct_both else np.kron(Z, np.eye(d))
        st = U @ st
        rho = np.outer(st, st.conj())
        F1 = float(np.vdot(v, ptrace(rho, (d, d), [0]) @ v).real)
        F2 = float(np.vdot(v, ptrace(rho, (d, d), [1]) @ v).real)
        table[(m, n)] = (prob, F1, F2)
        if m == 0:
            success += prob
            F_success += prob * F1
    ent = von_neumann_entropy(np.diag(x ** 2))
    return EconTeleclone(x, success, F_success / success, table, ent)


def econ_optimal_value(d: int) -> float:
    return qudit_phase_optimal(d)


# -- local copying of commuting Bell states ------------------------------------


def cnot_qudit(d: int) -> np.ndarray:
    """|a>|b> -> |a>|b+a>."""
    U = np.zeros((d * d, d * d))
    for a in range(d):
        for b in range(d):
            U[a * d + (b + a) % d, a * d + b] = 1
    return U


def local_clone_bell(m: int, d: int) -> tuple[np.ndarray, np.ndarray]:
    """Bilateral CNOT on (X^m (x) I)|Phi+> with a |Phi+> blank.

    Registers A1 B1 A2 B2; Alice's CNOT acts A1 -> A2 and Bob's B1 -> B2.
    Returns (output, expected |Psi_m>^2), both on A1 B1 A2 B2.
    """
    check_dim(d ** 4)
    pair = np.kron(gen_pauli(d, m, 0), np.eye(d)) @ phi_plus(d).amps
    state = np.kron(pair, phi_plus(d).amps).reshape(d, d, d, d)
    C = cnot_qudit(d).reshape(d, d, d, d)
    state = np.einsum("acxz,xbzd->abcd", C, state)  # A1, A2
    state = np.einsum("bdyw,aycw->abcd", C, state)  # B1, B2
    return state.ravel(), np.kron(pair, pair)
