"""Symmetric universal cloners for qubits and qudits.

Four independent routes to the same output are provided so they can be
checked against each other:

* ``werner_clone``   -- projector form  (d[N]/d[M]) s_M (psi^N x I^(M-N)) s_M
* ``fan_clone``      -- explicit isometry on occupation states
* ``unified_clone``  -- symmetrize the inputs with halves of |Phi+> pairs
* ``gisin_massar``   -- qubit transformation written on |(M-j)psi, j psi_perp>
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .linalg import (
    DensityMatrix,
    OccupationVector,
    StateVector,
    basis,
    check_dim,
    fidelity,
    ket,
    phi_plus,
    ptrace,
    sym_basis,
    sym_dim,
    sym_embed,
    sym_isometry,
    symmetrizer,
)


@dataclass(frozen=True)
class CloneSpec:
    d: int
    N: int
    M: int
    variant: str = "werner"

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("d must be >= 2")
        if not 1 <= self.N <= self.M:
            raise ValueError(f"need 1 <= N <= M, got N={self.N}, M={self.M}")
        if self.variant not in {"gisin-massar", "werner", "fan", "unified"}:
            raise ValueError(f"unknown variant {self.variant!r}")


@dataclass(frozen=True)
class CloneReport:
    joint_out: DensityMatrix
    per_copy: DensityMatrix
    F1: float
    FM: float
    shrinking: float
    ancilla: DensityMatrix | None = None


# -- closed forms ---------------------------------------------------------


def universal_fidelity(d: int, N: int, M: int) -> float:
    """Optimal single-copy fidelity of the symmetric N -> M cloner."""
    return (N * (M + d) + M - N) / (M * (N + d))


def qubit_fidelity(N: int, M: int) -> float:
    return (M * (N + 1) + N) / (M * (N + 2))


def global_fidelity(d: int, N: int, M: int) -> float:
    return sym_dim(d, N) / sym_dim(d, M)


def shrinking_from_fidelity(F: float, d: int) -> float:
    return (d * F - 1) / (d - 1)


def fidelity_L(d: int, N: int, M: int, L: int) -> float:
    """Fidelity of L of the M clones jointly against psi^L."""
    if not 1 <= L <= M:
        raise ValueError("need 1 <= L <= M")
    if not 1 <= N <= M:
        raise ValueError("need 1 <= N <= M")
    f = math.factorial
    pre = f(d + N - 1) * f(M - N) * f(M - L) / (f(d + M - 1) * f(M) * f(N))
    s = 0
    for m1 in range(max(L, N), M + 1):
        s += f(M - m1 + d - 2) * f(m1) ** 2 / (
            f(m1 - L) * f(m1 - N) * f(d - 2) * f(M - m1)
        )
    return pre * s


def fidelity_L_single_input(d: int, M: int, L: int) -> float:
    """The N = 1 specialization of ``fidelity_L`` in closed form."""
    f = math.factorial
    return f(L) * f(d) * (L * (d + M) + M - L) / (f(d + L) * M)


# -- helpers --------------------------------------------------------------


def _pure(psi) -> np.ndarray:
    v = np.asarray(psi.amps if isinstance(psi, StateVector) else psi, dtype=complex).ravel()
    n = np.linalg.norm(v)
    if abs(n - 1) > 1e-10:
        raise ValueError(f"input state not normalized (|psi| = {n})")
    return v


def _power(v: np.ndarray, N: int) -> np.ndarray:
    out = np.array([1.0 + 0j])
    for _ in range(N):
        out = np.kron(out, v)
    return out


def _report(rho_copies: np.ndarray, d: int, M: int, v: np.ndarray, anc: np.ndarray | None = None) -> CloneReport:
    dims = (d,) * M
    joint = DensityMatrix(rho_copies, dims)
    rho1 = ptrace(rho_copies, dims, [0])
    per = DensityMatrix(rho1, (d,))
    F1 = fidelity(per, v)
    FM = fidelity(joint, _power(v, M))
    return CloneReport(
        joint, per, F1, FM, shrinking_from_fidelity(F1, d),
        None if anc is None else DensityMatrix(anc, (anc.shape[0],)),
    )


def reduced_copy(rho: DensityMatrix, k: int) -> DensityMatrix:
    return DensityMatrix(ptrace(rho.mat, rho.dims, [k]), (rho.dims[k],))


# -- Buzek-Hillery --------------------------------------------------------


def buzek_hillery_unitary_columns() -> np.ndarray:
    """8x2 isometry: inputs |0>,|1> (blank and ancilla in |0>) -> copy1, copy2, R."""
    s23, s16 = math.sqrt(2 / 3), math.sqrt(1 / 6)
    col0 = np.zeros(8)
    col1 = np.zeros(8)
    # index = 4*q1 + 2*q2 + r
    col0[0b000] = s23
    col0[0b011] = s16
    col0[0b101] = s16
    col1[0b111] = s23
    col1[0b010] = s16
    col1[0b100] = s16
    return np.column_stack([col0, col1]).astype(complex)


def buzek_hillery_1to2(psi) -> CloneReport:
    v = _pure(psi)
    if v.size != 2:
        raise ValueError("Buzek-Hillery cloner takes a qubit")
    out = buzek_hillery_unitary_columns() @ v
    rho = np.outer(out, out.conj())
    copies = ptrace(rho, (2, 2, 2), [0, 1])
    anc = ptrace(rho, (2, 2, 2), [2])
    return _report(copies, 2, 2, v, anc)


# -- Gisin-Massar ---------------------------------------------------------


def perp(psi) -> np.ndarray:
    """psi_perp = b*|0> - a*|1> for psi = a|0> + b|1>."""
    a, b = _pure(psi)
    return np.array([np.conj(b), -np.conj(a)])


def gm_alpha(N: int, M: int, j: int) -> float:
    f = math.factorial
    return math.sqrt((N + 1) / (M + 1)) * math.sqrt(
        f(M - N) * f(M - j) / (f(M - N - j) * f(M))
    )


def _sym_state_in_basis(u: np.ndarray, w: np.ndarray, k_u: int, k_w: int) -> np.ndarray:
    """Normalized symmetric state with k_u copies of u and k_w copies of w (u, w orthonormal)."""
    occ = OccupationVector((k_u, k_w))
    e = sym_embed(occ).amps
    # rotate each qubit so |0> -> u, |1> -> w
    Uloc = np.column_stack([u, w])
    n = k_u + k_w
    t = e.reshape((2,) * n)
    for ax in range(n):
        t = np.moveaxis(np.tensordot(Uloc, t, axes=([1], [ax])), 0, ax)
    return t.ravel()


def gisin_massar(psi, N: int, M: int) -> CloneReport:
    """N identical qubits -> M clones, ancilla register of dimension M-N+1."""
    if M < N:
        raise ValueError("M must be >= N")
    v = _pure(psi)
    if v.size != 2:
        raise ValueError("Gisin-Massar cloner takes qubits")
    check_dim(2 ** M * (M - N + 1))
    w = perp(v)
    K = M - N + 1
    out = np.zeros((2 ** M, K), dtype=complex)
    for j in range(K):
        out[:, j] = gm_alpha(N, M, j) * _sym_state_in_basis(v, w, M - j, j)
    rho = out @ out.conj().T
    anc = out.T @ out.conj()
    return _report(rho, 2, M, v, anc)


# -- Werner projector form --------------------------------------------------


def werner_output(psi, N: int, M: int, d: int) -> np.ndarray:
    v = _pure(psi)
    if v.size != d:
        raise ValueError(f"input has dimension {v.size}, expected {d}")
    if M < N:
        raise ValueError("M must be >= N")
    check_dim(d ** M)
    S = symmetrizer(d, M)
    vN = _power(v, N)
    # psi^N x I^(M-N), built as a sum-free Kronecker product
    inner = np.kron(np.outer(vN, vN.conj()), np.eye(d ** (M - N)))
    return (sym_dim(d, N) / sym_dim(d, M)) * (S @ inner @ S)


def werner_clone(psi, N: int, M: int, d: int) -> CloneReport:
    rho = werner_output(psi, N, M, d)
    return _report(rho, d, M, _pure(psi))


# -- Fan isometry -----------------------------------------------------------


def fan_alpha(n: OccupationVector, j: OccupationVector, M: int) -> float:
    f = math.factorial
    d, N = n.d, n.N
    pre = f(M - N) * f(N + d - 1) / f(M + d - 1)
    prod = 1.0
    for nk, jk in zip(n.counts, j.counts):
        prod *= f(nk + jk) / (f(nk) * f(jk))
    return math.sqrt(pre * prod)


@lru_cache(maxsize=64)
def fan_isometry(d: int, N: int, M: int) -> np.ndarray:
    """Matrix from sym(N) to sym(M) x ancilla(d[M-N]), columns in ``sym_basis`` order.

    Output rows are indexed ``i_M * d[M-N] + j`` with i_M the index of n+j in
    ``sym_basis(d, M)`` and j the ancilla label from ``sym_basis(d, M-N)``.
    """
    inB = sym_basis(d, N)
    outB = {n.counts: i for i, n in enumerate(sym_basis(d, M))}
    ancB = sym_basis(d, M - N)
    K = len(ancB)
    V = np.zeros((len(outB) * K, len(inB)))
    for c, n in enumerate(inB):
        for a, j in enumerate(ancB):
            V[outB[(n + j).counts] * K + a, c] = fan_alpha(n, j, M)
    V.setflags(write=False)
    return V


def sym_amplitudes(psi, N: int) -> np.ndarray:
    """Coefficients of psi^N in the occupation basis: sqrt(N!/prod n!) prod x^n."""
    v = _pure(psi)
    f = math.factorial
    out = []
    for n in sym_basis(v.size, N):
        c = math.sqrt(f(N) / math.prod(f(k) for k in n.counts))
        out.append(c * np.prod([x ** k for x, k in zip(v, n.counts)]))
    return np.array(out, dtype=complex)


def fan_clone_state(nvec_or_amps, N: int, M: int, d: int) -> np.ndarray:
    """Output amplitudes as a (d[M], d[M-N]) array (clones x ancilla)."""
    c = np.asarray(nvec_or_amps, dtype=complex)
    out = fan_isometry(d, N, M) @ c
    return out.reshape(sym_dim(d, M), sym_dim(d, M - N))


def fan_clone(nvec, M: int, psi=None) -> CloneReport:
    """Clone an occupation basis state, or psi^N when ``psi`` is given.

    ``nvec`` fixes (d, N).  With ``psi`` the input is the superposition
    psi^N = sum_n c_n |n>; otherwise it is |n> itself and fidelities are taken
    against ``sym_embed(n)`` (single-copy fidelity is then reported as NaN).
    """
    n = nvec if isinstance(nvec, OccupationVector) else OccupationVector(tuple(nvec))
    d, N = n.d, n.N
    if M < N:
        raise ValueError("M must be >= N")
    check_dim(d ** M)
    if psi is not None:
        c = sym_amplitudes(psi, N)
    else:
        c = np.array([1.0 if b.counts == n.counts else 0.0 for b in sym_basis(d, N)])
    A = fan_clone_state(c, N, M, d)
    rho_sym = A @ A.conj().T
    anc = A.T @ A.conj()
    Vs = sym_isometry(d, M)
    rho = Vs @ rho_sym @ Vs.conj().T
    if psi is not None:
        return _report(rho, d, M, _pure(psi), anc)
    dims = (d,) * M
    joint = DensityMatrix(rho, dims)
    per = DensityMatrix(ptrace(rho, dims, [0]), (d,))
    return CloneReport(joint, per, float("nan"), float("nan"), float("nan"),
                       DensityMatrix(anc, (anc.shape[0],)))


# -- unified construction ---------------------------------------------------


def unified_clone_state(psi, N: int, M: int, d: int) -> np.ndarray:
    """(s_M x I) psi^N |Phi+>^(M-N), normalized, reshaped to (d^M, d^(M-N))."""
    v = _pure(psi)
    K = M - N
    check_dim(d ** (M + K))
    pair = phi_plus(d).amps.reshape(d, d)
    t = _power(v, N).reshape((d,) * N) if N else np.array(1.0)
    # append pairs as (clone_k, anc_k) then sort axes: clones first, ancillas last
    for _ in range(K):
        t = np.multiply.outer(t, pair)
    order = list(range(N)) + [N + 2 * k for k in range(K)] + [N + 2 * k + 1 for k in range(K)]
    t = t.transpose(order).reshape(d ** M, d ** K)
    out = symmetrizer(d, M) @ t
    return out / np.linalg.norm(out)


def unified_clone(psi, N: int, M: int, d: int) -> CloneReport:
    A = unified_clone_state(psi, N, M, d)
    rho = A @ A.conj().T
    anc = A.T @ A.conj()
    return _report(rho, d, M, _pure(psi), anc)


# -- mixed-state qubit cloning ----------------------------------------------


def mixed_beta(N: int, M: int, m: int, k: int) -> float:
    f = math.factorial
    return math.sqrt(f(M - N) * f(N + 1) / f(M + 1)) * math.sqrt(
        f(M - m - k) / (f(N - m) * f(M - N - k))
    ) * math.sqrt(f(m + k) / (f(m) * f(k)))


def twisted_sym_state(n0: int, n1: int) -> np.ndarray:
    """|m,n> with its c-th component (lexicographic) multiplied by omega^c.

    omega = exp(2 pi i m! n! / (m+n)!), so the phases run over the roots of
    unity of order C(m+n, n) and the result is orthogonal to |m,n>.
    """
    e = sym_embed(OccupationVector((n0, n1))).amps
    idx = np.flatnonzero(np.abs(e) > 0)
    C = idx.size
    w = np.exp(2j * np.pi / C)
    out = np.zeros_like(e)
    out[idx] = e[idx] * w ** np.arange(C)
    return out


def mixed_clone_map(N: int, M: int) -> np.ndarray:
    """Isometry (2^M * K) x 2^N acting on the full N-qubit input space.

    The symmetric part follows the beta_mk transformation.  For N = 2 the
    antisymmetric (singlet) direction is sent to the twisted states as well.
    """
    if N > 2:
        raise ValueError("the explicit mixed-state map is only defined for N <= 2")
    K = M - N + 1
    out = np.zeros((2 ** M, K, 2 ** N), dtype=complex)
    for m in range(N + 1):
        src = sym_embed(OccupationVector((N - m, m))).amps
        img = np.zeros((2 ** M, K), dtype=complex)
        for k in range(M - N + 1):
            img[:, k] = mixed_beta(N, M, m, k) * sym_embed(OccupationVector((M - m - k, m + k))).amps
        out += np.einsum("ak,b->akb", img, src.conj())
    if N == 2:
        src = twisted_sym_state(1, 1)
        img = np.zeros((2 ** M, K), dtype=complex)
        for k in range(M - N + 1):
            img[:, k] = mixed_beta(N, M, 1, k) * twisted_sym_state(M - k - 1, k + 1)
        out += np.einsum("ak,b->akb", img, src.conj())
    return out.reshape(2 ** M * K, 2 ** N)


def mixed_clone(rho, N: int, M: int) -> CloneReport:
    """Clone N copies of a qubit density matrix into M.

    N <= 2 uses the explicit maps (including the singlet branch).  For N > 2
    only the symmetric beta_mk map is available, which is exact for pure
    inputs; mixed inputs are rejected there.
    """
    R = np.asarray(rho.mat if isinstance(rho, DensityMatrix) else rho, dtype=complex)
    if R.shape != (2, 2):
        raise ValueError("mixed_clone takes a single-qubit density matrix")
    if M < N:
        raise ValueError("M must be >= N")
    check_dim(2 ** M * (M - N + 1))
    K = M - N + 1
    if N <= 2:
        inp = R
        for _ in range(N - 1):
            inp = np.kron(inp, R)
        W = mixed_clone_map(N, M)
        full = W @ inp @ W.conj().T
    else:
        lam, vecs = np.linalg.eigh(R)
        if np.sort(lam)[0] > 1e-10:
            raise ValueError("N > 2 mixed inputs need the antisymmetric branches, which are not constructed")
        v = vecs[:, np.argmax(lam)]
        c = np.array([sym_amplitudes(v, N)[m] for m in range(N + 1)])
        out = np.zeros((2 ** M, K), dtype=complex)
        for m in range(N + 1):
            for k in range(K):
                out[:, k] += c[m] * mixed_beta(N, M, m, k) * sym_embed(OccupationVector((M - m - k, m + k))).amps
        return _mixed_report(out @ out.conj().T, R, M)
    full = full.reshape(2 ** M, K, 2 ** M, K)
    rho_c = np.einsum("akbk->ab", full)
    return _mixed_report(rho_c, R, M)


def _mixed_report(rho_c: np.ndarray, R: np.ndarray, M: int) -> CloneReport:
    dims = (2,) * M
    joint = DensityMatrix(rho_c, dims)
    per = DensityMatrix(ptrace(rho_c, dims, [0]), (2,))
    # eta from the Bloch vectors: r_out = eta r_in
    paulis = [np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.diag([1, -1])]
    r_in = np.array([np.trace(R @ P).real for P in paulis])
    r_out = np.array([np.trace(per.mat @ P).real for P in paulis])
    nr = np.linalg.norm(r_in)
    eta = float(r_in @ r_out / nr ** 2) if nr > 1e-12 else float("nan")
    lam, vecs = np.linalg.eigh(R)
    top = vecs[:, np.argmax(lam)]
    F1 = fidelity(per, top)
    return CloneReport(joint, per, F1, float("nan"), eta)


# -- universal NOT ----------------------------------------------------------


SIGMA_Y = np.array([[0, -1j], [1j, 0]])


@dataclass(frozen=True)
class UniversalNot:
    """Approximate spin flip from N copies: N/(N+2)|psi_perp><psi_perp| + I/(N+2)."""

    N: int

    @property
    def fidelity(self) -> float:
        return (self.N + 1) / (self.N + 2)

    def __call__(self, psi) -> DensityMatrix:
        w = perp(psi)
        N = self.N
        return DensityMatrix(N / (N + 2) * np.outer(w, w.conj()) + np.eye(2) / (N + 2), (2,))

    def simulate(self, psi, M: int | None = None) -> DensityMatrix:
        """Read the flip off one ancilla qubit of the unified N -> M cloner.

        The ancilla carries psi* with the same shrinking; sigma_y turns that
        into psi_perp.
        """
        N = self.N
        M = N + 1 if M is None else M
        A = unified_clone_state(psi, N, M, 2)
        anc = A.T @ A.conj()
        one = ptrace(anc, (2,) * (M - N), [0])
        return DensityMatrix(SIGMA_Y @ one @ SIGMA_Y, (2,))


def universal_not(N: int) -> UniversalNot:
    if N < 1:
        raise ValueError("N must be >= 1")
    return UniversalNot(N)


# -- dispatcher ---------------------------------------------------------------


def clone(spec: CloneSpec, psi) -> CloneReport:
    fn: dict[str, Callable[[], CloneReport]] = {
        "gisin-massar": lambda: gisin_massar(psi, spec.N, spec.M),
        "werner": lambda: werner_clone(psi, spec.N, spec.M, spec.d),
        "fan": lambda: fan_clone(OccupationVector((spec.N,) + (0,) * (spec.d - 1)), spec.M, psi=psi),
        "unified": lambda: unified_clone(psi, spec.N, spec.M, spec.d),
    }
    return fn[spec.variant]()
