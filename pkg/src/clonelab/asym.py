"""Asymmetric universal cloners.

Each family has a closed-form fidelity function and a brute-force simulation
of the underlying transformation; tests compare the two.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import (
    DensityMatrix,
    StateVector,
    bell_state,
    check_dim,
    fidelity,
    gen_pauli,
    permutation_operator,
    phi_plus,
    ptrace,
)

NORM_TOL = 1e-10


@dataclass(frozen=True)
class AsymParams:
    d: int
    family: str
    coefficients: tuple

    def __post_init__(self):
        if self.family not in {"ab", "cerf", "1to3", "1to4", "perm"}:
            raise ValueError(f"unknown family {self.family!r}")


@dataclass(frozen=True)
class AsymReport:
    fidelities: tuple[float, ...]
    reduced: tuple[DensityMatrix, ...]

    @property
    def F_A(self) -> float:
        return self.fidelities[0]

    @property
    def F_B(self) -> float:
        return self.fidelities[1]


def _vec(psi) -> np.ndarray:
    v = np.asarray(psi.amps if isinstance(psi, StateVector) else psi, dtype=complex).ravel()
    if abs(np.linalg.norm(v) - 1) > 1e-10:
        raise ValueError("input state not normalized")
    return v


def _reduce_all(t: np.ndarray, d: int, n_out: int, psi: np.ndarray) -> AsymReport:
    """Single-site reductions of the first ``n_out`` subsystems of a pure tensor."""
    rhos, Fs = [], []
    for i in range(n_out):
        r = np.moveaxis(t, i, 0).reshape(d, -1)
        rho = DensityMatrix(r @ r.conj().T, (d,))
        rhos.append(rho)
        Fs.append(fidelity(rho, psi))
    return AsymReport(tuple(Fs), tuple(rhos))


# -- 1 -> 2 --------------------------------------------------------------


def ab_norm(a: float, b: float, d: int) -> float:
    return a * a + b * b + 2 * a * b / d


def asym_1to2_fidelities(a: float, b: float, d: int) -> tuple[float, float]:
    return 1 - b * b * (d - 1) / d, 1 - a * a * (d - 1) / d


def asym_1to2(psi, a: float, b: float, d: int) -> AsymReport:
    """a|psi>_A|Phi+>_BR + b|psi>_B|Phi+>_AR, subsystems ordered A, B, R."""
    if abs(ab_norm(a, b, d) - 1) > NORM_TOL:
        raise ValueError(f"a^2 + b^2 + 2ab/d = {ab_norm(a, b, d)} != 1")
    v = _vec(psi)
    if v.size != d:
        raise ValueError("dimension mismatch")
    ph = phi_plus(d).amps.reshape(d, d)
    t = a * np.einsum("a,br->abr", v, ph) + b * np.einsum("b,ar->abr", v, ph)
    n = np.linalg.norm(t)
    if abs(n - 1) > 1e-9:
        raise ValueError(f"transformation output has norm {n}")
    return _reduce_all(t, d, 2, v)


def tradeoff_gap(FA: float, FB: float) -> float:
    """sqrt((1-F_A)(1-F_B)) - (F_A + F_B - 3/2); zero on the optimal qubit frontier."""
    return math.sqrt(max((1 - FA) * (1 - FB), 0.0)) - (FA + FB - 1.5)


def qudit_tradeoff(FA: float, FB: float, d: int) -> float:
    """Left side of the qudit trade-off inequality (<= 1, equality when optimal)."""
    u = math.sqrt(max((d + 1) * FA - 1, 0.0))
    w = math.sqrt(max((d + 1) * FB - 1, 0.0))
    return (u + w) ** 2 / (2 * (d + 1)) + (u - w) ** 2 / (2 * (d - 1))


def ab_from_FA(FA: float, d: int) -> tuple[float, float]:
    """Non-negative (a, b) on the optimal family with the given F_A."""
    b = math.sqrt(max((1 - FA) * d / (d - 1), 0.0))
    # a^2 + (2b/d) a + b^2 - 1 = 0
    a = -b / d + math.sqrt(max(b * b / d ** 2 - b * b + 1, 0.0))
    return a, b


# -- Pauli-channel (Cerf) form ----------------------------------------------


def cerf_dual(a: np.ndarray) -> np.ndarray:
    """b_{m,n} = (1/d) sum exp(2 pi i (n m' - m n')/d) a_{m',n'}."""
    a = np.asarray(a, dtype=complex)
    d = a.shape[0]
    k = np.arange(d)
    w = np.exp(2j * np.pi / d)
    # phase[m, n, m', n'] = w^(n m' - m n')
    P = w ** ((np.einsum("n,p->np", k, k)[None, :, :, None] - np.einsum("m,q->mq", k, k)[:, None, None, :]) % d)
    return np.einsum("mnpq,pq->mn", P, a) / d


def cerf_state(psi, a: np.ndarray) -> np.ndarray:
    """sum a_{mn} U_{mn}|psi>_A |B_{m,-n}>_{BR} as a (d, d, d) tensor (A, B, R)."""
    a = np.asarray(a, dtype=complex)
    d = a.shape[0]
    v = _vec(psi)
    t = np.zeros((d, d, d), dtype=complex)
    for m in range(d):
        for n in range(d):
            if a[m, n] == 0:
                continue
            B = bell_state(d, m, (-n) % d).amps.reshape(d, d)
            t += a[m, n] * np.einsum("a,br->abr", gen_pauli(d, m, n) @ v, B)
    return t


def pauli_mix(psi, weights: np.ndarray) -> np.ndarray:
    """sum |w_mn|^2 U_mn |psi><psi| U_mn^dagger."""
    weights = np.asarray(weights)
    d = weights.shape[0]
    v = _vec(psi)
    P = np.outer(v, v.conj())
    out = np.zeros((d, d), dtype=complex)
    for m in range(d):
        for n in range(d):
            U = gen_pauli(d, m, n)
            out += abs(weights[m, n]) ** 2 * (U @ P @ U.conj().T)
    return out


def cerf_channel(psi, a: np.ndarray) -> tuple[DensityMatrix, DensityMatrix, np.ndarray]:
    """Simulated (rho_A, rho_C, b) for amplitude matrix ``a``; C is the copy."""
    a = np.asarray(a, dtype=complex)
    if abs(np.linalg.norm(a) - 1) > NORM_TOL:
        raise ValueError(f"amplitude matrix has norm {np.linalg.norm(a)}")
    d = a.shape[0]
    check_dim(d ** 3)
    t = cerf_state(psi, a)
    rA = t.reshape(d, -1)
    rC = np.moveaxis(t, 1, 0).reshape(d, -1)
    return (DensityMatrix(rA @ rA.conj().T, (d,)),
            DensityMatrix(rC @ rC.conj().T, (d,)),
            cerf_dual(a))


def cerf_fidelity(a: np.ndarray) -> float:
    """F_A = sum_n |a_{0n}|^2."""
    return float(np.sum(np.abs(np.asarray(a)[0]) ** 2))


def symmetric_amplitudes(d: int, v: float, x: float, y: float) -> np.ndarray:
    """Amplitude matrix with v at (0,0), x on the first row/column, y elsewhere."""
    a = np.full((d, d), y, dtype=float)
    a[0, :] = x
    a[:, 0] = x
    a[0, 0] = v
    return a


def dual_params(d: int, v: float, x: float, y: float) -> tuple[float, float, float]:
    """(v', x', y') of the dual matrix for the symmetric form."""
    return (
        (v + 2 * (d - 1) * x + (d - 1) ** 2 * y) / d,
        (v + (d - 2) * x + (1 - d) * y) / d,
        (v - 2 * x + y) / d,
    )


# -- 1 -> N resource-state family -------------------------------------------


def one_to_n_norm(betas: Sequence[float], d: int) -> float:
    b = np.asarray(betas, dtype=float)
    cross = sum(b[i] * b[j] for i, j in itertools.combinations(range(b.size), 2))
    return float(np.sum(b * b) + 2 * cross / d)


def one_to_n_fidelities(betas: Sequence[float], d: int) -> tuple[float, ...]:
    b = np.asarray(betas, dtype=float)
    n = b.size
    out = []
    for i in range(n):
        rest = [j for j in range(n) if j != i]
        sq = sum(b[j] ** 2 for j in rest)
        cross = sum(b[j] * b[k] for j, k in itertools.combinations(rest, 2))
        out.append(1 - (d - 1) / d * (sq + 2 * cross / (d + 1)))
    return tuple(out)


def one_to_n_state(psi, betas: Sequence[float], d: int) -> np.ndarray:
    """Resource-state cloner: psi placed on output i, Phi+ pairs over every ancilla assignment.

    Output tensor axes: n outputs then n-1 ancillas.  The prefactor is the
    norm computed directly, which is constant on the normalization surface.
    """
    v = _vec(psi)
    n = len(betas)
    K = n - 1
    check_dim(d ** (n + K))
    ph = phi_plus(d).amps.reshape(d, d)
    tot = np.zeros((d,) * (n + K), dtype=complex)
    for i, b in enumerate(betas):
        others = [k for k in range(n) if k != i]
        for perm in itertools.permutations(range(K)):
            t = v
            axes = [i]
            for k, o in enumerate(others):
                t = np.multiply.outer(t, ph)
                axes += [o, n + perm[k]]
            tot += b * np.transpose(t, np.argsort(axes))
    return tot


def one_to_n_prefactor(n: int, d: int) -> float:
    """Squared norm of the unnormalized resource state on the normalization surface."""
    return math.factorial(n - 1) * math.prod(d + k for k in range(1, n - 1)) / d ** (n - 2)


def _one_to_n(psi, betas, d, n) -> AsymReport:
    if len(betas) != n:
        raise ValueError(f"need {n} coefficients")
    q = one_to_n_norm(betas, d)
    if abs(q - 1) > NORM_TOL:
        raise ValueError(f"normalization form = {q} != 1")
    t = one_to_n_state(psi, betas, d) / math.sqrt(one_to_n_prefactor(n, d))
    return _reduce_all(t, d, n, _vec(psi))


def asym_1to3(alpha: float, beta: float, gamma: float, d: int) -> tuple[float, float, float]:
    if abs(one_to_n_norm((alpha, beta, gamma), d) - 1) > NORM_TOL:
        raise ValueError("alpha^2+beta^2+gamma^2+(2/d)(alpha beta+beta gamma+alpha gamma) != 1")
    return one_to_n_fidelities((alpha, beta, gamma), d)


def simulate_1to3(psi, alpha: float, beta: float, gamma: float, d: int) -> AsymReport:
    return _one_to_n(psi, (alpha, beta, gamma), d, 3)


def asym_1to4(beta1: float, beta2: float, beta3: float, beta4: float, d: int) -> tuple[float, ...]:
    bs = (beta1, beta2, beta3, beta4)
    if any(b < 0 for b in bs):
        raise ValueError("only non-negative beta_i are admitted")
    if abs(one_to_n_norm(bs, d) - 1) > NORM_TOL:
        raise ValueError("quadratic normalization violated")
    return one_to_n_fidelities(bs, d)


def simulate_1to4(psi, betas: Sequence[float], d: int) -> AsymReport:
    return _one_to_n(psi, tuple(betas), d, 4)


def normalize_betas(betas: Sequence[float], d: int) -> tuple[float, ...]:
    b = np.asarray(betas, dtype=float)
    return tuple(b / math.sqrt(one_to_n_norm(b, d)))


# -- permutation-operator construction ----------------------------------------

# S_3 elements in the order (I, P12, P13, P23, P123, P132); each tuple sends
# slot i to slot perm[i].  P123 moves qubit 1 -> 2, 2 -> 3, 3 -> 1.
S3 = ((0, 1, 2), (1, 0, 2), (2, 1, 0), (0, 2, 1), (1, 2, 0), (2, 0, 1))


def perm_operator(weights: Sequence[float], d: int = 2) -> np.ndarray:
    if len(weights) != 6:
        raise ValueError("need six weights (alpha, beta, gamma, delta, mu, nu)")
    return sum(w * permutation_operator(d, p) for w, p in zip(weights, S3))


def _perm_rho(weights, N: int, psi: np.ndarray) -> np.ndarray:
    d = psi.size
    W = perm_operator(weights, d)
    P = np.outer(psi, psi.conj())
    inner = P
    for _ in range(N - 1):
        inner = np.kron(inner, P)
    inner = np.kron(inner, np.eye(d ** (3 - N)))
    return 0.5 * W @ inner @ W.conj().T


def perm_norm(weights: Sequence[float], N: int) -> float:
    """Trace of the unnormalized output; must equal 1 for admissible weights."""
    if N not in (1, 2):
        raise ValueError("N must be 1 or 2")
    return float(np.trace(_perm_rho(weights, N, np.array([1.0, 0.0]))).real)


def perm_normalize(weights: Sequence[float], N: int) -> tuple[float, ...]:
    w = np.asarray(weights, dtype=float)
    return tuple(w / math.sqrt(perm_norm(w, N)))


def perm_asym_state(psi, weights: Sequence[float], N: int) -> DensityMatrix:
    v = _vec(psi)
    if v.size != 2:
        raise ValueError("the permutation construction is for qubits")
    t = perm_norm(weights, N)
    if abs(t - 1) > NORM_TOL:
        raise ValueError(f"weights give trace {t}; rescale with perm_normalize")
    return DensityMatrix(_perm_rho(weights, N, v), (2, 2, 2))


def perm_asym(weights: Sequence[float], N: int, M: int = 3, psi=None) -> tuple[float, float, float]:
    """Single-copy fidelities of the three outputs, by simulation."""
    if M != 3:
        raise ValueError("only M = 3 is constructed")
    v = np.array([1.0, 0.0]) if psi is None else _vec(psi)
    rho = perm_asym_state(v, weights, N)
    return tuple(fidelity(ptrace(rho.mat, (2, 2, 2), [k]), v) for k in range(3))


def perm_fidelities_formula(weights: Sequence[float], N: int) -> tuple[float, float, float]:
    al, be, ga, de, mu, nu = weights
    if N == 1:
        return (
            1 - 0.5 * ((be + mu) ** 2 + (be + nu) ** 2 + (ga + mu) ** 2 + (ga + nu) ** 2),
            1 - 0.5 * ((al + ga) ** 2 + (al + de) ** 2 + (ga + nu) ** 2 + (de + nu) ** 2),
            1 - 0.5 * ((al + be) ** 2 + (al + de) ** 2 + (be + mu) ** 2 + (de + mu) ** 2),
        )
    if N == 2:
        A, B, C = al + be, ga + mu, de + nu
        return 1 - B * B / 2, 1 - C * C / 2, 1 - A * A / 2
    raise ValueError("N must be 1 or 2")


def perm_weights_from_1to3(alpha: float, beta: float, gamma: float) -> tuple[float, ...]:
    """Weights that reproduce the resource-state 1 -> 3 cloner (qubits).

    alpha = delta = alpha'/sqrt(6) and so on; these satisfy the trace-one
    normalization whenever (alpha', beta', gamma') do.
    """
    c = math.sqrt(6)
    return (alpha / c, beta / c, gamma / c, alpha / c, beta / c, gamma / c)


# -- singlet monogamy -----------------------------------------------------------


def monogamy_check(p: Sequence[float], d: int, N: int | None = None) -> bool:
    """sum p <= (d-1)/d + (sum sqrt p)^2 / (N+d-1)."""
    p = np.asarray(p, dtype=float)
    if np.any((p < 0) | (p > 1)):
        raise ValueError("singlet fractions must lie in [0, 1]")
    N = p.size if N is None else N
    return bool(p.sum() <= (d - 1) / d + np.sqrt(p).sum() ** 2 / (N + d - 1) + 1e-12)


def monogamy_fidelity(p_i: float, d: int) -> float:
    return (p_i * d + 1) / (d + 1)


def symmetric_singlet_fraction(N: int, d: int) -> float:
    return (N + d - 1) / (d * N)
