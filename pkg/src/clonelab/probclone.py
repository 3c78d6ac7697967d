"""Probabilistic cloning: exact copies produced with some success probability.

Feasibility of a machine reduces to positive semidefiniteness of a residual
built from Gram matrices of the inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import StateVector

PSD_SLACK = 1e-10


@dataclass(frozen=True)
class GramMatrix:
    X: np.ndarray

    def __post_init__(self):
        X = np.array(self.X, dtype=complex)
        if X.ndim != 2 or X.shape[0] != X.shape[1]:
            raise ValueError("Gram matrix must be square")
        if np.abs(X - X.conj().T).max() > 1e-10:
            raise ValueError("Gram matrix must be Hermitian")
        if np.abs(np.diag(X) - 1).max() > 1e-10:
            raise ValueError("Gram matrix must have unit diagonal")
        if np.linalg.eigvalsh(X).min() < -PSD_SLACK:
            raise ValueError("Gram matrix must be positive semidefinite")
        X.setflags(write=False)
        object.__setattr__(self, "X", X)

    @classmethod
    def of(cls, states: Sequence) -> "GramMatrix":
        S = _stack(states)
        return cls(S.conj() @ S.T)

    def power(self, k: int) -> np.ndarray:
        """Elementwise power X^(k)."""
        return self.X ** k

    @property
    def n(self) -> int:
        return self.X.shape[0]

    def independent(self, tol: float = 1e-10) -> bool:
        return bool(np.linalg.eigvalsh(self.X).min() > tol)


@dataclass(frozen=True)
class Feasibility:
    feasible: bool
    min_eig: float
    reason: str = ""
    p: float | None = None

    def __bool__(self) -> bool:
        return self.feasible


def _stack(states: Sequence) -> np.ndarray:
    vecs = [np.asarray(s.amps if isinstance(s, StateVector) else s, dtype=complex).ravel() for s in states]
    if not vecs:
        raise ValueError("need at least one state")
    if len({v.size for v in vecs}) != 1:
        raise ValueError("states must share a dimension")
    S = np.array(vecs)
    if np.abs(np.linalg.norm(S, axis=1) - 1).max() > 1e-10:
        raise ValueError("states must be normalized")
    return S


def duan_guo_bound(s: float) -> float:
    """Largest equal success probability for cloning two states with |overlap| s."""
    if not 0 <= s <= 1:
        raise ValueError("s must lie in [0, 1]")
    return 1 / (1 + s)


def prob_not_bound(s: float) -> float:
    if not 0 <= s <= 1:
        raise ValueError("s must lie in [0, 1]")
    return 1 / (1 + s)


def _min_eig(R: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(0.5 * (R + R.conj().T)).min())


def prob_clone_feasible(states: Sequence, gammas: Sequence[float], copies: int = 2) -> Feasibility:
    """Whether 1 -> ``copies`` exact cloning with success probabilities ``gammas`` exists.

    Tests X^(1) - sqrt(G) X^(copies) sqrt(G) >= 0.  The copies inherit the
    phases of the given vectors, so the answer refers to these representatives;
    two states rephased to a real overlap s reach 1/(1+s).
    """
    G = GramMatrix.of(states)
    g = np.asarray(gammas, dtype=float)
    if g.shape != (G.n,):
        raise ValueError("one gamma per state")
    if (g < 0).any() or (g > 1).any():
        raise ValueError("gammas must lie in [0, 1]")
    if not G.independent():
        return Feasibility(False, _min_eig(G.X), "linearly dependent inputs")
    sg = np.diag(np.sqrt(g))
    lam = _min_eig(G.X - sg @ G.power(copies) @ sg)
    return Feasibility(lam >= -PSD_SLACK, lam)


def max_equal_gamma(states: Sequence, copies: int = 2, tol: float = 1e-12) -> float:
    """Largest common gamma that stays feasible, by bisection."""
    lo, hi = 0.0, 1.0
    if prob_clone_feasible(states, [1.0] * len(states), copies):
        return 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if prob_clone_feasible(states, [mid] * len(states), copies):
            lo = mid
        else:
            hi = mid
    return lo


def pati_feasible(states: Sequence, M: int, grid: int = 200) -> Feasibility:
    """Sufficient-condition test for the multi-copy superposition machine.

    The branch producing j+1 copies carries amplitude sqrt(p); all branches
    get the same p (uniform P_k).  The machine exists if the residual
    X^(1) - p sum_{k=1}^M X^(k+1) is PSD for some p > 0 on a grid descending
    from 1/M.  The scan is conservative: failure does not prove that no
    non-uniform P_k works.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    G = GramMatrix.of(states)
    if not G.independent():
        return Feasibility(False, _min_eig(G.X), "linearly dependent inputs")
    total = sum(G.power(k + 1) for k in range(1, M + 1))
    best = -np.inf
    for p in np.linspace(1 / M, 0, grid, endpoint=False):
        lam = _min_eig(G.X - p * total)
        best = max(best, lam)
        if lam >= -PSD_SLACK:
            return Feasibility(True, lam, "", float(p))
    return Feasibility(False, float(best), "no uniform p on the grid")


def qubit_perp(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.array([-psi[1].conjugate(), psi[0].conjugate()])


def prob_not_feasible(states: Sequence, f: float) -> Feasibility:
    """Qubit probabilistic NOT with success f: X^(1) - f X' >= 0, X'_ij = <i|j><i_perp|j_perp>."""
    S = _stack(states)
    if S.shape[1] != 2:
        raise ValueError("probabilistic NOT is defined here for qubits")
    if not 0 <= f <= 1:
        raise ValueError("f must lie in [0, 1]")
    G = GramMatrix.of(S)
    if not G.independent():
        return Feasibility(False, _min_eig(G.X), "linearly dependent inputs")
    P = np.array([qubit_perp(v) for v in S])
    Xp = G.X * (P.conj() @ P.T)
    lam = _min_eig(G.X - f * Xp)
    return Feasibility(lam >= -PSD_SLACK, lam)


def overlap_pair(s: float, phase: float = 0.0) -> list[np.ndarray]:
    """Two qubit states with <a|b> = s e^{i phase}."""
    if not 0 <= s <= 1:
        raise ValueError("s must lie in [0, 1]")
    t = math.acos(s)
    return [np.array([1, 0], dtype=complex), np.array([s * np.exp(1j * phase), math.sin(t)])]


def symmetric_states(coeffs: Sequence[complex]) -> list[np.ndarray]:
    """|psi_k> = sum_j c_j w^{jk}|j>, k = 0..d-1: d cyclically symmetric states in C^d.

    Linearly independent whenever every c_j is nonzero.
    """
    c = np.asarray(coeffs, dtype=complex)
    c = c / np.linalg.norm(c)
    d = c.size
    w = np.exp(2j * math.pi / d)
    return [c * w ** (k * np.arange(d)) for k in range(d)]
