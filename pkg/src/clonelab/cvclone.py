"""Gaussian N -> M cloning of coherent states in the covariance picture.

Units: hbar = 1, x = (a + a^dag)/sqrt2, p = (a - a^dag)/(i sqrt2), so the
vacuum has covariance I/2 and |alpha> has mean (sqrt2 Re alpha, sqrt2 Im alpha).
Quadratures are ordered (x_1, p_1, x_2, p_2, ...).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

SYMPLECTIC_TOL = 1e-12


def omega(n_modes: int) -> np.ndarray:
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def symplectic_residual(S: np.ndarray) -> float:
    n = S.shape[0] // 2
    W = omega(n)
    return float(np.abs(S @ W @ S.T - W).max())


@dataclass(frozen=True)
class GaussianState:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float)
        cov = np.array(self.cov, dtype=float)
        if cov.shape != (mean.size, mean.size) or mean.size % 2:
            raise ValueError("need 2n means and a 2n x 2n covariance")
        if np.abs(cov - cov.T).max() > 1e-10:
            raise ValueError("covariance must be symmetric")
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def n_modes(self) -> int:
        return self.mean.size // 2

    def uncertainty_min_eig(self) -> float:
        """Smallest eigenvalue of cov + i Omega / 2; nonnegative for a physical state."""
        return float(np.linalg.eigvalsh(self.cov + 0.5j * omega(self.n_modes)).min())

    def mode(self, k: int) -> "GaussianState":
        sl = slice(2 * k, 2 * k + 2)
        return GaussianState(self.mean[sl], self.cov[sl, sl])

    def amplitude(self, k: int = 0) -> complex:
        """<a_k> recovered from the mean quadratures."""
        x, p = self.mean[2 * k: 2 * k + 2]
        return complex(x, p) / math.sqrt(2)

    def apply(self, S: np.ndarray, modes: Sequence[int]) -> "GaussianState":
        """cov -> S cov S^T and mean -> S mean on the listed modes."""
        idx = np.array([[2 * m, 2 * m + 1] for m in modes]).ravel()
        if S.shape != (idx.size, idx.size):
            raise ValueError("symplectic matrix does not match the mode list")
        if len(set(modes)) != len(modes) or min(modes) < 0 or max(modes) >= self.n_modes:
            raise ValueError("invalid mode indices")
        # rounding in S Omega S^T grows with the entries squared (large gains)
        if symplectic_residual(S) > SYMPLECTIC_TOL * max(1.0, float(np.abs(S).max()) ** 2):
            raise ValueError("transformation is not symplectic")
        full = np.eye(self.mean.size)
        full[np.ix_(idx, idx)] = S
        return GaussianState(full @ self.mean, full @ self.cov @ full.T)


def coherent(alpha: complex) -> GaussianState:
    return GaussianState([math.sqrt(2) * alpha.real, math.sqrt(2) * alpha.imag], np.eye(2) / 2)


def vacuum(n_modes: int = 1) -> GaussianState:
    return GaussianState(np.zeros(2 * n_modes), np.eye(2 * n_modes) / 2)


def product(*states: GaussianState) -> GaussianState:
    mean = np.concatenate([s.mean for s in states])
    cov = np.zeros((mean.size, mean.size))
    k = 0
    for s in states:
        n = s.mean.size
        cov[k:k + n, k:k + n] = s.cov
        k += n
    return GaussianState(mean, cov)


def passive(U: np.ndarray) -> np.ndarray:
    """Symplectic matrix of the mode map a -> U a (U unitary)."""
    U = np.asarray(U, dtype=complex)
    n = U.shape[0]
    S = np.zeros((2 * n, 2 * n))
    S[0::2, 0::2] = U.real
    S[0::2, 1::2] = -U.imag
    S[1::2, 0::2] = U.imag
    S[1::2, 1::2] = U.real
    return S


def displace(state: GaussianState, mode: int, alpha: complex) -> GaussianState:
    mean = state.mean.copy()
    mean[2 * mode] += math.sqrt(2) * alpha.real
    mean[2 * mode + 1] += math.sqrt(2) * alpha.imag
    return GaussianState(mean, state.cov)


def beam_splitter_matrix(transmittance: float) -> np.ndarray:
    """a_i' = sqrt(T) a_i + sqrt(1-T) a_j,  a_j' = sqrt(1-T) a_i - sqrt(T) a_j."""
    if not 0 <= transmittance <= 1:
        raise ValueError("transmittance must lie in [0, 1]")
    t, r = math.sqrt(transmittance), math.sqrt(1 - transmittance)
    return passive(np.array([[t, r], [r, -t]]))


def beam_splitter(state: GaussianState, i: int, j: int, transmittance: float = 0.5) -> GaussianState:
    return state.apply(beam_splitter_matrix(transmittance), [i, j])


def dft_matrix(n: int, inverse: bool = False) -> np.ndarray:
    s = -1 if inverse else 1
    k = np.arange(n)
    return np.exp(s * 2j * math.pi * np.outer(k, k) / n) / math.sqrt(n)


def dft_network(state: GaussianState, modes: Sequence[int], inverse: bool = False) -> GaussianState:
    """a_k -> n^{-1/2} sum_l e^{2 pi i k l / n} a_l over the listed modes."""
    return state.apply(passive(dft_matrix(len(modes), inverse)), list(modes))


def amplifier_matrix(G: float) -> np.ndarray:
    """a -> sqrt(G) a + sqrt(G-1) z^dag,  z -> sqrt(G-1) a^dag + sqrt(G) z."""
    if G < 1:
        raise ValueError("gain must be >= 1")
    g, h = math.sqrt(G), math.sqrt(G - 1)
    return np.array([
        [g, 0, h, 0],
        [0, g, 0, -h],
        [h, 0, g, 0],
        [0, -h, 0, g],
    ])


def amplify(state: GaussianState, mode: int, ancilla: int, G: float) -> GaussianState:
    return state.apply(amplifier_matrix(G), [mode, ancilla])


def added_variance_bound(N: int, M: int) -> float:
    return (M - N) / (M * N)


def optimal_fidelity(N: int, M: int) -> float:
    return M * N / (M * N + M - N)


def coherent_fidelity(state: GaussianState, alpha: complex) -> float:
    """<alpha|rho|alpha> for a one-mode Gaussian rho, from the Gaussian overlap formula."""
    if state.n_modes != 1:
        raise ValueError("one mode expected")
    ref = coherent(alpha)
    S = state.cov + ref.cov
    delta = state.mean - ref.mean
    return float(math.exp(-0.5 * delta @ np.linalg.solve(S, delta)) / math.sqrt(np.linalg.det(S)))


@dataclass(frozen=True)
class CloneResult:
    state: GaussianState  # modes 0..M-1 clones, mode M the amplifier ancilla
    means: tuple[complex, ...]
    added_variance: tuple[float, ...]
    fidelity: float
    max_symplectic_residual: float


def _clone_network(state: GaussianState, N: int, M: int, inputs: Sequence[int], blanks: Sequence[int],
                   ancilla: int) -> tuple[GaussianState, float]:
    """Concentrate, amplify by M/N, distribute.  Returns the state and the worst symplectic residual."""
    res = []
    res.append(symplectic_residual(passive(dft_matrix(N))))
    state = dft_network(state, inputs)
    S_amp = amplifier_matrix(M / N)
    res.append(symplectic_residual(S_amp))
    state = state.apply(S_amp, [inputs[0], ancilla])
    out = [inputs[0]] + list(inputs[1:]) + list(blanks)
    res.append(symplectic_residual(passive(dft_matrix(M))))
    state = dft_network(state, out)
    return state, max(res)


def _summarize(state: GaussianState, alpha: complex, modes: Sequence[int], base_var: float,
               resid: float) -> CloneResult:
    means, added = [], []
    for k in modes:
        m = state.mode(k)
        means.append(m.amplitude())
        added.append(float(np.mean(np.diag(m.cov))) - base_var)
    F = coherent_fidelity(state.mode(modes[0]), alpha)
    return CloneResult(state, tuple(means), tuple(added), F, resid)


def gaussian_clone(N: int, M: int, alpha: complex) -> CloneResult:
    """Full M+1 mode simulation of the optimal N -> M cloner on |alpha>^N."""
    if not 1 <= N <= M:
        raise ValueError("need 1 <= N <= M")
    state = product(*([coherent(alpha)] * N), vacuum(M - N + 1))
    state, resid = _clone_network(state, N, M, list(range(N)), list(range(N, M)), M)
    return _summarize(state, alpha, list(range(M)), 0.5, resid)


def cascade(N: int, M: int, L: int, alpha: complex) -> tuple[CloneResult, CloneResult]:
    """N -> M followed by M -> L on the M clones; returns both stages."""
    if not 1 <= N <= M <= L:
        raise ValueError("need 1 <= N <= M <= L")
    first = gaussian_clone(N, M, alpha)
    # modes: clones 0..M-1, first ancilla M, then L-M blanks and a second ancilla
    state = product(first.state, vacuum(L - M + 1))
    inputs = list(range(M))
    blanks = list(range(M + 1, L + 1))
    state, resid = _clone_network(state, M, L, inputs, blanks, L + 1)
    out = inputs + blanks
    second = _summarize(state, alpha, out, 0.5, max(resid, first.max_symplectic_residual))
    return first, second


def reduced_clone(N: int, M: int, alpha: complex) -> CloneResult:
    """One clone from a three-mode network; valid for any M.

    The N inputs concentrate into one coherent mode sqrt(N) alpha exactly, and
    a single DFT output sees that mode with weight 1/M plus vacuum.  Modes:
    0 concentrated/output, 1 ancilla, 2 lumped vacuum.
    """
    if not 1 <= N <= M:
        raise ValueError("need 1 <= N <= M")
    state = product(coherent(math.sqrt(N) * alpha), vacuum(2))
    S1 = amplifier_matrix(M / N)
    S2 = beam_splitter_matrix(1 / M)
    state = state.apply(S1, [0, 1]).apply(S2, [0, 2])
    resid = max(symplectic_residual(S1), symplectic_residual(S2))
    return _summarize(state, alpha, [0], 0.5, resid)


def one_to_two_heisenberg() -> np.ndarray:
    """The explicit 1 -> 2 quadrature map on (x0, p0, x1, p1, xz, pz)."""
    r = 1 / math.sqrt(2)
    return np.array([
        [1, 0, r, 0, r, 0],
        [0, 1, 0, r, 0, -r],
        [1, 0, -r, 0, r, 0],
        [0, 1, 0, -r, 0, -r],
        [1, 0, 0, 0, math.sqrt(2), 0],
        [0, -1, 0, 0, 0, math.sqrt(2)],
    ])
