"""Eavesdropping on QKD: standard MUB protocols and the mean-king retrodiction protocol.

Eve attacks the mean-king scheme twice.  She partially swaps the entangled
pair Bob distributes (weight p), then clones the particle Alice returns with
a (g+1)-basis Pauli cloner parameterized by (F_B, v).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .asym import cerf_channel, cerf_dual
from .linalg import is_prime, ptrace
from .phasecov import MubCloneParams, mub_amplitudes, mub_eve_fidelity, mub_v_range


@dataclass(frozen=True)
class AttackParams:
    """Swap fraction ``p`` on the first channel, cloner (F_B, v) on the second."""

    d: int
    g: int
    p: float
    F_B: float
    v: float
    x: float = field(init=False)
    y: float = field(init=False)

    def __post_init__(self):
        if not is_prime(self.d):
            raise ValueError(f"d = {self.d} must be prime")
        if not 1 <= self.g <= self.d:
            raise ValueError("g must lie in 1..d")
        if not 0 <= self.p <= 1:
            raise ValueError("p must lie in [0, 1]")
        c = MubCloneParams(self.d, self.g, self.F_B, self.v)
        object.__setattr__(self, "x", c.x)
        object.__setattr__(self, "y", c.y)

    @property
    def amplitudes(self) -> np.ndarray:
        return mub_amplitudes(self.d, self.g, self.v, self.x, self.y)

    @property
    def F_E(self) -> float:
        """Eve's probability of reading the second-channel state correctly."""
        return mub_eve_fidelity(self.d, self.g, self.v, self.x, self.y)


# -- bases and guessing ----------------------------------------------------------


def guessing_function(m: int, n: int, A: int, d: int) -> int:
    if not (0 <= m < d and 0 <= n < d and 0 <= A <= d):
        raise ValueError("need 0 <= m, n < d and 0 <= A <= d")
    return m if A == d else (n - A * m) % d


def king_index(I: int, d: int) -> tuple[int, int]:
    """Outcome label I -> (m, n) with I = m d + n."""
    return divmod(I, d)


def alice_basis(d: int, A: int) -> np.ndarray:
    """Columns |A, a>.  A < d: eigenvectors of sigma_x sigma_z^A; A = d: computational."""
    if A == d:
        return np.eye(d, dtype=complex)
    if d == 2:
        s = 1 / math.sqrt(2)
        return np.array([[s, s], [s, -s]], dtype=complex) if A == 0 else np.array([[s, s], [1j * s, -1j * s]])
    w = np.exp(2j * math.pi / d)
    sj = [sum(range(j, d)) for j in range(d)]
    B = np.array([[w ** ((-a * (d - j) - A * sj[j]) % d) for a in range(d)] for j in range(d)])
    return B / math.sqrt(d)


def phi_state(d: int, A: int, a: int) -> np.ndarray:
    """|Phi_{A,a}> = |conj(A,a)> (x) |A,a>."""
    v = alice_basis(d, A)[:, a]
    return np.kron(v.conj(), v)


@dataclass(frozen=True)
class KingBasis:
    d: int
    vectors: np.ndarray  # columns |I>
    table: np.ndarray  # table[I, A] = s(I, A)
    residual: float
    orth_residual: float

    def vector(self, I: int) -> np.ndarray:
        return self.vectors[:, I]


class InconsistentConstraints(ArithmeticError):
    pass


@lru_cache(maxsize=None)
def king_basis(d: int, tol: float = 1e-8) -> KingBasis:
    """Solve <Phi_{A,a}|I> = delta_{s(I,A),a}/sqrt(d) for every I, then orthonormalize."""
    if not is_prime(d):
        raise ValueError(f"d = {d} must be prime")
    rows = np.array([phi_state(d, A, a).conj() for A in range(d + 1) for a in range(d)])
    table = np.zeros((d * d, d + 1), dtype=int)
    V = np.zeros((d * d, d * d), dtype=complex)
    worst = 0.0
    for I in range(d * d):
        m, n = king_index(I, d)
        rhs = np.zeros(d * (d + 1))
        for A in range(d + 1):
            table[I, A] = guessing_function(m, n, A, d)
            rhs[A * d + table[I, A]] = 1 / math.sqrt(d)
        sol, *_ = np.linalg.lstsq(rows, rhs, rcond=None)
        worst = max(worst, float(np.abs(rows @ sol - rhs).max()))
        V[:, I] = sol
    if worst > tol:
        raise InconsistentConstraints(f"king constraints inconsistent for d = {d}: residual {worst:.2e}")
    orth = float(np.abs(V.conj().T @ V - np.eye(d * d)).max())
    # symmetric orthonormalization; a no-op up to rounding when the solve is exact
    u, _, vh = np.linalg.svd(V)
    V = u @ vh
    worst = max(worst, float(np.abs(rows @ V - np.array([
        [1 / math.sqrt(d) if table[I, A] == a else 0 for I in range(d * d)]
        for A in range(d + 1) for a in range(d)])).max()))
    V.setflags(write=False)
    table.setflags(write=False)
    return KingBasis(d, V, table, worst, orth)


def printed_king_basis_d2() -> np.ndarray:
    """The four d = 2 retrodiction vectors as columns, written out directly."""
    e, f = np.exp(1j * math.pi / 4), np.exp(-1j * math.pi / 4)
    s = 1 / math.sqrt(2)
    cols = [
        [s, 0.5 * e, 0.5 * f, 0],
        [s, -0.5 * e, -0.5 * f, 0],
        [0, 0.5 * f, 0.5 * e, s],
        [0, -0.5 * f, -0.5 * e, s],
    ]
    return np.array(cols, dtype=complex).T


# -- fidelities ----------------------------------------------------------------


def used_bases(d: int, g: int) -> list[int]:
    """Alice's bases matching the cloner's g+1: computational and sigma_x sigma_z^k, k < g."""
    return [d] + list(range(g))


def king_fidelities(params: AttackParams) -> tuple[float, float]:
    d, g, p = params.d, params.g, params.p
    FB, FE = params.F_B, params.F_E
    if d == 2:
        return 0.5 - p / 4 + FB / 2, (1 + p) / 4 + FE / 2
    TB = FB + (1 - FB) / (d - 1)
    TE = FE + (1 - FE) / (d - 1)
    return (1 - p) * TB + p / d, (1 - p) / d + p * TE


def _guess_probability(rho: np.ndarray, kb: KingBasis, A: int, a: int) -> float:
    sel = kb.vectors[:, kb.table[:, A] == a]
    return float(np.einsum("iI,ij,jI->", sel.conj(), rho, sel).real)


def simulate_mean_king(params: AttackParams) -> tuple[float, float, list[tuple[np.ndarray, np.ndarray]]]:
    """Build Bob's and Eve's two-particle states from the attacked pure states and measure.

    The first-channel branches are mixed with weights (1-p, p).  Returns the
    two fidelities averaged over Alice's used bases and results, plus every
    (rho_Bob, rho_Eve) pair.
    """
    d, p = params.d, params.p
    kb = king_basis(d)
    a_mat = params.amplitudes
    phi = np.eye(d).reshape(d * d) / math.sqrt(d)
    # branch 1: Phi+_{BA} Phi+_{EE'}; branch 2: Phi+_{BE} Phi+_{AE'}; order (B, A, E, E')
    br1 = np.einsum("ba,ef->baef", phi.reshape(d, d), phi.reshape(d, d)).reshape(-1)
    br2 = np.einsum("be,af->baef", phi.reshape(d, d), phi.reshape(d, d)).reshape(-1)
    FBs, FEs, states = [], [], []
    for A in used_bases(d, params.g):
        basis = alice_basis(d, A)
        for a in range(d):
            ket = basis[:, a]
            proj = np.kron(np.kron(np.eye(d), np.outer(ket, ket.conj())), np.eye(d * d))
            first = np.zeros((d * d, d * d), dtype=complex)  # (B, E') after Alice's result
            for w, br in ((1 - p, br1), (p, br2)):
                s = proj @ br
                s = s / np.linalg.norm(s)
                rho = ptrace(np.outer(s, s.conj()), (d, d, d, d), [0, 3])
                first += w * rho
            rho_b1 = ptrace(first, (d, d), [0])
            rho_e1 = ptrace(first, (d, d), [1])
            rho_b2, rho_e2, _ = cerf_channel(ket, a_mat)
            rb = np.kron(rho_b1, rho_b2.mat)
            re = np.kron(rho_e1, rho_e2.mat)
            FBs.append(_guess_probability(rb, kb, A, a))
            FEs.append(_guess_probability(re, kb, A, a))
            states.append((rb, re))
    return float(np.mean(FBs)), float(np.mean(FEs)), states


def simulate_mean_king_d2(params: AttackParams) -> tuple[float, float]:
    if params.d != 2:
        raise ValueError("this oracle is the d = 2 case")
    FB, FE, _ = simulate_mean_king(params)
    return FB, FE


def cloner_FB_from_bob(d: int, F_bob: float, p: float) -> float:
    """Invert ``king_fidelities`` for the cloner fidelity F_B at fixed p."""
    if d == 2:
        return 2 * F_bob - 1 + p / 2
    T = (F_bob - p / d) / (1 - p)
    return (T * (d - 1) - 1) / (d - 2)


# -- mutual information ---------------------------------------------------------


def _entropy(p: np.ndarray) -> float:
    p = np.clip(np.asarray(p, dtype=float).ravel(), 0, None)
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def _mi(cond: np.ndarray) -> float:
    """I = H(mean_i cond_i) - mean_i H(cond_i) for a uniform input i (first axis)."""
    C = cond.reshape(cond.shape[0], -1)
    if C.min() < -1e-12:
        raise ValueError("negative probability in table")
    if np.abs(C.sum(axis=1) - 1).max() > 1e-10:
        raise ValueError("table rows must sum to 1")
    return _entropy(C.mean(axis=0)) - float(np.mean([_entropy(c) for c in C]))


def bob1_table(d: int, p: float) -> np.ndarray:
    T = np.full((d, d), p / d)
    np.fill_diagonal(T, 1 / d + (d - 1) * (1 - p) / d)
    return T


def bob2_table(d: int, F_B: float) -> np.ndarray:
    T = np.full((d, d), (1 - F_B) / (d - 1))
    np.fill_diagonal(T, F_B)
    return T


def eve1_table(d: int, p: float) -> np.ndarray:
    """[i, e1, e1']."""
    T = np.zeros((d, d, d))
    for i in range(d):
        for e in range(d):
            T[i, e, e] = (1 - p) / d
            T[i, e, i] = p / d
        T[i, i, i] = 1 / d
    return T


def eve2_table(d: int, g: int, v: float, x: float, y: float) -> np.ndarray:
    """[i, e2, e2'] from the piecewise closed form.

    The off-diagonal ratio uses m = e2' - e2 and the phase index i - e2'.
    """
    w = np.exp(2j * math.pi / d)
    T = np.zeros((d, d, d))
    for i in range(d):
        for e in range(d):
            for ep in range(d):
                if e == ep == i:
                    T[i, e, ep] = (v + (d - 1) * x) ** 2 / d
                elif e == ep:
                    T[i, e, ep] = (v - x) ** 2 / d
                elif ep == i:
                    T[i, e, ep] = (g * x + (d - g) * y) ** 2 / d
                else:
                    m, D = (ep - e) % d, (i - ep) % d
                    r = abs((1 - w ** ((m * g * D) % d)) / (1 - w ** ((m * D) % d))) ** 2
                    T[i, e, ep] = (x - y) ** 2 / d * r
    return T


def eve2_table_explicit(a: np.ndarray) -> np.ndarray:
    """[i, e2, e2'] from the attacked state's amplitudes sum_n a_mn w^{n (i - e2')}/sqrt(d)."""
    d = a.shape[0]
    amp = np.fft.ifft(a, axis=1) * d  # amp[m, D] = sum_n a[m, n] w^{n D}
    P = np.abs(amp) ** 2 / d
    T = np.zeros((d, d, d))
    for i in range(d):
        for ep in range(d):
            for m in range(d):
                T[i, (ep - m) % d, ep] = P[m, (i - ep) % d]
    return T


def mutual_info(params: AttackParams, protocol: str = "king") -> tuple[float, float]:
    """(I_AB, I_AE) in bits.  ``protocol='standard'`` drops the first channel."""
    d = params.d
    e2 = eve2_table(d, params.g, params.v, params.x, params.y)
    b2 = bob2_table(d, params.F_B)
    if protocol == "standard":
        return _mi(b2), _mi(e2)
    if protocol != "king":
        raise ValueError(f"unknown protocol {protocol!r}")
    b1, e1 = bob1_table(d, params.p), eve1_table(d, params.p)
    B = np.einsum("ia,ib->iab", b1, b2)
    E = np.einsum("iab,icd->iabcd", e1, e2)
    return _mi(B), _mi(E)


# -- disturbance thresholds -------------------------------------------------------


class ThresholdError(ArithmeticError):
    pass


# finite stand-in for "no attack reaches this F_Bob" so bounded searches stay well defined
_INFEASIBLE = -1e9


def _max_over_v(d: int, g: int, p: float, F_B: float, protocol: str) -> float:
    lo, hi = mub_v_range(d, g, F_B)

    def gap(v):
        I_ab, I_ae = mutual_info(AttackParams(d, g, p, F_B, min(max(v, lo), hi)), protocol)
        return I_ae - I_ab

    if hi - lo < 1e-12:
        return gap(lo)
    # coarse grid guards against a non-unimodal profile before the golden-section refinement
    vs = np.linspace(lo, hi, 9)
    vals = [gap(v) for v in vs]
    k = int(np.argmax(vals))
    res = minimize_scalar(lambda v: -gap(v), bounds=(vs[max(k - 1, 0)], vs[min(k + 1, 8)]),
                          method="bounded", options={"xatol": 1e-9})
    return max(vals[k], -res.fun)


def max_gap(d: int, g: int, F_bob: float, protocol: str = "king", n_p: int = 41) -> float:
    """max over (p, v) of I_AE - I_AB at fixed F_Bob; -inf when no attack reaches F_Bob."""
    if protocol == "standard":
        if not 1 / d <= F_bob <= 1:
            return -np.inf
        return _max_over_v(d, g, 0.0, F_bob, "standard")

    def at_p(p):
        FB = cloner_FB_from_bob(d, F_bob, p)
        if not 1 / d - 1e-12 <= FB <= 1 + 1e-12:
            return _INFEASIBLE
        return _max_over_v(d, g, p, min(max(FB, 1 / d), 1.0), "king")

    ps = np.linspace(0, 0.999, n_p)
    vals = np.array([at_p(p) for p in ps])
    if (vals <= _INFEASIBLE).all():
        return -np.inf
    k = int(np.argmax(vals))
    res = minimize_scalar(lambda p: -at_p(p), bounds=(ps[max(k - 1, 0)], ps[min(k + 1, n_p - 1)]),
                          method="bounded", options={"xatol": 1e-7})
    return float(max(vals[k], -res.fun))


def disturbance_DI(d: int, g: int, protocol: str = "king", tol: float = 1e-6) -> float:
    """D_I in percent: 1 - F_Bob at the zero crossing of max(I_AE - I_AB)."""
    if not is_prime(d):
        raise ValueError(f"d = {d} must be prime")
    if not 1 <= g <= d:
        raise ValueError("g must lie in 1..d")
    f = lambda F: max_gap(d, g, F, protocol)
    Fs = np.linspace(1 / d + 1e-3, 1 - 1e-4, 40)
    vals = [f(F) for F in Fs]
    root = None
    for a, b, fa, fb in zip(Fs, Fs[1:], vals, vals[1:]):
        if np.isfinite(fa) and np.isfinite(fb) and fa > 0 >= fb:
            root = brentq(f, a, b, xtol=tol)
    if root is None:
        raise ThresholdError(f"no sign change of the information gap for d = {d}, g = {g}")
    return 100 * (1 - root)


# -- standard protocols ----------------------------------------------------------


def standard_qkd_eve(F_bob: float, protocol: str, d: int = 2, g: int | None = None) -> float:
    """Eve's optimal fidelity at Bob's fidelity F_bob.

    protocol: 'bb84', 'six-state', 'd-dim-2basis' or 'd-dim-(g+1)basis'.
    """
    from .phasecov import mub_cloner, two_basis_tradeoff

    if not 1 / d - 1e-12 <= F_bob <= 1 + 1e-12:
        raise ValueError("F_bob must lie in [1/d, 1]")
    F = min(max(F_bob, 1 / d), 1.0)
    if protocol == "bb84":
        return 0.5 * (math.sqrt(F) + math.sqrt(1 - F)) ** 2
    if protocol == "six-state":
        return (math.sqrt(max(3 * F - 1, 0)) + math.sqrt(1 - F)) ** 2 / 4 + (1 - F)
    if protocol == "d-dim-2basis":
        return two_basis_tradeoff(F, d)
    if protocol == "d-dim-(g+1)basis":
        if g is None:
            raise ValueError("g required")
        return mub_cloner(d, g, F)[1]
    raise ValueError(f"unknown protocol {protocol!r}")


def king_eve_max(d: int, g: int, F_bob: float, n_p: int = 201) -> float:
    """Eve's best king-protocol fidelity at fixed F_Bob, over p and v."""
    from .phasecov import mub_cloner

    best = -np.inf
    for p in np.linspace(0, 1, n_p):
        if d > 2 and p >= 1:
            continue
        FB = cloner_FB_from_bob(d, F_bob, p)
        if not 1 / d - 1e-12 <= FB <= 1 + 1e-12:
            continue
        FB = min(max(FB, 1 / d), 1.0)
        _, FE, v = mub_cloner(d, g, FB, grid=400)
        best = max(best, king_fidelities(AttackParams(d, g, p, FB, v))[1])
    return float(best)


def eve_dual_amplitudes(params: AttackParams) -> np.ndarray:
    return cerf_dual(params.amplitudes)
