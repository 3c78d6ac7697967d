"""Phase-covariant and state-dependent cloning.

Covers equatorial qubits (economic and ancilla-assisted, 1 -> 2 and 1 -> M),
equatorial qudits, cloners for g+1 mutually unbiased bases, two
non-orthogonal states, and a numerical search for optimal cloners on a finite
input set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import brentq, minimize, minimize_scalar

from .asym import cerf_dual, pauli_mix
from .linalg import (
    DensityMatrix,
    OccupationVector,
    StateVector,
    fidelity,
    is_prime,
    mub,
    ptrace,
    sym_embed,
    sym_isometry,
)


@dataclass(frozen=True)
class EquatorialQubit:
    phi: float

    @property
    def vector(self) -> np.ndarray:
        return np.array([1, np.exp(1j * self.phi)]) / math.sqrt(2)


def equatorial(phi: float) -> np.ndarray:
    return EquatorialQubit(phi).vector


def equatorial_qudit(phases: Sequence[float]) -> np.ndarray:
    ph = np.asarray(phases, dtype=float)
    return np.exp(1j * ph) / math.sqrt(ph.size)


PHASE_OPTIMAL = 0.5 + 1 / math.sqrt(8)


# -- 1 -> 2 economic and non-economic -----------------------------------------


def economic_isometry(eta: float) -> np.ndarray:
    """|00> -> |00>, |10> -> cos(eta)|10> + sin(eta)|01>; columns are the images of |0>, |1>."""
    V = np.zeros((4, 2))
    V[0b00, 0] = 1
    V[0b10, 1] = math.cos(eta)
    V[0b01, 1] = math.sin(eta)
    return V


def economic_phase_1to2(phi: float, eta: float = math.pi / 4) -> tuple[float, float, StateVector]:
    if not 0 <= eta <= math.pi / 2 + 1e-12:
        raise ValueError("eta must lie in [0, pi/2]")
    out = economic_isometry(eta) @ equatorial(phi)
    rho = np.outer(out, out.conj())
    v = equatorial(phi)
    FA = fidelity(ptrace(rho, (2, 2), [0]), v)
    FB = fidelity(ptrace(rho, (2, 2), [1]), v)
    return FA, FB, StateVector(out, (2, 2))


def economic_phase_fidelities(eta: float) -> tuple[float, float]:
    return (1 + math.cos(eta)) / 2, (1 + math.sin(eta)) / 2


def noneconomic_isometry() -> np.ndarray:
    """Optimal 1 -> 2 phase cloner with one ancilla qubit; rows ordered (copy1, copy2, a)."""
    s = 1 / math.sqrt(2)
    V = np.zeros((8, 2))
    V[0b000, 0] = s
    V[0b011, 0] = 0.5
    V[0b101, 0] = 0.5
    V[0b111, 1] = s
    V[0b010, 1] = 0.5
    V[0b100, 1] = 0.5
    return V


def single_copy(V: np.ndarray, psi: np.ndarray, n_copies: int, anc_dim: int, k: int = 0) -> np.ndarray:
    out = V @ psi
    dims = (2,) * n_copies + ((anc_dim,) if anc_dim > 1 else ())
    return ptrace(np.outer(out, out.conj()), dims, [k])


def is_scalar_form(rho: np.ndarray, psi: np.ndarray, tol: float = 1e-12) -> bool:
    """True when rho = eta |psi><psi| + (1 - eta) I/d for some eta."""
    d = psi.size
    P = np.outer(psi, psi.conj())
    eta = (np.vdot(psi, rho @ psi).real * d - 1) / (d - 1)
    return bool(np.abs(rho - eta * P - (1 - eta) * np.eye(d) / d).max() < tol)


# -- 1 -> M ---------------------------------------------------------------------


def phase_optimal_fidelity(M: int) -> float:
    if M < 1:
        raise ValueError("M must be >= 1")
    if M % 2 == 0:
        return 0.5 + math.sqrt(M * (M + 2)) / (4 * M)
    return 0.5 + (M + 1) / (4 * M)


def _sym(M: int, k_down: int) -> np.ndarray:
    return sym_embed(OccupationVector((M - k_down, k_down))).amps.real


def family_isometry(alphas: Sequence[float]) -> np.ndarray:
    """Universal-type 1 -> M family: |up> -> sum a_j |(M-j)up, j down> R_j,
    |down> -> sum a_{M-1-j} |(M-1-j)up, (j+1)down> R_j.  Rows: clones x ancilla(M)."""
    a = np.asarray(alphas, dtype=float)
    M = a.size
    V = np.zeros((2 ** M, M, 2))
    for j in range(M):
        V[:, j, 0] = a[j] * _sym(M, j)
        V[:, j, 1] = a[M - 1 - j] * _sym(M, j + 1)
    return V.reshape(2 ** M * M, 2)


def family_shrinking(alphas: Sequence[float]) -> float:
    """eta(1,M) = sum_j a_j a_{M-1-j} C(M-1,j)/sqrt(C(M,j) C(M,j+1))."""
    a = np.asarray(alphas, dtype=float)
    M = a.size
    return float(sum(
        a[j] * a[M - 1 - j] * math.comb(M - 1, j) / math.sqrt(math.comb(M, j) * math.comb(M, j + 1))
        for j in range(M)
    ))


@dataclass(frozen=True)
class PhaseCloner:
    M: int
    isometry: np.ndarray
    anc_dim: int
    F: float
    economic: bool

    def simulate(self, phi: float, k: int = 0) -> float:
        v = equatorial(phi)
        rho = single_copy(self.isometry, v, self.M, self.anc_dim, k)
        return fidelity(rho, v)

    def reduced(self, phi: float, k: int = 0) -> DensityMatrix:
        return DensityMatrix(single_copy(self.isometry, equatorial(phi), self.M, self.anc_dim, k), (2,))


def phase_1toM(M: int, economic: bool = False) -> PhaseCloner:
    """Optimal 1 -> M equatorial cloner.

    Even M uses two ancilla states (or the economic variant on request); odd M
    is economic by construction.
    """
    if M < 2:
        raise ValueError("M must be >= 2")
    L = M // 2
    if M % 2 == 1:
        V = np.column_stack([_sym(M, L), _sym(M, L + 1)])
        return PhaseCloner(M, V, 1, phase_optimal_fidelity(M), True)
    if economic:
        V = np.column_stack([_sym(M, L - 1), _sym(M, L)])
        return PhaseCloner(M, V, 1, phase_optimal_fidelity(M), True)
    s = 1 / math.sqrt(2)
    V = np.zeros((2 ** M, 2, 2))
    V[:, 0, 0] = s * _sym(M, L - 1)
    V[:, 1, 0] = s * _sym(M, L)
    V[:, 0, 1] = s * _sym(M, L)
    V[:, 1, 1] = s * _sym(M, L + 1)
    return PhaseCloner(M, V.reshape(2 ** M * 2, 2), 2, phase_optimal_fidelity(M), False)


def phase_matrix(M: int) -> np.ndarray:
    """Fidelity matrix over (j, k), j in {0, 1}, k in 0..M.

    (0, k) couples to (1, k+1) with weight sqrt((M-k)(k+1))/(4M): the pairs the
    transformation actually links.  The matrix splits into 2x2 blocks.
    """
    n = M + 1
    A = np.eye(2 * n) / 4
    for k in range(M):
        c = math.sqrt((M - k) * (k + 1)) / M / 4
        A[k, n + k + 1] = A[n + k + 1, k] = c
    return A


def phase_matrix_bound(M: int) -> float:
    """F = 2 lambda_max of ``phase_matrix``."""
    if M < 2:
        raise ValueError("M must be >= 2")
    return float(2 * np.linalg.eigvalsh(phase_matrix(M)).max())


# -- qudits -----------------------------------------------------------------------


def qudit_phase_optimal(d: int) -> float:
    return 1 / d + (d - 2 + math.sqrt(d * d + 4 * d - 4)) / (4 * d)


def qudit_phase_ab(d: int) -> tuple[float, float]:
    r = (d - 2) / (2 * math.sqrt(d * d + 4 * d - 4))
    return math.sqrt(0.5 - r), math.sqrt(0.5 + r)


def qudit_asym_fidelities(d: int, alpha: float, beta: float, theta: float) -> tuple[float, float]:
    c, s = math.cos(theta), math.sin(theta)
    base = 1 / d
    F1 = base + 2 * alpha * beta * math.sqrt(d - 1) * c / d + beta ** 2 * (d - 2) * c * c / d
    F2 = base + 2 * alpha * beta * math.sqrt(d - 1) * s / d + beta ** 2 * (d - 2) * s * s / d
    return F1, F2


def qudit_phase_isometry(d: int, alpha: float, beta: float, theta: float = math.pi / 4) -> np.ndarray:
    """|i> -> alpha|ii>|i> + beta/sqrt(d-1) sum_{j!=i} (cos t |ij> + sin t |ji>)|j>.

    Rows are (copy1, copy2, ancilla); at theta = pi/4 this is the symmetric
    cloner with |R_l> = |l>.
    """
    V = np.zeros((d, d, d, d))
    c, s = math.cos(theta), math.sin(theta)
    for i in range(d):
        V[i, i, i, i] = alpha
        for j in range(d):
            if j != i:
                V[i, j, j, i] += beta * c / math.sqrt(d - 1)
                V[j, i, j, i] += beta * s / math.sqrt(d - 1)
    return V.reshape(d ** 3, d)


def simulate_qudit_phase(d: int, phases: Sequence[float], alpha: float, beta: float,
                         theta: float = math.pi / 4) -> tuple[float, float]:
    v = equatorial_qudit(phases)
    out = qudit_phase_isometry(d, alpha, beta, theta) @ v
    rho = np.outer(out, out.conj())
    return (fidelity(ptrace(rho, (d, d, d), [0]), v), fidelity(ptrace(rho, (d, d, d), [1]), v))


def phase_qudit_1to2(d: int, theta: float | None = None, alpha: float | None = None):
    """Fidelities of the qudit phase cloner and the (alpha, beta) used.

    With no arguments the symmetric optimum is returned.  With ``theta`` the
    asymmetric family is evaluated; alpha defaults to the value maximizing
    F1 + F2 at that theta.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    if theta is None:
        a, b = qudit_phase_ab(d)
        F = qudit_phase_optimal(d)
        return (F, F), (a, b)
    if alpha is None:
        res = minimize_scalar(lambda t: -sum(qudit_asym_fidelities(d, math.cos(t), math.sin(t), theta)),
                              bounds=(0, math.pi / 2), method="bounded", options={"xatol": 1e-12})
        alpha = math.cos(res.x)
    beta = math.sqrt(max(1 - alpha * alpha, 0.0))
    return qudit_asym_fidelities(d, alpha, beta, theta), (alpha, beta)


def qudit_phase_frontier(d: int, F1: float, n_theta: int = 721) -> float:
    """Largest F2 reachable by the asymmetric qudit phase family at fixed F1."""
    best = -np.inf
    for theta in np.linspace(0, math.pi / 2, n_theta):
        def f1_of(t, th=theta):
            return qudit_asym_fidelities(d, math.cos(t), math.sin(t), th)[0] - F1
        ts = np.linspace(0, math.pi / 2, 401)
        vals = np.array([f1_of(t) for t in ts])
        for i in np.flatnonzero(np.sign(vals[:-1]) != np.sign(vals[1:])):
            t = brentq(f1_of, ts[i], ts[i + 1], xtol=1e-14)
            best = max(best, qudit_asym_fidelities(d, math.cos(t), math.sin(t), theta)[1])
    return float(best)


# -- cloners for g+1 MUBs ----------------------------------------------------------


@dataclass(frozen=True)
class MubCloneParams:
    d: int
    g: int
    F_B: float
    v: float
    x: float = field(init=False)
    y: float = field(init=False)

    def __post_init__(self):
        d, g, F, v = self.d, self.g, self.F_B, self.v
        x2 = (F - v * v) / (d - 1)
        y2 = (1 + g * v * v - (g + 1) * F) / ((d - 1) * (d - g)) if d > g else 0.0
        if x2 < -1e-12 or y2 < -1e-12:
            raise ValueError(f"v = {v} outside the real range for F_B = {F}")
        object.__setattr__(self, "x", math.sqrt(max(x2, 0.0)))
        object.__setattr__(self, "y", math.sqrt(max(y2, 0.0)))

    def matrix(self) -> np.ndarray:
        return mub_amplitudes(self.d, self.g, self.v, self.x, self.y)


def mub_amplitudes(d: int, g: int, v: float, x: float, y: float) -> np.ndarray:
    """a_00 = v; a_0n = x; a_{m, km} = x for k < g, m != 0; y elsewhere."""
    a = np.full((d, d), y, dtype=float)
    a[0, :] = x
    a[0, 0] = v
    for m in range(1, d):
        for k in range(g):
            a[m, (k * m) % d] = x
    return a


def mub_v_range(d: int, g: int, F_B: float) -> tuple[float, float]:
    lo2 = max(0.0, ((g + 1) * F_B - 1) / g)
    if g == d:
        return math.sqrt(lo2), math.sqrt(lo2)
    return math.sqrt(lo2), math.sqrt(F_B)


def mub_eve_fidelity(d: int, g: int, v: float, x: float, y: float) -> float:
    return ((v + (d - 1) * x) ** 2 + (d - 1) * (g * x + (d - g) * y) ** 2) / d


def _check(d: int, g: int):
    if not is_prime(d):
        raise ValueError(f"d = {d} must be prime")
    if not 1 <= g <= d:
        raise ValueError(f"g must lie in 1..d, got {g}")


def mub_cloner(d: int, g: int, F_B: float, v: float | None = None, grid: int = 10_000) -> tuple[float, float, float]:
    """(F_B, F_E, v) for the (g+1)-basis cloner.

    With ``v=None`` Eve's fidelity is maximized over the admissible v range:
    a grid of ``grid`` points (endpoints included) followed by a bounded
    refinement around the best grid point.
    """
    _check(d, g)
    if not 1 / d - 1e-12 <= F_B <= 1 + 1e-12:
        raise ValueError("F_B must lie in [1/d, 1]")
    lo, hi = mub_v_range(d, g, F_B)
    if v is not None:
        p = MubCloneParams(d, g, F_B, v)
        return F_B, mub_eve_fidelity(d, g, v, p.x, p.y), v

    def fe(vv):
        p = MubCloneParams(d, g, F_B, min(max(vv, lo), hi))
        return mub_eve_fidelity(d, g, p.v, p.x, p.y)

    if hi - lo < 1e-15:
        return F_B, fe(lo), lo
    vs = np.linspace(lo, hi, grid)
    vals = np.array([fe(t) for t in vs])
    i = int(np.argmax(vals))
    a, b = vs[max(i - 1, 0)], vs[min(i + 1, grid - 1)]
    res = minimize_scalar(lambda t: -fe(t), bounds=(a, b), method="bounded", options={"xatol": 1e-14})
    if -res.fun >= vals[i]:
        return F_B, float(-res.fun), float(res.x)
    return F_B, float(vals[i]), float(vs[i])


def mub_basis_fidelities(a: np.ndarray, g: int) -> tuple[np.ndarray, np.ndarray]:
    """Bob's and Eve's fidelities on the computational basis and the first g MUBs, by simulation.

    Bob sees sum |a|^2 U rho U^dagger and Eve the same with the dual matrix;
    each entry is averaged over the d states of its basis.
    """
    d = a.shape[0]
    fam = mub(d)
    b = cerf_dual(a)
    # basis 0 is computational; the rest are the phase bases in order
    bases = [fam.bases[0]] + list(fam.bases[1:1 + g])
    FB, FE = [], []
    for B in bases:
        fb = fe = 0.0
        for s in B:
            fb += fidelity(pauli_mix(s, a), s)
            fe += fidelity(pauli_mix(s, b), s)
        FB.append(fb / d)
        FE.append(fe / d)
    return np.array(FB), np.array(FE)


def mub_symmetric_fidelity(d: int, g: int) -> float:
    """Symmetric point F_B = F_E of the (g+1)-basis cloner.

    g = d is the universal cloner, where the closed form reads 0/0; the
    universal value (d+3)/(2d+2) is returned there.
    """
    _check(d, g)
    if g == d:
        return (d + 3) / (2 * d + 2)
    disc = (g + 3) ** 2 - 8 * (d - g) * (g + 1) / d
    F = 2 / d * (d - g) / ((g + 3) - math.sqrt(disc))
    if not 1 / d <= F <= 1 + 1e-12:
        raise ArithmeticError(f"branch gives F = {F} outside [1/d, 1]")
    return F


def mub_symmetric_numeric(d: int, g: int) -> float:
    """Solve max_v F_E(F_B) = F_B by root finding (independent of the closed form)."""
    _check(d, g)
    f = lambda F: mub_cloner(d, g, F, grid=400)[1] - F
    return brentq(f, 0.5 * (1 / d + 1) if g < d else (1 / d + 1) / 2, 1 - 1e-12, xtol=1e-13)


def two_basis_tradeoff(F: float, d: int) -> float:
    return F / d + (d - 1) * (1 - F) / d + 2 / d * math.sqrt((d - 1) * F * (1 - F))


# -- two non-orthogonal states -------------------------------------------------


@dataclass(frozen=True)
class TwoStateFidelities:
    F_g: float
    F_l1: float
    F_l3: float
    F_l2: float


def two_state_clone(S: float) -> TwoStateFidelities:
    if not 0 <= S <= 1:
        raise ValueError("S must lie in [0, 1]")
    c2 = math.sqrt(1 - S * S)
    Fg = 0.25 * (math.sqrt(1 + S * S) * math.sqrt(1 + S) + c2 * math.sqrt(1 - S)) ** 2
    Fl1 = 0.5 * (1 + (1 - S * S) / math.sqrt(1 + S * S) + S * S * (1 + S) / (1 + S * S))
    if S == 0:
        Fl3 = 1.0
    else:
        r = math.sqrt(1 - 2 * S + 9 * S * S)
        Fl3 = 0.5 + math.sqrt(2) / (32 * S) * (1 + S) * (3 - 3 * S + r) * math.sqrt(
            max(-1 + 2 * S + 3 * S * S + (1 - S) * r, 0.0))
    Fl2 = 0.5 + math.sqrt(2) / 4 * math.sqrt(
        (1 - 2 * S * S + 2 * S ** 3 + S ** 4) + (1 - S * S) * math.sqrt((1 + S) * (1 - S + 3 * S * S - S ** 3)))
    return TwoStateFidelities(Fg, Fl1, Fl3, Fl2)


def two_state_global_numeric(S: float) -> tuple[float, float]:
    """Optimal global fidelity and its local fidelity, found by direct search.

    |a> = cos t|0> + sin t|1>, |b> = sin t|0> + cos t|1> with S = sin 2t.
    Outputs are restricted to span{|aa>, |bb>} with the exchange-symmetric
    ansatz |alpha> = p|aa> + q|bb>, |beta> = q|aa> + p|bb>, and the overlap
    constraint <alpha|beta> = S fixes q given p.
    """
    t = 0.5 * math.asin(S)
    a = np.array([math.cos(t), math.sin(t)])
    b = np.array([math.sin(t), math.cos(t)])
    aa, bb = np.kron(a, a), np.kron(b, b)

    def states(u):
        # orthonormal frame of span{aa, bb}; alpha, beta symmetric about the bisector
        e_plus = (aa + bb) / np.linalg.norm(aa + bb)
        e_minus = (aa - bb) / np.linalg.norm(aa - bb) if S < 1 else np.zeros(4)
        # <alpha|beta> = cos^2 u - sin^2 u = S
        al = math.cos(u) * e_plus + math.sin(u) * e_minus
        be = math.cos(u) * e_plus - math.sin(u) * e_minus
        return al, be

    u = 0.5 * math.acos(S)
    al, be = states(u)
    Fg = 0.5 * (abs(al @ aa) ** 2 + abs(be @ bb) ** 2)
    rho = np.outer(al, al)
    Fl = float(a @ ptrace(rho, (2, 2), [0]) @ a)
    return float(Fg), Fl


# -- finite-set optimizer ------------------------------------------------------------


@dataclass(frozen=True)
class MinimalSetResult:
    isometry: np.ndarray
    mean_fidelity: float
    fidelities: np.ndarray
    converged: bool
    starts: int


def _isometry_from_params(p: np.ndarray, rows: int) -> np.ndarray:
    Z = (p[: p.size // 2] + 1j * p[p.size // 2:]).reshape(rows, 2)
    u, _, vh = np.linalg.svd(Z, full_matrices=False)
    return u @ vh


def _set_fidelities(V: np.ndarray, inputs: list[np.ndarray], anc_dim: int, S: np.ndarray) -> np.ndarray:
    out = []
    for v in inputs:
        amp = (V @ v).reshape(3, anc_dim)
        full = (S @ amp).reshape(2, 2, anc_dim)
        rho1 = np.einsum("aik,bik->ab", full, full.conj())
        out.append(np.vdot(v, rho1 @ v).real)
    return np.array(out)


def minimal_set_optimizer(inputs: Sequence, ancilla_dim: int = 1, starts: int = 20, seed: int = 0,
                          equal_fidelity: bool = False, tol: float = 1e-10) -> MinimalSetResult:
    """Best symmetric 1 -> 2 qubit cloner for a finite input set.

    The cloner maps C^2 into the symmetric two-qubit subspace (times an
    optional ancilla of dimension ``ancilla_dim``; 1 is the economic case).
    The isometry is the polar factor of a free complex matrix, so unitarity
    holds by construction.  Each of ``starts`` random starts runs a
    derivative-free Powell search; the best result is kept.  With
    ``equal_fidelity`` the spread of per-input fidelities is penalized.
    """
    vecs = [np.asarray(s.amps if isinstance(s, StateVector) else s, dtype=complex).ravel() for s in inputs]
    if len(vecs) < 2:
        raise ValueError("need at least two input states")
    if any(v.size != 2 for v in vecs):
        raise ValueError("inputs must be qubits")
    rows = 3 * ancilla_dim
    S = sym_isometry(2, 2)
    rng = np.random.default_rng(seed)

    def objective(p):
        f = _set_fidelities(_isometry_from_params(p, rows), vecs, ancilla_dim, S)
        pen = 10.0 * float(np.ptp(f)) ** 2 if equal_fidelity else 0.0
        return -f.mean() + pen

    best = None
    ok = False
    for _ in range(starts):
        res = minimize(objective, rng.normal(size=4 * rows), method="Powell",
                       options={"xtol": 1e-10, "ftol": 1e-13, "maxfev": 40_000})
        if best is None or res.fun < best.fun:
            best = res
        ok = ok or bool(res.success)
    V = _isometry_from_params(best.x, rows)
    f = _set_fidelities(V, vecs, ancilla_dim, S)
    return MinimalSetResult(V, float(f.mean()), f, ok, starts)


def tetrahedron_states() -> list[np.ndarray]:
    """Four Bloch vectors at the vertices of a regular tetrahedron, cos(theta/2) = sqrt(3)/3 for three of them."""
    c = math.sqrt(3) / 3
    s = math.sqrt(1 - c * c)
    return [np.array([1.0, 0.0], dtype=complex)] + [
        np.array([c, s * np.exp(2j * math.pi * k / 3)]) for k in range(3)
    ]


def bb84_states() -> list[np.ndarray]:
    return [equatorial(k * math.pi / 2) for k in range(4)]


def trine_states() -> list[np.ndarray]:
    return [equatorial(2 * math.pi * k / 3) for k in range(3)]
