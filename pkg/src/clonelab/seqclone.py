"""Sequential N -> M universal cloning as a matrix-product state.

The clone-plus-machine state for one symmetric input |(N-m)0, m1> lives on
2M-N sites: M clones followed by M-N machine qubits.  A single D-dimensional
ancilla meets the sites one at a time through D x D matrices V^[n]i.  The
state is <phi_F| V^[2M-N] ... V^[1] |phi_I>.

Ancilla labels are 0-based throughout.  On the clone sites a label counts
the 1s written so far (for qudits, the occupation vector written so far).  On
the machine sites it counts the zeros still to be written (for qudits, the
occupation vector still to be written).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

from .linalg import OccupationVector, StateVector, check_dim, sym_basis, sym_embed
from .uqcm import fan_clone_state, universal_fidelity

ISO_TOL = 1e-10


@dataclass(frozen=True)
class MPSChain:
    """Site tensors ``sites[n][i]`` (D x D), boundary vectors and physical dimension."""

    sites: tuple[np.ndarray, ...]  # each of shape (d, D, D)
    phi_I: np.ndarray
    phi_F: np.ndarray
    d: int
    reachable: tuple[np.ndarray, ...]  # boolean masks of input labels in use, per site

    @property
    def D(self) -> int:
        return self.phi_I.size

    @property
    def length(self) -> int:
        return len(self.sites)

    def contract(self) -> np.ndarray:
        """Amplitudes over d^length, first site leftmost."""
        check_dim(self.d ** self.length)
        # psi[idx, alpha]: amplitudes with the ancilla still attached
        psi = self.phi_I[None, :].astype(complex)
        for V in self.sites:
            psi = np.einsum("kb,iab->kia", psi, V).reshape(-1, self.D)
        return psi @ self.phi_F.conj()

    def isometry_residuals(self) -> list[float]:
        """max |sum_i V^i+ V^i - I| restricted to labels reachable from phi_I."""
        out = []
        for V, mask in zip(self.sites, self.reachable):
            G = np.einsum("iab,iac->bc", V.conj(), V)
            sub = G[np.ix_(mask, mask)]
            out.append(float(np.abs(sub - np.eye(sub.shape[0])).max()) if mask.any() else 0.0)
        return out

    def completed(self) -> "MPSChain":
        """Fill unreachable input labels so each site is a full isometry C^D -> C^d (x) C^D."""
        sites = []
        for V, mask in zip(self.sites, self.reachable):
            d, D, _ = V.shape
            W = V.transpose(0, 1, 2).reshape(d * D, D).copy()
            W[:, ~mask] = 0
            used = W[:, mask]
            # orthonormal complement of the reachable image
            q, _ = np.linalg.qr(np.hstack([used, np.eye(d * D)]))
            extra = q[:, used.shape[1]:]
            W[:, ~mask] = extra[:, : (~mask).sum()]
            sites.append(W.reshape(d, D, D))
        full = tuple(np.ones(self.D, dtype=bool) for _ in sites)
        return MPSChain(tuple(sites), self.phi_I, self.phi_F, self.d, full)

    def to_json(self) -> str:
        rows = []
        for n, V in enumerate(self.sites):
            for i in range(self.d):
                M = V[i]
                rows.append({
                    "site": n, "physical": i,
                    "re": M.real.ravel().tolist(), "im": M.imag.ravel().tolist(),
                })
        return json.dumps({"d": self.d, "D": self.D, "phi_I": self.phi_I.real.tolist(),
                           "phi_F": self.phi_F.real.tolist(), "tensors": rows})

    @classmethod
    def from_json(cls, text: str) -> "MPSChain":
        obj = json.loads(text)
        d, D = obj["d"], obj["D"]
        n_sites = 1 + max(r["site"] for r in obj["tensors"])
        sites = np.zeros((n_sites, d, D, D), dtype=complex)
        for r in obj["tensors"]:
            sites[r["site"], r["physical"]] = (np.array(r["re"]) + 1j * np.array(r["im"])).reshape(D, D)
        full = tuple(np.ones(D, dtype=bool) for _ in range(n_sites))
        return cls(tuple(sites), np.array(obj["phi_I"], dtype=float), np.array(obj["phi_F"], dtype=float), d, full)


# -- direct construction ----------------------------------------------------------


def beta(N: int, M: int, m: int, J: int) -> float:
    """beta_mJ = sqrt(C(M-m-J, M-N-J) C(m+J, J) / C(M+1, N+1)); zero outside 0 <= J <= M-N."""
    if not 0 <= J <= M - N:
        return 0.0
    return math.sqrt(comb(M - m - J, M - N - J) * comb(m + J, J) / comb(M + 1, N + 1))


def _dicke(n: int, ones: int) -> np.ndarray:
    return sym_embed(OccupationVector((n - ones, ones))).amps


def target_state(N: int, M: int, m: int) -> np.ndarray:
    """|Psi_M^(m)> = sum_J beta_mJ |(M-m-J)0, (m+J)1> (x) |(M-N-J)1, J0>_R, written out directly."""
    _check(N, M, m)
    check_dim(2 ** (2 * M - N))
    out = np.zeros(2 ** (2 * M - N), dtype=complex)
    for J in range(M - N + 1):
        b = beta(N, M, m, J)
        if b:
            out += b * np.kron(_dicke(M, m + J), _dicke(M - N, M - N - J))
    return out


def _check(N: int, M: int, m: int):
    if not 0 <= m <= N:
        raise ValueError("need 0 <= m <= N")
    if not 1 <= N < M:
        raise ValueError("need 1 <= N < M")


# -- qubit chain from the closed-form Schmidt data ----------------------------------


def qubit_case(n: int, N: int, M: int, m: int) -> str:
    """Which closed-form case site n (1-based) falls in, for m <= N - m.

    The intervals are half-open as stated; exactly one must match.
    """
    cases = {
        "n=1": n == 1,
        "1<n<=M-N+m": 1 < n <= M - N + m,
        "M-N+m<n<=M-m": max(M - N + m, 1) < n <= M - m and n < M,
        "M-m<n<=M-1": max(M - m, 1) < n <= M - 1,
        "n=M": n == M,
        "n=M+l": M < n <= 2 * M - N,
    }
    hits = [k for k, v in cases.items() if v]
    if len(hits) != 1:
        raise AssertionError(f"site {n} matches cases {hits} for N={N}, M={M}, m={m}")
    return hits[0]


def clone_lambda(N: int, M: int, m: int, n: int, j: int) -> float:
    """Schmidt coefficient after n clone sites with j ones written (0 <= n <= M)."""
    if j < 0 or j > n:
        return 0.0
    s = sum(beta(N, M, m, j + k) ** 2 * comb(M - n, m + k) / comb(M, m + j + k)
            for k in range(-m, M - m - n + 1) if 0 <= m + k <= M - n)
    return math.sqrt(comb(n, j) * s)


def machine_lambda(N: int, M: int, m: int, l: int, r: int) -> float:
    """Schmidt coefficient after l machine sites with r zeros still to write."""
    K = M - N
    if r < 0 or r > K - l:
        return 0.0
    s = sum(beta(N, M, m, r + k) ** 2 * comb(l, k) / comb(K, r + k) for k in range(l + 1) if r + k <= K)
    return math.sqrt(comb(K - l, r) * s)


def bond_dim_minimal(N: int, M: int) -> int:
    """Labels needed when m > N/2 reuses the m' = N - m chain with flipped bits."""
    return M - N + N // 2 + 1


def bond_dim_qubit_formula(N: int, M: int) -> int:
    """M - N/2 + 1 (N even) or M - (N-1)/2 + 1 (N odd)."""
    return M - N // 2 + 1 if N % 2 == 0 else M - (N - 1) // 2 + 1


def bond_dim_qudit_formula(N: int, M: int, d: int) -> int:
    k = M - (N + 1) // 2
    return comb(k + d - 1, k)


def _qubit_chain_low(N: int, M: int, m: int, D: int) -> MPSChain:
    K = M - N
    L = 2 * M - N
    sites, masks = [], []
    for n in range(1, L + 1):
        qubit_case(n, N, M, m)
        V = np.zeros((2, D, D))
        mask = np.zeros(D, dtype=bool)
        if n <= M:
            for j in range(n):  # input label: ones among the first n-1 sites
                lam_prev = clone_lambda(N, M, m, n - 1, j)
                if lam_prev < 1e-14:
                    continue
                mask[j] = True
                for i in (0, 1):
                    out = j + i
                    lam = clone_lambda(N, M, m, n, out)
                    if lam == 0 or out >= D:
                        continue
                    V[i, out, j] = math.sqrt(comb(n - 1, j) / comb(n, out)) * lam / lam_prev
            if n == M:
                # relabel from "total ones" to "zeros still to write" = total - m
                R = np.zeros((D, D))
                for t in range(D):
                    if 0 <= t - m < D:
                        R[t - m, t] = 1
                V = np.einsum("ab,ibc->iac", R, V)
        else:
            l = n - M
            for r_prev in range(K - l + 2):
                if machine_lambda(N, M, m, l - 1, r_prev) < 1e-14:
                    continue
                mask[r_prev] = True
                if r_prev >= 1:
                    V[0, r_prev - 1, r_prev] = math.sqrt(r_prev / (K - l + 1))
                if r_prev <= K - l:
                    V[1, r_prev, r_prev] = math.sqrt((K - l + 1 - r_prev) / (K - l + 1))
        sites.append(V)
        masks.append(mask)
    phi_I = np.zeros(D)
    phi_I[0] = 1
    phi_F = np.zeros(D)
    phi_F[0] = 1
    return MPSChain(tuple(sites), phi_I, phi_F, 2, tuple(masks))


@lru_cache(maxsize=None)
def seq_matrices_qubit(N: int, M: int, m: int) -> MPSChain:
    """Chain generating |Psi_M^(m)>; m > N/2 flips the physical index of the N - m chain."""
    _check(N, M, m)
    D = bond_dim_minimal(N, M)
    if m <= N - m:
        return _qubit_chain_low(N, M, m, D)
    low = _qubit_chain_low(N, M, N - m, D)
    return MPSChain(tuple(V[::-1].copy() for V in low.sites), low.phi_I, low.phi_F, 2, low.reachable)


def max_used_bond(chain: MPSChain) -> int:
    """Largest number of labels actually carried across any bond."""
    return int(max(m.sum() for m in chain.reachable))


# -- qudit chain ---------------------------------------------------------------------


def _compositions(total: int, d: int) -> list[tuple[int, ...]]:
    return [n.counts for n in sym_basis(d, total)] if total >= 0 else []


def _multinomial(v) -> int:
    out = math.factorial(sum(v))
    for x in v:
        out //= math.factorial(x)
    return out


def qudit_beta(mvec: tuple[int, ...], jvec: tuple[int, ...], M: int) -> float:
    d, N = len(mvec), sum(mvec)
    num = math.prod(comb(a + b, a) for a, b in zip(mvec, jvec))
    return math.sqrt(num / comb(M + d - 1, M - N))


@lru_cache(maxsize=None)
def seq_matrices_qudit(N: int, M: int, d: int, mvec: tuple[int, ...] | None = None) -> MPSChain:
    """Chain for the Fan-cloner output of the occupation input ``mvec``.

    Defaults to all particles in mode 0.  Label spaces for different bonds are
    packed into a common D by enumeration order (``sym_basis`` order).
    """
    if mvec is None:
        mvec = (N,) + (0,) * (d - 1)
    mvec = tuple(mvec)
    if len(mvec) != d or sum(mvec) != N or min(mvec) < 0:
        raise ValueError("mvec must be an occupation vector of N particles in d modes")
    if not 1 <= N < M:
        raise ValueError("need 1 <= N < M")
    K = M - N
    J_all = _compositions(K, d)
    betas = {J: qudit_beta(mvec, J, M) for J in J_all}

    def clone_lam(n, jv):
        # weight of "occupation jv among the first n clones"
        s = 0.0
        for J, b in betas.items():
            t = tuple(a + c for a, c in zip(mvec, J))
            rest = tuple(a - c for a, c in zip(t, jv))
            if min(rest) < 0:
                continue
            s += b * b * _multinomial(jv) * _multinomial(rest) / _multinomial(t)
        return math.sqrt(s)

    def mach_lam(l, rv):
        # weight of "occupation rv still to write after l machine sites"
        s = 0.0
        for J, b in betas.items():
            done = tuple(a - c for a, c in zip(J, rv))
            if min(done) < 0:
                continue
            s += b * b * _multinomial(done) * _multinomial(rv) / _multinomial(J)
        return math.sqrt(s)

    # label sets per bond 0..2M-N
    labels: list[list[tuple[int, ...]]] = []
    for n in range(M + 1):
        labels.append([jv for jv in _compositions(n, d) if clone_lam(n, jv) > 1e-14])
    labels[M] = list(J_all)
    for l in range(1, K + 1):
        labels.append([rv for rv in _compositions(K - l, d) if mach_lam(l, rv) > 1e-14])
    D = max(len(x) for x in labels)
    index = [{lab: k for k, lab in enumerate(x)} for x in labels]

    sites, masks = [], []
    for n in range(1, 2 * M - N + 1):
        V = np.zeros((d, D, D))
        mask = np.zeros(D, dtype=bool)
        mask[: len(labels[n - 1])] = True
        for jv, col in index[n - 1].items():
            for i in range(d):
                if n <= M:
                    lam_prev = clone_lam(n - 1, jv)
                    nxt = tuple(c + (k == i) for k, c in enumerate(jv))
                    if n < M:
                        if nxt not in index[n]:
                            continue
                        lam = clone_lam(n, nxt)
                        V[i, index[n][nxt], col] = math.sqrt((jv[i] + 1) / n) * lam / lam_prev
                    else:
                        J = tuple(a - c for a, c in zip(nxt, mvec))
                        if J not in index[M]:
                            continue
                        V[i, index[M][J], col] = math.sqrt((jv[i] + 1) / M) * betas[J] / lam_prev
                else:
                    l = n - M
                    if jv[i] == 0:
                        continue
                    nxt = tuple(c - (k == i) for k, c in enumerate(jv))
                    V[i, index[n][nxt], col] = math.sqrt(jv[i] / (K - l + 1))
        sites.append(V)
        masks.append(mask)
    phi_I = np.zeros(D)
    phi_I[0] = 1
    phi_F = np.zeros(D)
    phi_F[0] = 1
    return MPSChain(tuple(sites), phi_I, phi_F, d, tuple(masks))


def qudit_target_state(N: int, M: int, d: int, mvec: tuple[int, ...] | None = None) -> np.ndarray:
    """Fan-cloner output for occupation input ``mvec`` as a vector on M clones then M-N machine qudits."""
    if mvec is None:
        mvec = (N,) + (0,) * (d - 1)
    check_dim(d ** (2 * M - N))
    inB = sym_basis(d, N)
    c = np.zeros(len(inB))
    c[[n.counts for n in inB].index(tuple(mvec))] = 1
    amps = fan_clone_state(c, N, M, d)
    outB, ancB = sym_basis(d, M), sym_basis(d, M - N)
    out = np.zeros(d ** (2 * M - N), dtype=complex)
    for a, nM in enumerate(outB):
        for b, j in enumerate(ancB):
            if amps[a, b]:
                out += amps[a, b] * np.kron(sym_embed(nM).amps, sym_embed(j).amps)
    return out


def flip_machine_qubits(state: np.ndarray, N: int, M: int) -> np.ndarray:
    """Apply X to the M-N machine qubits (maps |j>_R occupation to the zeros-count convention)."""
    K = M - N
    t = state.reshape(2 ** M, 2 ** K)
    idx = np.arange(2 ** K) ^ (2 ** K - 1)
    return t[:, idx].reshape(-1)


# -- the full protocol -------------------------------------------------------------


@dataclass(frozen=True)
class Branch:
    outcome: int
    probability: float
    state: np.ndarray  # normalized, after the phase correction
    overlap: float  # |<target|state>|
    global_phase: complex


def target_output(N: int, M: int, x0: complex, x1: complex) -> np.ndarray:
    """sum_m x0^(N-m) x1^m sqrt(C(N,m)) |Psi_M^(m)>."""
    return sum(x0 ** (N - m) * x1 ** m * math.sqrt(comb(N, m)) * target_state(N, M, m) for m in range(N + 1))


def seq_clone_protocol(N: int, M: int, x0: complex, x1: complex) -> list[Branch]:
    """Run the controlled sequential generation, Fourier step, measurement and phase correction.

    The register holding m is (N+1)-dimensional; the D-dimensional ancilla
    follows it.  Every site applies sum_m |m><m| (x) V_(m).
    """
    if abs(abs(x0) ** 2 + abs(x1) ** 2 - 1) > 1e-12:
        raise ValueError("|x0|^2 + |x1|^2 must be 1")
    L = 2 * M - N
    check_dim((N + 1) * 2 ** L * bond_dim_minimal(N, M))
    chains = [seq_matrices_qubit(N, M, m).completed() for m in range(N + 1)]
    D = chains[0].D
    c = np.array([x0 ** (N - m) * x1 ** m * math.sqrt(comb(N, m)) for m in range(N + 1)], dtype=complex)
    # state[m, phys, alpha]
    state = np.zeros((N + 1, 1, D), dtype=complex)
    for m in range(N + 1):
        state[m, 0] = c[m] * chains[m].phi_I
    for n in range(L):
        new = np.zeros((N + 1, state.shape[1] * 2, D), dtype=complex)
        for m in range(N + 1):
            V = chains[m].sites[n]
            new[m] = np.einsum("kb,iab->kia", state[m], V).reshape(-1, D)
        state = new
    # project the ancilla on phi_F^(m); the chains end on a single label so nothing is lost
    out = np.array([state[m] @ chains[m].phi_F.conj() for m in range(N + 1)])
    lost = 1 - float(np.sum(np.abs(out) ** 2))
    if abs(lost) > 1e-10:
        raise ArithmeticError(f"ancilla not decoupled: {lost:.2e}")
    # Fourier on the register, then read out m'
    w = np.exp(2j * math.pi / (N + 1))
    F = np.array([[w ** (m * mp) for m in range(N + 1)] for mp in range(N + 1)]) / math.sqrt(N + 1)
    branches_raw = F @ out
    target = target_output(N, M, x0, x1)
    ones = np.array([bin(k).count("1") for k in range(2 ** L)])
    branches = []
    for mp in range(N + 1):
        psi = branches_raw[mp]
        prob = float(np.vdot(psi, psi).real)
        theta = -2 * math.pi * mp / (N + 1)
        psi = np.exp(1j * theta * ones) * psi / math.sqrt(prob)
        ov = np.vdot(target, psi)
        branches.append(Branch(mp, prob, psi, float(abs(ov)), complex(ov / abs(ov))))
    return branches


def single_copy_fidelity(N: int, M: int, x0: complex, x1: complex) -> tuple[float, float]:
    """(simulated first-clone fidelity of the protocol output, closed-form value)."""
    from .linalg import ptrace

    psi = target_output(N, M, x0, x1)
    rho = ptrace(np.outer(psi, psi.conj()), (2,) * (2 * M - N), [0])
    v = np.array([x0, x1])
    return float(np.vdot(v, rho @ v).real), universal_fidelity(2, N, M)
