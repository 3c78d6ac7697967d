"""Finite-dimensional state machinery shared by every cloner in the package.

Conventions
-----------
* Subsystems are ordered left to right and combined with ``np.kron``.
* ``omega = exp(2*pi*i/d)``; all qudit labels are taken mod ``d``.
* ``|up> == |0>`` and ``|down> == |1>`` for qubits.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

ATOL = 1e-10
NORM_TOL = 1e-12
DEFAULT_MAX_DIM = 2 ** 14


class DimensionCapError(ValueError):
    """Raised when a construction would exceed the Hilbert-space size cap."""


def max_dim() -> int:
    return int(os.environ.get("CLONELAB_MAX_DIM", DEFAULT_MAX_DIM))


def check_dim(total: int) -> None:
    cap = max_dim()
    if total > cap:
        raise DimensionCapError(
            f"Hilbert dimension {total} exceeds cap {cap} (set CLONELAB_MAX_DIM to raise it)"
        )


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class StateVector:
    amps: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        amps = _frozen(np.ravel(self.amps))
        dims = tuple(int(x) for x in self.dims)
        object.__setattr__(self, "amps", amps)
        object.__setattr__(self, "dims", dims)
        if amps.size != math.prod(dims):
            raise ValueError(f"length {amps.size} does not match dims {dims}")
        norm = np.vdot(amps, amps).real
        if abs(norm - 1) > NORM_TOL * max(1, amps.size) ** 0.5 * 10:
            raise ValueError(f"state not normalized: |psi|^2 = {norm}")

    @property
    def dim(self) -> int:
        return self.amps.size

    def dm(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amps, self.amps.conj()), self.dims)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amps, dtype=dtype)


@dataclass(frozen=True)
class DensityMatrix:
    mat: np.ndarray
    dims: tuple[int, ...]
    validate: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        mat = _frozen(self.mat)
        dims = tuple(int(x) for x in self.dims)
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "dims", dims)
        n = math.prod(dims)
        if mat.shape != (n, n):
            raise ValueError(f"matrix shape {mat.shape} does not match dims {dims}")
        if self.validate:
            problems = density_problems(mat)
            if problems:
                raise ValueError("invalid density matrix: " + "; ".join(problems))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.mat, dtype=dtype)


def density_problems(mat: np.ndarray, tol: float = ATOL) -> list[str]:
    """Return the list of violated density-matrix invariants (empty when valid)."""
    out = []
    herm = np.linalg.norm(mat - mat.conj().T)
    if herm > NORM_TOL * max(1.0, mat.shape[0]) * 10:
        out.append(f"non-Hermitian (|rho - rho^H| = {herm:.3g})")
    tr = np.trace(mat)
    if abs(tr - 1) > NORM_TOL * max(1.0, mat.shape[0]) * 10:
        out.append(f"trace {tr.real:.15g}")
    lam = np.linalg.eigvalsh((mat + mat.conj().T) / 2).min()
    if lam < -tol:
        out.append(f"negative eigenvalue {lam:.3g}")
    return out


@dataclass(frozen=True)
class OccupationVector:
    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        object.__setattr__(self, "counts", counts)
        if len(counts) < 2:
            raise ValueError("occupation vectors need d >= 2 components")
        if any(c < 0 for c in counts):
            raise ValueError(f"negative occupation in {counts}")

    @property
    def d(self) -> int:
        return len(self.counts)

    @property
    def N(self) -> int:
        return sum(self.counts)

    def __add__(self, other: "OccupationVector") -> "OccupationVector":
        return OccupationVector(tuple(a + b for a, b in zip(self.counts, other.counts)))

    def __iter__(self):
        return iter(self.counts)


# -- constructors ---------------------------------------------------------


def ket(amps: Sequence[complex], dims: Sequence[int] | None = None, normalize: bool = False) -> StateVector:
    v = np.asarray(amps, dtype=complex).ravel()
    if normalize:
        v = v / np.linalg.norm(v)
    return StateVector(v, tuple(dims) if dims is not None else (v.size,))


def basis(d: int, i: int) -> StateVector:
    v = np.zeros(d, dtype=complex)
    v[i % d] = 1
    return StateVector(v, (d,))


def maximally_mixed(dims: Sequence[int]) -> DensityMatrix:
    n = math.prod(dims)
    return DensityMatrix(np.eye(n) / n, tuple(dims))


def random_state(d: int, rng: np.random.Generator) -> StateVector:
    """Haar-random pure state of one qudit."""
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return StateVector(v / np.linalg.norm(v), (d,))


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


# -- tensor products and reductions ---------------------------------------


def tensor(parts: Iterable[StateVector | DensityMatrix]):
    parts = list(parts)
    if not parts:
        raise ValueError("tensor() needs at least one factor")
    kinds = {type(p) for p in parts}
    if len(kinds) != 1:
        raise TypeError("cannot mix StateVector and DensityMatrix factors")
    dims = tuple(x for p in parts for x in p.dims)
    check_dim(math.prod(dims))
    if isinstance(parts[0], StateVector):
        out = parts[0].amps
        for p in parts[1:]:
            out = np.kron(out, p.amps)
        return StateVector(out, dims)
    out = parts[0].mat
    for p in parts[1:]:
        out = np.kron(out, p.mat)
    return DensityMatrix(out, dims)


def ptrace(mat: np.ndarray, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Partial trace on a bare matrix; ``keep`` lists surviving subsystems in order."""
    dims = list(dims)
    n = len(dims)
    keep = sorted(set(keep))
    if any(k < 0 or k >= n for k in keep):
        raise IndexError(f"keep {keep} out of range for {n} subsystems")
    traced = [i for i in range(n) if i not in keep]
    t = np.asarray(mat).reshape(dims + dims)
    # move traced row/col axes to the end, then trace them pairwise
    row = keep + traced
    col = [i + n for i in keep] + [i + n for i in traced]
    t = t.transpose(row + col)
    dk = math.prod(dims[i] for i in keep)
    dt = math.prod(dims[i] for i in traced)
    t = t.reshape(dk, dt, dk, dt)
    return np.einsum("ajbj->ab", t)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    keep = sorted(set(keep))
    if not keep:
        raise ValueError("keep must name at least one subsystem")
    out = ptrace(rho.mat, rho.dims, keep)
    return DensityMatrix(out, tuple(rho.dims[i] for i in keep))


def fidelity(rho: DensityMatrix | np.ndarray, psi: StateVector | np.ndarray) -> float:
    """Overlap <psi|rho|psi> of a density matrix with a pure reference."""
    m = np.asarray(rho.mat if isinstance(rho, DensityMatrix) else rho)
    v = np.asarray(psi.amps if isinstance(psi, StateVector) else psi).ravel()
    if m.shape != (v.size, v.size):
        raise ValueError(f"dimension mismatch: rho {m.shape} vs psi {v.size}")
    f = np.vdot(v, m @ v).real
    return float(min(max(f, 0.0), 1.0)) if -ATOL < f < 1 + ATOL else float(f)


def embed_operator(op: np.ndarray, site: int, dims: Sequence[int]) -> np.ndarray:
    """Lift a single-site operator to the full tensor space."""
    out = np.array([[1.0 + 0j]])
    for i, d in enumerate(dims):
        out = np.kron(out, op if i == site else np.eye(d))
    return out


def von_neumann_entropy(rho: np.ndarray, base: float = 2.0) -> float:
    lam = np.linalg.eigvalsh(rho)
    lam = lam[lam > 1e-15]
    return float(-(lam * np.log(lam)).sum() / np.log(base))


def overlap_up_to_phase(a: np.ndarray, b: np.ndarray) -> float:
    a = np.ravel(a)
    b = np.ravel(b)
    return float(abs(np.vdot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b)))


# -- symmetric subspace ---------------------------------------------------


def sym_dim(d: int, N: int) -> int:
    """d[N] = C(N+d-1, N)."""
    return math.comb(N + d - 1, N)


@lru_cache(maxsize=None)
def _compositions(d: int, N: int) -> tuple[tuple[int, ...], ...]:
    if d == 1:
        return ((N,),)
    out = []
    for first in range(N, -1, -1):
        for rest in _compositions(d - 1, N - first):
            out.append((first,) + rest)
    return tuple(out)


def sym_basis(d: int, N: int) -> list[OccupationVector]:
    """Occupation vectors of N particles in d modes, first mode filled first."""
    if N < 0 or d < 2:
        raise ValueError("need N >= 0 and d >= 2")
    return [OccupationVector(c) for c in _compositions(d, N)]


def _distinct_perms(word: tuple[int, ...]):
    """Distinct orderings of a multiset, in lexicographic order."""
    return sorted(set(itertools.permutations(word)))


def sym_embed(n: OccupationVector) -> StateVector:
    """|n> as a normalized vector of (C^d)^{tensor N}."""
    d, N = n.d, n.N
    check_dim(d ** N)
    word = tuple(k for k, c in enumerate(n.counts) for _ in range(c))
    v = np.zeros(d ** N, dtype=complex)
    perms = _distinct_perms(word)
    for p in perms:
        idx = 0
        for s in p:
            idx = idx * d + s
        v[idx] = 1
    v /= math.sqrt(len(perms))
    return StateVector(v, (d,) * N)


def sym_isometry(d: int, N: int) -> np.ndarray:
    """Columns are the embedded occupation states in ``sym_basis`` order."""
    return np.column_stack([sym_embed(n).amps for n in sym_basis(d, N)])


def permutation_operator(d: int, perm: Sequence[int]) -> np.ndarray:
    """Operator sending the factor in slot i to slot perm[i]."""
    M = len(perm)
    check_dim(d ** M)
    n = d ** M
    idx = np.arange(n).reshape((d,) * M)
    # input digit k lands in output slot perm[k]
    dest = idx.transpose(perm).ravel()
    P = np.zeros((n, n))
    P[dest, np.arange(n)] = 1
    return P


@lru_cache(maxsize=32)
def _symmetrizer_cached(d: int, M: int) -> np.ndarray:
    n = d ** M
    S = np.zeros((n, n))
    perms = list(itertools.permutations(range(M)))
    for p in perms:
        S += permutation_operator(d, p)
    S /= len(perms)
    S.setflags(write=False)
    return S


def symmetrizer(d: int, M: int) -> np.ndarray:
    """s_M: average of the M! permutation operators on (C^d)^{tensor M}."""
    if M < 1:
        raise ValueError("M must be >= 1")
    check_dim(d ** M)
    return _symmetrizer_cached(d, M)


# -- Weyl-Heisenberg group ------------------------------------------------


def omega(d: int) -> complex:
    return np.exp(2j * np.pi / d)


def gen_pauli(d: int, m: int, n: int) -> np.ndarray:
    """U_{m,n} = sum_k omega^{kn} |k+m><k|."""
    w = omega(d)
    U = np.zeros((d, d), dtype=complex)
    for k in range(d):
        U[(k + m) % d, k] = w ** ((k * n) % d)
    return U


def sigma_x(d: int) -> np.ndarray:
    return gen_pauli(d, 1, 0)


def sigma_z(d: int) -> np.ndarray:
    return gen_pauli(d, 0, 1)


def bell_state(d: int, m: int, n: int) -> StateVector:
    """|B_{m,n}> = d^{-1/2} sum_k omega^{kn} |k>|k+m>."""
    w = omega(d)
    v = np.zeros(d * d, dtype=complex)
    for k in range(d):
        v[k * d + (k + m) % d] = w ** ((k * n) % d)
    return StateVector(v / math.sqrt(d), (d, d))


def bell_basis(d: int) -> list[tuple[tuple[int, int], StateVector]]:
    """All d^2 Bell states, m-major then n."""
    return [((m, n), bell_state(d, m, n)) for m in range(d) for n in range(d)]


def phi_plus(d: int) -> StateVector:
    return bell_state(d, 0, 0)


# -- mutually unbiased bases ----------------------------------------------


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % p for p in range(2, int(n ** 0.5) + 1))


@dataclass(frozen=True)
class MubFamily:
    d: int
    bases: tuple[tuple[StateVector, ...], ...]
    labels: tuple[str, ...]

    def matrix(self, k: int) -> np.ndarray:
        """Basis k as a unitary whose columns are the basis vectors."""
        return np.column_stack([v.amps for v in self.bases[k]])


def _tri(d: int, j: int) -> int:
    # s_j = j + (j+1) + ... + (d-1)
    return sum(range(j, d))


def mub_vector(d: int, k: int, i: int) -> np.ndarray:
    """i-th eigenvector of sigma_x sigma_z^k (odd prime d)."""
    w = omega(d)
    return np.array([w ** ((i * (d - j) - k * _tri(d, j)) % d) for j in range(d)]) / math.sqrt(d)


def mub(d: int) -> MubFamily:
    """Complete set of d+1 MUBs; computational basis first.

    For d = 2 the phase formula does not diagonalize sigma_x sigma_z, so the
    six eigenstates of sigma_z, sigma_x and sigma_y are used instead.
    """
    if not is_prime(d):
        raise ValueError(f"d={d} is not prime; the phase construction needs prime d")
    comp = tuple(basis(d, i) for i in range(d))
    if d == 2:
        s = 1 / math.sqrt(2)
        x = (ket([s, s]), ket([s, -s]))
        y = (ket([s, 1j * s]), ket([s, -1j * s]))
        return MubFamily(2, (comp, x, y), ("z", "x", "y"))
    bases = [comp]
    for k in range(d):
        bases.append(tuple(StateVector(mub_vector(d, k, i), (d,)) for i in range(d)))
    return MubFamily(d, tuple(bases), ("z",) + tuple(f"xz^{k}" for k in range(d)))


# -- broadcasting ---------------------------------------------------------


def is_broadcastable(states: Sequence[DensityMatrix | np.ndarray], tol: float = ATOL) -> bool:
    """True iff every pair of states commutes."""
    mats = [np.asarray(s.mat if isinstance(s, DensityMatrix) else s) for s in states]
    if not mats:
        raise ValueError("need at least one state")
    shape = mats[0].shape
    if any(m.shape != shape for m in mats):
        raise ValueError("states must share one dimension")
    for a, b in itertools.combinations(mats, 2):
        if np.linalg.norm(a @ b - b @ a) > tol:
            return False
    return True
