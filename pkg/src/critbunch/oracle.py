"""Independent brute-force verifiers for the analytic machinery.

Three layers, in increasing scope:

* ``overlap_2x2`` / ``rk_numeric``: per-momentum overlap factor from explicit
  2x2 matrix exponentials (Hermitian eigendecomposition, no series/Pade).
  This is the exact oracle for the coefficient algebra of the product
  formula and must agree with it to 1e-12.
* ``spin_chain_ed``: dense/sparse exact diagonalisation of the spin chain
  itself (N <= 12).  Only a consistency check: the integer-k product formula
  corresponds to a fermion boundary convention the pseudospin construction
  glosses over, so agreement is finite-size (the gap shrinks with N).
* ``joint_two_time``: exact evolution of a truncated field (x) pseudospin-chain
  joint system, used to validate the first/second-order correlation formulas
  term by term.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix, identity, kron
from scipy.sparse.linalg import eigsh, expm_multiply

from .decoherence import coeffs
from .spectrum import ChainConfig, DressedSector

_DOWN = np.array([0.0, 1.0])  # sz eigenstate with eigenvalue -1


@dataclass(frozen=True)
class DenseOperator:
    """A dense Hermitian operator with eigendecomposition-based evolution.

    Evolution operators come from the eigenbasis (never a series or Pade
    approximation), so unitarity holds to the quality of the eigensolver.
    """

    matrix: np.ndarray
    _eig: tuple = field(init=False, repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("operator matrix must be square")
        if np.max(np.abs(m - m.conj().T)) > 1e-12:
            raise ValueError("operator must be Hermitian to 1e-12")
        object.__setattr__(self, "matrix", m)
        w, v = np.linalg.eigh(m)
        object.__setattr__(self, "_eig", (w, v))

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def evolution(self, t: float) -> np.ndarray:
        """U(t) = exp(-i H t); unitary to ~1e-10 by construction."""
        w, v = self._eig
        return (v * np.exp(-1j * w * t)) @ v.conj().T

    def evolve(self, vec: np.ndarray, t: float) -> np.ndarray:
        w, v = self._eig
        return v @ (np.exp(-1j * w * t) * (v.conj().T @ vec))


def overlap_2x2(eps1: float, alpha1: float, eps2: float, alpha2: float, t: float) -> complex:
    """<-| exp(+i H1 t) exp(-i H2 t) |-> for two rotated 2x2 pseudospin Hamiltonians.

    H_i = eps_i * (sz cos 2a_i + sx sin 2a_i); |-> is the unrotated ground state.
    """
    out = _overlap_2x2_batch(
        np.atleast_1d(eps1), np.atleast_1d(alpha1),
        np.atleast_1d(eps2), np.atleast_1d(alpha2),
        np.atleast_1d(t),
    )
    return complex(out[0])


def _hamiltonians(eps: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    """Stacked 2x2 Hamiltonians, shape (..., 2, 2)."""
    c = eps * np.cos(2.0 * alpha)
    s = eps * np.sin(2.0 * alpha)
    h = np.empty(eps.shape + (2, 2), dtype=complex)
    h[..., 0, 0] = c
    h[..., 0, 1] = s
    h[..., 1, 0] = s
    h[..., 1, 1] = -c
    return h


def _overlap_2x2_batch(eps1, alpha1, eps2, alpha2, t) -> np.ndarray:
    """Vectorised overlap factors for batches of (eps, alpha, t) samples."""
    eps1, alpha1, eps2, alpha2, t = np.broadcast_arrays(eps1, alpha1, eps2, alpha2, t)
    w1, v1 = np.linalg.eigh(_hamiltonians(eps1, alpha1))
    w2, v2 = np.linalg.eigh(_hamiltonians(eps2, alpha2))
    # exp(+i H1 t) |-> and exp(-i H2 t) |->, both via eigenbasis
    a1 = np.einsum("...ij,j->...i", v1.conj().swapaxes(-1, -2), _DOWN)
    a2 = np.einsum("...ij,j->...i", v2.conj().swapaxes(-1, -2), _DOWN)
    ph1 = np.exp(-1j * w1 * t[..., None])  # conjugated below, yielding e^{+i H1 t}
    ph2 = np.exp(-1j * w2 * t[..., None])
    left = np.einsum("...ij,...j->...i", v1, ph1 * a1)
    right = np.einsum("...ij,...j->...i", v2, ph2 * a2)
    return np.einsum("...i,...i->...", left.conj(), right)


def rk_numeric(k: float, s: DressedSector, s_p: DressedSector, t: float) -> complex:
    """Per-momentum overlap factor at momentum k, by numeric 2x2 evolution."""
    idx = np.searchsorted(s.k_grid, k)
    if idx >= len(s.k_grid) or s.k_grid[idx] != k:
        raise ValueError(f"momentum {k} is not on the sector grid")
    return overlap_2x2(s.eps[idx], s.alpha[idx], s_p.eps[idx], s_p.alpha[idx], t)


def closed_form_factor(eps1: float, alpha1: float, eps2: float, alpha2: float, t: float) -> complex:
    """The coefficient-route per-k factor, for oracle comparisons."""
    q = coeffs(alpha1, alpha2)
    return (
        q.c_pp * np.exp(1j * (eps1 + eps2) * t)
        + q.c_mm * np.exp(-1j * (eps1 + eps2) * t)
        + q.c_pm * np.exp(1j * (eps1 - eps2) * t)
        + q.c_mp * np.exp(-1j * (eps1 - eps2) * t)
    )


# --- spin-chain exact diagonalisation ----------------------------------------

_SX = np.array([[0.0, -1.0], [-1.0, 0.0]])  # sx = -|0><1| - |1><0|
_SZ = np.array([[1.0, 0.0], [0.0, -1.0]])


def _site_op(op: np.ndarray, j: int, n: int) -> csr_matrix:
    left = identity(2**j, format="csr")
    right = identity(2 ** (n - j - 1), format="csr")
    return kron(kron(left, csr_matrix(op)), right, format="csr")


def chain_hamiltonian(n: int, lam: float, b: float = 1.0) -> csr_matrix:
    """H = B sum_j (lam sx_j + sz_j sz_{j+1}) with periodic spins."""
    h = csr_matrix((2**n, 2**n))
    for j in range(n):
        h = h + lam * _site_op(_SX, j, n)
        h = h + _site_op(_SZ, j, n) @ _site_op(_SZ, (j + 1) % n, n)
    return b * h


def chain_ground_state(n: int, lam: float, b: float = 1.0) -> np.ndarray:
    """Ground state of the periodic chain (deterministic start vector)."""
    h = chain_hamiltonian(n, lam, b)
    v0 = np.full(2**n, 1.0 / np.sqrt(2**n))
    _, vecs = eigsh(h, k=1, which="SA", v0=v0)
    g = vecs[:, 0]
    # fix the overall phase for reproducibility
    pivot = np.argmax(np.abs(g))
    return g * np.sign(g[pivot])


def spin_chain_ed(
    n: int,
    lam1: float,
    lam2: float,
    times,
    b: float = 1.0,
    lam_ref: float | None = None,
) -> np.ndarray:
    """r(t) = <G| exp(+i H(lam1) t) exp(-i H(lam2) t) |G> on the full spin chain.

    |G> is the ground state of H(lam_ref) (default: lam1's reference is the
    caller's business; pass lam_ref explicitly when the reference coupling
    differs from both evolution couplings).
    """
    if n > 12:
        raise ValueError(f"dense chain verification is capped at N = 12, got {n}")
    if n < 2 or n % 2 != 0:
        raise ValueError(f"chain length must be even and >= 2, got {n}")
    times = np.asarray(times, dtype=float)
    g = chain_ground_state(n, lam_ref if lam_ref is not None else lam1, b)
    h1 = chain_hamiltonian(n, lam1, b)
    h2 = chain_hamiltonian(n, lam2, b)
    psi1 = _evolve_grid(h1, g, times)
    psi2 = _evolve_grid(h2, g, times)
    # <G| e^{+iH1 t} e^{-iH2 t} |G> = (e^{-iH1 t} G)^dagger (e^{-iH2 t} G)
    return np.einsum("ti,ti->t", psi1.conj(), psi2)


def _evolve_grid(h: csr_matrix, psi0: np.ndarray, times: np.ndarray) -> np.ndarray:
    """exp(-i h t) psi0 for every t; shape (T, dim)."""
    out = np.empty((len(times), len(psi0)), dtype=complex)
    order = np.argsort(times)
    ts = times[order]
    if len(ts) > 1 and np.allclose(np.diff(ts), ts[1] - ts[0]) and ts[1] != ts[0]:
        res = expm_multiply(
            -1j * h.astype(complex), psi0.astype(complex),
            start=ts[0], stop=ts[-1], num=len(ts), endpoint=True,
        )
        out[order] = res
    else:
        for i, t in zip(order, ts):
            out[i] = expm_multiply(-1j * t * h.astype(complex), psi0.astype(complex))
    return out


# --- joint field (x) pseudospin-chain simulation ------------------------------

_MAX_JOINT_DIM = 8192


class JointSimulator:
    """Exact two-time correlators on a truncated joint Hilbert space.

    The chain is represented by K retained momentum pseudospins (2^K states);
    each field Fock pair (m, n) evolves under its own rotated chain
    Hamiltonian plus the free phase exp(-i (omega1 m + omega2 n) t).
    """

    def __init__(self, cfg: ChainConfig, sector_table: dict):
        self.cfg = cfg
        any_sector = next(iter(sector_table.values()))
        self.n_k = len(any_sector.k_grid)
        self.m1 = max(m for (m, _) in sector_table) + 1
        self.m2 = max(n for (_, n) in sector_table) + 1
        dim = 2**self.n_k * self.m1 * self.m2
        if dim > _MAX_JOINT_DIM:
            raise ValueError(f"joint dimension {dim} exceeds cap {_MAX_JOINT_DIM}")
        self._ops = {
            label: DenseOperator(self._chain_h(sec)) for label, sec in sector_table.items()
        }
        # reference ground state: every pseudospin down
        g = np.zeros(2**self.n_k)
        g[-1] = 1.0
        self.ground = g

    def _chain_h(self, sec: DressedSector) -> np.ndarray:
        dim = 2**self.n_k
        h = np.zeros((dim, dim))
        for i in range(self.n_k):
            c = sec.eps[i] * np.cos(2.0 * sec.alpha[i])
            s = sec.eps[i] * np.sin(2.0 * sec.alpha[i])
            op = c * np.array([[1.0, 0.0], [0.0, -1.0]]) + s * np.array([[0.0, 1.0], [1.0, 0.0]])
            full = np.eye(2**i)
            full = np.kron(full, op)
            full = np.kron(full, np.eye(2 ** (self.n_k - i - 1)))
            h += full
        return h

    def initial(self, c: np.ndarray, d: np.ndarray) -> dict:
        """Block (m, n) -> chain vector, for field amplitudes c, d."""
        state = {}
        for m in range(min(len(c), self.m1)):
            for n in range(min(len(d), self.m2)):
                amp = c[m] * d[n]
                if amp != 0:
                    state[(m, n)] = amp * self.ground.astype(complex)
        return state

    def evolve(self, state: dict, t: float) -> dict:
        out = {}
        for (m, n), vec in state.items():
            phase = np.exp(-1j * (self.cfg.omega1 * m + self.cfg.omega2 * n) * t)
            out[(m, n)] = phase * self._ops[(m, n)].evolve(vec, t)
        return out

    def apply_a(self, state: dict) -> dict:
        """A = a1 + i a2 on the field indices (chain part untouched)."""
        out = {}
        for (m, n), vec in state.items():
            if m >= 1:
                key = (m - 1, n)
                out[key] = out.get(key, 0.0) + np.sqrt(m) * vec
            if n >= 1:
                key = (m, n - 1)
                out[key] = out.get(key, 0.0) + 1j * np.sqrt(n) * vec
        return out

    @staticmethod
    def _dot(a: dict, b: dict) -> complex:
        tot = 0.0 + 0.0j
        for key, vec in a.items():
            if key in b:
                tot += np.vdot(vec, b[key])
        return tot

    def two_time(self, c: np.ndarray, d: np.ndarray, t: float) -> tuple[complex, complex]:
        """(first, second) two-time correlators at time t.

        first  = <A^dag(t) A(0)>        (lab frame: free phases included)
        second = <A^dag A^dag(t) A(t) A>
        """
        psi = self.initial(c, d)
        phi = self.apply_a(psi)
        psi_t = self.evolve(psi, t)
        phi_t = self.evolve(phi, t)
        first = self._dot(self.apply_a(psi_t), phi_t)
        a_phi_t = self.apply_a(phi_t)
        second = self._dot(a_phi_t, a_phi_t)
        return first, second


def joint_two_time(state, sector_table: dict, cfg: ChainConfig, t: float) -> tuple[complex, complex]:
    """One-shot wrapper around JointSimulator for a FieldState-like object."""
    sim = JointSimulator(cfg, sector_table)
    return sim.two_time(np.asarray(state.c), np.asarray(state.d), t)
