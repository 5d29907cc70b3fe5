"""Two-qubit states: Bell state, Bell-diagonal X-states and seeded random states.

Subsystem A is the left tensor factor. The measure code accepts any 2 x d
state, but every constructor here returns a 4 x 4 matrix.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import NonHermitian, NotPSD, Unphysical
from .linalg import hermitian_eig, kron, pauli

DEFAULT_TRIPLE = (0.6, -0.4, 0.2)


def validate_density(rho: np.ndarray, tol: float = 1e-10, psd_tol: float = 1e-9) -> np.ndarray:
    """Raise if ``rho`` is not Hermitian, unit-trace and PSD within tolerance."""
    rho = np.asarray(rho, dtype=complex)
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    if herm > tol:
        raise NonHermitian(f"density matrix off Hermitian by {herm:.3e}")
    tr = np.trace(rho)
    if abs(tr - 1.0) > tol:
        raise ValueError(f"trace is {tr}")
    lo = hermitian_eig(rho).values[-1]
    if lo < -psd_tol:
        raise NotPSD(f"minimum eigenvalue {lo:.3e}")
    return rho


def bell_phi_plus() -> np.ndarray:
    psi = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2.0)
    return np.outer(psi, psi.conj())


def x_matrix(r: Sequence[float]) -> np.ndarray:
    """(I + sum_i r_i sigma_i x sigma_i) / 4, without any physicality check."""
    r1, r2, r3 = (float(x) for x in r)
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = rho[3, 3] = 1.0 + r3
    rho[1, 1] = rho[2, 2] = 1.0 - r3
    rho[0, 3] = rho[3, 0] = r1 - r2
    rho[1, 2] = rho[2, 1] = r1 + r2
    return rho / 4.0


def x_eigenvalues(r: Sequence[float]) -> np.ndarray:
    """Closed-form spectrum of ``x_matrix(r)`` (Bell-basis populations)."""
    r1, r2, r3 = r
    return np.array([
        1 + r1 - r2 + r3,
        1 - r1 + r2 + r3,
        1 + r1 + r2 - r3,
        1 - r1 - r2 - r3,
    ]) / 4.0


def is_physical(r: Sequence[float], tol: float = 1e-12) -> bool:
    return all(abs(x) <= 1.0 + tol for x in r) and bool(np.min(x_eigenvalues(r)) >= -tol)


def x_state(r: Sequence[float]) -> np.ndarray:
    """Bell-diagonal X-state with correlation triple ``r``.

    Raises Unphysical unless the triple lies in the tetrahedron of valid states.
    """
    if len(r) != 3:
        raise ValueError("correlation triple needs exactly three entries")
    if not is_physical(r):
        raise Unphysical(f"correlation triple {tuple(r)} is outside the physical tetrahedron")
    return x_matrix(r)


def random_state(seed: int, dim: int = 4) -> np.ndarray:
    """G G^dagger / Tr(G G^dagger) for a seeded complex Ginibre matrix G."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    rho = rho / np.trace(rho).real
    return 0.5 * (rho + rho.conj().T)


def random_local_unitary(seed: int) -> np.ndarray:
    """U_A x U_B with Haar-random single-qubit factors."""
    rng = np.random.default_rng(seed)
    factors = []
    for _ in range(2):
        z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        q, r = np.linalg.qr(z)
        factors.append(q * (np.diag(r) / np.abs(np.diag(r))))
    return kron(*factors)


def partial_trace_b(rho: np.ndarray) -> np.ndarray:
    d = rho.shape[0] // 2
    return np.einsum("ajbj->ab", rho.reshape(2, d, 2, d))


def local_observable(k: int, dim: int = 4) -> np.ndarray:
    return kron(pauli(k), np.eye(dim // 2))
