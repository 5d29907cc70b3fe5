"""Local quantum Fisher information (LQFI) and local quantum uncertainty (LQU).

Both measures minimise a per-observable kernel over local observables
``L = (n . sigma) x I`` on subsystem A:

* QFI kernel  F(rho, n) = 1/2 sum_{mn} (h_m - h_n)^2 / (h_m + h_n) |L_mn|^2
* skew kernel I(rho, n) = 1/2 sum_{mn} (sqrt h_m - sqrt h_n)^2 |L_mn|^2

with ``L_mn`` taken in the eigenbasis of rho. The minimisers reduce to
``Q = 1 - max eig S`` and ``U = 1 - max eig B`` where S and B are 3 x 3
real symmetric matrices. S is summed over *all* ordered eigen-pairs,
diagonal included, which keeps ``F = 1 - n^T S n`` exact for degenerate
spectra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .linalg import hermitian_eig, min_eigenvalue_sym, pauli

PAIR_FLOOR = 1e-12
EIG_RESOLUTION = 10 * np.finfo(float).eps


@dataclass(frozen=True)
class Spectral:
    """Eigen-data of a 2 x d state with the local Pauli observables in its eigenbasis."""

    h: np.ndarray  # clamped eigenvalues, descending
    vectors: np.ndarray
    obs: np.ndarray  # shape (3, dim, dim): V^H (sigma_k x I) V
    qfi_w: np.ndarray  # (h_m - h_n)^2 / (h_m + h_n), zero on dropped pairs
    s_w: np.ndarray  # 2 h_m h_n / (h_m + h_n)
    skew_w: np.ndarray  # (sqrt h_m - sqrt h_n)^2
    b_w: np.ndarray  # sqrt(h_m h_n)


def spectral(rho: np.ndarray) -> Spectral:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape[0] % 2:
        raise ValueError("subsystem A must be a qubit: dimension must be even")
    vals, vecs = hermitian_eig(rho)
    return spectral_from_eig(vals, vecs)


def spectral_from_eig(vals: np.ndarray, vecs: np.ndarray) -> Spectral:
    """Build the kernel weights from a given eigendecomposition.

    Any orthonormal basis of a degenerate eigenspace gives the same measures.
    """
    vecs = np.asarray(vecs, dtype=complex)
    dim = vecs.shape[0]
    h = np.clip(np.asarray(vals, dtype=float), 0.0, None)
    # eigenvalues below the solver's resolution are zeros; sqrt would amplify them
    h[h < EIG_RESOLUTION * h.max()] = 0.0
    ident = np.eye(dim // 2)
    obs = np.stack([vecs.conj().T @ np.kron(pauli(k), ident) @ vecs for k in (1, 2, 3)])

    hm, hn = h[:, None], h[None, :]
    tot = hm + hn
    keep = tot > PAIR_FLOOR
    safe = np.where(keep, tot, 1.0)
    qfi_w = np.where(keep, (hm - hn) ** 2 / safe, 0.0)
    s_w = np.where(keep, 2.0 * hm * hn / safe, 0.0)
    sq = np.sqrt(h)
    skew_w = (sq[:, None] - sq[None, :]) ** 2
    b_w = sq[:, None] * sq[None, :]
    return Spectral(h, vecs, obs, qfi_w, s_w, skew_w, b_w)


def _unit(n: Sequence[float]) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    norm = np.linalg.norm(n)
    if norm == 0:
        raise ValueError("direction must be nonzero")
    return n / norm


def _kernel(sp: Spectral, weights: np.ndarray, dirs: np.ndarray) -> np.ndarray:
    """0.5 * sum W_mn |L_mn|^2 for each row of ``dirs`` (shape (k, 3))."""
    lmat = np.einsum("ki,imn->kmn", dirs, sp.obs)
    return 0.5 * np.einsum("mn,kmn->k", weights, np.abs(lmat) ** 2)


def qfi(rho: np.ndarray, n: Sequence[float], sp: Spectral | None = None) -> float:
    sp = sp or spectral(rho)
    return float(_kernel(sp, sp.qfi_w, _unit(n)[None, :])[0])


def skew_info(rho: np.ndarray, n: Sequence[float], sp: Spectral | None = None) -> float:
    sp = sp or spectral(rho)
    return float(_kernel(sp, sp.skew_w, _unit(n)[None, :])[0])


def skew_info_commutator(rho: np.ndarray, n: Sequence[float]) -> float:
    """Wigner-Yanase skew information -1/2 Tr([sqrt(rho), L]^2), built in the computational basis."""
    from .linalg import psd_sqrt

    rho = np.asarray(rho, dtype=complex)
    v = _unit(n)
    local = sum(v[k] * pauli(k + 1) for k in range(3))
    big = np.kron(local, np.eye(rho.shape[0] // 2))
    root = psd_sqrt(rho)
    comm = root @ big - big @ root
    return float(-0.5 * np.trace(comm @ comm).real)


def _corr_matrix(sp: Spectral, weights: np.ndarray) -> np.ndarray:
    # M_kl = sum_mn W_mn (A_k)_mn (A_l)_nm
    m = np.einsum("mn,kmn,lnm->kl", weights, sp.obs, sp.obs)
    m = m.real
    return 0.5 * (m + m.T)


def s_matrix(rho: np.ndarray, sp: Spectral | None = None) -> np.ndarray:
    sp = sp or spectral(rho)
    return _corr_matrix(sp, sp.s_w)


def b_matrix(rho: np.ndarray, sp: Spectral | None = None) -> np.ndarray:
    """B_ij = Tr(sqrt(rho) (sigma_i x I) sqrt(rho) (sigma_j x I))."""
    sp = sp or spectral(rho)
    return _corr_matrix(sp, sp.b_w)


def kernel_matrix(rho: np.ndarray, kind: Literal["qfi", "skew"] = "qfi", sp: Spectral | None = None) -> np.ndarray:
    """The 3 x 3 form K with F(rho, n) (or I(rho, n)) = n^T K n.

    K equals I - S (or I - B) exactly, since the QFI and S weights of each pair
    add up to h_m + h_n. Building it from the kernel weights avoids the
    cancellation in 1 - eta_max when the measure is tiny.
    """
    sp = sp or spectral(rho)
    weights = {"qfi": sp.qfi_w, "skew": sp.skew_w}[kind]
    return 0.5 * _corr_matrix(sp, weights)


def lqfi(rho: np.ndarray, sp: Spectral | None = None) -> float:
    """Q = 1 - max eig S, evaluated as min eig (I - S)."""
    return min_eigenvalue_sym(kernel_matrix(rho, "qfi", sp))


def lqu(rho: np.ndarray, sp: Spectral | None = None) -> float:
    """U = 1 - max eig B, evaluated as min eig (I - B)."""
    return min_eigenvalue_sym(kernel_matrix(rho, "skew", sp))


def lqfi_lqu(rho: np.ndarray) -> tuple[float, float]:
    """Both measures from a single eigendecomposition."""
    sp = spectral(rho)
    return lqfi(rho, sp), lqu(rho, sp)


def fibonacci_sphere(count: int) -> np.ndarray:
    i = np.arange(count) + 0.5
    z = 1.0 - 2.0 * i / count
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    phi = i * math.pi * (3.0 - math.sqrt(5.0))
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def _direction(theta: float, phi: float) -> np.ndarray:
    st = math.sin(theta)
    return np.array([st * math.cos(phi), st * math.sin(phi), math.cos(theta)])


def brute_force_min(
    rho: np.ndarray,
    kind: Literal["qfi", "skew"] = "qfi",
    coarse_resolution: int = 32,
    step_tol: float = 1e-7,
) -> tuple[float, np.ndarray]:
    """Minimise a kernel over local observables by direct search.

    Oracle for ``lqfi``/``lqu``: it never forms S or B. A Fibonacci grid of
    ``coarse_resolution**2`` directions seeds a coordinate descent in the
    polar angles, which halves its step until it falls below ``step_tol``.
    """
    if coarse_resolution < 32:
        raise ValueError("coarse_resolution must be at least 32")
    sp = spectral(rho)
    weights = {"qfi": sp.qfi_w, "skew": sp.skew_w}[kind]

    grid = fibonacci_sphere(coarse_resolution**2)
    vals = _kernel(sp, weights, grid)
    best = int(np.argmin(vals))
    x, y, z = grid[best]
    point = [math.acos(max(-1.0, min(1.0, z))), math.atan2(y, x)]
    fbest = float(vals[best])

    def f(theta: float, phi: float) -> float:
        return float(_kernel(sp, weights, _direction(theta, phi)[None, :])[0])

    step = math.sqrt(4.0 * math.pi / coarse_resolution**2)
    while step >= step_tol:
        improved = False
        for axis in (0, 1):
            for sign in (1.0, -1.0):
                trial = list(point)
                trial[axis] += sign * step
                ft = f(*trial)
                if ft < fbest:
                    point, fbest, improved = trial, ft, True
                    break
        if not improved:
            step *= 0.5
    return fbest, _direction(*point)
