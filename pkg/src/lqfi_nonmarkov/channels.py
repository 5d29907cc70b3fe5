"""Time-evolved two-qubit states for dephasing, amplitude-damping and depolarizing noise.

Subsystem A is the ancilla; the noise acts on B, except for the depolarizing
model where both qubits see the same Pauli channel.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
from scipy import integrate

from .errors import NotCompletelyPositive, QuadratureFailure, StepTooLarge
from .linalg import kron, pauli
from .states import DEFAULT_TRIPLE, bell_phi_plus, x_matrix, x_state

QUAD_RTOL = 1e-12


@dataclass(frozen=True)
class DephasingParams:
    s: float = 1.0
    omega_c: float = 1.0

    def __post_init__(self):
        if not (self.s > 0 and self.omega_c > 0):
            raise ValueError("dephasing needs s > 0 and omega_c > 0")


@dataclass(frozen=True)
class AmplitudeDampingParams:
    lam: float = 0.3
    gamma0: float = 1.0
    delta: float = 0.0

    def __post_init__(self):
        if not (self.lam > 0 and self.gamma0 > 0):
            raise ValueError("amplitude damping needs lambda > 0 and gamma0 > 0")


@dataclass(frozen=True)
class DepolarizingParams:
    mu: complex = 3.0
    r: tuple[float, float, float] = field(default=DEFAULT_TRIPLE)

    def __post_init__(self):
        mu = complex(self.mu)
        if mu.real < 0 or (mu.imag != 0 and mu.real != 0) or not 0 <= mu.imag < 1:
            # imaginary mu = i sqrt(1 - (4 kappa tau)^2) stays below i
            raise ValueError("mu must be real positive (oscillatory) or i*m with 0 < m < 1 (overdamped)")
        object.__setattr__(self, "r", tuple(float(x) for x in self.r))


ChannelSpec = Union[DephasingParams, AmplitudeDampingParams, DepolarizingParams]


# -- dephasing ---------------------------------------------------------------

def dephasing_rate(t: float, p: DephasingParams) -> float:
    """Zero-temperature decoherence rate for the spectral density (w/wc)^s exp(-w/wc)."""
    x = p.omega_c * t
    return p.omega_c * math.gamma(p.s) * math.sin(p.s * math.atan(x)) / (1.0 + x * x) ** (p.s / 2.0)


def dephasing_integral(t: float, p: DephasingParams) -> float:
    """Lambda(t), the time integral of the decoherence rate from 0 to t."""
    if t < 0:
        raise ValueError("t must be non-negative")
    if t == 0:
        return 0.0
    val, err, info = integrate.quad(
        dephasing_rate, 0.0, t, args=(p,), epsabs=0.0, epsrel=QUAD_RTOL, limit=500, full_output=True
    )[:3]
    if err > 1e-10 * max(abs(val), 1e-300) and err > 1e-15:
        raise QuadratureFailure(f"Lambda({t}) error estimate {err:.2e} for {p}")
    return val


def dephasing_coherence(t: float, p: DephasingParams) -> float:
    """P(t) = exp(-2 Lambda(t))."""
    return math.exp(-2.0 * dephasing_integral(t, p))


def dephasing_state_from_coherence(coh: float) -> np.ndarray:
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = rho[3, 3] = 0.5
    rho[0, 3] = rho[3, 0] = 0.5 * coh
    return rho


def dephasing_state(t: float, p: DephasingParams) -> np.ndarray:
    return dephasing_state_from_coherence(dephasing_coherence(t, p))


# -- amplitude damping -------------------------------------------------------

def ad_amplitude(t: float, p: AmplitudeDampingParams, coefficient: str = "omega") -> complex:
    """Excited-state amplitude R(t) for a Lorentzian reservoir.

    ``coefficient="half"`` swaps the sinh prefactor (lambda - i delta)/Omega
    for (lambda - i delta)/2; it exists only as a negative control and does not
    satisfy R'(0) = 0.
    """
    a = complex(p.lam, -p.delta)
    omega = cmath.sqrt(a * a - 2.0 * p.gamma0 * p.lam)
    env = cmath.exp(-a * t / 2.0)
    if coefficient == "half":
        return env * (cmath.cosh(omega * t / 2.0) + a / 2.0 * cmath.sinh(omega * t / 2.0))
    if coefficient != "omega":
        raise ValueError(f"unknown coefficient variant {coefficient!r}")
    if abs(omega) < 1e-9:
        return env * (1.0 + a * t / 2.0)
    return env * (cmath.cosh(omega * t / 2.0) + a / omega * cmath.sinh(omega * t / 2.0))


def ad_kernel(tau, p: AmplitudeDampingParams):
    """Reservoir correlation g(tau) = (gamma0 lambda / 2) exp(-(lambda - i delta) tau)."""
    return 0.5 * p.gamma0 * p.lam * np.exp(-complex(p.lam, -p.delta) * np.asarray(tau))


def ad_amplitude_oracle(
    t_max: float,
    p: AmplitudeDampingParams,
    dt: float | None = None,
    kernel: Callable | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate R'(t) = -int_0^t g(t - s) R(s) ds, R(0) = 1, on a uniform grid.

    The memory integral uses the product trapezoid rule over the whole history;
    each step is an explicit Euler predictor followed by one trapezoidal
    corrector. Nothing about the exponential form of the kernel is exploited,
    so this serves as an independent check of the closed form.
    """
    bound = 1e-3 / max(p.lam, p.gamma0, abs(p.delta))
    if dt is None:
        dt = bound
    if dt > bound * (1 + 1e-12):
        raise StepTooLarge(f"dt={dt} exceeds {bound:.3e}")
    n = int(math.ceil(t_max / dt - 1e-9))
    dt = t_max / n if n else dt
    times = np.arange(n + 1) * dt
    g = np.asarray((kernel or ad_kernel)(times, p), dtype=complex)
    g_rev = g[::-1].copy()  # g_rev[n - j] == g[j], contiguous for the history dot

    r = np.empty(n + 1, dtype=complex)
    r[0] = 1.0
    rdot = 0j
    half_g0 = 0.5 * g[0]
    for k in range(n):
        m = k + 1
        # trapezoid over [0, t_m] with R_m still unknown: partial holds j < m
        partial = 0.5 * g[m] * r[0]
        if m > 1:
            partial += np.dot(g_rev[n - m + 1:n], r[1:m])
        pred = r[k] + dt * rdot
        rdot_pred = -dt * (partial + half_g0 * pred)
        r[m] = r[k] + 0.5 * dt * (rdot + rdot_pred)
        rdot = -dt * (partial + half_g0 * r[m])
    return times, r


def ad_state_from_amplitude(amp: complex) -> np.ndarray:
    pop = abs(amp) ** 2
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 0.5
    rho[2, 2] = 0.5 * (1.0 - pop)  # |10>: the decayed |11> component
    rho[3, 3] = 0.5 * pop
    rho[0, 3] = 0.5 * amp.conjugate()
    rho[3, 0] = 0.5 * amp
    return rho


def ad_state(t: float, p: AmplitudeDampingParams) -> np.ndarray:
    """Bell state after amplitude damping of qubit B for a time t."""
    return ad_state_from_amplitude(ad_amplitude(t, p))


# -- depolarizing ------------------------------------------------------------

def depol_memory(nu: float, mu: complex) -> float:
    """Upsilon(nu) = exp(-nu) (cos(mu nu) + sin(mu nu) / mu).

    Positive imaginary ``mu`` gives the overdamped (monotone) branch and
    ``mu == 0`` the critical limit exp(-nu) (1 + nu).
    """
    mu = complex(mu)
    if mu == 0:
        return math.exp(-nu) * (1.0 + nu)
    if mu.imag == 0:
        m = mu.real
        return math.exp(-nu) * (math.cos(m * nu) + math.sin(m * nu) / m)
    m = mu.imag
    return math.exp(-nu) * (math.cosh(m * nu) + math.sinh(m * nu) / m)


def depol_probs_from_memory(ups: float, strict: bool = True) -> tuple[float, float, float, float]:
    p0 = (1.0 + 3.0 * ups) / 4.0
    pk = (1.0 - ups) / 4.0
    probs = (p0, pk, pk, pk)
    if strict and min(probs) < -1e-12:
        raise NotCompletelyPositive(f"Upsilon={ups} gives Kraus weights {probs}")
    return probs


def depol_probs(nu: float, mu: complex, strict: bool = True) -> tuple[float, float, float, float]:
    """Pauli weights (p0, p1, p2, p3) of the isotropic telegraph-noise channel.

    p0 < 0 whenever Upsilon < -1/3, which happens for mu = 3 near nu = pi/3.
    """
    return depol_probs_from_memory(depol_memory(nu, mu), strict)


def depol_apply(rho0: np.ndarray, nu: float, mu: complex, strict: bool = True) -> np.ndarray:
    """Apply sum_kl p_k p_l (s_k x s_l) rho0 (s_k x s_l) to a two-qubit state.

    With ``strict`` the weights must be non-negative (a genuine Kraus
    decomposition). ``strict=False`` applies the same Pauli-diagonal linear
    map with signed weights; the product weights still yield a valid state
    here because the X-state correlations only pick up Upsilon^2.
    """
    probs = depol_probs(nu, mu, strict)
    rho0 = np.asarray(rho0, dtype=complex)
    out = np.zeros_like(rho0)
    for k in range(4):
        for l in range(4):
            w = probs[k] * probs[l]
            if w == 0.0:
                continue
            op = kron(pauli(k), pauli(l))
            out += w * (op.conj().T @ rho0 @ op)
    return 0.5 * (out + out.conj().T)


def depol_state_closed(nu: float, p: DepolarizingParams) -> np.ndarray:
    """X-state after the channel: correlations contract as r_i Upsilon(nu)^2."""
    u2 = depol_memory(nu, p.mu) ** 2
    return x_matrix(tuple(ri * u2 for ri in p.r))


def depol_s_diagonal(nu: float, p: DepolarizingParams, variant: str = "derived") -> np.ndarray:
    """Closed-form diagonal of S for the evolved X-state.

    With c_i = r_i Upsilon^2 the all-pairs sum gives
    S_kk = (1 - c1^2 - c2^2 - c3^2 - 2 c1 c2 c3) / (1 - c_k^2).
    ``variant="theta_u2"`` uses Theta = sum(r_i^2) Upsilon^2 - 2 r1 r2 r3 Upsilon^6
    and ``"theta_u4"`` the same Theta with Upsilon^4 in the quadratic
    term. Neither matches the eigen-based S; both are kept for comparison.
    """
    ups = depol_memory(nu, p.mu)
    r = np.asarray(p.r)
    if variant == "derived":
        c = r * ups**2
        num = 1.0 - np.sum(c * c) - 2.0 * np.prod(c)
    elif variant in ("theta_u2", "theta_u4"):
        c = r * ups**2
        quad = ups**2 if variant == "theta_u2" else ups**4
        num = 1.0 - (np.sum(r * r) * quad - 2.0 * np.prod(r) * ups**6)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return num / (1.0 - c * c)


# -- dispatch ----------------------------------------------------------------

def initial_state(spec: ChannelSpec) -> np.ndarray:
    if isinstance(spec, DepolarizingParams):
        return x_state(spec.r)
    return bell_phi_plus()


def evolve(spec: ChannelSpec, t: float) -> np.ndarray:
    """State of the probe pair at time t (dimensionless nu for depolarizing)."""
    if t < 0:
        raise ValueError("t must be non-negative")
    if isinstance(spec, DephasingParams):
        return dephasing_state(t, spec)
    if isinstance(spec, AmplitudeDampingParams):
        return ad_state(t, spec)
    if isinstance(spec, DepolarizingParams):
        x_state(spec.r)
        return depol_state_closed(t, spec)
    raise TypeError(f"unsupported channel spec {type(spec).__name__}")
