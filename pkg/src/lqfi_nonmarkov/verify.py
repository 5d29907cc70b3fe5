"""Invariant and oracle checks behind the ``verify`` and ``oracle`` commands."""

from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import channels as ch
from . import measures as ms
from . import nonmarkov as nm
from .linalg import hermitian_eig
from .states import DEFAULT_TRIPLE, random_local_unitary, random_state, validate_density, x_state


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _check(name: str, fn: Callable[[], tuple[bool, str]]) -> CheckResult:
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failed check, reported not raised
        return CheckResult(name, False, f"{type(exc).__name__}: {exc}")
    return CheckResult(name, bool(ok), detail)


def _unit_vectors(rng: np.random.Generator, count: int) -> np.ndarray:
    v = rng.standard_normal((count, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def check_eigensolver(seed: int, count: int) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        n = int(rng.integers(2, 9))
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        m = g + g.conj().T
        vals, vecs = hermitian_eig(m)
        worst = max(worst, float(np.max(np.abs((vecs * vals) @ vecs.conj().T - m))))
    return worst <= 1e-9, f"max reconstruction error {worst:.2e}"


def check_quadratic_forms(seed: int, states: int, dirs: int) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for k in range(states):
        rho = random_state(seed * 100003 + k)
        sp = ms.spectral(rho)
        s, b = ms.s_matrix(rho, sp), ms.b_matrix(rho, sp)
        for n in _unit_vectors(rng, dirs):
            worst = max(worst, abs(ms.qfi(rho, n, sp) - (1 - n @ s @ n)),
                        abs(ms.skew_info(rho, n, sp) - (1 - n @ b @ n)))
    return worst <= 1e-9, f"max identity error {worst:.2e}"


def check_sandwich_random(seed: int, count: int) -> tuple[bool, str]:
    worst = 0.0
    for k in range(count):
        q, u = ms.lqfi_lqu(random_state(seed * 7919 + k))
        worst = max(worst, u - q, q - 2 * u)
    return worst <= 1e-9, f"max violation {worst:.2e}"


def check_local_unitary(seed: int, count: int) -> tuple[bool, str]:
    worst = 0.0
    for k in range(count):
        rho = random_state(seed + k)
        uu = random_local_unitary(seed + 1000 + k)
        rot = uu @ rho @ uu.conj().T
        worst = max(worst, abs(ms.lqfi(rho) - ms.lqfi(rot)), abs(ms.lqu(rho) - ms.lqu(rot)))
    return worst <= 1e-9, f"max change {worst:.2e}"


def check_closed_forms(points: int) -> tuple[bool, str]:
    worst = 0.0
    for s in (0.5, 1.0, 2.0, 4.0):
        p = ch.DephasingParams(s=s)
        for t in np.linspace(0, 30, points):
            worst = max(worst, abs(ms.lqfi(ch.dephasing_state(t, p)) - ch.dephasing_coherence(t, p) ** 2))
    for ratio in (0.3, 2.0, 5.0):
        p = ch.AmplitudeDampingParams(lam=ratio)
        for t in np.linspace(0, 25, points):
            worst = max(worst, abs(ms.lqfi(ch.ad_state(t, p)) - abs(ch.ad_amplitude(t, p)) ** 2))
    return worst <= 1e-8, f"max |Q - closed form| {worst:.2e}"


def check_depolarizing_routes(points: int) -> tuple[bool, str]:
    worst = 0.0
    for mu in (3.0, 5.0):
        p = ch.DepolarizingParams(mu=mu, r=DEFAULT_TRIPLE)
        rho0 = x_state(p.r)
        for nu in np.linspace(0, 10, points):
            worst = max(worst, float(np.max(np.abs(ch.depol_apply(rho0, nu, mu, strict=False) - ch.depol_state_closed(nu, p)))))
    return worst <= 1e-10, f"max Kraus vs closed-form {worst:.2e}"


def check_evolved_states_valid(points: int) -> tuple[bool, str]:
    specs = [ch.DephasingParams(s=4.0), ch.AmplitudeDampingParams(lam=0.3, delta=0.5),
             ch.DepolarizingParams(mu=5.0)]
    for spec in specs:
        lo, hi = nm.default_window(spec)
        for t in np.linspace(lo, hi, points):
            validate_density(ch.evolve(spec, t))
    return True, f"{len(specs) * points} states"


def check_markovian_nulls(n_scan: int) -> tuple[bool, str]:
    vals = {
        "dephasing s=1": nm.channel_report(ch.DephasingParams(s=1.0), n_scan=n_scan).n_lqfi,
        "amplitude 5": nm.channel_report(ch.AmplitudeDampingParams(lam=5.0), n_scan=n_scan).n_lqfi,
    }
    return all(v <= 1e-10 for v in vals.values()), ", ".join(f"{k}: {v:.1e}" for k, v in vals.items())


def check_non_markovian_positives(n_scan: int) -> tuple[bool, str]:
    vals = {
        "dephasing s=4": nm.channel_report(ch.DephasingParams(s=4.0), n_scan=n_scan).n_lqfi,
        "amplitude 0.3": nm.channel_report(ch.AmplitudeDampingParams(lam=0.3), n_scan=n_scan).n_lqfi,
    }
    return all(v > 1e-4 for v in vals.values()), ", ".join(f"{k}: {v:.3e}" for k, v in vals.items())


def check_interval_gamma_sign(n_scan: int) -> tuple[bool, str]:
    p = ch.DephasingParams(s=4.0)
    rep = nm.channel_report(p, n_scan=n_scan)
    worst = -np.inf
    for iv in rep.intervals:
        for t in np.linspace(iv.t_start + 1e-4, iv.t_end - 1e-4, 200):
            worst = max(worst, ch.dephasing_rate(t, p))
    return bool(rep.intervals) and worst < 0, f"{len(rep.intervals)} intervals, max gamma inside {worst:.2e}"


def run_suite(seed: int = 1, quick: bool = True) -> list[CheckResult]:
    k = 1 if quick else 5
    return [
        _check("eigensolver reconstruction", lambda: check_eigensolver(seed, 20 * k)),
        _check("quadratic-form identities", lambda: check_quadratic_forms(seed, 20 * k, 20 * k)),
        _check("U <= Q <= 2U on random states", lambda: check_sandwich_random(seed, 40 * k)),
        _check("local-unitary invariance", lambda: check_local_unitary(seed, 10 * k)),
        _check("closed forms Q = P^2, |R|^2", lambda: check_closed_forms(10 * k)),
        _check("depolarizing Kraus = closed form", lambda: check_depolarizing_routes(20 * k)),
        _check("evolved states are valid", lambda: check_evolved_states_valid(10 * k)),
        _check("Markovian nulls", lambda: check_markovian_nulls(400 if quick else 1000)),
        _check("non-Markovian positives", lambda: check_non_markovian_positives(400 if quick else 1000)),
        _check("intervals inside gamma < 0", lambda: check_interval_gamma_sign(400 if quick else 1000)),
    ]


def check_brute_force(seed: int, count: int) -> tuple[bool, str]:
    worst = 0.0
    for k in range(count):
        rho = random_state(seed * 31 + k)
        q, u = ms.lqfi_lqu(rho)
        worst = max(worst, abs(q - ms.brute_force_min(rho, "qfi")[0]),
                    abs(u - ms.brute_force_min(rho, "skew")[0]))
    return worst <= 1e-5, f"max |closed - brute force| {worst:.2e} over {count} states"


def check_ad_oracle(lam: float, delta: float, t_max: float = 25.0) -> tuple[bool, str]:
    p = ch.AmplitudeDampingParams(lam=lam, gamma0=1.0, delta=delta)
    times, r = ch.ad_amplitude_oracle(t_max, p)
    closed = np.array([ch.ad_amplitude(t, p) for t in times])
    half = np.array([ch.ad_amplitude(t, p, coefficient="half") for t in times])
    err, err_half = float(np.max(np.abs(closed - r))), float(np.max(np.abs(half - r)))
    return err <= 1e-5, f"closed form {err:.2e}; half coefficient {err_half:.2e}"


def oracle_checks(seed: int = 1, count: int = 20) -> list[CheckResult]:
    out = [_check("LQFI/LQU vs brute-force minimum", lambda: check_brute_force(seed, count))]
    for lam, delta in ((0.3, 0.0), (2.0, 0.0), (5.0, 0.0), (1.0, 0.5)):
        out.append(_check(f"R(t) vs integro-differential (lambda={lam}, delta={delta})",
                          lambda lam=lam, delta=delta: check_ad_oracle(lam, delta)))
    return out


def print_table(results: list[CheckResult], stream=None) -> None:
    stream = stream or sys.stdout
    width = max(len(r.name) for r in results)
    for r in results:
        stream.write(f"{'PASS' if r.passed else 'FAIL'}  {r.name.ljust(width)}  {r.detail}\n")
    failed = sum(not r.passed for r in results)
    stream.write(f"{len(results) - failed}/{len(results)} checks passed\n")
