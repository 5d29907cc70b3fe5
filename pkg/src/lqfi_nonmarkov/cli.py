"""Command-line driver: figure-data sweeps, verification and oracle comparisons.

Exit codes: 0 success, 2 invalid flags, 3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import channels as ch
from . import nonmarkov as nm
from .errors import Unphysical
from .states import DEFAULT_TRIPLE, x_state

EXIT_VERIFY_FAILED = 3

DEPHASING_SWEEP_HEADER = ["s", "N_lqfi", "N_lqu"]
DEPHASING_DETAIL_HEADER = ["t", "gamma", "P", "Q", "U", "dQdt", "dUdt"]
AMPLITUDE_SWEEP_HEADER = ["lambda_over_gamma0", "N_lqfi", "N_lqu"]
AMPLITUDE_DETAIL_HEADER = ["t", "absR", "Q", "U", "dQdt", "dUdt"]
DEPOLARIZING_HEADER = ["nu", "Upsilon", "Q", "U", "dQdt", "dUdt"]


# -- formatting --------------------------------------------------------------

def fmt(x) -> str:
    """Shortest round-trip decimal for floats."""
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def render(header: Sequence[str], rows: list[list], fmt_name: str, config: dict, report=None) -> str:
    if fmt_name == "json":
        doc = {
            "config": config,
            "rows": [dict(zip(header, [float(v) for v in row])) for row in rows],
        }
        if report is not None:
            doc["report"] = report
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def emit(text: str, out: str | None) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run_ordered(func: Callable, items: Iterable, threads: int) -> list:
    """Map over ``items`` keeping input order whatever the completion order."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


# -- per-channel work units (top level so they pickle) -----------------------

def detail_rows(spec: ch.ChannelSpec, window, n_scan: int, extra: Callable[[float], list]) -> list[list]:
    cache = nm.measure_functions(spec)
    rows = []
    for t in np.linspace(window[0], window[1], n_scan):
        q, u = cache(t)
        dq, du = nm.derivative(cache.both, float(t), lower=window[0])
        rows.append([float(t), *extra(float(t)), q, u, dq, du])
    return rows


def _dephasing_point(job):
    s, omega_c, window, n_scan, want_detail = job
    spec = ch.DephasingParams(s=s, omega_c=omega_c)
    rep = nm.channel_report(spec, window, n_scan)
    detail = None
    if want_detail:
        detail = detail_rows(
            spec, window, n_scan,
            lambda t: [ch.dephasing_rate(t, spec), ch.dephasing_coherence(t, spec)],
        )
    return rep, detail


def _amplitude_point(job):
    ratio, gamma0, delta, window, n_scan, want_detail = job
    spec = ch.AmplitudeDampingParams(lam=ratio * gamma0, gamma0=gamma0, delta=delta)
    rep = nm.channel_report(spec, window, n_scan)
    detail = None
    if want_detail:
        detail = detail_rows(spec, window, n_scan, lambda t: [abs(ch.ad_amplitude(t, spec))])
    return rep, detail


# -- commands ----------------------------------------------------------------

def _config(args) -> dict:
    skip = {"func", "config"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _detail_path(args, stem: str) -> str:
    ext = "json" if args.format == "json" else "csv"
    return os.path.join(args.detail_dir, f"{stem}.{ext}")


def cmd_dephasing(args) -> int:
    values = np.linspace(args.s_min, args.s_max, args.s_steps)
    t_max = args.t_max if args.t_max is not None else 30.0 / args.omega_c
    window = (0.0, t_max)
    want = bool(args.detail_dir)
    jobs = [(float(s), args.omega_c, window, args.n_scan, want) for s in values]
    results = run_ordered(_dephasing_point, jobs, args.threads)
    rows = [[float(s), rep.n_lqfi, rep.n_lqu] for s, (rep, _) in zip(values, results)]
    report = [dict(s=float(s), **rep.as_dict()) for s, (rep, _) in zip(values, results)]
    emit(render(DEPHASING_SWEEP_HEADER, rows, args.format, _config(args), report), args.out)
    if want:
        for s, (_, detail) in zip(values, results):
            emit(render(DEPHASING_DETAIL_HEADER, detail, args.format, _config(args)),
                 _detail_path(args, f"dephasing_s{fmt(float(s))}"))
    return 0


def cmd_amplitude(args) -> int:
    values = np.linspace(args.ratio_min, args.ratio_max, args.steps)
    t_max = args.t_max if args.t_max is not None else 25.0 / args.gamma0
    window = (0.0, t_max)
    want = bool(args.detail_dir)
    jobs = [(float(x), args.gamma0, args.delta, window, args.n_scan, want) for x in values]
    results = run_ordered(_amplitude_point, jobs, args.threads)
    rows = [[float(x), rep.n_lqfi, rep.n_lqu] for x, (rep, _) in zip(values, results)]
    report = [dict(lambda_over_gamma0=float(x), **rep.as_dict()) for x, (rep, _) in zip(values, results)]
    emit(render(AMPLITUDE_SWEEP_HEADER, rows, args.format, _config(args), report), args.out)
    if want:
        for x, (_, detail) in zip(values, results):
            emit(render(AMPLITUDE_DETAIL_HEADER, detail, args.format, _config(args)),
                 _detail_path(args, f"amplitude_ratio{fmt(float(x))}"))
    return 0


def depolarizing_data(mu: float, r, nu_max: float, steps: int):
    spec = ch.DepolarizingParams(mu=mu, r=tuple(r))
    window = (0.0, nu_max)
    rows = detail_rows(spec, window, steps, lambda nu: [ch.depol_memory(nu, mu)])
    rep = nm.channel_report(spec, window, steps)
    return rows, rep


def cmd_depolarizing(args) -> int:
    r = (args.r1, args.r2, args.r3)
    rows, rep = depolarizing_data(args.mu, r, args.nu_max, args.steps)
    emit(render(DEPOLARIZING_HEADER, rows, args.format, _config(args), rep.as_dict()), args.out)
    sys.stderr.write(f"N_lqfi={fmt(rep.n_lqfi)} N_lqu={fmt(rep.n_lqu)}\n")
    return 0


def cmd_sweep(args) -> int:
    """Regenerate the data behind all three figures into ``--out-dir``."""
    out = Path(args.out_dir)
    ext = "json" if args.format == "json" else "csv"
    config = _config(args)

    ns = argparse.Namespace(**vars(args))
    ns.s_min, ns.s_max, ns.s_steps, ns.omega_c, ns.t_max = 1.0, 6.0, args.points, 1.0, None
    ns.detail_dir = str(out / "fig1_detail") if args.detail else None
    ns.out = str(out / f"fig1_dephasing.{ext}")
    cmd_dephasing(ns)

    ns = argparse.Namespace(**vars(args))
    ns.ratio_min, ns.ratio_max, ns.steps = args.ratio_min, args.ratio_max, args.points
    ns.gamma0, ns.delta, ns.t_max = 1.0, 0.0, None
    ns.detail_dir = str(out / "fig2_detail") if args.detail else None
    ns.out = str(out / f"fig2_amplitude.{ext}")
    cmd_amplitude(ns)

    for mu in args.mus:
        rows, rep = depolarizing_data(mu, tuple(args.r), 10.0, args.n_scan)
        emit(render(DEPOLARIZING_HEADER, rows, args.format, dict(config, mu=mu), rep.as_dict()),
             str(out / f"fig3_depolarizing_mu{fmt(float(mu))}.{ext}"))
    return 0


def cmd_verify(args) -> int:
    from .verify import print_table, run_suite

    results = run_suite(seed=args.seed, quick=not args.full)
    print_table(results)
    return 0 if all(r.passed for r in results) else EXIT_VERIFY_FAILED


def cmd_oracle(args) -> int:
    from .verify import oracle_checks, print_table

    results = oracle_checks(seed=args.seed, count=args.count)
    print_table(results)
    return 0 if all(r.passed for r in results) else EXIT_VERIFY_FAILED


# -- parser ------------------------------------------------------------------

def _positive_int_at_least(lo: int):
    def parse(text: str) -> int:
        val = int(text)
        if val < lo:
            raise argparse.ArgumentTypeError(f"must be >= {lo}")
        return val
    return parse


def _positive_float(text: str) -> float:
    val = float(text)
    if not val > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return val


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--threads", type=_positive_int_at_least(1), default=1)
    common.add_argument("--config", help="key=value file; flags override it")
    common.add_argument("--seed", type=int, default=1)

    parser = argparse.ArgumentParser(
        prog="lqfi-nm",
        description="Non-Markovianity of open qubit dynamics via LQFI and LQU.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dephasing", parents=[common], help="N versus ohmicity s (phase damping)")
    p.add_argument("--s-min", type=_positive_float, default=1.0)
    p.add_argument("--s-max", type=_positive_float, default=6.0)
    p.add_argument("--s-steps", type=_positive_int_at_least(1), default=50)
    p.add_argument("--omega-c", type=_positive_float, default=1.0)
    p.add_argument("--t-max", type=_positive_float, default=None)
    p.add_argument("--n-scan", type=_positive_int_at_least(100), default=1000)
    p.add_argument("--detail-dir", help="write per-t detail tables here")
    p.set_defaults(func=cmd_dephasing)

    p = sub.add_parser("amplitude", parents=[common], help="N versus lambda/gamma0 (amplitude damping)")
    p.add_argument("--ratio-min", type=_positive_float, default=0.05)
    p.add_argument("--ratio-max", type=_positive_float, default=2.5)
    p.add_argument("--steps", type=_positive_int_at_least(1), default=50)
    p.add_argument("--gamma0", type=_positive_float, default=1.0)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--t-max", type=_positive_float, default=None)
    p.add_argument("--n-scan", type=_positive_int_at_least(100), default=1000)
    p.add_argument("--detail-dir", help="write per-t detail tables here")
    p.set_defaults(func=cmd_amplitude)

    p = sub.add_parser("depolarizing", parents=[common], help="per-nu trajectory (telegraph-noise depolarizing)")
    p.add_argument("--mu", type=_positive_float, default=3.0)
    p.add_argument("--r1", type=float, default=DEFAULT_TRIPLE[0])
    p.add_argument("--r2", type=float, default=DEFAULT_TRIPLE[1])
    p.add_argument("--r3", type=float, default=DEFAULT_TRIPLE[2])
    p.add_argument("--nu-max", type=_positive_float, default=10.0)
    p.add_argument("--steps", type=_positive_int_at_least(100), default=1000)
    p.set_defaults(func=cmd_depolarizing)

    p = sub.add_parser("sweep", parents=[common], help="regenerate all figure data")
    p.add_argument("--out-dir", default="figure_data")
    p.add_argument("--points", type=_positive_int_at_least(1), default=50)
    p.add_argument("--ratio-min", type=_positive_float, default=0.05)
    p.add_argument("--ratio-max", type=_positive_float, default=2.5)
    p.add_argument("--mus", type=_positive_float, nargs="+", default=[3.0, 5.0])
    p.add_argument("--r", type=float, nargs=3, default=list(DEFAULT_TRIPLE))
    p.add_argument("--n-scan", type=_positive_int_at_least(100), default=1000)
    p.add_argument("--detail", action="store_true", help="also write per-t tables for every sweep point")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", parents=[common], help="run the invariant suites")
    p.add_argument("--full", action="store_true", help="use the full sample sizes")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", parents=[common], help="brute-force and integro-differential oracle comparisons")
    p.add_argument("--count", type=_positive_int_at_least(1), default=20)
    p.set_defaults(func=cmd_oracle)
    return parser


def read_config(path: str) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            out[key.lstrip("-").replace("-", "_")] = value
    return out


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Turn config-file entries into flags placed before the user's own flags."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return argv
    try:
        entries = read_config(known.config)
    except (OSError, ValueError) as exc:
        parser.error(str(exc))
    command = next((a for a in argv if not a.startswith("-")), None)
    if command is None:
        return argv
    idx = argv.index(command)
    extra: list[str] = []
    for key, value in entries.items():
        flag = "--" + key.replace("_", "-")
        if value.lower() in ("true", "yes") and flag in ("--detail", "--full"):
            extra.append(flag)
        else:
            extra.extend([flag, *value.split()])
    # argparse keeps the last occurrence, so user flags after these win
    return argv[: idx + 1] + extra + argv[idx + 1:]


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(_apply_config(parser, argv))
    if args.command == "depolarizing":
        try:
            x_state((args.r1, args.r2, args.r3))
        except Unphysical as exc:
            parser.error(str(exc))
    if args.command == "sweep":
        try:
            x_state(tuple(args.r))
        except Unphysical as exc:
            parser.error(str(exc))
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
