import csv
import io
import json
import math

import pytest

from lqfi_nonmarkov import cli
from lqfi_nonmarkov.measures import lqfi_lqu
from lqfi_nonmarkov.states import DEFAULT_TRIPLE, x_state


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def parse_csv(text):
    return list(csv.reader(io.StringIO(text)))


def test_dephasing_sweep_rows(capsys):
    code, out, _ = run(capsys, "dephasing", "--s-min", "1", "--s-max", "6", "--s-steps", "11", "--n-scan", "200")
    assert code == 0
    rows = parse_csv(out)
    assert rows[0] == cli.DEPHASING_SWEEP_HEADER
    assert len(rows) == 12
    assert float(rows[1][0]) == 1.0 and abs(float(rows[1][1])) <= 1e-10
    n = {float(r[0]): float(r[1]) for r in rows[1:]}
    # the backflow grows, peaks near s = 3 and dies out once P has collapsed
    assert n[2.5] > 1e-4 and n[3.0] > n[2.5] > n[4.0] > n[5.0]
    assert n[6.0] <= 1e-10


def test_dephasing_detail_files(capsys, tmp_path):
    code, _, _ = run(capsys, "dephasing", "--s-min", "4", "--s-max", "4", "--s-steps", "1",
                     "--n-scan", "100", "--detail-dir", str(tmp_path))
    assert code == 0
    rows = parse_csv((tmp_path / "dephasing_s4.0.csv").read_text())
    assert rows[0] == cli.DEPHASING_DETAIL_HEADER
    assert len(rows) == 101
    t, gamma, p, q, u = (float(x) for x in rows[1][:5])
    assert (t, gamma, p, q, u) == (0.0, 0.0, 1.0, pytest.approx(1.0), pytest.approx(1.0))


def test_amplitude_outputs(capsys, tmp_path):
    code, out, _ = run(capsys, "amplitude", "--ratio-min", "0.3", "--ratio-max", "5", "--steps", "2",
                       "--n-scan", "200", "--detail-dir", str(tmp_path))
    assert code == 0
    rows = parse_csv(out)
    assert rows[0] == cli.AMPLITUDE_SWEEP_HEADER
    assert float(rows[1][1]) > 1e-4 and float(rows[2][1]) == 0.0
    detail = parse_csv((tmp_path / "amplitude_ratio0.3.csv").read_text())
    assert detail[0] == cli.AMPLITUDE_DETAIL_HEADER
    assert float(detail[1][1]) == pytest.approx(1.0)


def test_depolarizing_first_row(capsys):
    code, out, err = run(capsys, "depolarizing", "--mu", "3", "--nu-max", "10", "--steps", "1000")
    assert code == 0
    rows = parse_csv(out)
    assert rows[0] == cli.DEPOLARIZING_HEADER
    assert len(rows) == 1001
    nu, ups, q, u, dq, du = (float(x) for x in rows[1])
    q0, u0 = lqfi_lqu(x_state(DEFAULT_TRIPLE))
    assert nu == 0.0 and ups == 1.0
    assert q == pytest.approx(q0, abs=1e-12) and u == pytest.approx(u0, abs=1e-12)
    assert math.isfinite(dq) and math.isfinite(du)
    assert err.startswith("N_lqfi=")


def test_json_structure(capsys):
    code, out, _ = run(capsys, "dephasing", "--s-min", "4", "--s-max", "5", "--s-steps", "2",
                       "--n-scan", "100", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"config", "rows", "report"}
    assert doc["config"]["s_steps"] == 2 and doc["config"]["format"] == "json"
    assert list(doc["rows"][0]) == cli.DEPHASING_SWEEP_HEADER
    assert doc["report"][0]["n_lqfi"] == doc["rows"][0]["N_lqfi"]
    assert doc["report"][0]["intervals_lqfi"]


def test_out_file_matches_stdout(capsys, tmp_path):
    argv = ["depolarizing", "--mu", "5", "--steps", "150"]
    _, out, _ = run(capsys, *argv)
    target = tmp_path / "sub" / "d.csv"
    run(capsys, *argv, "--out", str(target))
    assert target.read_bytes() == out.encode()


@pytest.mark.parametrize(
    "argv",
    [
        ["dephasing", "--n-scan", "50"],
        ["dephasing", "--s-min", "-1"],
        ["amplitude", "--format", "xml"],
        ["depolarizing", "--r1", "0.9", "--r2", "0.6", "--r3", "0.3"],
        ["sweep", "--r", "1", "1", "1"],
        ["verify", "--threads", "0"],
        ["bogus"],
        [],
    ],
)
def test_invalid_flags_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        cli.main(argv)
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_verify_passes(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0
    assert "FAIL" not in out


def test_verify_failure_exit_3(capsys, monkeypatch):
    from lqfi_nonmarkov import verify

    original = verify.run_suite

    def broken(seed, quick):
        results = original(seed=seed, quick=quick)
        return results + [verify.CheckResult("injected", False, "forced failure")]

    monkeypatch.setattr(verify, "run_suite", broken)
    code, out, _ = run(capsys, "verify")
    assert code == cli.EXIT_VERIFY_FAILED
    assert "injected" in out


def test_oracle_command(capsys):
    code, out, _ = run(capsys, "oracle", "--count", "2")
    assert code == 0
    assert "FAIL" not in out


def test_config_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep settings\ns-min = 4\ns_max = 5\ns-steps = 3\nn-scan = 100\n")
    _, out, _ = run(capsys, "dephasing", "--config", str(cfg))
    assert [r[0] for r in parse_csv(out)[1:]] == ["4.0", "4.5", "5.0"]
    _, out, _ = run(capsys, "dephasing", "--config", str(cfg), "--s-steps", "2")
    assert [r[0] for r in parse_csv(out)[1:]] == ["4.0", "5.0"]


def test_bad_config_exit_2(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("no equals sign\n")
    with pytest.raises(SystemExit) as exc:
        cli.main(["dephasing", "--config", str(cfg)])
    assert exc.value.code == 2


def test_threads_preserve_order(capsys):
    argv = ["amplitude", "--ratio-min", "0.2", "--ratio-max", "3", "--steps", "4", "--n-scan", "100"]
    _, serial, _ = run(capsys, *argv)
    _, parallel, _ = run(capsys, *argv, "--threads", "3")
    assert serial == parallel


def test_fmt_round_trips():
    for x in (0.1, 1 / 3, 2.5e-17, 0.0, -7.0):
        assert float(cli.fmt(x)) == x
    assert cli.fmt(3) == "3"


def test_sweep_writes_all_figures(capsys, tmp_path):
    code, _, _ = run(capsys, "sweep", "--out-dir", str(tmp_path), "--points", "2", "--n-scan", "100")
    assert code == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["fig1_dephasing.csv", "fig2_amplitude.csv",
                     "fig3_depolarizing_mu3.0.csv", "fig3_depolarizing_mu5.0.csv"]
    assert parse_csv((tmp_path / "fig1_dephasing.csv").read_text())[0] == cli.DEPHASING_SWEEP_HEADER
    assert len(parse_csv((tmp_path / "fig3_depolarizing_mu3.0.csv").read_text())) == 101
