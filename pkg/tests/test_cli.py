import csv
import json
import math

import pytest

from superfluence import StepTooLarge, cli


def run(argv):
    return cli.main([str(a) for a in argv])


def read_sweep(path):
    with open(path, encoding="utf-8") as fh:
        comment = fh.readline()
        rows = list(csv.reader(fh))
    return comment, rows[0], rows[1:]


def test_run_vacuum_single_atom(tmp_path, capsys):
    assert run(["run", "--atoms", 1, "--area-pi", 0, "--tp", 1, "--out", tmp_path]) == 0
    report = json.loads((tmp_path / "run_report.json").read_text())
    assert report["schema_version"] == 1
    assert report["report"]["N_a"] == pytest.approx(0.5, abs=1e-4)
    assert report["report"]["N_b"] == pytest.approx(0.5, abs=1e-4)
    assert report["report"]["G"] is None and not report["report"]["gain_defined"]
    assert "dX" not in report["report"]
    assert json.loads(capsys.readouterr().out) == report["report"]


def test_run_outputs_reference_manifest(tmp_path):
    assert run(["run", "--atoms", 10, "--shape", "sine", "--tp", 0.2, "--out", tmp_path, "--prefix", "fig2"]) == 0
    lines = (tmp_path / "fig2_series.csv").read_text().splitlines()
    assert lines[0] == "# manifest=fig2_manifest.json"
    assert lines[2] == "# schema_version=1"
    assert lines[3].split(",") == cli.SERIES_COLUMNS
    report = json.loads((tmp_path / "fig2_report.json").read_text())
    assert lines[1] == f"# params_hash={report['params_hash']}"
    assert report["report"]["N_in"] == pytest.approx(30.44, rel=0.01)
    manifest = json.loads((tmp_path / "fig2_manifest.json").read_text())
    assert manifest["params_hash"] == report["params_hash"]
    assert "wall_clock_s" in manifest and "wall_clock_s" not in report


def test_run_is_byte_identical(tmp_path):
    argv = ["run", "--atoms", 3, "--shape", "sine", "--tp", 0.4, "--theta", 0.3, "--prefix", "x"]
    assert run(argv + ["--out", tmp_path / "a"]) == 0
    assert run(argv + ["--out", tmp_path / "b"]) == 0
    for name in ("x_series.csv", "x_report.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "point.cfg"
    cfg.write_text("# test point\natoms = 2\ntp = 0.5\narea-pi = 0  # vacuum\n")
    assert run(["run", "--config", cfg, "--atoms", 3, "--out", tmp_path]) == 0
    params = json.loads((tmp_path / "run_report.json").read_text())["parameters"]
    assert (params["atoms"], params["tp"], params["area_pi"]) == (3, 0.5, 0.0)


@pytest.mark.parametrize("argv", [
    ["run", "--atoms", "0"],
    ["run", "--tp", "-1"],
    ["run", "--shape", "gauss"],
    ["run", "--dt", "0"],
    ["sweep", "--axis", "tp", "--start", "0", "--stop", "1", "--num", "3", "--spacing", "log", "--out", "x.csv"],
    ["sweep", "--axis", "tp", "--start", "0.1", "--stop", "1", "--num", "3", "--nin", "30", "--out", "x.csv"],
    ["oracle", "nonsense"],
])
def test_invalid_flags_exit_2(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    with pytest.raises(SystemExit) as info:
        code = cli.main(argv)
        raise SystemExit(code)
    assert info.value.code == 2


def test_unknown_config_key_exit_2(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    with pytest.raises(SystemExit) as info:
        cli.main(["run", "--config", str(cfg)])
    assert info.value.code == 2


def test_step_retry_halves_once(tmp_path, monkeypatch):
    calls = []
    real = cli.simulate

    def flaky(config, pulse, dt=None, **kw):
        calls.append(dt)
        if len(calls) == 1:
            raise StepTooLarge("synthetic")
        return real(config, pulse, dt=dt, **kw)

    monkeypatch.setattr(cli, "simulate", flaky)
    assert run(["run", "--atoms", 1, "--tp", 0.5, "--dt", 0.002, "--out", tmp_path]) == 0
    assert calls == [0.002, pytest.approx(0.001)]


def test_step_too_large_twice_exit_3(tmp_path, monkeypatch):
    def always(*args, **kw):
        raise StepTooLarge("synthetic")

    monkeypatch.setattr(cli, "simulate", always)
    assert run(["run", "--atoms", 1, "--out", tmp_path]) == 3


def test_oracle_exit_codes(tmp_path, capsys):
    assert run(["oracle", "single-atom", "--out", tmp_path / "sa.json"]) == 0
    doc = json.loads((tmp_path / "sa.json").read_text())
    assert doc["pass"] and doc["comparisons"]
    capsys.readouterr()
    # the N=10 excess is still 8.5% short of N at N_in = 100
    assert run(["oracle", "pacs"]) == 4
    doc = json.loads(capsys.readouterr().out)
    failing = [row["quantity"] for row in doc["comparisons"] if not row["pass"]]
    assert failing and all("10" in q for q in failing)


def test_sweep_schema_and_resume(tmp_path, capsys):
    out = tmp_path / "tp.csv"
    argv = ["sweep", "--axis", "tp", "--start", 0.1, "--stop", 10, "--num", 3, "--spacing", "log",
            "--atoms", 2, "--workers", 1, "--out", out]
    assert run(argv) == 0
    comment, header, rows = read_sweep(out)
    assert comment.startswith("# manifest=tp.csv.manifest.json params_hash=")
    assert header == cli.SWEEP_COLUMNS
    assert [float(r[1]) for r in rows] == pytest.approx([0.1, 1.0, 10.0])
    full = out.read_text()

    # a crash mid-row: the partial line is dropped and only the missing point is recomputed
    lines = full.splitlines(keepends=True)
    out.write_text("".join(lines[:-1]) + lines[-1][:20])
    capsys.readouterr()
    assert run(argv) == 0
    assert "(1 computed)" in capsys.readouterr().out
    assert out.read_text() == full

    assert run(argv) == 0
    assert "(0 computed)" in capsys.readouterr().out
    assert out.read_text() == full


def test_sweep_refuses_foreign_file(tmp_path):
    out = tmp_path / "s.csv"
    out.write_text("# something else\n")
    argv = ["sweep", "--axis", "atoms", "--start", 1, "--stop", 2, "--num", 2, "--workers", 1, "--out", out]
    assert run(argv) == 2


def test_sweep_parallel_matches_serial(tmp_path):
    base = ["sweep", "--axis", "atoms", "--start", 1, "--stop", 4, "--num", 4, "--tp", 0.3]
    assert run(base + ["--workers", 1, "--out", tmp_path / "a.csv"]) == 0
    assert run(base + ["--workers", 2, "--out", tmp_path / "b.csv"]) == 0
    a, b = ((tmp_path / n).read_text().split("\n", 1) for n in ("a.csv", "b.csv"))
    assert a[0].split()[2:] == b[0].split()[2:]
    assert a[1] == b[1]


def test_area_sweep_at_fixed_photon_number(tmp_path):
    out = tmp_path / "area.csv"
    argv = ["sweep", "--axis", "area", "--start", 0.5, "--stop", 2, "--num", 4, "--nin", 30,
            "--workers", 1, "--out", out]
    assert run(argv) == 0
    _, header, rows = read_sweep(out)
    col = {name: i for i, name in enumerate(header)}
    n_in = [float(r[col["N_in"]]) for r in rows]
    assert n_in == pytest.approx([30.0] * 4, rel=1e-9)
    p_ac = [float(r[col["P_ac"]]) for r in rows]
    assert max(range(4), key=p_ac.__getitem__) == 1
    assert float(rows[1][col["area"]]) == pytest.approx(math.pi)
    assert p_ac[-1] < 0.1
