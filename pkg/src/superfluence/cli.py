"""Command-line front end: single runs, parameter sweeps and oracle comparisons.

Times and steps given on the command line are in units of ``1/gamma``.
Numeric outputs are written with 17 significant digits and contain no
wall-clock data, so identical invocations give identical bytes.  Run-time
details go to a separate manifest file that each output names.

Exit codes: 0 success, 2 invalid flags, 3 step too large after one retry
with half the step, 4 oracle tolerance failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import platform
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from . import oracles
from .dicke import pulse_grid
from .exceptions import PhaseLeak, StepTooLarge
from .metrics import AmplifierReport, simulate
from .model import PulseSpec, Shape, SystemConfig, pulse_for_input_photons
from .regression import assemble_two_time

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_STEP = 3
EXIT_ORACLE = 4

SERIES_COLUMNS = [
    "t", "re_E", "im_E", "re_Jm", "im_Jm", "Jz", "JpJm",
    "re_a_out", "im_a_out", "n_a", "abs2_a_out", "n_b",
]

SWEEP_COLUMNS = [
    "axis", "value", "atoms", "shape", "area", "tp", "gamma", "theta",
    "N_in", "N_a", "N_ac", "N_b", "N_bc", "P_a", "P_ac", "P_b", "P_bc",
    "conservation_residual", "G", "dX", "dY", "R_SN", "gain_defined",
    "pacs_coherent", "t_end", "dt",
]


class UsageError(Exception):
    """Invalid flag combination detected after argparse."""


# ------------------------------------------------------------------ formatting


def fmt(value) -> str:
    """17-significant-digit scientific notation; empty for missing values."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if not math.isfinite(value):
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    return "%.16e" % value


def _json_value(value, indent: int) -> str:
    pad = "  " * (indent + 1)
    if value is None:
        return "null"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return fmt(value) if math.isfinite(value) else "null"
    if isinstance(value, (complex, np.complexfloating)):
        return _json_value({"re": value.real, "im": value.imag}, indent)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_json_value(v, indent + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = [pad + _json_value(v, indent + 1) for v in value]
        return "[\n" + ",\n".join(items) + "\n" + "  " * indent + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps(value) -> str:
    """Deterministic JSON with floats in ``%.16e`` form."""
    return _json_value(value, 0) + "\n"


def params_hash(params: dict) -> str:
    return hashlib.sha256(json.dumps(params, sort_keys=True).encode()).hexdigest()[:16]


def write_manifest(path: Path, command: str, params: dict, grid: dict, outputs: list, started: float) -> None:
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "argv": sys.argv[1:],
        "parameters": params,
        "params_hash": params_hash(params),
        "grid": grid,
        "code_version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "started_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(started)),
        "wall_clock_s": time.time() - started,
        "outputs": [str(p) for p in outputs],
    }
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")


# --------------------------------------------------------------------- parsing


@dataclass
class Point:
    """One parameter point in command-line units."""

    atoms: int
    shape: str
    area_pi: float
    tp: float
    gamma: float = 1.0
    theta: float = 0.0
    detuning: float = 0.0
    dt: Optional[float] = None
    t_end: Optional[float] = None
    quadratures: bool = False

    def build(self) -> tuple[SystemConfig, PulseSpec]:
        config = SystemConfig(self.atoms, gamma=self.gamma, theta=self.theta, detuning=self.detuning * self.gamma)
        pulse = PulseSpec(Shape.parse(self.shape), self.tp / self.gamma, self.area_pi * math.pi)
        return config, pulse

    def params(self) -> dict:
        return {
            "atoms": self.atoms, "shape": Shape.parse(self.shape).value, "area_pi": self.area_pi, "tp": self.tp,
            "gamma": self.gamma, "theta": self.theta, "detuning": self.detuning, "dt": self.dt,
            "t_end": self.t_end, "quadratures": self.quadratures,
        }


def _bool(text: str) -> bool:
    key = str(text).strip().lower()
    if key in ("1", "true", "yes", "on"):
        return True
    if key in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _shape(text: str) -> str:
    try:
        return Shape.parse(text).value
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_point_flags(p: argparse.ArgumentParser, atoms=10, tp=0.2) -> None:
    p.add_argument("--atoms", type=_positive_int, default=atoms, help="number of atoms N")
    p.add_argument("--shape", type=_shape, default="rect", help="pulse shape: rect or sine")
    p.add_argument("--area-pi", type=float, default=1.0, help="pulse area in units of pi")
    p.add_argument("--tp", type=float, default=tp, help="pulse duration in units of 1/gamma")
    p.add_argument("--gamma", type=float, default=1.0, help="decay rate; rescales times only")
    p.add_argument("--theta", type=float, default=0.0, help="input carrier phase (rad)")
    p.add_argument("--detuning", type=float, default=0.0, help="atom minus carrier frequency, units of gamma")
    p.add_argument("--dt", type=float, default=None, help="RK4 step in units of 1/gamma (default automatic)")
    p.add_argument("--t-end", type=float, default=None, help="minimum record length in units of 1/gamma")
    p.add_argument("--quadratures", action="store_true", help="also run the two-time engine (slow)")
    p.add_argument("--config", type=Path, default=None, help="flat key=value file; flags override it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="superfluence", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate one parameter point")
    _add_point_flags(run)
    run.add_argument("--out", type=Path, default=Path("."), help="output directory")
    run.add_argument("--prefix", default="run", help="output file prefix")

    sweep = sub.add_parser("sweep", help="scan one parameter and write one CSV row per point")
    _add_point_flags(sweep)
    sweep.add_argument("--axis", choices=["tp", "area", "atoms"], required=True)
    sweep.add_argument("--start", type=float, required=True)
    sweep.add_argument("--stop", type=float, required=True)
    sweep.add_argument("--num", type=_positive_int, required=True)
    sweep.add_argument("--spacing", choices=["log", "linear"], default="linear")
    sweep.add_argument("--nin", type=float, default=None,
                       help="area sweeps: fix the input photon number and derive tp per point")
    sweep.add_argument("--workers", type=_positive_int, default=None,
                       help="worker processes (capped by SUPERFLUENCE_THREADS)")
    sweep.add_argument("--out", type=Path, required=True, help="output CSV")

    oracle = sub.add_parser("oracle", help="compare the engines with a closed-form reference")
    oracle.add_argument("which", choices=["short-pulse", "long-pulse", "single-atom", "pacs", "jc",
                                          "semiclassical", "delta-y"])
    oracle.add_argument("--atoms", type=_positive_int, default=None)
    oracle.add_argument("--tp", type=float, nargs="+", default=None, help="pulse duration(s), units of 1/gamma")
    oracle.add_argument("--dt", type=float, default=None)
    oracle.add_argument("--out", type=Path, default=None, help="also write the JSON report here")
    oracle.add_argument("--config", type=Path, default=None)
    return parser


def read_config(path: Path) -> dict:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def parse_args(argv) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None) is None:
        return args
    try:
        values = read_config(args.config)
    except OSError as exc:
        parser.error(f"cannot read config: {exc}")
    except UsageError as exc:
        parser.error(str(exc))
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, value in values.items():
        if key not in known or key in ("config", "help", "which"):
            parser.error(f"unknown config key {key!r}")
        action = known[key]
        if isinstance(action, argparse._StoreTrueAction):
            try:
                defaults[key] = _bool(value)
            except argparse.ArgumentTypeError as exc:
                parser.error(str(exc))
        elif action.nargs == "+":
            defaults[key] = [action.type(v) for v in value.split()]
        else:
            defaults[key] = value
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def point_from_args(args) -> Point:
    point = Point(atoms=args.atoms, shape=args.shape, area_pi=args.area_pi, tp=args.tp, gamma=args.gamma,
                  theta=args.theta, detuning=args.detuning, dt=args.dt, t_end=args.t_end,
                  quadratures=args.quadratures)
    if point.dt is not None and not point.dt > 0:
        raise UsageError("--dt must be positive")
    if point.t_end is not None and not point.t_end > 0:
        raise UsageError("--t-end must be positive")
    try:
        point.build()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return point


# ---------------------------------------------------------------------- run


def run_point(point: Point):
    """Simulate one point; on StepTooLarge retry once with half the step."""
    config, pulse = point.build()
    dt = None if point.dt is None else point.dt / point.gamma
    t_end = None if point.t_end is None else point.t_end / point.gamma
    try:
        return simulate(config, pulse, dt=dt, quadratures=point.quadratures, t_end=t_end)
    except StepTooLarge:
        h, _ = pulse_grid(pulse, config, dt)
        return simulate(config, pulse, dt=0.5 * h, quadratures=point.quadratures, t_end=t_end)


def series_csv(series, header: list[str]) -> str:
    buf = io.StringIO()
    for line in header:
        buf.write(f"# {line}\n")
    buf.write(",".join(SERIES_COLUMNS) + "\n")
    cols = [
        series.t, series.drive.real, series.drive.imag, series.jm.real, series.jm.imag, series.jz,
        series.jpjm, series.a_out.real, series.a_out.imag, series.n_a, np.abs(series.a_out) ** 2,
        series.n_b,
    ]
    for row in zip(*cols):
        buf.write(",".join("%.16e" % v for v in row) + "\n")
    return buf.getvalue()


def report_dict(report: AmplifierReport, point: Point) -> dict:
    data = report.to_dict()
    if not point.quadratures:
        for key in ("dX", "dY", "R_SN"):
            data.pop(key)
    return data


def cmd_run(args) -> int:
    started = time.time()
    point = point_from_args(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report, series = run_point(point)

    params = point.params()
    digest = params_hash(params)
    manifest = out / f"{args.prefix}_manifest.json"
    series_path = out / f"{args.prefix}_series.csv"
    report_path = out / f"{args.prefix}_report.json"
    header = [f"manifest={manifest.name}", f"params_hash={digest}", f"schema_version={SCHEMA_VERSION}"]
    series_path.write_text(series_csv(series, header), encoding="utf-8")
    document = {"manifest": manifest.name, "params_hash": digest, "schema_version": SCHEMA_VERSION,
                "parameters": params, "report": report_dict(report, point)}
    report_path.write_text(dumps(document), encoding="utf-8")
    write_manifest(manifest, "run", params, {"dt": report.dt, "t_end": report.t_end, "points": len(series.t)},
                   [series_path, report_path], started)
    print(dumps(document["report"]), end="")
    return EXIT_OK


# -------------------------------------------------------------------- sweep


def sweep_values(start: float, stop: float, num: int, spacing: str, axis: str) -> list:
    if spacing == "log":
        if start <= 0 or stop <= 0:
            raise UsageError("log spacing needs positive bounds")
        values = np.geomspace(start, stop, num)
    else:
        values = np.linspace(start, stop, num)
    if num > 1 and not (np.all(np.diff(values) > 0) or np.all(np.diff(values) < 0)):
        raise UsageError("sweep range must be monotone")
    if axis == "atoms":
        ints = []
        for v in values:
            n = int(round(v))
            if n < 1:
                raise UsageError("atom counts must be positive")
            if n not in ints:
                ints.append(n)
        return ints
    return [float(v) for v in values]


def sweep_points(args) -> list[tuple[object, Point]]:
    base = point_from_args(args)
    points = []
    for value in sweep_values(args.start, args.stop, args.num, args.spacing, args.axis):
        p = Point(**{**base.__dict__})
        if args.axis == "tp":
            p.tp = value
        elif args.axis == "atoms":
            p.atoms = value
        else:
            p.area_pi = value
            if args.nin is not None:
                # the vacuum point keeps the pi-pulse window at the same photon number
                area = value * math.pi if value > 0 else math.pi
                p.tp = pulse_for_input_photons(p.shape, area, args.nin, 1.0).t_p
        try:
            p.build()
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        points.append((value, p))
    return points


def _sweep_row(item) -> list[str]:
    axis, value, point = item
    report, _ = run_point(point)
    r = report.to_dict()
    values = {
        "axis": axis, "value": value, "atoms": point.atoms, "shape": Shape.parse(point.shape).value,
        "area": point.area_pi * math.pi, "tp": point.tp, "gamma": point.gamma, "theta": point.theta,
        "pacs_coherent": oracles.pacs_coherent_number(r["N_in"], point.atoms),
        **{k: r[k] for k in SWEEP_COLUMNS if k in r},
    }
    return [v if isinstance(v, str) else fmt(v) for v in (values[k] for k in SWEEP_COLUMNS)]


def worker_count(requested: Optional[int], n_points: int) -> int:
    cap = os.environ.get("SUPERFLUENCE_THREADS")
    workers = requested or os.cpu_count() or 1
    if cap:
        workers = min(workers, max(1, int(cap)))
    return max(1, min(workers, n_points))


def cmd_sweep(args) -> int:
    started = time.time()
    if args.nin is not None and args.axis != "area":
        raise UsageError("--nin applies to area sweeps only")
    if args.nin is not None and not args.nin > 0:
        raise UsageError("--nin must be positive")
    points = sweep_points(args)
    base = point_from_args(args)
    params = {**base.params(), "axis": args.axis, "start": args.start, "stop": args.stop, "num": args.num,
              "spacing": args.spacing, "nin": args.nin}
    if args.axis == "tp":
        params["tp"] = None
    elif args.axis == "atoms":
        params["atoms"] = None
    else:
        params["area_pi"] = None
        if args.nin is not None:
            params["tp"] = None
    digest = params_hash(params)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    manifest = out.with_name(out.name + ".manifest.json")
    comment = f"# manifest={manifest.name} params_hash={digest} schema_version={SCHEMA_VERSION}\n"

    done = set()
    if out.exists() and out.stat().st_size > 0:
        with out.open(encoding="utf-8") as fh:
            first = fh.readline()
            if first != comment:
                raise UsageError(f"{out} was written by a different sweep; remove it or change --out")
            reader = csv.reader(fh)
            if next(reader, None) != SWEEP_COLUMNS:
                raise UsageError(f"{out} has an unexpected header")
            done = {row[1] for row in reader if len(row) == len(SWEEP_COLUMNS)}
        # drop a trailing partial line so appended rows start cleanly
        text = out.read_text(encoding="utf-8")
        if not text.endswith("\n"):
            out.write_text(text[: text.rfind("\n") + 1], encoding="utf-8")
        mode = "a"
    else:
        mode = "w"

    todo = [(args.axis, v, p) for v, p in points if fmt(v) not in done]
    with out.open(mode, encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if mode == "w":
            fh.write(comment)
            writer.writerow(SWEEP_COLUMNS)
            fh.flush()
        workers = worker_count(args.workers, len(todo))
        if workers == 1:
            rows = map(_sweep_row, todo)
            pool = None
        else:
            pool = ProcessPoolExecutor(max_workers=workers)
            rows = pool.map(_sweep_row, todo)
        try:
            for row in rows:
                writer.writerow(row)
                fh.flush()
        finally:
            if pool is not None:
                pool.shutdown(cancel_futures=True)
    write_manifest(manifest, "sweep", params, {"points": len(points), "computed": len(todo)}, [out], started)
    print(f"{out}: {len(points)} points ({len(todo)} computed)")
    return EXIT_OK


# ------------------------------------------------------------------- oracle


def _compare(name: str, engine, oracle, tolerance: float, kind: str = "abs", bound: Optional[str] = None) -> dict:
    """One comparison row.  ``bound`` turns it into an inequality: 'min' or 'max' on the engine value."""
    engine = float(engine)
    oracle = float(oracle)
    dev = abs(engine - oracle)
    rel = dev / abs(oracle) if oracle != 0 else (0.0 if dev == 0 else math.inf)
    if bound == "min":
        ok = engine >= oracle - tolerance
    elif bound == "max":
        ok = engine <= oracle + tolerance
    else:
        ok = (rel if kind == "rel" else dev) <= tolerance
    return {"quantity": name, "engine": engine, "oracle": oracle, "abs_deviation": dev, "rel_deviation": rel,
            "tolerance": tolerance, "kind": bound or kind, "pass": bool(ok)}


def _first(values, default):
    return default if not values else values[0]


def oracle_short_pulse(args) -> list:
    n = args.atoms or 10
    tp = _first(args.tp, 0.01)
    config = SystemConfig(n)
    pulse = PulseSpec(Shape.RECTANGULAR, tp)
    report, series = simulate(config, pulse, dt=args.dt)
    ref = oracles.short_pulse_reference(config, pulse, series.t[: series.tp_index + 1])
    k = series.tp_index
    gain = 1.0 + 2.0 * n * tp / math.pi**2
    return [
        _compare("P_a", report.P_a, 1.0, 0.05),
        _compare("P_ac", report.P_ac, 1.0, 0.05),
        _compare("P_b", report.P_b, 0.0, 0.03, bound="max"),
        _compare("G", report.G, gain, 5e-3, "rel"),
        _compare("max|Jm - ref|/N", np.max(np.abs(series.jm[: k + 1] - ref.jm)) / n, 0.0, 0.03, bound="max"),
        _compare("Jz(tp)/N", series.jz[k] / n, -0.5, 0.02),
    ]


def oracle_long_pulse(args) -> list:
    n = args.atoms or 10
    tp = _first(args.tp, 100.0)
    config = SystemConfig(n)
    pulse = PulseSpec(Shape.RECTANGULAR, tp)
    report, _ = simulate(config, pulse, dt=args.dt)
    ref = oracles.long_pulse_reference(config, pulse)
    return [_compare(key, getattr(report, key), ref[key], 0.02) for key in ("P_a", "P_b", "P_ac")]


def oracle_single_atom(args) -> list:
    tp = _first(args.tp, 2.0)
    config = SystemConfig(1)
    pulse = PulseSpec(Shape.RECTANGULAR, tp, area=0.0)
    dt = args.dt or tp / 400
    grid = assemble_two_time(config, pulse, dt=dt)
    t1, t2 = np.meshgrid(grid.t, grid.t, indexing="ij")
    upper = t2 >= t1
    ref = oracles.single_atom_regression(t1[upper], t2[upper])
    err = np.max(np.abs(grid.c_pm[upper] - ref))
    return [_compare("max|C_pm - exp(-t1) exp(-(t2-t1)/2)|", err, 0.0, 1e-6, bound="max")]


def oracle_pacs(args) -> list:
    rows = []
    for n in range(1, 11):
        for n_in in (1.0, 10.0, 100.0):
            rows.append(_compare(f"closed vs Fock N={n} N_in={n_in:g}", oracles.pacs_coherent_number(n_in, n),
                                 oracles.pacs_coherent_number_fock(n_in, n), 1e-8, "rel"))
    for n in (1, 5, 10):
        excess = oracles.pacs_coherent_number(100.0, n) - 100.0 - n
        rows.append(_compare(f"excess coherence N={n} N_in=100", excess, n, 0.05, "rel"))
    return rows


def oracle_jc(args) -> list:
    rows = []
    probs = []
    for n_bar in (25.0, 100.0, 400.0):
        state = oracles.jc_conditional_state(n_bar, 1.0, oracles.t_pi(n_bar, 1.0))
        probs.append(state.decay_probability)
        rows.append(_compare(f"decay probability n={n_bar:g}", state.decay_probability, 1.0, 1.0, bound="max"))
    rows.append(_compare("decay probability increasing", float(np.all(np.diff(probs) > 0)), 1.0, 0.0))
    rows.append(_compare("decay probability n=400", probs[-1], 0.99, 0.0, bound="min"))
    state = oracles.jc_conditional_state(400.0, 1.0, oracles.t_pi(400.0, 1.0))
    rows.append(_compare("two-branch overlap n=400", state.overlap, 0.99, 0.0, bound="min"))
    adder = oracles.photon_adder_check(25.0)
    rows.append(_compare("photon adder <n>", adder["photon_number"], 26.0, 1e-9))
    rows.append(_compare("photon adder |<a>|", abs(adder["amplitude"]), math.sqrt(26.0), 1e-3))
    return rows


def oracle_semiclassical(args) -> list:
    n = args.atoms or 10
    n_bar = 1e3
    t = np.linspace(0.0, oracles.t_pi(n_bar, 1.0), 2001)
    traj = oracles.semiclassical_evolve(n / 4.0, None, n_bar, 1.0, t)
    rows = [_compare("constants of motion drift", traj.drift(), 0.0, 1e-6, bound="max")]
    n_bar = 1e4
    t = np.linspace(0.0, oracles.t_pi(n_bar, 1.0), 2001)
    traj = oracles.semiclassical_evolve(0.5, None, n_bar, 1.0, t)
    phi, _ = oracles.linearized_reference(0.5, n_bar, 1.0, t)
    rel = np.max(np.abs(traj.phi[1:] - phi[1:]) / np.abs(phi[1:]))
    rows.append(_compare("linearized phase rel. error", rel, 0.0, 0.05, bound="max"))
    return rows


def oracle_delta_y(args) -> list:
    n = args.atoms or 10
    targets = {0.1: 0.63, 0.3: 0.86, 0.5: 1.0}
    rows = []
    for tp in args.tp or [0.1, 0.3]:
        config = SystemConfig(n)
        pulse = PulseSpec(Shape.RECTANGULAR, tp)
        report, _ = simulate(config, pulse, dt=args.dt, quadratures=True)
        _, estimate = oracles.phase_spread_estimate(n, report.N_in, report.G)
        target = targets.get(round(tp, 12), estimate)
        rows.append(_compare(f"dY tp={tp:g} vs quoted", report.dY, target, 0.2, "rel"))
        rows.append(_compare(f"dY tp={tp:g} vs estimate", report.dY, estimate, 0.2, "rel"))
    return rows


ORACLES = {
    "short-pulse": oracle_short_pulse,
    "long-pulse": oracle_long_pulse,
    "single-atom": oracle_single_atom,
    "pacs": oracle_pacs,
    "jc": oracle_jc,
    "semiclassical": oracle_semiclassical,
    "delta-y": oracle_delta_y,
}


def cmd_oracle(args) -> int:
    if args.dt is not None and not args.dt > 0:
        raise UsageError("--dt must be positive")
    if args.tp is not None and any(not tp > 0 for tp in args.tp):
        raise UsageError("--tp must be positive")
    rows = ORACLES[args.which](args)
    document = {"oracle": args.which, "pass": all(r["pass"] for r in rows), "comparisons": rows}
    text = dumps(document)
    if args.out is not None:
        Path(args.out).write_text(text, encoding="utf-8")
    print(text, end="")
    return EXIT_OK if document["pass"] else EXIT_ORACLE


# --------------------------------------------------------------------- main


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "oracle": cmd_oracle}


def main(argv=None) -> int:
    args = parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"superfluence: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StepTooLarge as exc:
        print(f"superfluence: step too large after retry: {exc}", file=sys.stderr)
        return EXIT_STEP
    except PhaseLeak as exc:
        print(f"superfluence: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
