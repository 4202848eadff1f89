"""Experiment runner.

Usage::

    cohthermo run --config sweep.cfg [--workers N] [--out DIR]
    cohthermo check

The config file is flat ``key = value`` text; see :data:`SCHEMA` for the
recognised keys and README.md for the grammar.  Any key can be overridden
from the environment as ``COHTHERMO_<KEY>`` with dots written as ``__``
(``rotor.k`` -> ``COHTHERMO_ROTOR__K``).

Exit status: 0 success, 2 invalid config, 3 numerical invariant breach.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import __version__, kernels
from .config import Tolerances
from .dynamics import constant_protocol, propagate
from .ensembles import random_protocol
from .errors import CohThermoError, LevelCrossingWarning, ParameterError, TruncationWarning
from .fluctuation import (
    RNG_ALGORITHM,
    distribution_from_process,
    exact_expectations,
    histogram,
    sample,
)
from .linalg import thermal_state
from .models.qubit import (
    QubitProtocolParams,
    cyclic_qubit_protocol,
    qubit_initial_state,
    qubit_protocol,
)
from .models.rotor import RotorParams, rotor_distribution, rotor_run, saturation_statistics
from .thermo import ThermoReport, report_trajectory

__all__ = ["ConfigError", "RunConfig", "SCHEMA", "parse_config", "load_config", "run", "check", "main"]

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT = 0, 2, 3
SCHEMA_LINE = "# schema=1\n"
ENV_PREFIX = "COHTHERMO_"
EXPERIMENTS = ("qubit-sweep", "rotor-sweep", "fluctuation-check", "identity-demo")


class ConfigError(CohThermoError, ValueError):
    pass


# key -> (kind, default, grid).  Grid keys accept lists and ranges.
SCHEMA: dict[str, tuple[str, Any, bool]] = {
    "experiment": ("str", None, False),
    "seed": ("int", None, False),
    "workers": ("int", 1, False),
    "out": ("str", "results", False),
    "integrator.steps": ("int_auto", None, False),
    "qubit.omega_i": ("float", [1.0], True),
    "qubit.omega_f": ("float", [2.0], True),
    "qubit.omega_tau": ("float", [0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0], True),
    "qubit.beta": ("float", [1.0], True),
    "qubit.cyclic": ("bool", False, False),
    "qubit.samples": ("int", 1, False),
    "rotor.k": ("float", [float(k) for k in range(3, 16)], True),
    "rotor.T": ("float", [0.25], True),
    "rotor.beta_inv": ("float", [0.5, 0.2, 0.1], True),
    "rotor.n_kicks": ("int", 6000, False),
    "rotor.n_cutoff": ("int_auto", None, False),
    "rotor.n_max": ("int", 8192, False),
    "rotor.kick_method": ("str", "toeplitz", False),
    "rotor.window_start": ("int", 3000, False),
    "rotor.record_every": ("int", 1, False),
    "ensemble.dim": ("int", [2, 4, 8, 16], True),
    "ensemble.beta": ("float", [0.1, 1.0, 5.0], True),
    "ensemble.replicas": ("int", 4, False),
    "identity.dim": ("int", [4], True),
    "identity.beta": ("float", [1.0], True),
    "identity.tau": ("float", [1.0], True),
    "fluctuation.enabled": ("bool", True, False),
    "fluctuation.samples": ("int", 100000, False),
    "fluctuation.histogram": ("bool", False, False),
}
for _f in fields(Tolerances):
    SCHEMA[f"tol.{_f.name}"] = ("int" if _f.type in (int, "int") else "float", _f.default, False)

GRID_AXES = {
    "qubit-sweep": ("qubit.omega_i", "qubit.omega_f", "qubit.beta", "qubit.omega_tau"),
    "rotor-sweep": ("rotor.T", "rotor.beta_inv", "rotor.k"),
    "fluctuation-check": ("ensemble.dim", "ensemble.beta"),
    "identity-demo": ("identity.dim", "identity.beta", "identity.tau"),
}


# -- parsing ---------------------------------------------------------------

def _scalar(text: str, kind: str, key: str):
    t = text.strip()
    low = t.lower()
    try:
        if kind == "str":
            if not t:
                raise ValueError
            return t
        if kind == "bool":
            if low in ("true", "yes", "on", "1"):
                return True
            if low in ("false", "no", "off", "0"):
                return False
            raise ValueError
        if kind == "int_auto" and low == "auto":
            return None
        if kind in ("int", "int_auto"):
            v = float(t)
            if not v.is_integer():
                raise ValueError
            return int(v)
        v = float(t)
        if math.isnan(v):
            raise ValueError
        return v
    except ValueError:
        raise ConfigError(f"{key}: cannot read {text!r} as {kind}") from None


def _range(text: str, kind: str, key: str) -> list:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"{key}: range must be start:stop:step, got {text!r}")
    a, b, step = (_scalar(p, "float", key) for p in parts)
    if step <= 0 or b < a or not all(map(math.isfinite, (a, b, step))):
        raise ConfigError(f"{key}: invalid range {text!r}")
    n = int(math.floor((b - a) / step + 1e-9)) + 1
    vals = [round(a + i * step, 12) for i in range(n)]
    return [_scalar(repr(v), kind, key) for v in vals]


def parse_value(key: str, text: str):
    """Convert the raw text of ``key`` according to :data:`SCHEMA`."""
    if key not in SCHEMA:
        raise ConfigError(f"unknown config key {key!r}")
    kind, _, grid = SCHEMA[key]
    text = text.strip()
    if grid:
        vals = []
        for item in text.split(","):
            item = item.strip()
            if not item:
                raise ConfigError(f"{key}: empty list entry in {text!r}")
            vals.extend(_range(item, kind, key) if ":" in item else [_scalar(item, kind, key)])
        return vals
    if "," in text:
        raise ConfigError(f"{key} takes a single value, got {text!r}")
    return _scalar(text, kind, key)


def parse_config(text: str, environ: Optional[dict] = None) -> dict:
    """Raw values from config text, then environment overrides."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = val
    env = os.environ if environ is None else environ
    for name, val in env.items():
        if not name.startswith(ENV_PREFIX):
            continue
        key = name[len(ENV_PREFIX):].lower().replace("__", ".")
        key = {k.lower(): k for k in SCHEMA}.get(key)
        if key is not None:  # other COHTHERMO_* variables are not config
            raw[key] = val
    return {k: parse_value(k, v) for k, v in raw.items()}


@dataclass(frozen=True)
class RunConfig:
    """Validated run settings; ``values`` holds every schema key."""

    values: dict

    def __getitem__(self, key):
        return self.values[key]

    @property
    def experiment(self) -> str:
        return self.values["experiment"]

    @property
    def tolerances(self) -> Tolerances:
        return Tolerances(**{f.name: self.values[f"tol.{f.name}"] for f in fields(Tolerances)})

    def sampling(self) -> bool:
        return self.experiment != "identity-demo" and self["fluctuation.enabled"] and self["fluctuation.samples"] > 0

    def echo(self) -> dict:
        return {k: self.values[k] for k in sorted(self.values)}

    def grid(self) -> list[dict]:
        axes = GRID_AXES[self.experiment]
        pts = [dict(zip(axes, combo)) for combo in itertools.product(*(self.values[a] for a in axes))]
        if self.experiment == "fluctuation-check":
            pts = [dict(p, **{"ensemble.replica": r}) for p in pts for r in range(self["ensemble.replicas"])]
        return pts


def validate(values: dict) -> RunConfig:
    v = {k: (list(d) if isinstance(d, list) else d) for k, (_, d, _) in SCHEMA.items()}
    v.update(values)
    if v["experiment"] not in EXPERIMENTS:
        raise ConfigError(f"experiment must be one of {', '.join(EXPERIMENTS)}; got {v['experiment']!r}")
    for k, (_, _, grid) in SCHEMA.items():
        if grid and not v[k]:
            raise ConfigError(f"{k}: grid is empty")
    if v["workers"] < 1:
        raise ConfigError("workers must be >= 1")
    if v["integrator.steps"] is not None and v["integrator.steps"] < 1:
        raise ConfigError("integrator.steps must be >= 1 or auto")
    pos = [
        "qubit.omega_i", "qubit.omega_f", "qubit.omega_tau", "qubit.beta",
        "rotor.k", "rotor.T", "rotor.beta_inv", "ensemble.beta", "identity.beta", "identity.tau",
    ]
    for k in pos:
        if any(not (math.isfinite(x) and x > 0) for x in v[k]):
            raise ConfigError(f"{k}: values must be positive and finite")
    if any(d < 2 for d in v["ensemble.dim"] + v["identity.dim"]):
        raise ConfigError("dimensions must be >= 2")
    if v["qubit.samples"] < 1 or v["rotor.record_every"] < 1 or v["ensemble.replicas"] < 1:
        raise ConfigError("qubit.samples, rotor.record_every and ensemble.replicas must be >= 1")
    if v["rotor.n_kicks"] < 1 or not (0 <= v["rotor.window_start"] < v["rotor.n_kicks"]):
        raise ConfigError("need rotor.n_kicks >= 1 and 0 <= rotor.window_start < rotor.n_kicks")
    if v["rotor.kick_method"] not in ("toeplitz", "angle", "dense"):
        raise ConfigError("rotor.kick_method must be toeplitz, angle or dense")
    if v["fluctuation.samples"] < 0:
        raise ConfigError("fluctuation.samples must be >= 0")
    cfg = RunConfig(v)
    try:
        cfg.tolerances
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    if (cfg.sampling() or cfg.experiment == "fluctuation-check") and v["seed"] is None:
        raise ConfigError("seed is required when sampling or drawing random protocols")
    return cfg


def load_config(path, environ: Optional[dict] = None, **overrides) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    values = parse_config(text, environ)
    values.update({k: v for k, v in overrides.items() if v is not None})
    return validate(values)


# -- per-point work --------------------------------------------------------

def point_seed(seed: int, index: int) -> int:
    """Seed of grid point ``index``; independent of scheduling."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1, np.uint64)[0])


def _fluct_rows(dist, n_samples: int, seed: Optional[int], tol: Tolerances):
    exact = exact_expectations(dist)
    rows = [("exact", 0, "", exact.as_dict())]
    breach = None
    dev = max(abs(getattr(exact, k) - 1.0) for k in ("exp_neg_s", "exp_neg_p", "exp_neg_c"))
    if dev > tol.fluctuation:
        breach = f"exhaustive exponential average deviates from 1 by {dev:.3e}"
    if n_samples > 0:
        est = sample(dist, n_samples, seed)
        rows.append(("sampled", n_samples, seed, est.estimates.as_dict()))
        rows.append(("stderr", n_samples, seed, est.standard_errors.as_dict()))
    return rows, breach


def _thermo_rows(reports: list[ThermoReport]) -> list[dict]:
    return [dict(time_index=i, **r.as_dict()) for i, r in enumerate(reports)]


def _run_qubit(cfg: RunConfig, pt: dict, seed, tol):
    wi = pt["qubit.omega_i"]
    p = QubitProtocolParams(wi, pt["qubit.omega_f"], pt["qubit.omega_tau"] / wi, pt["qubit.beta"])
    proto = cyclic_qubit_protocol(p) if cfg["qubit.cyclic"] else qubit_protocol(p)
    rho0 = qubit_initial_state(p)
    reps = report_trajectory(rho0, proto, p.beta_i, cfg["qubit.samples"], cfg["integrator.steps"], tol)
    out = {"rows": _thermo_rows(reps), "crossing": reps[-1].crossing_warning}
    if cfg["fluctuation.enabled"]:
        U = propagate(proto, 0.0, proto.duration, cfg["integrator.steps"], tol)
        out["dist"] = distribution_from_process(rho0, U, proto.initial, proto.final, p.beta_i, tol)
    return out


def _run_identity(cfg: RunConfig, pt: dict, seed, tol):
    d = pt["identity.dim"]
    H = np.diag(np.arange(d, dtype=float))
    proto = constant_protocol(H, pt["identity.tau"])
    rho0 = thermal_state(H, pt["identity.beta"])
    reps = report_trajectory(rho0, proto, pt["identity.beta"], 1, cfg["integrator.steps"], tol)
    out = {"rows": _thermo_rows(reps), "crossing": False}
    if cfg["fluctuation.enabled"]:
        U = propagate(proto, 0.0, proto.duration, cfg["integrator.steps"], tol)
        out["dist"] = distribution_from_process(rho0, U, H, H, pt["identity.beta"], tol)
    return out


def _run_ensemble(cfg: RunConfig, pt: dict, seed, tol):
    rng = np.random.Generator(np.random.PCG64(seed))
    beta = pt["ensemble.beta"]
    proto = random_protocol(pt["ensemble.dim"], rng)
    rho0 = thermal_state(proto.initial, beta)
    reps = report_trajectory(rho0, proto, beta, 1, cfg["integrator.steps"], tol)
    U = propagate(proto, 0.0, proto.duration, cfg["integrator.steps"], tol)
    dist = distribution_from_process(rho0, U, proto.initial, proto.final, beta, tol)
    rows = _thermo_rows(reps)
    for r in rows:
        r["duration"] = proto.duration
    return {"rows": rows, "crossing": reps[-1].crossing_warning, "dist": dist}


def _run_rotor(cfg: RunConfig, pt: dict, seed, tol):
    params = RotorParams(
        k=pt["rotor.k"], T=pt["rotor.T"], beta=1.0 / pt["rotor.beta_inv"],
        n_cutoff=cfg["rotor.n_cutoff"], n_kicks=cfg["rotor.n_kicks"],
    )
    run_ = rotor_run(params, cfg["rotor.kick_method"], "warn", cfg["rotor.n_max"], tol=tol)
    every = cfg["rotor.record_every"]
    rows = [
        dict(n_cutoff=run_.n_cutoff, **vars_(d))
        for d in run_.diagnostics
        if d.kick_index % every == 0 or d.kick_index == params.n_kicks
    ]
    stats = saturation_statistics(run_.diagnostics, cfg["rotor.window_start"]) if params.n_kicks - cfg["rotor.window_start"] >= 99 else None
    out = {"rows": rows, "truncation": run_.truncation_warning, "saturation": stats}
    if cfg["fluctuation.enabled"]:
        out["dist"] = rotor_distribution(params, run_.n_cutoff, tol=tol)
    return out


def vars_(obj) -> dict:
    return {f.name: getattr(obj, f.name) for f in fields(obj)}


_RUNNERS = {
    "qubit-sweep": _run_qubit,
    "rotor-sweep": _run_rotor,
    "fluctuation-check": _run_ensemble,
    "identity-demo": _run_identity,
}


def run_point(cfg: RunConfig, index: int, pt: dict) -> dict:
    """Evaluate one grid point; never raises for numerical failures."""
    tol = cfg.tolerances
    seed = None if cfg["seed"] is None else point_seed(cfg["seed"], index)
    t0 = time.perf_counter()
    res = {"index": index, "params": pt, "seed": seed, "rows": [], "fluct": [], "hist": [], "saturation": None}
    status, message = "ok", ""
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            out = _RUNNERS[cfg.experiment](cfg, pt, seed, tol)
        res["rows"] = out["rows"]
        res["saturation"] = out.get("saturation")
        cats = {w.category for w in caught}
        if out.get("truncation") or any(issubclass(c, TruncationWarning) for c in cats):
            status = "truncation-warning"
        elif out.get("crossing") or any(issubclass(c, LevelCrossingWarning) for c in cats):
            status = "crossing-warning"
        msgs = sorted({str(w.message) for w in caught})
        message = "; ".join(msgs)
        dist = out.get("dist")
        if dist is not None:
            n = cfg["fluctuation.samples"]
            res["fluct"], breach = _fluct_rows(dist, n, seed, tol)
            if cfg["fluctuation.histogram"]:
                res["hist"] = histogram(dist)
            if breach:
                status, message = "invariant-breach", breach
    except CohThermoError as exc:
        status, message = ("invalid-parameter" if isinstance(exc, ParameterError) else "invariant-breach"), f"{type(exc).__name__}: {exc}"
    res["status"], res["message"] = status, message
    res["wall_clock_s"] = time.perf_counter() - t0
    return res


def _star(args):
    return run_point(*args)


# -- output ----------------------------------------------------------------

def fmt(x) -> str:
    """Deterministic text for a CSV cell; infinities become ``inf``."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x + 0.0)
    return str(x)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    buf = io.StringIO()
    buf.write(SCHEMA_LINE)
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(x) for x in r])
    path.write_text(buf.getvalue(), encoding="utf-8")


def _param_cols(cfg: RunConfig) -> list[str]:
    cols = list(GRID_AXES[cfg.experiment])
    if cfg.experiment == "fluctuation-check":
        cols.append("ensemble.replica")
    return cols


def write_outputs(cfg: RunConfig, results: list[dict], out: Path) -> None:
    pcols = _param_cols(cfg)
    names = [c.split(".", 1)[1] for c in pcols]
    data_cols: list[str] = []
    for r in results:
        for row in r["rows"]:
            data_cols.extend(k for k in row if k not in data_cols)
    rows = [
        [r["index"], *(r["params"][c] for c in pcols), *(row.get(k) for k in data_cols)]
        for r in results for row in r["rows"]
    ]
    _write_csv(out / "report.csv", ["point", *names, *data_cols], rows)

    exp_cols = ["mean_s", "mean_p", "mean_c", "exp_neg_s", "exp_neg_p", "exp_neg_c"]
    frows = [
        [r["index"], *(r["params"][c] for c in pcols), kind, n, seed, *(vals[k] for k in exp_cols)]
        for r in results for kind, n, seed, vals in r["fluct"]
    ]
    _write_csv(out / "fluctuation.csv", ["point", *names, "kind", "n_samples", "seed", *exp_cols], frows)

    if cfg["fluctuation.histogram"]:
        hrows = [[r["index"], var, v, p] for r in results for var, v, p in r["hist"]]
        _write_csv(out / "histogram.csv", ["point", "variable", "value", "probability"], hrows)

    if cfg.experiment == "rotor-sweep":
        scols = ["mean_C", "std_C", "mean_ratio", "std_ratio", "mean_work", "std_work", "xi_p", "n_points"]
        srows = [
            [r["index"], *(r["params"][c] for c in pcols), *(r["saturation"].as_dict()[k] for k in scols)]
            for r in results if r["saturation"] is not None
        ]
        _write_csv(out / "saturation.csv", ["point", *names, *scols], srows)


def _json_safe(x):
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    if isinstance(x, dict):
        return {k: _json_safe(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_safe(v) for v in x]
    return x


def write_manifest(cfg: RunConfig, results: list[dict], out: Path, exit_code: int, wall: float, workers: int) -> None:
    manifest = {
        "tool": "cohthermo",
        "version": __version__,
        "schema": 1,
        "config": cfg.echo(),
        "tolerances": cfg.tolerances.as_dict(),
        "kernel_backend": kernels.BACKEND,
        "rng": RNG_ALGORITHM,
        "numpy": np.__version__,
        "workers": workers,
        "exit_code": exit_code,
        "wall_clock_s": wall,
        "points": [
            {
                "index": r["index"],
                "params": r["params"],
                "seed": r["seed"],
                "status": r["status"],
                "message": r["message"],
                "wall_clock_s": r["wall_clock_s"],
            }
            for r in results
        ],
    }
    (out / "manifest.json").write_text(json.dumps(_json_safe(manifest), indent=2) + "\n", encoding="utf-8")


def run(cfg: RunConfig, out=None, workers: Optional[int] = None, log=None) -> int:
    """Execute every grid point, write the outputs, return the exit status."""
    log = sys.stderr if log is None else log
    out = Path(out if out is not None else cfg["out"])
    workers = cfg["workers"] if workers is None else workers
    out.mkdir(parents=True, exist_ok=True)
    pts = cfg.grid()
    t0 = time.perf_counter()
    jobs = [(cfg, i, p) for i, p in enumerate(pts)]
    if workers == 1 or len(jobs) == 1:
        results = [_star(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_star, jobs))
    results.sort(key=lambda r: r["index"])
    bad = [r for r in results if r["status"] in ("invariant-breach", "invalid-parameter")]
    code = EXIT_INVARIANT if bad else EXIT_OK
    write_outputs(cfg, results, out)
    write_manifest(cfg, results, out, code, time.perf_counter() - t0, workers)
    for r in results:
        if r["status"] != "ok":
            print(f"point {r['index']} {r['params']}: {r['status']} {r['message']}", file=log)
    return code


# -- built-in invariant suite -------------------------------------------------

def check(seed: int = 2024, n_protocols: int = 24, log=None) -> int:
    """Quick self-test of the core identities; returns an exit status."""
    log = sys.stdout if log is None else log
    from .models.qubit import qubit_final_report
    from .models.rotor import rotor_kick_operator, rotor_kick_operator_angle

    rng = np.random.Generator(np.random.PCG64(seed))
    worst = {"decomposition": 0.0, "two-path": 0.0, "fluctuation": 0.0, "stochastic-mean": 0.0}
    for _ in range(n_protocols):
        d = int(rng.integers(2, 9))
        beta = float(rng.uniform(0.1, 5.0))
        proto = random_protocol(d, rng)
        rho0 = thermal_state(proto.initial, beta)
        rep = report_trajectory(rho0, proto, beta, 1)[-1]
        U = propagate(proto, 0.0, proto.duration)
        ex = exact_expectations(distribution_from_process(rho0, U, proto.initial, proto.final, beta))
        worst["decomposition"] = max(worst["decomposition"], abs(rep.s_irr - rep.coherence - rep.pop_mismatch_B))
        worst["two-path"] = max(worst["two-path"], abs(rep.s_irr_work - rep.s_irr_relent))
        worst["fluctuation"] = max(worst["fluctuation"], *(abs(getattr(ex, k) - 1) for k in ("exp_neg_s", "exp_neg_p", "exp_neg_c")))
        worst["stochastic-mean"] = max(worst["stochastic-mean"], abs(ex.mean_s - rep.s_irr), abs(ex.mean_c - rep.coherence))
    cyc = qubit_final_report(QubitProtocolParams(tau=2.0), cyclic=True)
    worst["cyclic"] = abs(cyc.non_adiabaticity - cyc.s_irr)
    K, Ka = rotor_kick_operator(9.5, 128), rotor_kick_operator_angle(9.5, 128)
    worst["rotor-kernel"] = float(np.max(np.abs(K - Ka)))
    limits = {"decomposition": 1e-10, "two-path": 1e-9, "fluctuation": 1e-10,
              "stochastic-mean": 1e-10, "cyclic": 1e-10, "rotor-kernel": 1e-9}
    ok = True
    for name, lim in limits.items():
        good = worst[name] < lim
        ok &= good
        print(f"{'PASS' if good else 'FAIL'}  {name:16s} max deviation {worst[name]:.2e} (limit {lim:g})", file=log)
    return EXIT_OK if ok else EXIT_INVARIANT


# -- entry point -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cohthermo", description="Coherence and irreversibility experiments.")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run an experiment from a config file")
    r.add_argument("--config", required=True)
    r.add_argument("--workers", type=int)
    r.add_argument("--out")
    c = sub.add_parser("check", help="run the built-in invariant suite")
    c.add_argument("--seed", type=int, default=2024)
    c.add_argument("--protocols", type=int, default=24)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "check":
        return check(args.seed, args.protocols)
    try:
        cfg = load_config(args.config, workers=args.workers, out=args.out)
    except ConfigError as exc:
        print(f"cohthermo: invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
