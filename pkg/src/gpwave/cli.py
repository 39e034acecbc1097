"""``gpwave`` command line: parse a config, run one experiment, write its report directory."""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .config import COMMANDS, RunConfig, parse_config
from .dynamics import SolverConfig, evolve_gp, evolve_hydro, gl_energy
from .errors import GPWaveError
from .experiments import (
    DataFamily,
    ExperimentReport,
    build_manifest,
    decay_exponent,
    error_vs_leps,
    error_vs_wave,
    lp_suite,
    monitor_prop1,
    soliton_shift,
    strichartz_scan,
    sweep_theorem1,
)
from .experiments.report import PlotSpec
from .experiments.scenarios import ENGINE_TOL, h1_discrepancy
from .grid import make_grid, write_snapshot
from .io import Curve
from .littlewood_paley import gamma_weighted
from .madelung import HydroState, from_hydro, to_augmented, to_hydro

__all__ = ["build_parser", "main", "run_command", "execute"]

CONSERVATION_TOL = 1e-8


def _family(cfg: RunConfig) -> DataFamily:
    return DataFamily(seed=cfg.seed, **cfg.family.model_dump())


def _times(cfg: RunConfig, default) -> list[float]:
    return [float(t) for t in (cfg.times if cfg.times else default)]


def _deviation(values: np.ndarray) -> np.ndarray:
    ref = abs(values[0])
    return np.abs(values - values[0]) / (ref if ref > 0 else 1.0)


def _simulate(cfg: RunConfig, snapshots: Path) -> ExperimentReport:
    g = make_grid(cfg.dim, cfg.n, cfg.box_length)
    eps = cfg.eps[0]
    a0, u0 = _family(cfg).generate(g)
    st = HydroState(a0, u0, eps)
    times = _times(cfg, np.linspace(0.0, cfg.t_max, cfg.n_records + 1)[1:])
    solver = SolverConfig(dt=cfg.dt, t_max=cfg.t_max, record_times=times)
    rep = ExperimentReport("simulate", {"dim": cfg.dim, "n": cfg.n, "box": cfg.box_length, "eps": eps, "dt": cfg.dt,
                                        "t_max": cfg.t_max, "engine": cfg.engine, "family": _family(cfg).to_dict()})
    if cfg.engine in ("gp", "both"):
        tr = evolve_gp(from_hydro(st), eps, solver)
        energy = np.array([gl_energy(p, eps) for p in tr.snapshots])
        gamma0 = np.array([gamma_weighted(to_augmented(p, eps), 0) for p in tr.snapshots])
        e_dev, g_dev = _deviation(energy), _deviation(gamma0)
        rep.add_series("energy", tr.times, energy, dim=cfg.dim, eps=eps)
        rep.add_series("energy_deviation", tr.times, e_dev, dim=cfg.dim, eps=eps)
        rep.add_series("gamma0_deviation", tr.times, g_dev, dim=cfg.dim, eps=eps)
        rep.add_series("min_modulus", tr.times, [lg["min_modulus"] for lg in tr.logs], dim=cfg.dim, eps=eps)
        rep.verdict("2", "relative energy deviation", e_dev.max() < CONSERVATION_TOL, float(e_dev.max()),
                    f"< {CONSERVATION_TOL:g}")
        rep.verdict("2", "relative Gamma^0 deviation", g_dev.max() < CONSERVATION_TOL, float(g_dev.max()),
                    f"< {CONSERVATION_TOL:g}")
        rep.plots.append(PlotSpec("energy_deviation", "linear", [Curve("energy", tr.times, e_dev),
                                                                 Curve("Gamma0", tr.times, g_dev)]))
        mon = monitor_prop1(tr, cfg.s, eps)
        rep.rows.extend(mon.rows)
        rep.constants["prop1_max_ratio"] = mon.constants["max_ratio"]
        rep.verdicts.extend(mon.verdicts)
        for i, (t, psi) in enumerate(zip(tr.times, tr.snapshots)):
            write_snapshot(snapshots / f"psi_{i:05d}.gpwf", psi, t)
    if cfg.engine in ("hydro", "both"):
        th = evolve_hydro(st, SolverConfig(dt=cfg.dt, t_max=cfg.t_max, record_times=times))
        rep.add_series("hydro_energy", th.times, [lg["energy"] for lg in th.logs], dim=cfg.dim, eps=eps)
        if th.stop_reason:
            rep.notes.append(f"hydro run stopped: {th.stop_reason} at t={th.times[-1]:g}")
        if cfg.engine == "hydro":
            for i, (t, h) in enumerate(zip(th.times, th.snapshots)):
                write_snapshot(snapshots / f"a_{i:05d}.gpwf", h.a, t)
    if cfg.engine == "both":
        common = [t for t in tr.times if any(abs(t - s) < 1e-9 for s in th.times)]
        disc = [h1_discrepancy(to_hydro(tr.at(t), eps), th.at(t)) for t in common]
        rep.add_series("engine_discrepancy", common, disc, dim=cfg.dim, eps=eps)
        worst = max(disc) if disc else 0.0
        ok = th.stop_reason is None and worst < ENGINE_TOL
        rep.verdict("3", "GP vs hydro H1 discrepancy", ok, worst, f"< {ENGINE_TOL:g}")
    return rep


def execute(cfg: RunConfig, snapshots: Path) -> ExperimentReport:
    """Dispatch one validated config to the experiments module."""
    fam = _family(cfg)
    cmd = cfg.command
    if cmd == "simulate":
        return _simulate(cfg, snapshots)
    if cmd == "decay":
        eps = cfg.eps[0] if cfg.eps else None
        window = (min(cfg.times), max(cfg.times)) if cfg.times else None
        return decay_exponent(eps, cfg.dim, cfg.mode, window, cfg.n, cfg.box_length)
    if cmd == "compare-wave":
        ts = _times(cfg, [cfg.t_max * 2.0 ** (-k / 2) for k in range(6, -1, -1)])
        return error_vs_wave(fam, cfg.eps, ts, cfg.s, (cfg.dim, cfg.n, cfg.box_length), cfg.dt, cfg.engine)
    if cmd == "compare-leps":
        ts = _times(cfg, [cfg.t_max / 8, cfg.t_max / 4, cfg.t_max / 2, cfg.t_max])
        return error_vs_leps(fam, cfg.eps[0], ts, cfg.s, cfg.dim, cfg.n, cfg.box_length, cfg.dt, cfg.engine,
                             crossover_t=max(ts))
    if cmd == "soliton":
        return soliton_shift(cfg.eps, 1, cfg.n, cfg.box_length, cfg.dt)
    if cmd == "lp-check":
        g = make_grid(cfg.dim, cfg.n, cfg.box_length)
        rep = lp_suite(g, seed=cfg.seed, eps=cfg.eps[0] if cfg.eps else 0.25)
        if cfg.dim == 2 and cfg.t_max is not None:
            rep.merge(strichartz_scan(fam, cfg.eps, (cfg.dim, cfg.n, cfg.box_length), cfg.t_max))
        return rep
    if cmd == "sweep":
        return sweep_theorem1(fam, cfg.eps, (cfg.dim, cfg.n, cfg.box_length), cfg.dt, cfg.t_max, cfg.s,
                              bound_k=min(0.1, cfg.t_max))
    raise ValueError(f"unknown command {cmd!r}")


def run_command(cfg: RunConfig) -> int:
    """Run, write ``<output_dir>/<command>-<hash>/`` and return 0 iff every verdict passes."""
    out = cfg.run_dir()
    snapshots = out / "snapshots"
    snapshots.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    try:
        report = execute(cfg, snapshots)
    except GPWaveError as exc:
        failure = {"command": cfg.command, "error": type(exc).__name__, "message": str(exc)}
        print(json.dumps({"passed": False, "failures": [failure]}), file=sys.stderr)
        return 1
    manifest = build_manifest(cfg.command, cfg.canonical(), time.perf_counter() - t0)
    report.write(out, manifest)
    summary = {"passed": report.passed, "directory": str(out), "failures": report.failures()}
    print(json.dumps(summary, sort_keys=True))
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gpwave", description="Long-wave Gross-Pitaevskii experiments.")
    p.add_argument("command", nargs="?", choices=COMMANDS, help="experiment to run (may come from --config)")
    p.add_argument("--config", type=Path, help="JSON config file or a run manifest")
    p.add_argument("--dim", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--box", type=float, dest="box_length")
    p.add_argument("--eps", type=float, action="append", help="repeatable")
    p.add_argument("--tmax", type=float, dest="t_max")
    p.add_argument("--dt", type=float)
    p.add_argument("--s", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", dest="output_dir")
    p.add_argument("--engine", choices=("gp", "hydro", "both"))
    p.add_argument("--mode", choices=("ueps", "veps"))
    return p


def main(argv=None) -> int:
    args = vars(build_parser().parse_args(argv))
    path = args.pop("config")
    try:
        cfg = parse_config(path, args)
    except GPWaveError as exc:
        key = getattr(exc, "key", None)
        print(json.dumps({"passed": False, "failures": [{"error": type(exc).__name__, "key": key,
                                                          "message": str(exc)}]}), file=sys.stderr)
        return 2
    return run_command(cfg)


if __name__ == "__main__":
    sys.exit(main())
