"""The ten acceptance criteria at their stated tolerances, one printed line each."""
import json
import time
from pathlib import Path

import pytest

from gpwave.cli import main
from gpwave.experiments import ExperimentReport
from gpwave.experiments.scenarios import (
    conservation,
    decay_exponent,
    engine_equivalence,
    error_vs_leps,
    error_vs_wave,
    lp_suite,
    prop1_scan,
    soliton_shift,
    strang_order,
    strichartz_scan,
)
from gpwave.grid import make_grid

pytestmark = pytest.mark.slow


def _fmt(value) -> str:
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    if isinstance(value, float):
        return f"{value:.4g}"
    return str(value)


def _check(criterion: str, reports: list[ExperimentReport], emit, elapsed: float, limit: float | None = None):
    verdicts = [v for r in reports for v in r.verdicts if v.criterion == criterion and not v.informational]
    assert verdicts, f"no verdicts for criterion {criterion}"
    failed = [v for v in verdicts if not v.passed]
    parts = [f"{v.name} = {_fmt(v.value)} ({v.tolerance})" for v in (failed or verdicts[:3])]
    timing = f"{elapsed:.0f} s" + (f" (limit {limit:.0f} s)" if limit else "")
    slow = limit is not None and elapsed > limit
    status = "PASS" if not failed and not slow else "FAIL"
    emit(f"criterion {criterion}: {status} [{len(verdicts) - len(failed)}/{len(verdicts)} checks, {timing}] "
         + "; ".join(parts))
    assert not failed, "; ".join(parts)
    assert not slow, f"runtime {elapsed:.0f} s exceeds {limit:.0f} s"


class _Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


@pytest.fixture(scope="module")
def lp_report():
    with _Timer() as t:
        rep = lp_suite()
    return rep, t.elapsed


def test_criterion_1_integrator_order(acceptance_line):
    with _Timer() as t:
        rep = strang_order(grid=make_grid(1, 1024, 40.0), eps=0.3, t_end=1.0)
    _check("1", [rep], acceptance_line, t.elapsed, 30)


def test_criterion_2_conservation(acceptance_line):
    with _Timer() as t:
        rep = conservation(steps=10_000, tol=1e-8)
    _check("2", [rep], acceptance_line, t.elapsed)


def test_criterion_3_engine_equivalence(acceptance_line):
    with _Timer() as t:
        one = engine_equivalence(grid=make_grid(1, 256, 20.0), eps=0.3)
        two = engine_equivalence(grid=make_grid(2, 256, 20.0), eps=0.3)
    _check("3", [one, two], acceptance_line, t.elapsed, 300)


def test_criterion_4_wave_scaling(acceptance_line):
    with _Timer() as t:
        rep = error_vs_wave(eps_list=(0.05, 0.1, 0.2, 0.4), s=4, band=(0.8, 1.2))
    assert min(rep.parameters["t_grid"]) == 0.25 and max(rep.parameters["t_grid"]) == pytest.approx(2.0)
    _check("4", [rep], acceptance_line, t.elapsed, 600)


def test_criterion_5_leps_crossover(acceptance_line):
    with _Timer() as t:
        rep = error_vs_leps(eps=0.1, dim=2, crossover_t=8.0, crossover_factor=5.0, amplitude_factor=0.1,
                            amplitude_tol=0.3)
    _check("5", [rep], acceptance_line, t.elapsed)


def test_criterion_6_dispersive_decay(acceptance_line):
    cases = [(1, "ueps"), (2, "ueps"), (3, "ueps"), (2, "veps"), (3, "veps")]
    with _Timer() as t:
        reps = [decay_exponent(dim=d, mode=m) for d, m in cases]
    # the dim-1 case is a no-decay check |exponent| < 0.1; promote it to a gating verdict here
    one = reps[0]
    fit = one.fits["ueps_dim1"]
    one.verdict("6", "ueps no decay, dim 1", abs(fit.exponent) < 0.1, fit.exponent, "|exponent| < 0.1")
    _check("6", reps, acceptance_line, t.elapsed, 600)


def test_criterion_7_soliton(acceptance_line):
    with _Timer() as t:
        rep = soliton_shift(eps_list=(0.1, 0.2, 0.3, 0.4), speed_check_eps=(0.2, 0.4), speed_tol=1e-3)
    _check("7", [rep], acceptance_line, t.elapsed)


def test_criterion_8_littlewood_paley(acceptance_line, lp_report):
    rep, elapsed = lp_report
    assert rep.parameters["n_functions"] == 20
    _check("8", [rep], acceptance_line, elapsed)


def test_criterion_9_estimate_monitors(acceptance_line, lp_report):
    with _Timer() as t:
        prop1 = prop1_scan()
        strich = strichartz_scan(eps_list=(0.05, 0.1, 0.2))
    lp, lp_time = lp_report
    names = [v.name for r in (prop1, lp, strich) for v in r.verdicts if v.criterion == "9"]
    assert any("dt halving" in n for n in names) and any("commutator" in n for n in names)
    assert any("Strichartz" in n for n in names)
    _check("9", [prop1, lp, strich], acceptance_line, t.elapsed + lp_time)


def _artifacts(directory: Path) -> dict[str, bytes]:
    return {p.relative_to(directory).as_posix(): p.read_bytes() for p in sorted(directory.rglob("*"))
            if p.suffix in (".csv", ".svg")}


def test_criterion_10_reproducibility(acceptance_line, tmp_path, capsys):
    commands = [["simulate"], ["decay", "--dim", "2"], ["lp-check"], ["sweep"]]
    rep = ExperimentReport("reproducibility")
    with _Timer() as t:
        for args in commands:
            main(args + ["--out", str(tmp_path / "first")])
            run = Path(json.loads(capsys.readouterr().out)["directory"])
            main(["--config", str(run / "manifest.json"), "--out", str(tmp_path / "second")])
            capsys.readouterr()
            again = tmp_path / "second" / run.name
            a, b = _artifacts(run), _artifacts(again)
            same = bool(a) and a == b and any(k.endswith(".svg") for k in a)
            rep.verdict("10", f"{args[0]} rerun from manifest", same, f"{len(a)} files", "byte-identical CSV and SVG")
    _check("10", [rep], acceptance_line, t.elapsed)

