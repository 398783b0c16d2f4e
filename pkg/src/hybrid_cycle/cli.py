"""Scenario runner.

    hybrid-cycle optimal --beta 0.8 --out traj.csv
    hybrid-cycle compare --config run.json --horizon 40
    hybrid-cycle region --beta 1 --ts 0.5 --rho1-range 0.1:3 --rho2-range 0.1:3 --grid 100

Exit codes: 0 success, 2 validation or usage error, 3 numerical failure,
4 file I/O failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence, TextIO

import numpy as np

from .control import myopic_law, optimal_law
from .dynamics import IntegratorConfig, integrate, payoff_at, tail_bound, write_table
from .limit_cycle import ConvergenceError, find_x_eq
from .model import ModelParams, RawParams, ValidationError, load_config, params_from_mapping, raw_from_mapping
from .sustainability import check_sustainable, region_grid

log = logging.getLogger("hybrid_cycle")

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

SCENARIOS = ("optimal", "myopic", "compare", "limit-cycle", "region", "sustainability")

DEFAULT_PARAMS = {"beta": 0.8, "delta1": 0.5, "delta2": 1.5, "r": 0.03, "t_s": 0.5, "T": 1.0, "x0": 0.0}
DEFAULT_HORIZON = 20.0
DEFAULT_STEP = 1e-3

# flag dest -> normalized parameter name
_PARAM_FLAGS = {"beta": "beta", "delta1": "delta1", "delta2": "delta2", "r": "r", "ts": "t_s", "period": "T", "x0": "x0"}


@dataclass
class ScenarioConfig:
    scenario: str
    params: ModelParams
    raw: RawParams | None = None
    horizon: float = DEFAULT_HORIZON
    step: float = DEFAULT_STEP
    out: Path | None = None
    format: str = "csv"
    rho1_range: tuple[float, float] | None = None
    rho2_range: tuple[float, float] | None = None
    grid: int | None = None

    def __post_init__(self) -> None:
        if self.scenario not in SCENARIOS:
            raise ValidationError("scenario", f"unknown scenario {self.scenario!r}")
        if self.format not in ("csv", "json"):
            raise ValidationError("format", "must be 'csv' or 'json'")
        if self.scenario == "region":
            for name in ("rho1_range", "rho2_range", "grid"):
                if getattr(self, name) is None:
                    raise ValidationError(name, "required by the region scenario")

    @property
    def integrator(self) -> IntegratorConfig:
        return IntegratorConfig(step=self.step, horizon=self.horizon)


def parse_range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise ValidationError("range", f"expected 'a:b', got {text!r}") from None
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON file with a 'raw' or 'normalized' block")
    for flag in ("beta", "delta1", "delta2", "r", "ts", "period", "x0", "horizon", "step"):
        common.add_argument(f"--{flag}", type=float)
    common.add_argument("--out", type=Path)
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--rho1-range", dest="rho1_range")
    common.add_argument("--rho2-range", dest="rho2_range")
    common.add_argument("--grid", type=int)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="hybrid-cycle", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="scenario", required=True, metavar="SCENARIO")
    helps = {
        "optimal": "trajectory under the optimal law",
        "myopic": "trajectory under the myopic law",
        "compare": "discounted payoffs of both laws and their difference",
        "limit-cycle": "fixed point of the period map and one period of the cycle",
        "region": "sustainability region over a (rho1, rho2) grid",
        "sustainability": "sustainability report as JSON",
    }
    for name in SCENARIOS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def config_from_args(args: argparse.Namespace) -> ScenarioConfig:
    doc: dict[str, Any] = load_config(args.config) if args.config else {}
    raw = None
    if doc.get("raw") is not None or doc.get("normalized") is not None:
        base = params_from_mapping(doc)
        raw = raw_from_mapping(doc)
    else:
        base = ModelParams(**DEFAULT_PARAMS)
    overrides = {
        name: getattr(args, flag) for flag, name in _PARAM_FLAGS.items() if getattr(args, flag) is not None
    }
    params = base.replace(**overrides) if overrides else base
    if overrides:
        # the raw block no longer describes the overridden problem
        raw = None

    def pick(flag: str, key: str, default: Any) -> Any:
        value = getattr(args, flag)
        if value is not None:
            return value
        return doc.get(key, default)

    r1 = pick("rho1_range", "rho1_range", None)
    r2 = pick("rho2_range", "rho2_range", None)
    return ScenarioConfig(
        scenario=args.scenario,
        params=params,
        raw=raw,
        horizon=float(pick("horizon", "horizon", DEFAULT_HORIZON)),
        step=float(pick("step", "step", DEFAULT_STEP)),
        out=Path(args.out) if args.out else (Path(doc["out"]) if doc.get("out") else None),
        format=pick("format", "format", "csv"),
        rho1_range=parse_range(r1) if isinstance(r1, str) else (tuple(map(float, r1)) if r1 else None),
        rho2_range=parse_range(r2) if isinstance(r2, str) else (tuple(map(float, r2)) if r2 else None),
        grid=pick("grid", "grid", None),
    )


def _emit_columns(cfg: ScenarioConfig, columns: dict[str, np.ndarray], stdout: TextIO) -> None:
    if cfg.format == "json":
        text = json.dumps({k: np.asarray(v).tolist() for k, v in columns.items()}) + "\n"
        if cfg.out:
            cfg.out.write_text(text, encoding="utf-8")
        else:
            stdout.write(text)
    elif cfg.out:
        write_table(cfg.out, columns)
    else:
        write_table(stdout, columns)


def _emit_json(cfg: ScenarioConfig, doc: dict, stdout: TextIO) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    stdout.write(text)
    if cfg.out:
        cfg.out.write_text(text, encoding="utf-8")


def _payoff_summary(cfg: ScenarioConfig, label: str, J_end: float) -> str:
    return f"{label}: J({cfg.horizon:g}) = {J_end:.10g}, tail bound = {tail_bound(cfg.params, cfg.horizon):.3e}"


def run(cfg: ScenarioConfig, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    """Execute one scenario; returns the process exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        return _run(cfg, stdout, stderr)
    except ValidationError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION
    except (ConvergenceError, ArithmeticError) as exc:
        stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    except OSError as exc:
        stderr.write(f"I/O error: {exc}\n")
        return EXIT_IO
    except ValueError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION


def _run(cfg: ScenarioConfig, stdout: TextIO, stderr: TextIO) -> int:
    p = cfg.params
    if cfg.scenario in ("optimal", "myopic"):
        law = optimal_law(p.beta) if cfg.scenario == "optimal" else myopic_law(p.beta)
        traj = integrate(p, law, cfg.integrator)
        _emit_columns(cfg, traj.columns(), stdout)
        stderr.write(_payoff_summary(cfg, cfg.scenario, traj.J[-1]) + "\n")
    elif cfg.scenario == "compare":
        opt = integrate(p, optimal_law(p.beta), cfg.integrator)
        myo = integrate(p, myopic_law(p.beta), cfg.integrator)
        _emit_columns(cfg, {"t": opt.times, "J": opt.J, "J_u": myo.J, "diff": opt.J - myo.J}, stdout)
        stderr.write(_payoff_summary(cfg, "optimal", payoff_at(opt, cfg.horizon)) + "\n")
        stderr.write(_payoff_summary(cfg, "myopic", payoff_at(myo, cfg.horizon)) + "\n")
    elif cfg.scenario == "limit-cycle":
        cycle = find_x_eq(p)
        if cfg.format == "json":
            doc = dict(cycle.sidecar(), samples={k: v.tolist() for k, v in cycle.columns().items()})
            _emit_json(cfg, doc, stdout)
        elif cfg.out:
            sidecar = cycle.write(cfg.out)
            log.info("wrote %s and %s", cfg.out, sidecar)
        else:
            write_table(stdout, cycle.columns())
            stderr.write(json.dumps(cycle.sidecar(), sort_keys=True) + "\n")
    elif cfg.scenario == "region":
        if p.T != 1.0:
            raise ValidationError("period", "the region scenario works on a unit period")
        grid = region_grid(cfg.rho1_range, cfg.rho2_range, cfg.grid, p.beta, p.t_s)
        _emit_columns(cfg, grid.columns(), stdout)
        stderr.write(f"sustainable fraction: {grid.sustainable_fraction:.6f}\n")
    else:
        report = check_sustainable(p, cfg.raw)
        _emit_json(cfg, report.to_dict(), stdout)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = config_from_args(args)
    except ValidationError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION
    except OSError as exc:
        sys.stderr.write(f"I/O error: {exc}\n")
        return EXIT_IO
    except json.JSONDecodeError as exc:
        sys.stderr.write(f"error: config is not valid JSON: {exc}\n")
        return EXIT_VALIDATION
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
