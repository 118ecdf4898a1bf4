"""Command-line entry point.

    ellipticll verify --N 3 --tau-im 1 --seed 7 --output report.json
    ellipticll evolve --N 2 --M 128 --dt 1e-4 --t-end 0.5 --format csv --output diag.csv
    ellipticll sklyanin

A JSON file given with ``--config`` may supply any RunConfig field (including
the command); flags given on the command line override it.

Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error,
3 numerical abort.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import __version__
from .fields import constrained_field, random_spin_matrix
from .identity_suite import CHECKS, SamplePlan, run_suite
from .lax import check_lax_top
from .pde import (CSV_COLUMNS, EvolutionConfig, NumericalAbort, convergence_orders, evolve,
                  poisson_gradient_check)
from .rmatrix import RMatrixFamily
from .sklyanin import sklyanin_checks
from .special_functions import EllipticContext, NearPoleError, PrecisionError

log = logging.getLogger("ellipticll")

COMMANDS = ("verify", "top", "evolve", "hamiltonian-check", "sklyanin")
EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_ABORT = 0, 1, 2, 3

# thresholds for the derived checks of the non-suite commands
EVOLVE_TOLERANCES = {"H_relative_drift": 1e-6, "trS_drift": 1e-10,
                     "constraint_max": 1e-8, "spectrum_drift": 1e-6}
SKLYANIN_TOLERANCES = {"r_matrix_pauli": 1e-10, "r0_vanishes": 1e-12, "lax_u_pauli": 1e-10,
                       "anisotropy_dictionary": 1e-9, "phi_squares": 1e-9,
                       "t_solution": 1e-9, "v_reconstruction": 1e-9}
ORDER_TARGET, ORDER_WINDOW = 2.0, 0.3


class ConfigError(ValueError):
    """Invalid run configuration; the message names the offending field."""


def parse_complex(value) -> complex:
    """Accept numbers, [re, im] pairs, or strings such as '1j', 'i', '0.3+0.8i'."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError(f"expected [re, im], got {value!r}")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        s = value.strip().replace(" ", "").replace("i", "j")
        if s in ("j", "+j"):
            return 1j
        if s == "-j":
            return -1j
        return complex(s)
    return complex(value)


@dataclass(frozen=True)
class RunConfig:
    command: str = "verify"
    N: int = 2
    tau_re: float = 0.0
    tau_im: float = 1.0
    c: complex = 1.0
    seed: int = 0
    samples: int = 20
    tolerance: float = 1e-8
    M: int = 128
    dt: float = 1e-4
    t_end: float = 0.5
    output: str | None = None
    format: str = "json"
    workers: int = 1
    amplitude: float = 0.1
    time_direction: complex = 1j
    equation: str = "rank1"
    rank: int = 1
    diagnostics_cadence: int = 100
    checks: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "c", complex(self.c))
        object.__setattr__(self, "time_direction", complex(self.time_direction))
        errors = []
        if self.command not in COMMANDS:
            errors.append(f"command: must be one of {', '.join(COMMANDS)}, got {self.command!r}")
        if self.N < 2:
            errors.append(f"N: must be >= 2, got {self.N}")
        if not self.tau_im > 0:
            errors.append(f"tau_im: Im(tau) must be positive, got {self.tau_im}")
        if self.samples < 1:
            errors.append(f"samples: must be >= 1, got {self.samples}")
        if not self.tolerance > 0:
            errors.append(f"tolerance: must be positive, got {self.tolerance}")
        if self.format not in ("json", "csv"):
            errors.append(f"format: must be 'json' or 'csv', got {self.format!r}")
        if self.workers < 1:
            errors.append(f"workers: must be >= 1, got {self.workers}")
        if abs(self.c) < 1e-12:
            errors.append("c: must be nonzero")
        if self.command in ("evolve", "hamiltonian-check"):
            if self.M < 8 or self.M & (self.M - 1):
                errors.append(f"M: must be a power of two >= 8, got {self.M}")
            if not self.dt > 0:
                errors.append(f"dt: must be positive, got {self.dt}")
            if self.t_end < 0:
                errors.append(f"t_end: must be non-negative, got {self.t_end}")
            if not 0 < self.amplitude <= 0.3:
                errors.append(f"amplitude: must lie in (0, 0.3], got {self.amplitude}")
            if abs(abs(self.time_direction) - 1) > 1e-12:
                errors.append(f"time_direction: must have unit modulus, got {self.time_direction}")
            if self.equation not in ("rank1", "general"):
                errors.append(f"equation: must be 'rank1' or 'general', got {self.equation!r}")
            if not 1 <= self.rank < self.N:
                errors.append(f"rank: must satisfy 1 <= rank < N, got {self.rank}")
            if self.equation == "rank1" and self.rank != 1:
                errors.append("rank: the rank1 equation needs rank = 1")
            if self.diagnostics_cadence < 1:
                errors.append("diagnostics_cadence: must be >= 1")
        if self.command == "hamiltonian-check" and self.M < 32:
            errors.append(f"M: hamiltonian-check refines M/4, M/2, M and needs M >= 32, got {self.M}")
        if self.command == "sklyanin" and self.N != 2:
            errors.append(f"N: the sklyanin command needs N = 2, got {self.N}")
        if self.checks is not None:
            unknown = sorted(set(self.checks) - set(CHECKS))
            if unknown:
                errors.append(f"checks: unknown names {unknown}; known: {', '.join(CHECKS)}")
        if errors:
            raise ConfigError("; ".join(errors))

    @property
    def tau(self) -> complex:
        return complex(self.tau_re, self.tau_im)

    def serializable(self) -> dict:
        """Config as written into reports; the output path is left out."""
        out = {}
        for k, v in asdict(self).items():
            if k == "output":
                continue
            if isinstance(v, complex):
                v = [v.real, v.imag]
            elif isinstance(v, tuple):
                v = list(v)
            out[k] = v
        return out


_COERCE = {
    "N": int, "seed": int, "samples": int, "M": int, "workers": int, "rank": int,
    "diagnostics_cadence": int, "tau_re": float, "tau_im": float, "tolerance": float,
    "dt": float, "t_end": float, "amplitude": float, "c": parse_complex,
    "time_direction": parse_complex, "command": str, "format": str, "equation": str,
    "output": lambda v: None if v is None else str(v),
    "checks": lambda v: None if v is None else tuple(v.split(",") if isinstance(v, str) else v),
}


def build_config(values: dict) -> RunConfig:
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError(f"unknown config fields {unknown}")
    kw = {}
    for k, v in values.items():
        try:
            kw[k] = _COERCE[k](v)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{k}: cannot parse {v!r} ({exc})") from None
    return RunConfig(**kw)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ellipticll",
                                description="Elliptic GL(N) R-matrix identities and "
                                            "Landau-Lifshitz field simulations.")
    p.add_argument("command", nargs="?", choices=COMMANDS)
    p.add_argument("--config", help="JSON file with RunConfig fields; flags override it")
    p.add_argument("--N", type=int)
    p.add_argument("--tau-re", type=float)
    p.add_argument("--tau-im", type=float)
    p.add_argument("--c", help="constraint constant, complex allowed (e.g. 1, 0.5+0.2j)")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int, help="random samples per identity")
    p.add_argument("--tolerance", type=float)
    p.add_argument("--M", type=int, help="grid size (power of two)")
    p.add_argument("--dt", type=float)
    p.add_argument("--t-end", type=float)
    p.add_argument("--output", help="report path (stdout when omitted)")
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--workers", type=int, help="concurrent identity checks")
    p.add_argument("--amplitude", type=float, help="amplitude of the random initial field")
    p.add_argument("--time-direction", help="unit complex ray for time, e.g. 1j or 1")
    p.add_argument("--equation", choices=("rank1", "general"))
    p.add_argument("--rank", type=int, help="projector rank of the initial field")
    p.add_argument("--diagnostics-cadence", type=int)
    p.add_argument("--checks", help="comma-separated subset of identities for verify")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values = {}
    if args.config:
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"config: cannot read {args.config!r} ({exc})") from None
        if not isinstance(loaded, dict):
            raise ConfigError("config: top level must be a JSON object")
        values.update(loaded)
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    return build_config(values)


def _check(name, max_residual, mean_residual, tolerance, n_samples) -> dict:
    max_residual = float(max_residual)
    return {"name": name, "n_samples": int(n_samples), "max_residual": max_residual,
            "mean_residual": float(mean_residual), "tolerance": float(tolerance),
            "pass": bool(max_residual <= tolerance)}


def _family(cfg: RunConfig) -> RMatrixFamily:
    return RMatrixFamily(EllipticContext(N=cfg.N, tau=cfg.tau))


def _run_verify(cfg: RunConfig) -> tuple[list, dict]:
    plan = SamplePlan(seed=cfg.seed, count=cfg.samples)
    reports = run_suite(_family(cfg), plan, cfg.checks, cfg.tolerance, cfg.workers)
    keys = ("name", "n_samples", "max_residual", "mean_residual", "tolerance", "pass")
    return [{k: r.as_dict()[k] for k in keys} for r in reports], {}


def _run_top(cfg: RunConfig) -> tuple[list, dict]:
    fam = _family(cfg)
    rng = np.random.default_rng(cfg.seed)
    res = []
    for _ in range(cfg.samples):
        S = random_spin_matrix(cfg.N, cfg.c, rng)
        for _ in range(10):
            z = complex(rng.uniform(0.05, 0.45), rng.uniform(0.05, 0.45) * cfg.tau_im)
            res.append(check_lax_top(S, z, fam))
    return [_check("lax_top", max(res), np.mean(res), cfg.tolerance, len(res))], {}


def _evolution_config(cfg: RunConfig) -> EvolutionConfig:
    return EvolutionConfig(dt=cfg.dt, t_end=cfg.t_end, diagnostics_cadence=cfg.diagnostics_cadence,
                           equation=cfg.equation, time_direction=cfg.time_direction)


def _run_evolve(cfg: RunConfig) -> tuple[list, dict]:
    fam = _family(cfg)
    rng = np.random.default_rng(cfg.seed)
    field = constrained_field(cfg.N, cfg.M, cfg.c, rng, rank=cfg.rank, scale=cfg.amplitude)
    _, records = evolve(field, _evolution_config(cfg), fam)
    first = records[0]
    n = len(records)
    trs = [abs(r.trS - first.trS) for r in records]
    cons = [r.constraint_max for r in records]
    spec = [r.spectrum_drift for r in records]
    checks = []
    if cfg.equation == "rank1":
        h = [abs(r.H - first.H) / abs(first.H) for r in records]
        checks.append(_check("H_relative_drift", max(h), np.mean(h),
                             EVOLVE_TOLERANCES["H_relative_drift"], n))
    checks += [
        _check("trS_drift", max(trs), np.mean(trs), EVOLVE_TOLERANCES["trS_drift"], n),
        _check("constraint_max", max(cons), np.mean(cons), EVOLVE_TOLERANCES["constraint_max"], n),
        _check("spectrum_drift", max(spec), np.mean(spec), EVOLVE_TOLERANCES["spectrum_drift"], n),
    ]
    return checks, {"records": records}


def _run_hamiltonian(cfg: RunConfig) -> tuple[list, dict]:
    fam = _family(cfg)
    Ms = [cfg.M // 4, cfg.M // 2, cfg.M]
    res = []
    for M in Ms:
        # same seed gives the same continuous field on every grid
        field = constrained_field(cfg.N, M, cfg.c, np.random.default_rng(cfg.seed),
                                  scale=cfg.amplitude)
        res.append(poisson_gradient_check(field, fam))
    gaps = [abs(o - ORDER_TARGET) for o in convergence_orders(res, Ms)]
    extra = {"grid_sizes": Ms, "residuals": res, "orders": convergence_orders(res, Ms)}
    return [_check("poisson_order", max(gaps), np.mean(gaps), ORDER_WINDOW, len(gaps))], extra


def _run_sklyanin(cfg: RunConfig) -> tuple[list, dict]:
    ctx = EllipticContext(N=2, tau=cfg.tau)
    out = sklyanin_checks(ctx, np.random.default_rng(cfg.seed))
    return [_check(k, v, v, SKLYANIN_TOLERANCES[k], 1) for k, v in out.items()], {}


RUNNERS = {"verify": _run_verify, "top": _run_top, "evolve": _run_evolve,
           "hamiltonian-check": _run_hamiltonian, "sklyanin": _run_sklyanin}


def _jsonable(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def make_report(cfg: RunConfig, checks: list, extra: dict | None = None,
                error: str | None = None) -> dict:
    report = {"command": cfg.command, "config": cfg.serializable(), "checks": checks,
              "version": __version__}
    for k, v in (extra or {}).items():
        if k == "records":
            report["diagnostics"] = [asdict(r) for r in v]
        else:
            report[k] = v
    if error is not None:
        report["error"] = error
    return report


def dump_report(report: dict) -> str:
    return json.dumps(_jsonable(report), indent=2, sort_keys=True, allow_nan=True) + "\n"


def dump_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow(r.as_row())
    return buf.getvalue()


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def run(cfg: RunConfig) -> int:
    """Execute the configured workflow, write its artifact and return the exit code."""
    try:
        checks, extra = RUNNERS[cfg.command](cfg)
    except (NumericalAbort, PrecisionError, NearPoleError) as exc:
        msg = f"{cfg.command}: numerical abort: {exc}"
        print(msg, file=sys.stderr)
        if cfg.format == "json":
            _write(dump_report(make_report(cfg, [], error=msg)), cfg.output)
        return EXIT_ABORT
    if cfg.format == "csv":
        if "records" not in extra:
            print(f"{cfg.command}: csv output is only available for evolve; writing json",
                  file=sys.stderr)
            _write(dump_report(make_report(cfg, checks, extra)), cfg.output)
        else:
            _write(dump_csv(extra["records"]), cfg.output)
    else:
        _write(dump_report(make_report(cfg, checks, extra)), cfg.output)
    failed = [c for c in checks if not c["pass"]]
    for c in failed:
        print(f"FAIL {c['name']}: max residual {c['max_residual']:.3e} > tolerance "
              f"{c['tolerance']:.1e}", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
