"""Command-line interface.

Exit statuses: 0 success, 2 usage error, 3 invalid input data,
4 numerical failure (including a failed ``verify`` or ``--oracle`` check).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .exceptions import ContractError, DomainError, NumericalError, TriangleError
from .oracle import posterior_mean_sqrt_by_quadrature, run_checks
from .report import render_report, use_color
from .reserving import PriorSpec, compare, elicit_prior, mack_factors, project, run_bayes
from .simulator import GenerativeSpec, recovery_study, simulate_triangle
from .triangle import CUMULATIVE, INCREMENTAL, cumulate, emit_csv, read_csv, write_csv

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

ORACLE_TOLERANCE = 1e-8


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    input: Optional[Path] = None
    kind: str = CUMULATIVE
    method: Optional[str] = None
    alpha: Optional[tuple] = None
    beta: object = "auto"
    format: str = "table"
    seed: int = 0
    precision: int = 4
    allow_negative_increments: bool = False
    oracle: bool = False
    # simulate
    n: Optional[int] = None
    theta: Optional[tuple] = None
    theta_from_prior: bool = False
    first_column: float = 100.0
    replications: int = 1
    out: Optional[Path] = None
    recovery: bool = False
    level: float = 0.9
    jobs: int = 1


def _numbers(text: str, flag: str) -> tuple:
    try:
        values = tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"{flag} expects a number or comma-separated list, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError(f"{flag} is empty")
    return values


def _beta(text: str):
    return "auto" if text == "auto" else _numbers(text, "--beta")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hnreserve",
        description="IBNR reserves by Mack and half-normal Bayesian chain ladder.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def data_args(p):
        p.add_argument("--input", required=True, type=Path, help="triangle CSV file")
        p.add_argument("--kind", choices=(CUMULATIVE, INCREMENTAL), default=CUMULATIVE)
        p.add_argument("--allow-negative-increments", action="store_true")

    def prior_args(p):
        p.add_argument("--alpha", type=lambda s: _numbers(s, "--alpha"),
                       help="prior shape: scalar or one value per development year "
                            "(default n(n-1)/2)")
        p.add_argument("--beta", type=_beta, default="auto",
                       help="prior scale: 'auto' (data-elicited) or scalar/list")

    def output_args(p):
        p.add_argument("--format", choices=("table", "json"), default="table")
        p.add_argument("--precision", type=int, default=4,
                       help="decimal places in table output")

    p = sub.add_parser("reserve", help="run one reserving method")
    data_args(p)
    p.add_argument("--method", required=True, choices=("mack", "bayes-hn"))
    prior_args(p)
    output_args(p)
    p.add_argument("--oracle", action="store_true",
                   help="cross-check Bayesian factors against posterior quadrature")

    p = sub.add_parser("compare", help="run both methods on the same triangle")
    data_args(p)
    prior_args(p)
    output_args(p)

    p = sub.add_parser("simulate", help="simulate triangles from the half-normal model")
    p.add_argument("--n", type=int, required=True, help="triangle size")
    p.add_argument("--theta", type=lambda s: _numbers(s, "--theta"),
                   help="true theta_1..theta_{n-1}")
    p.add_argument("--theta-from-prior", action="store_true",
                   help="draw theta per replicate from the --alpha/--beta prior")
    p.add_argument("--first-column", type=float, default=100.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--replications", type=int, default=1)
    p.add_argument("--out", type=Path, help="directory for replicate CSV files")
    p.add_argument("--recovery", action="store_true",
                   help="run the Bayesian engine on every replicate and summarize")
    p.add_argument("--level", type=float, default=0.9, help="posterior interval level")
    p.add_argument("--jobs", type=int, default=1)
    prior_args(p)
    output_args(p)

    p = sub.add_parser("verify", help="run the quadrature oracle checks")
    p.add_argument("--format", choices=("table", "json"), default="table")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    fields = {k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__}
    return RunConfig(**fields)


def _load(cfg: RunConfig):
    if not cfg.input.is_file():
        raise UsageError(f"--input: no such file {str(cfg.input)!r}")
    tri = read_csv(cfg.input, cfg.kind,
                   allow_negative_increments=cfg.allow_negative_increments)
    return cumulate(tri) if tri.kind == INCREMENTAL else tri


def _prior(cfg: RunConfig, tri) -> PriorSpec:
    n = tri.n
    if cfg.beta == "auto":
        alpha = cfg.alpha
        if alpha is not None and len(alpha) == 1:
            alpha = alpha[0]
        try:
            return elicit_prior(tri, alpha)
        except ContractError as exc:
            raise UsageError(f"--alpha: {exc}") from None
    alpha = cfg.alpha if cfg.alpha is not None else (n * (n - 1) / 2.0,)

    def expand(values, flag):
        if len(values) == 1:
            return values * (n - 1)
        if len(values) != n - 1:
            raise UsageError(f"{flag}: need 1 or {n - 1} values, got {len(values)}")
        return values

    return PriorSpec(expand(alpha, "--alpha"), expand(cfg.beta, "--beta"))


def _oracle_check(tri, report, stderr) -> bool:
    worst = 0.0
    for j, (a, b) in enumerate(zip(report.prior.alpha, report.prior.beta), start=1):
        rows = tri.n - j
        brute = posterior_mean_sqrt_by_quadrature(
            tri.values[:rows, j - 1], tri.values[:rows, j], a, b)
        worst = max(worst, abs(report.factors[j] - brute) / brute)
    ok = worst <= ORACLE_TOLERANCE
    print(f"oracle: max relative error of Bayesian factors vs quadrature "
          f"{worst:.3e} ({'ok' if ok else 'FAILED'}, tolerance {ORACLE_TOLERANCE:g})",
          file=stderr)
    return ok


def _simulate(cfg: RunConfig, stdout) -> int:
    if cfg.theta_from_prior:
        if cfg.beta == "auto" or cfg.alpha is None:
            raise UsageError("--theta-from-prior needs numeric --alpha and --beta")
    elif cfg.theta is None:
        raise UsageError("simulate needs --theta or --theta-from-prior")
    if cfg.recovery and (cfg.beta == "auto" or cfg.alpha is None):
        raise UsageError("--recovery needs numeric --alpha and --beta (no data to elicit from)")
    n = cfg.n
    if n is None or n < 1:
        raise UsageError("--n must be a positive integer")

    def expand(values, flag):
        if len(values) == 1:
            return values * (n - 1)
        if len(values) != n - 1:
            raise UsageError(f"{flag}: need 1 or {n - 1} values, got {len(values)}")
        return values

    prior = None
    if cfg.alpha is not None and cfg.beta != "auto":
        prior = PriorSpec(expand(cfg.alpha, "--alpha"), expand(cfg.beta, "--beta"))
    try:
        spec = GenerativeSpec(
            n=n,
            theta=None if cfg.theta_from_prior else expand(cfg.theta, "--theta"),
            theta_prior=prior if cfg.theta_from_prior else None,
            first_column=cfg.first_column,
            seed=cfg.seed,
            replications=cfg.replications,
        )
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    if cfg.out is not None:
        cfg.out.mkdir(parents=True, exist_ok=True)
        width = max(4, len(str(cfg.replications - 1)))
        for r in range(cfg.replications):
            write_csv(cfg.out / f"replicate_{r:0{width}d}.csv", simulate_triangle(spec, r))
        print(f"wrote {cfg.replications} triangles to {cfg.out}", file=sys.stderr)
    if cfg.recovery:
        summary = recovery_study(spec, prior, level=cfg.level, n_jobs=cfg.jobs)
        stdout.write(render_report(summary, cfg.format, cfg.precision))
    elif cfg.out is None:
        stdout.write(_emit_replicates(spec))
    return EXIT_OK


def _emit_replicates(spec: GenerativeSpec) -> str:
    return "\n".join(emit_csv(simulate_triangle(spec, r)) for r in range(spec.replications))


def _verify(cfg: RunConfig, stdout) -> int:
    checks = run_checks()
    if cfg.format == "json":
        doc = [{"name": c.name, "error": c.error, "tolerance": c.tolerance, "passed": c.passed}
               for c in checks]
        stdout.write(json.dumps(doc, indent=2) + "\n")
    else:
        for c in checks:
            stdout.write(f"{'PASS' if c.passed else 'FAIL'}  {c.error:.3e} <= {c.tolerance:.0e}  {c.name}\n")
        stdout.write(f"{sum(c.passed for c in checks)}/{len(checks)} checks passed\n")
    return EXIT_OK if all(c.passed for c in checks) else EXIT_NUMERIC


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        if cfg.subcommand == "verify":
            return _verify(cfg, stdout)
        if cfg.subcommand == "simulate":
            return _simulate(cfg, stdout)
        if cfg.precision < 0:
            raise UsageError("--precision must be nonnegative")
        tri = _load(cfg)
        color = use_color(stdout)
        if cfg.subcommand == "reserve":
            if cfg.method == "mack":
                report = project(tri, mack_factors(tri))
            else:
                report = run_bayes(tri, _prior(cfg, tri))
            stdout.write(render_report(report, cfg.format, cfg.precision, color))
            if cfg.oracle and cfg.method == "bayes-hn" and not _oracle_check(tri, report, stderr):
                return EXIT_NUMERIC
            return EXIT_OK
        if cfg.subcommand == "compare":
            result = compare(tri, _prior(cfg, tri))
            stdout.write(render_report(result, cfg.format, cfg.precision, color))
            return EXIT_OK
        raise UsageError(f"unknown subcommand {cfg.subcommand!r}")
    except UsageError as exc:
        print(f"hnreserve: usage error: {exc}", file=stderr)
        return EXIT_USAGE
    except (TriangleError, ContractError) as exc:
        print(f"hnreserve: invalid data: {exc}", file=stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"hnreserve: numerical error: {exc}", file=stderr)
        return EXIT_NUMERIC


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return run(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
