"""Command-line front end: solve / check / fiber / oracle subcommands.

Configuration is a flat key-value text file with dotted section prefixes::

    domain.dim = 2
    domain.extents = 1.0, 1.0
    domain.resolution = 64, 64
    family.kind = quasilinear     # quasilinear | kirchhoff | anisotropic
    family.p = 2
    family.q = 2
    family.a = one                # one | p_plus_q
    family.f_exponents = 4
    family.f_coefficients = 1
    solver.seed = 1
    output.directory = out
    output.prefix = run

Exit codes: 0 success, 1 stalled solve / failed check, 2 hypothesis gate
failure (override with --force), 64 malformed configuration, 73 write failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import (
    ConfigurationError,
    ContractError,
    HypothesisViolationError,
    MultiStartError,
    OracleFailureError,
    ParameterError,
)
from .fiber import FiberLine, project_to_nehari
from .functionals import (
    AnisotropicOperator,
    Functional,
    KirchhoffOperator,
    Nonlinearity,
    QuasilinearOperator,
)
from .grid import Field, Grid, build_grid, dump_field_csv
from .solver import ArmijoOptions, SolveOptions, multi_start, random_init
from .verify import (
    CheckReport,
    check_abstract,
    check_anisotropic,
    check_kirchhoff,
    check_quasilinear,
    radial_shooting,
)

EXIT_OK = 0
EXIT_UNCONVERGED = 1
EXIT_GATE = 2
EXIT_CONFIG = 64
EXIT_WRITE = 73

_A_KINDS = {"one": "constant_one", "p_plus_q": "p_plus_q"}
_M_KINDS = ("affine", "log", "power_sum")


def parse_config_text(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; '#' starts a comment, blanks are ignored."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigurationError(f"line {lineno}: empty key")
        out[key] = value.strip()
    return out


class _ConfigView:
    def __init__(self, raw: dict[str, str]):
        self.raw = raw

    def _get(self, key, default, convert):
        if key not in self.raw:
            if default is _REQUIRED:
                raise ConfigurationError(f"missing required key {key!r}")
            return default
        try:
            return convert(self.raw[key])
        except ConfigurationError:
            raise
        except Exception as exc:
            raise ConfigurationError(f"key {key!r}: cannot parse {self.raw[key]!r} ({exc})")

    def str(self, key, default=None):
        return self._get(key, default, str)

    def int(self, key, default=None):
        return self._get(key, default, lambda s: int(s, 10))

    def float(self, key, default=None):
        return self._get(key, default, float)

    def floats(self, key, default=None):
        return self._get(key, default,
                         lambda s: tuple(float(v) for v in s.split(",") if v.strip()))

    def bool(self, key, default=None):
        def conv(s):
            low = s.lower()
            if low in ("true", "yes", "1", "on"):
                return True
            if low in ("false", "no", "0", "off"):
                return False
            raise ConfigurationError(f"key {key!r}: not a boolean: {s!r}")
        return self._get(key, default, conv)


_REQUIRED = object()


@dataclass
class RunConfig:
    grid: Grid
    functional: Functional
    alpha: float
    solver: SolveOptions
    n_starts: int
    out_dir: str
    prefix: str
    fiber_seed: int
    scan: tuple[float, float, int]
    oracle_d: int
    oracle_R: float
    oracle_tol: float
    family_kind: str
    raw: dict[str, str] = field(default_factory=dict)


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = parse_config_text(fh.read())
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path!r}: {exc}")
    cfg = _ConfigView(raw)

    dim = cfg.int("domain.dim", _REQUIRED)
    extents = cfg.floats("domain.extents", _REQUIRED)
    resolution = cfg.floats("domain.resolution", _REQUIRED)
    grid = build_grid(dim, extents, [int(n) for n in resolution])

    kind = cfg.str("family.kind", _REQUIRED)
    exps = cfg.floats("family.f_exponents", (4.0,))
    coefs = cfg.floats("family.f_coefficients", tuple(1.0 for _ in exps))
    nl = Nonlinearity(exps, coefs)
    if kind == "quasilinear":
        a_name = cfg.str("family.a", "one")
        if a_name not in _A_KINDS:
            raise ConfigurationError(f"family.a must be one of {sorted(_A_KINDS)}")
        op = QuasilinearOperator(p=cfg.float("family.p", 2.0),
                                 q=cfg.float("family.q", None),
                                 kind=_A_KINDS[a_name])
    elif kind == "kirchhoff":
        m_name = cfg.str("family.M", "affine")
        if m_name not in _M_KINDS:
            raise ConfigurationError(f"family.M must be one of {list(_M_KINDS)}")
        params = cfg.floats("family.M_params", (1.0, 1.0))
        if m_name == "affine":
            if len(params) != 2:
                raise ConfigurationError("affine M needs parameters: slope, m0")
            op = KirchhoffOperator("affine", slope=params[0], m0=params[1])
        elif m_name == "log":
            if len(params) != 1:
                raise ConfigurationError("log M needs one parameter: m0")
            op = KirchhoffOperator("log", m0=params[0])
        else:
            if len(params) < 3 or len(params) % 2 == 0:
                raise ConfigurationError(
                    "power_sum M needs parameters: m0, b1, gamma1[, b2, gamma2, ...]")
            terms = tuple((params[i], params[i + 1])
                          for i in range(1, len(params), 2))
            op = KirchhoffOperator("power_sum", m0=params[0], terms=terms)
    elif kind == "anisotropic":
        pvec = cfg.floats("family.pvec", _REQUIRED)
        op = AnisotropicOperator(pvec)
    else:
        raise ConfigurationError(
            "family.kind must be quasilinear, kirchhoff or anisotropic")
    try:
        functional = Functional(grid, op, nl)
    except (ParameterError, ConfigurationError, ContractError) as exc:
        raise ConfigurationError(str(exc))

    armijo = ArmijoOptions(
        initial_step=cfg.float("solver.armijo_step", 1.0),
        shrink=cfg.float("solver.armijo_shrink", 0.5),
        slope_fraction=cfg.float("solver.armijo_slope_fraction", 1e-4),
        max_backtracks=cfg.int("solver.armijo_max_backtracks", 40))
    solver = SolveOptions(
        max_iterations=cfg.int("solver.max_iterations", 2000),
        residual_tolerance=cfg.float("solver.residual_tolerance", 1e-7),
        armijo=armijo,
        preconditioner=cfg.str("solver.preconditioner", "auto"),
        seed=cfg.int("solver.seed", 0),
        nonnegative_start=cfg.bool("solver.nonnegative_start", True),
        modes=cfg.int("solver.modes", 3))

    scan = (cfg.float("fiber.scan_lo", 1e-3), cfg.float("fiber.scan_hi", 1e3),
            cfg.int("fiber.scan_points", 200))
    return RunConfig(
        grid=grid,
        functional=functional,
        alpha=max(exps),
        solver=solver,
        n_starts=cfg.int("solver.n_starts", 1),
        out_dir=cfg.str("output.directory", "out"),
        prefix=cfg.str("output.prefix", "run"),
        fiber_seed=cfg.int("fiber.seed", 7),
        scan=scan,
        oracle_d=cfg.int("oracle.d", grid.dim),
        oracle_R=cfg.float("oracle.R", min(grid.extents) / 2.0),
        oracle_tol=cfg.float("oracle.tol", 1e-8),
        family_kind=kind,
        raw=raw)


def _family_check(cfg: RunConfig) -> CheckReport:
    F = cfg.functional
    op = F.operator
    d = cfg.grid.dim
    if cfg.family_kind == "quasilinear":
        return check_quasilinear(op, cfg.alpha, F.nonlinearity, d=d)
    if cfg.family_kind == "kirchhoff":
        return check_kirchhoff(op, cfg.alpha, F.nonlinearity)
    return check_anisotropic(tuple(sorted(op.pvec)), cfg.alpha,
                             F.nonlinearity, d=d)


def _print_report(report: CheckReport) -> None:
    width = max(len(e.id) for e in report.entries)
    for e in report.entries:
        line = f"  {e.id:<{width}}  {e.status:<12} {e.notes}"
        if e.status == "fail" and e.witness is not None:
            line += f"  witness={e.witness}"
        print(line)


def _ensure_outdir(path: str) -> None:
    os.makedirs(path, exist_ok=True)


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def run_solve(cfg: RunConfig, force: bool = False) -> int:
    gate = _family_check(cfg).merged_with(
        check_abstract(cfg.functional, n_directions=8,
                       scan=(cfg.scan[0], cfg.scan[1], min(cfg.scan[2], 80)),
                       seed=cfg.solver.seed))
    failures = gate.failed()
    if failures:
        print("hypothesis gate failed:")
        _print_report(CheckReport(failures))
        if not force:
            return EXIT_GATE
        print("continuing anyway (--force)")

    try:
        report = multi_start(cfg.functional, cfg.n_starts, cfg.solver.seed,
                             cfg.solver)
    except MultiStartError as exc:
        print(f"solve failed: {exc}; statuses: {exc.statuses}")
        return EXIT_UNCONVERGED

    payload = report.to_json_dict()
    payload["hypothesis_summary"] = (
        report.hypothesis_summary.merged_with(gate).to_json_list())
    payload["meta"] = {"timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
                       "version": __version__}
    try:
        _ensure_outdir(cfg.out_dir)
        state_path = os.path.join(cfg.out_dir, f"{cfg.prefix}_state.csv")
        report_path = os.path.join(cfg.out_dir, f"{cfg.prefix}_report.json")
        dump_field_csv(report.ground_state, state_path)
        _write_json(report_path, payload)
    except OSError as exc:
        print(f"write failure: {exc}")
        return EXIT_WRITE
    print(f"c = {report.c_value:.12g}  residual = {report.final_residual:.3e}  "
          f"iterations = {report.iterations}  converged = {report.converged}")
    print(f"wrote {state_path} and {report_path}")
    return EXIT_OK if report.converged else EXIT_UNCONVERGED


def run_check(cfg: RunConfig) -> int:
    report = _family_check(cfg).merged_with(
        check_abstract(cfg.functional, n_directions=8,
                       scan=(cfg.scan[0], cfg.scan[1], min(cfg.scan[2], 80)),
                       seed=cfg.solver.seed))
    _print_report(report)
    return EXIT_OK if report.ok() else EXIT_UNCONVERGED


def run_fiber(cfg: RunConfig) -> int:
    direction = random_init(cfg.grid, cfg.fiber_seed, cfg.solver.modes,
                            cfg.solver.nonnegative_start)
    line = FiberLine(cfg.functional, direction)
    lo, hi, n = cfg.scan
    ts = np.logspace(np.log10(lo), np.log10(hi), n)
    gammas = line.value(ts)
    slopes = line.slope(ts)
    try:
        _ensure_outdir(cfg.out_dir)
        path = os.path.join(cfg.out_dir, f"{cfg.prefix}_fiber.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("t,gamma,slope\n")
            for t, gm, sl in zip(ts, gammas, slopes):
                fh.write(f"{t:.17g},{gm:.17g},{sl:.17g}\n")
    except OSError as exc:
        print(f"write failure: {exc}")
        return EXIT_WRITE
    t_root, diag = project_to_nehari(cfg.functional, direction)
    print(f"projection t = {t_root:.12g}, slope residual {diag.slope_at_root:.3e}")
    print(f"wrote {path}")
    return EXIT_OK


def run_oracle(cfg: RunConfig) -> int:
    profile = radial_shooting(cfg.functional.nonlinearity, cfg.oracle_d,
                              cfg.oracle_R, cfg.oracle_tol)
    try:
        _ensure_outdir(cfg.out_dir)
        path = os.path.join(cfg.out_dir, f"{cfg.prefix}_radial.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("r,u\n")
            for r, u in zip(profile.radii, profile.values):
                fh.write(f"{r:.17g},{u:.17g}\n")
    except OSError as exc:
        print(f"write failure: {exc}")
        return EXIT_WRITE
    print(f"energy = {profile.energy:.12g}")
    print(f"wrote {path}")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nehari",
        description="Ground states of nonhomogeneous elliptic problems")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (("solve", "minimize the energy and write artifacts"),
                            ("check", "audit the configured hypotheses"),
                            ("fiber", "dump one ray energy/slope profile"),
                            ("oracle", "radial shooting reference solve")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to the config file")
        p.add_argument("--seed", type=int, default=None,
                       help="override the configured seed")
        p.add_argument("--out", default=None, help="override the output directory")
        if name == "solve":
            p.add_argument("--force", action="store_true",
                           help="run even if the hypothesis gate fails")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.solver = dataclasses.replace(cfg.solver, seed=args.seed)
            cfg.fiber_seed = args.seed
        if args.out is not None:
            cfg.out_dir = args.out
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "solve":
            return run_solve(cfg, force=args.force)
        if args.command == "check":
            return run_check(cfg)
        if args.command == "fiber":
            return run_fiber(cfg)
        return run_oracle(cfg)
    except (ParameterError, ContractError, ConfigurationError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (HypothesisViolationError, OracleFailureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNCONVERGED


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
