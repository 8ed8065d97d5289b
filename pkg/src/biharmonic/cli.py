"""Command-line front end: ``biharmonic <command> [options]``.

Every command builds a :class:`RunRecord`.  ``--json`` prints it in full,
``--csv`` prints the tabular part, and the default is a short text summary.
``--out DIR`` additionally writes ``record.json`` (and, for ``solve``, the
profile CSVs) into ``DIR``.

Shooting settings are resolved as flags > config file > defaults.  The config
file is INI with a ``[shooting]`` section whose keys are the field names of
:class:`~biharmonic.radial_ode.ShootingConfig`; its path comes from
``--config`` or the ``BIHARMONIC_CONFIG`` environment variable.

Exit codes: 0 success, 2 usage, 3 regime, 4 convergence, 5 verification failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import dataclasses
import datetime as dt
import io
import itertools
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import metadata
from pathlib import Path
from typing import Sequence

from . import closedform, emden, quartic, radial_ode, spectral
from .errors import (DomainError, IntegrationError, NoConvergence, RegimeError,
                     StabilityViolated)
from .report import VerificationReport

EXIT_OK, EXIT_USAGE, EXIT_REGIME, EXIT_CONVERGENCE, EXIT_VERIFY = 0, 2, 3, 4, 5
CONFIG_ENV = "BIHARMONIC_CONFIG"
MISSING = "\u2014"  # em dash marks "no critical exponent" in tables
RESIDUAL_LIMIT = 1e-6
PROFILE_HEADER = ("r", "u", "du", "v", "dv")
EMDEN_HEADER = ("s", "W", "dW")

_FLOAT_KEYS = ("r_start", "r_max", "rel_tol", "abs_tol", "beta_tol", "growth_factor",
               "horizon", "switch_tol", "projection_tol", "max_step")
_INT_KEYS = ("max_bisections", "samples_per_unit")


def tool_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0.0.0+unknown"


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        when = dt.datetime.fromtimestamp(int(epoch), tz=dt.timezone.utc)
    else:
        when = dt.datetime.now(tz=dt.timezone.utc)
    return when.replace(microsecond=0).isoformat()


@dataclass
class RunRecord:
    command: str
    params: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    verdicts: list = field(default_factory=list)
    table: list = field(default_factory=list)
    columns: list = field(default_factory=list)
    tool_version: str = field(default_factory=tool_version)
    timestamp: str = field(default_factory=_timestamp)
    exit_code: int = EXIT_OK

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["verdicts"] = [v.to_dict() if hasattr(v, "to_dict") else v for v in self.verdicts]
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=_json_default)


def _json_default(obj):
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    if hasattr(obj, "item"):
        return obj.item()
    if hasattr(obj, "tolist"):
        return obj.tolist()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


# -- argument parsing ---------------------------------------------------------

def _number(text: str) -> float:
    """Accept decimals and fractions such as ``17/9``."""
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")


def _number_list(text: str) -> list[float]:
    return [_number(t) for t in text.split(",") if t.strip()]


def _int_range(text: str) -> list[int]:
    """``5..16``, ``13`` or ``5,7,9``."""
    out = []
    try:
        for part in text.split(","):
            if ".." in part:
                a, b = part.split("..", 1)
                lo, hi = int(a), int(b)
                if hi < lo:
                    raise ValueError
                out.extend(range(lo, hi + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer range: {text!r}")
    return out


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="print the full run record as JSON")
    fmt.add_argument("--csv", action="store_true", help="print the table as CSV")
    common.add_argument("--quiet", action="store_true", help="suppress normal output")
    common.add_argument("--out", type=Path, help="directory for record.json and data files")
    return common


def _shooting_parser() -> argparse.ArgumentParser:
    shooting = argparse.ArgumentParser(add_help=False)
    shooting.add_argument("--config", type=Path, help=f"INI config file (else ${CONFIG_ENV})")
    shooting.add_argument("--r-start", type=float, dest="r_start")
    shooting.add_argument("--r-max", type=float, dest="r_max")
    shooting.add_argument("--rel-tol", type=float, dest="rel_tol")
    shooting.add_argument("--abs-tol", type=float, dest="abs_tol")
    shooting.add_argument("--beta-tol", type=float, dest="beta_tol")
    return shooting


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="biharmonic",
        description="Entire radial solutions of Δ²φ = φ^p: regimes, profiles and stability checks.")
    common, shooting = _common_parser(), _shooting_parser()
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pc", parents=[common], help="critical exponent table over dimensions")
    p.add_argument("--n", type=_int_range, default=_int_range("5..20"), help="e.g. 5..16")

    p = sub.add_parser("classify", parents=[common], help="regime of (n, p)")
    p.add_argument("n", type=int)
    p.add_argument("p", type=_number)

    p = sub.add_parser("roots", parents=[common], help="real roots of the P and R quartics")
    p.add_argument("n", type=int)
    p.add_argument("p", type=_number)

    p = sub.add_parser("solve", parents=[common, shooting], help="shoot one radial solution")
    p.add_argument("n", type=int)
    p.add_argument("p", type=_number)
    p.add_argument("--alpha", type=_number, default=1.0)

    p = sub.add_parser("verify", parents=[common, shooting], help="run the property suite")
    p.add_argument("n", type=int)
    p.add_argument("p", type=_number)
    p.add_argument("--alphas", type=_number_list, default=[1.0, 2.0, 4.0])

    p = sub.add_parser("energy", parents=[common], help="instability energy at p = p_n")
    p.add_argument("n", type=int)
    p.add_argument("--lam", "--lambda", type=_number, default=1.0, dest="lam")
    p.add_argument("--nodes", type=int, default=24)

    p = sub.add_parser("probe", parents=[common, shooting], help="search for a negative direction")
    p.add_argument("n", type=int)
    p.add_argument("p", type=_number)
    p.add_argument("--alpha", type=_number, default=1.0)

    p = sub.add_parser("sweep", parents=[common, shooting], help="solve and check a grid of cases")
    p.add_argument("--n", type=_int_range, required=True)
    p.add_argument("--p", type=_number_list, required=True)
    p.add_argument("--alphas", type=_number_list, default=[1.0])
    p.add_argument("--workers", type=int, default=1)
    return parser


def resolve_config(args: argparse.Namespace, env: dict | None = None) -> radial_ode.ShootingConfig:
    """Merge defaults, the config file and explicit flags (in rising priority)."""
    env = os.environ if env is None else env
    values: dict = {}
    path = getattr(args, "config", None) or env.get(CONFIG_ENV)
    if path:
        parser = configparser.ConfigParser()
        if not parser.read(path):
            raise DomainError(f"cannot read config file {path}")
        if parser.has_section("shooting"):
            for key, raw in parser.items("shooting"):
                if key in _FLOAT_KEYS:
                    values[key] = float(raw)
                elif key in _INT_KEYS:
                    values[key] = int(raw)
                else:
                    raise DomainError(f"unknown config key [shooting] {key}")
    for key in _FLOAT_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    return radial_ode.ShootingConfig(**values)


# -- commands -------------------------------------------------------------------

def cmd_pc(args) -> RunRecord:
    rows = []
    for n in args.n:
        pc = quartic.p_critical(n)
        pn = quartic.sobolev_exponent(n)
        rows.append([n, pn, MISSING if pc is None else pc, quartic.q_limit_coefficient(n),
                     quartic.script_q(pn, n)])
    return RunRecord("pc", params={"n": list(args.n)},
                     columns=["n", "p_n", "p_c", "limit_coefficient", "Q(p_n)"], table=rows)


def cmd_classify(args) -> RunRecord:
    n, p = args.n, args.p
    regime = quartic.classify(n, p)
    results = {"verdict": regime.value, "unstable": regime.unstable,
               "theorem_applies": regime.theorem_applies}
    if n > 4:
        pc = quartic.p_critical(n)
        results.update({"p_n": quartic.sobolev_exponent(n), "p_c": pc,
                        "script_q": quartic.script_q(p, n)})
    return RunRecord("classify", params={"n": n, "p": p}, results=results,
                     columns=["n", "p", "verdict"], table=[[n, p, regime.value]])


def cmd_roots(args) -> RunRecord:
    params = quartic.ProblemParams(args.n, args.p)
    sets = [quartic.roots_p_polynomial(params), quartic.roots_r_polynomial(params)]
    rows = [[rs.which, i + 1, x] for rs in sets for i, x in enumerate(rs.roots)]
    return RunRecord("roots", params=params.to_dict(),
                     results={rs.which: rs.to_dict() for rs in sets},
                     columns=["polynomial", "index", "root"], table=rows)


def _format_row(values) -> list[str]:
    return [f"{v:.17e}" for v in values]


def _write_csv(path: Path, header, columns) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in zip(*columns):
            writer.writerow(_format_row(row))


def cmd_solve(args) -> RunRecord:
    params = quartic.ProblemParams(args.n, args.p)
    cfg = resolve_config(args)
    sol = radial_ode.shoot(args.alpha, params, cfg)
    record = RunRecord("solve", params={**params.to_dict(), "alpha": args.alpha},
                       config=cfg.to_dict(), results=sol.summary())
    if not sol.resolved:
        raise NoConvergence(f"final trajectory not resolved: {sol.trajectory_class}")
    out = args.out or Path(".")
    out.mkdir(parents=True, exist_ok=True)
    g = sol.grid
    stem = f"n{params.n}_p{params.p:g}_a{args.alpha:g}"
    profile, emden_csv = out / f"profile_{stem}.csv", out / f"emden_{stem}.csv"
    _write_csv(profile, PROFILE_HEADER, (g.r, g.u, g.du, g.v, g.dv))
    _write_csv(emden_csv, EMDEN_HEADER, (g.s, g.w, g.dw))
    record.results["files"] = {"profile": str(profile), "emden": str(emden_csv)}
    record.columns = list(PROFILE_HEADER)
    record.table = [list(row) for row in zip(g.r, g.u, g.du, g.v, g.dv)]
    return record


def _residual_report(sol) -> VerificationReport:
    res = emden.emden_ode_residual(emden.to_emden(sol), sol)
    return VerificationReport(name="emden_residual", passed=res <= RESIDUAL_LIMIT,
                              margin=1.0 - res / RESIDUAL_LIMIT, detail=f"max residual {res:.3e}")


def cmd_verify(args) -> RunRecord:
    params = quartic.ProblemParams(args.n, args.p)
    cfg = resolve_config(args)
    regime = params.regime
    if regime is quartic.Regime.NO_POSITIVE_SOLUTION:
        raise RegimeError(f"no positive solution for n={params.n}, p={params.p}")
    sols = []
    for alpha in args.alphas:
        sol = radial_ode.shoot(alpha, params, cfg)
        if not sol.resolved:
            raise NoConvergence(f"alpha={alpha}: {sol.trajectory_class}")
        sols.append(sol)
    verdicts: list = []
    for sol in sols:
        profile = emden.to_emden(sol)
        for rep in (emden.check_bound(profile), emden.check_monotone(profile),
                    spectral.rellich_pointwise_check(sol), _residual_report(sol)):
            verdicts.append(dataclasses.replace(rep, extra={**rep.extra, "alpha": sol.alpha}))
    for a, b in itertools.combinations(sols, 2):
        verdicts.append(emden.check_intersection(a, b))
    results = {"regime": regime.value, "solutions": [s.summary() for s in sols]}
    if regime.unstable:
        found = spectral.instability_probe(sols[0], include_critical_zeta=params.is_critical)
        results["probe"] = found.to_dict() if found is not None else "inconclusive"
    record = RunRecord("verify", params={**params.to_dict(), "alphas": list(args.alphas)},
                       config=cfg.to_dict(), results=results, verdicts=verdicts,
                       columns=["check", "alpha", "status", "margin"],
                       table=[_verdict_row(v) for v in verdicts])
    covered = regime.theorem_applies
    if covered and any(not v.passed for v in verdicts):
        record.exit_code = EXIT_VERIFY
    return record


def _verdict_row(v) -> list:
    if isinstance(v, emden.IntersectionReport):
        return ["non_intersection", f"{v.pair[0]:g}/{v.pair[1]:g}", v.status, v.min_gap]
    return [v.name, v.extra.get("alpha", ""), v.status, v.margin]


def cmd_energy(args) -> RunRecord:
    n, lam = args.n, args.lam
    test = spectral.CriticalZeta(lam, n)
    rep = spectral.energy(test, closedform.CriticalSolution(n, lam), nodes=args.nodes)
    exact = closedform.instability_energy_closed_form(n, lam)
    gap = abs(rep.energy - exact) / abs(exact)
    return RunRecord("energy", params={"n": n, "lambda": lam},
                     results={"quadrature": rep.to_dict(), "closed_form": exact,
                              "relative_gap": gap},
                     columns=["n", "lambda", "quadrature", "closed_form", "relative_gap"],
                     table=[[n, lam, rep.energy, exact, gap]])


def cmd_probe(args) -> RunRecord:
    params = quartic.ProblemParams(args.n, args.p)
    cfg = resolve_config(args)
    sol = radial_ode.shoot(args.alpha, params, cfg)
    if not sol.resolved:
        raise NoConvergence(f"alpha={args.alpha}: {sol.trajectory_class}")
    rellich = spectral.rellich_pointwise_check(sol)
    found = spectral.instability_probe(sol, include_critical_zeta=params.is_critical)
    results = {"regime": params.regime.value, "rellich": rellich.to_dict()}
    if found is None:
        results["probe"] = "inconclusive"
        results["note"] = ("rellich check passed: the form is non-negative" if rellich.passed
                           else "no negative direction on the sweep grid")
        row = [params.n, params.p, args.alpha, "inconclusive", "", rellich.status]
    else:
        results["probe"] = found.to_dict()
        row = [params.n, params.p, args.alpha, "negative", found.energy, rellich.status]
    return RunRecord("probe", params={**params.to_dict(), "alpha": args.alpha},
                     config=cfg.to_dict(), results=results, verdicts=[rellich],
                     columns=["n", "p", "alpha", "probe", "energy", "rellich"], table=[row])


def _sweep_job(job) -> list:
    n, p, alpha, cfg = job
    try:
        params = quartic.ProblemParams(n, p)
        regime = params.regime.value
        sol = radial_ode.shoot(alpha, params, cfg)
        if not sol.resolved:
            return [n, p, alpha, regime, str(sol.trajectory_class), sol.beta, "", "", "", ""]
        prof = emden.to_emden(sol)
        return [n, p, alpha, regime, "ok", sol.beta, sol.tail_value(),
                emden.check_bound(prof).status, emden.check_monotone(prof).status,
                spectral.rellich_pointwise_check(sol).status]
    except (DomainError, RegimeError, NoConvergence, IntegrationError) as exc:
        return [n, p, alpha, quartic.classify(n, p).value if n > 4 and p > 1 else "",
                f"error: {exc}", "", "", "", "", ""]


def cmd_sweep(args) -> RunRecord:
    cfg = resolve_config(args)
    jobs = [(n, p, a, cfg) for n in args.n for p in args.p for a in args.alphas]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_sweep_job, jobs))
    else:
        rows = [_sweep_job(j) for j in jobs]
    return RunRecord("sweep", params={"n": args.n, "p": args.p, "alphas": args.alphas},
                     config=cfg.to_dict(),
                     columns=["n", "p", "alpha", "regime", "status", "beta", "tail_value",
                              "bound", "monotone", "rellich"], table=rows)


COMMANDS = {
    "pc": cmd_pc, "classify": cmd_classify, "roots": cmd_roots, "solve": cmd_solve,
    "verify": cmd_verify, "energy": cmd_energy, "probe": cmd_probe, "sweep": cmd_sweep,
}


# -- output -------------------------------------------------------------------------

def _cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.17e}"
    return "" if v is None else str(v)


def render_csv(record: RunRecord) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(record.columns)
    for row in record.table:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def render_text(record: RunRecord) -> str:
    if record.command == "solve":
        r = record.results
        return (f"beta = {r['beta']:.12e}\n"
                f"tail r^4 u^(p-1) at r={r['r_max']:g}: {r['tail_value']:.8g} "
                f"(limit {r['tail_limit']:.8g})\n"
                f"ODE residual: {r['residual']:.2e}\n"
                f"wrote {r['files']['profile']} and {r['files']['emden']}\n")
    lines = ["  ".join(record.columns)]
    for row in record.table:
        lines.append("  ".join(f"{v:.10g}" if isinstance(v, float) else _cell(v) for v in row))
    for key in ("probe", "note"):
        if key in record.results and isinstance(record.results[key], str):
            lines.append(f"{key}: {record.results[key]}")
    return "\n".join(lines) + "\n"


def emit(record: RunRecord, args, stream) -> None:
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "record.json").write_text(record.to_json() + "\n")
    if args.quiet:
        return
    if args.json:
        stream.write(record.to_json() + "\n")
    elif args.csv:
        stream.write(render_csv(record))
    else:
        stream.write(render_text(record))


def main(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        record = COMMANDS[args.command](args)
    except (RegimeError, StabilityViolated) as exc:
        stderr.write(f"regime error: {exc}\n")
        return EXIT_REGIME
    except (NoConvergence, IntegrationError) as exc:
        stderr.write(f"convergence failure: {exc}\n")
        return EXIT_CONVERGENCE
    except DomainError as exc:
        stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    emit(record, args, stdout)
    return record.exit_code


if __name__ == "__main__":
    sys.exit(main())
