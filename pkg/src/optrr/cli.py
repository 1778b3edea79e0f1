"""Command-line front end.

    optrr solve     --config run.json [--precision N] [--out DIR] [--format json|csv|both]
    optrr sweep     --config run.json ...
    optrr qes       --config run.json ...
    optrr compare   --config run.json ...
    optrr splitting --config run.json ...

Exit codes: 0 success, 1 comparison mismatch, 2 invalid configuration,
3 numeric failure, 4 unresolved level splitting.  The default precision
comes from the OPTRR_PRECISION environment variable when a config does not
set one.
"""

from __future__ import annotations

import argparse
import sys

from mpmath import mpf

from . import report as rep
from .config import ConfigError, RunConfig, build_family, load_config
from .linalg import EighConvergenceError, LinalgError
from .optimize import NoMinimumError
from .potentials import PotentialError
from .precision import workdps
from .basis import BasisError
from .quadrature import QuadratureError
from . import qes as qes_mod
from .solver import SolverError, level_splitting, moments, solve, sweep
from .traceopt import TraceOptimizeError

NUMERIC_ERRORS = (LinalgError, EighConvergenceError, NoMinimumError,
                  QuadratureError, SolverError, TraceOptimizeError,
                  qes_mod.QESError, BasisError, PotentialError, ValueError,
                  ZeroDivisionError)

EXIT_OK = 0
EXIT_COMPARE_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_SPLITTING = 4


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    overrides = {"precision": args.precision, "out": args.out, "format": args.format}
    try:
        cfg = load_config(args.config, overrides)
        if cfg.command != args.command:
            raise ConfigError(
                f"config command {cfg.command!r} does not match subcommand {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return _dispatch(cfg)
    except rep.ReportError as exc:
        print(f"comparison error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NUMERIC_ERRORS as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def _build_parser():
    parser = argparse.ArgumentParser(prog="optrr", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("solve", "sweep", "qes", "compare", "splitting"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--precision", type=int, default=None,
                       help="override working precision (decimal digits)")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--format", choices=("json", "csv", "both"), default=None)
    return parser


def _dispatch(cfg: RunConfig):
    handler = {
        "solve": _run_solve,
        "sweep": _run_sweep,
        "qes": _run_qes,
        "compare": _run_compare,
        "splitting": _run_splitting,
    }[cfg.command]
    return handler(cfg)


def _write(cfg: RunConfig, document, csv_writer=None):
    out = []
    if cfg.format in ("json", "both"):
        out.append(rep.write_json(cfg.out_dir / f"{cfg.command}.json", document))
    if cfg.format in ("csv", "both") and csv_writer is not None:
        out.append(csv_writer(cfg.out_dir / f"{cfg.command}.csv", document))
    for path in out:
        print(f"wrote {path}")
    return out


def _run_solve(cfg: RunConfig):
    result = solve(cfg.potential, cfg.n, cfg.precision, cfg.strategy,
                   omega=cfg.omega, gamma=cfg.gamma, trace_scope=cfg.trace_scope)
    table = None
    if cfg.moment_powers:
        states = [s for s in cfg.states if s < cfg.n]
        table = moments(result, cfg.moment_powers, states, cfg.precision)
    doc = rep.solve_document(cfg.raw, result, table)
    _write(cfg, doc, _solve_csv)
    return EXIT_OK


def _solve_csv(path, document):
    rec = document["records"][0]
    lines = ["index,energy"]
    for i, e in enumerate(rec["energies"]):
        lines.append(f"{i},{e}")
    return rep.atomic_write_text(path, "\n".join(lines) + "\n")


def _reference_for(cfg: RunConfig):
    if cfg.reference in (None, "none"):
        return None, None
    if cfg.reference == "self":
        return "self", None
    if cfg.reference == "qes":
        family = build_family(cfg.qes)
        with workdps(cfg.precision):
            sols = qes_mod.exact_energies(family, cfg.precision)
            index = int(cfg.qes.get("solution", 0))
            sol = sols[index]
            energies = {}
            ref_moments = {}
            for i, e in enumerate(sol.energies):
                state = sol.state_index[i] if len(sol.energies) == 1 else i
                if state in cfg.states:
                    energies[state] = e
                    if cfg.moment_powers:
                        st = qes_mod.exact_state(sol, i, cfg.precision)
                        for k, v in qes_mod.exact_moments(
                                st, cfg.moment_powers, cfg.precision).items():
                            ref_moments[(state, k)] = v
            return energies, ref_moments
    if isinstance(cfg.reference, dict):
        energies = {int(s): v for s, v in cfg.reference.get("energies", {}).items()}
        ref_moments = {}
        for s, by_k in cfg.reference.get("moments", {}).items():
            for k, v in by_k.items():
                ref_moments[(int(s), mpf(k))] = v
        return energies, ref_moments
    raise ConfigError(f"unknown reference {cfg.reference!r}")


def _run_sweep(cfg: RunConfig):
    reference, ref_moments = _reference_for(cfg)
    report = sweep(cfg.potential, cfg.n_list, cfg.precision, cfg.strategy,
                   omega=cfg.omega, gamma=cfg.gamma, trace_scope=cfg.trace_scope,
                   powers=cfg.moment_powers, states=cfg.states,
                   reference=reference, reference_moments=ref_moments)
    doc = rep.sweep_document(cfg.raw, report, cfg.precision.digits)
    _write(cfg, doc, rep.write_sweep_csv)
    if any(rec.delta_e for rec in report.records):
        path = rep.emit_plot_data(report, cfg.out_dir / "sweep_errors.dat", cfg.precision)
        print(f"wrote {path}")
    return EXIT_OK


def _run_qes(cfg: RunConfig):
    family = build_family(cfg.qes)
    with workdps(cfg.precision):
        sols = qes_mod.exact_energies(family, cfg.precision)
        moments_by_solution = {}
        residuals_by_solution = {}
        want_residuals = bool(cfg.qes.get("residuals"))
        if cfg.moment_powers or want_residuals:
            for i, sol in enumerate(sols):
                per_state_moments = {}
                residuals = []
                for j in range(len(sol.energies)):
                    st = qes_mod.exact_state(sol, j, cfg.precision)
                    if cfg.moment_powers:
                        per_state_moments.update(qes_mod.exact_moments(
                            st, cfg.moment_powers, cfg.precision))
                    if want_residuals:
                        residuals.append(qes_mod.residual_check(st, cfg.precision))
                if cfg.moment_powers:
                    moments_by_solution[i] = per_state_moments
                if want_residuals:
                    residuals_by_solution[i] = residuals
        doc = rep.qes_document(cfg.raw, family, sols, cfg.precision.digits,
                               moments_by_solution, residuals_by_solution)
    _write(cfg, doc, None)
    return EXIT_OK


def _run_compare(cfg: RunConfig):
    result_doc = rep.load_json(cfg.compare["result"])
    golden_doc = rep.load_json(cfg.compare["golden"])
    passed, detail = rep.compare_documents(result_doc, golden_doc,
                                           cfg.compare.get("tolerances"))
    doc = {"schema": rep.SCHEMA_TAG, "command": "compare", "config": cfg.raw,
           "passed": passed, **detail}
    _write(cfg, doc, None)
    failed = [c for c in detail["cells"] if not c["pass"]]
    print(f"compared {detail['checked']} cells: "
          f"{'all within tolerance' if passed else f'{len(failed)} outside tolerance'}")
    for cell in failed[:20]:
        print(f"  n={cell['n']} {cell['cell']}: |delta|={cell['delta']} > {cell['bound']}")
    return EXIT_OK if passed else EXIT_COMPARE_FAILED


def _run_splitting(cfg: RunConfig):
    result = level_splitting(cfg.splitting["g"], int(cfg.splitting["n"]), cfg.precision)
    doc = rep.splitting_document(cfg.raw, result)
    _write(cfg, doc, rep.write_splitting_csv)
    if not result.resolved:
        print("splitting below arithmetic resolution at this precision", file=sys.stderr)
        return EXIT_SPLITTING
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
