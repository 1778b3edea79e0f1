"""Result documents, persistence, golden-file comparison and plot data.

Numbers are serialized as decimal strings carrying the full working
precision plus a round-trip guard, never as binary floats, so results from
high-precision runs survive persistence losslessly.  File writes are atomic
(write to a temporary sibling, then rename).
"""

from __future__ import annotations

import json
import os
import time
from pathlib import Path

from mpmath import mp, mpf, nstr, log10

from .precision import PrecisionConfig, coerce, workdps
from .solver import ConvergenceReport, SpectralResult, SplittingResult

SCHEMA_TAG = "optrr-result-v1"

#: extra significant digits on top of the working precision so that a
#: decimal-string round trip reproduces the binary value exactly
ROUNDTRIP_GUARD = 5


class ReportError(RuntimeError):
    pass


def fmt(value, digits):
    """Full-precision decimal string for one value."""
    return nstr(mpf(value), digits + ROUNDTRIP_GUARD, strip_zeros=True)


def _params_block(params, digits):
    out = {
        "omega": fmt(params.omega, digits),
        "sqrt_omega": fmt(mp.sqrt(params.omega), digits),
        "strategy": params.strategy,
        "boundary_pinned": bool(params.boundary_pinned),
        "trace": fmt(params.trace_value, digits),
    }
    if params.gamma is not None:
        out["gamma"] = fmt(params.gamma, digits)
    return out


def _potential_block(potential, digits):
    block = {
        "kind": potential.kind,
        "kinetic_scale": fmt(_as_number(potential.kinetic_scale), digits),
        "terms": [[fmt(k, digits), fmt(c, digits)] for k, c in potential.realized_terms()],
    }
    if potential.kind == "1d":
        block["parity"] = potential.parity
    else:
        block["l"] = potential.l
    return block


def _as_number(value):
    from .precision import as_mpf
    return as_mpf(value)


def solve_document(config_echo, result: SpectralResult, moment_table=None):
    digits = result.digits
    with workdps(digits):
        doc = _base_document("solve", config_echo, digits)
        doc["potential"] = _potential_block(result.potential, digits)
        record = {
            "n": result.n,
            "params": _params_block(result.params, digits),
            "energies": [fmt(e, digits) for e in result.energies],
            "trusted_count": result.trusted_count,
        }
        if moment_table is not None:
            record["moments"] = _moments_block(moment_table.values, digits)
        doc["records"] = [record]
        return doc


def _moments_block(values, digits):
    out = {}
    for (state, k), v in sorted(values.items(), key=lambda kv: (kv[0][0], kv[0][1])):
        out.setdefault(str(state), {})[fmt_power(k)] = fmt(v, digits)
    return out


def fmt_power(k):
    k = mpf(k)
    if k == int(k):
        return str(int(k))
    return nstr(k, 10)


def sweep_document(config_echo, report: ConvergenceReport, digits):
    with workdps(digits):
        doc = _base_document("sweep", config_echo, digits)
        records = []
        for rec in report.records:
            records.append({
                "n": rec.n,
                "params": _params_block(rec.params, digits),
                "energies": {str(s): fmt(e, digits) for s, e in rec.energies},
                "moments": _moments_block(rec.moments, digits),
                "delta_e": {str(s): fmt(v, digits) for s, v in sorted(rec.delta_e.items())},
                "moment_err": _moments_block(rec.moment_err, digits),
                "trusted_count": rec.trusted_count,
                "warnings": [f"state {s} beyond the trusted window (lowest {rec.trusted_count})"
                             for s, _ in rec.energies if s >= rec.trusted_count],
            })
        doc["records"] = records
        doc["reference"] = {
            "source": report.reference_source,
            "energies": {str(s): fmt(v, digits) for s, v in sorted(report.reference.items())},
            "moments": _moments_block(report.reference_moments, digits),
        }
        return doc


def qes_document(config_echo, family, solutions, digits, moments_by_solution=None,
                 residuals_by_solution=None):
    with workdps(digits):
        doc = _base_document("qes", config_echo, digits)
        fam = {"family": type(family).__name__, "p": family.p}
        for attr in ("nu", "l"):
            if hasattr(family, attr):
                fam[attr] = getattr(family, attr)
        doc["family"] = fam
        blocks = []
        for i, sol in enumerate(solutions):
            block = {
                "potential": _potential_block(sol.potential, digits),
                "energies": [fmt(e, digits) for e in sol.energies],
                "state_index": list(sol.state_index),
                "coefficients": [[fmt(c, digits) for c in vec] for vec in sol.coeff_vectors],
            }
            if sol.parameter is not None:
                block["parameter"] = fmt(sol.parameter, digits)
            if moments_by_solution and i in moments_by_solution:
                block["moments"] = {fmt_power(k): fmt(v, digits)
                                    for k, v in sorted(moments_by_solution[i].items())}
            if residuals_by_solution and i in residuals_by_solution:
                block["residuals"] = [fmt(r, digits) for r in residuals_by_solution[i]]
            blocks.append(block)
        doc["solutions"] = blocks
        return doc


def splitting_document(config_echo, result: SplittingResult):
    digits = result.digits
    with workdps(digits):
        doc = _base_document("splitting", config_echo, digits)
        doc["records"] = [{
            "n": result.n,
            "omega": fmt(result.omega, digits),
            "e0": fmt(result.e0, digits),
            "e1": fmt(result.e1, digits),
            "delta_e": fmt(result.delta_e, digits),
            "resolved": bool(result.resolved),
        }]
        return doc


def _base_document(command, config_echo, digits):
    return {
        "schema": SCHEMA_TAG,
        "command": command,
        "generated_unix": time.time(),
        "precision_digits": digits,
        "config": config_echo,
    }


# ----------------------------------------------------------------- files

def atomic_write_text(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)
    return path


def write_json(path, document):
    return atomic_write_text(path, json.dumps(document, indent=2) + "\n")


def load_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def write_sweep_csv(path, document):
    """Sweep table, one row per order: n, omega, sqrt_omega, gamma, then per
    tracked state the energy and its error, then the moment columns."""
    records = document.get("records", [])
    states = sorted({s for rec in records for s in rec.get("energies", {})}, key=int)
    powers = sorted({k for rec in records for by_state in rec.get("moments", {}).values()
                     for k in by_state}, key=_power_sort_key)
    header = ["n", "omega", "sqrt_omega", "gamma"]
    for s in states:
        header += [f"e_{s}", f"delta_e_{s}"]
    for s in states:
        for k in powers:
            header.append(f"moment_{s}_k{k}")
    lines = [",".join(header)]
    for rec in records:
        row = [str(rec["n"]), rec["params"]["omega"], rec["params"]["sqrt_omega"],
               rec["params"].get("gamma", "")]
        for s in states:
            row.append(rec.get("energies", {}).get(s, ""))
            row.append(rec.get("delta_e", {}).get(s, ""))
        for s in states:
            for k in powers:
                row.append(rec.get("moments", {}).get(s, {}).get(k, ""))
        lines.append(",".join(row))
    return atomic_write_text(path, "\n".join(lines) + "\n")


def _power_sort_key(k):
    return float(k)


def write_splitting_csv(path, document):
    rec = document["records"][0]
    header = "n,omega,e0,e1,delta_e,resolved"
    row = ",".join([str(rec["n"]), rec["omega"], rec["e0"], rec["e1"],
                    rec["delta_e"], str(rec["resolved"]).lower()])
    return atomic_write_text(path, header + "\n" + row + "\n")


def emit_plot_data(report: ConvergenceReport, path, precision=None):
    """Two-column (N, log10 delta_e) series per tracked state, blocks
    separated by blank lines (ready for any plotting tool)."""
    cfg = coerce(precision)
    states = sorted({s for rec in report.records for s in rec.delta_e})
    if not states:
        raise ReportError("report carries no reference errors to plot")
    with workdps(cfg):
        blocks = []
        for s in states:
            lines = [f"# state {s}"]
            for rec in report.records:
                if s in rec.delta_e and rec.delta_e[s] > 0:
                    lines.append(f"{rec.n} {nstr(log10(rec.delta_e[s]), 8)}")
            blocks.append("\n".join(lines))
    return atomic_write_text(path, "\n\n".join(blocks) + "\n")


# ----------------------------------------------------------------- compare

_DEFAULT_TOL = {"rel": "1e-12"}


def compare_documents(result_doc, golden_doc, tolerances=None, digits=None):
    """Cell-by-cell comparison of two result documents.

    tolerances maps a column class ("energies", "moments", "delta_e",
    "omega", "gamma", "default") to {"rel": x} and/or {"abs": y}.  Returns
    (passed, report) where report lists every compared cell.
    """
    tolerances = tolerances or {}
    if result_doc.get("command") != golden_doc.get("command"):
        raise ReportError("documents were produced by different commands")
    digits = digits or max(int(result_doc.get("precision_digits", 30)),
                           int(golden_doc.get("precision_digits", 30)))
    res_records = {rec["n"]: rec for rec in result_doc.get("records", [])}
    gold_records = {rec["n"]: rec for rec in golden_doc.get("records", [])}
    if set(res_records) != set(gold_records):
        raise ReportError(
            f"record orders differ: {sorted(res_records)} vs {sorted(gold_records)}")
    cells = []
    with workdps(PrecisionConfig(max(digits, 15))):
        for n in sorted(res_records):
            got, want = res_records[n], gold_records[n]
            for cell, gv, wv in _iter_cells(got, want):
                tol = tolerances.get(_column_of(cell), tolerances.get("default", _DEFAULT_TOL))
                ok, delta, bound = _within(gv, wv, tol)
                cells.append({"n": n, "cell": cell, "got": gv, "want": wv,
                              "delta": fmt(delta, 8), "bound": fmt(bound, 8),
                              "pass": ok})
    passed = all(c["pass"] for c in cells)
    return passed, {"cells": cells, "passed": passed,
                    "checked": len(cells)}


def _column_of(cell):
    return cell.split("[", 1)[0]


def _iter_cells(got, want):
    for key in ("omega", "gamma", "sqrt_omega", "trace"):
        g = got.get("params", {}).get(key)
        w = want.get("params", {}).get(key)
        if g is not None and w is not None:
            yield key, g, w
        if key in ("omega",) and got.get(key) is not None and want.get(key) is not None:
            yield key, got[key], want[key]  # splitting-style flat records
    for key in ("e0", "e1", "delta_e"):
        if isinstance(got.get(key), str) and isinstance(want.get(key), str):
            yield key, got[key], want[key]
    g_e, w_e = got.get("energies"), want.get("energies")
    if isinstance(g_e, dict) and isinstance(w_e, dict):
        for s in sorted(set(g_e) & set(w_e), key=int):
            yield f"energies[{s}]", g_e[s], w_e[s]
    elif isinstance(g_e, list) and isinstance(w_e, list):
        for i, (gv, wv) in enumerate(zip(g_e, w_e)):
            yield f"energies[{i}]", gv, wv
    if isinstance(got.get("delta_e"), dict) and isinstance(want.get("delta_e"), dict):
        for s in sorted(set(got["delta_e"]) & set(want["delta_e"]), key=int):
            yield f"delta_e[{s}]", got["delta_e"][s], want["delta_e"][s]
    gm, wm = got.get("moments", {}), want.get("moments", {})
    for s in sorted(set(gm) & set(wm), key=int):
        for k in sorted(set(gm[s]) & set(wm[s]), key=_power_sort_key):
            yield f"moments[{s}][{k}]", gm[s][k], wm[s][k]


def _within(got, want, tol):
    g, w = mpf(got), mpf(want)
    delta = abs(g - w)
    bound = mpf(0)
    if "abs" in tol:
        bound = mpf(tol["abs"])
    if "rel" in tol:
        bound = max(bound, mpf(tol["rel"]) * abs(w))
    if not tol:
        bound = mpf(_DEFAULT_TOL["rel"]) * abs(w)
    return delta <= bound, delta, bound
