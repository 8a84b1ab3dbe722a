# -*- coding: utf-8 -*-
"""
verify.py - Run an audit suite on a graph file.

Reads a GraphFile and an audit spec, runs each audit, writes one JSON
report and exits 0 when every audit passes, 1 when one fails with a
witness, and 2 on unreadable input or a violated precondition.

Audit spec:
    {"seed": 0, "audits": [{"kind": "girth", "minimum": 6}, ...]}

Usage:
    python verify.py <graph.txt> <audit.json> [options]

Examples:
    python verify.py c6.txt girth.json
    python verify.py lps_5_13.txt spectral.json -o lps.report.json --json
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
import traceback

from errors import ForgeError, ParameterError
from events import emit, fail, notes_to_warnings, say
from graph_io import checksum, read_graph, read_json, write_json
from graphs import DenseBipartiteGraph, parse_side
from spectral import bethe_hessian_pd, critical_t, density_inequality, incidence_transfer, lambda2, subgraph_density_check
from verification import (
    AuditReport,
    bicycle_report,
    biregularity_audit,
    expansion_audit,
    girth_report,
    path_count_audit,
    unique_neighbors,
)

AUDIT_KINDS = (
    "girth",
    "bicycle_free",
    "biregular",
    "spectral",
    "expansion",
    "unique_neighbors",
    "paths",
    "density",
    "bethe_hessian",
)


def parse_args() -> argparse.Namespace:
    """Parse command-line arguments."""
    parser = argparse.ArgumentParser(
        description="Verify girth, bicycle-freeness, spectra and expansion of a bipartite graph.",
        epilog="FORGE_WORKERS sets the thread count of subset scans.",
    )
    parser.add_argument("graph", help="GraphFile to audit")
    parser.add_argument("audit", help="Audit spec JSON")
    parser.add_argument(
        "-o", "--output", default="",
        help="Report path (default: <graph>.report.json)",
    )
    parser.add_argument("--seed", type=int, default=None, help="Override the audit spec's seed")
    parser.add_argument(
        "--json", action="store_true",
        help="Output JSON lines instead of text",
    )
    return parser.parse_args()

# ── Audits ─────────────────────────────────────────────────────────────────


def _take(spec: dict, *allowed: str) -> dict:
    extra = set(spec) - set(allowed) - {"kind"}
    if extra:
        raise ParameterError(f"{spec['kind']} audit: unknown fields {sorted(extra)}")
    return {k: spec[k] for k in allowed if k in spec}


def _sets(spec: dict) -> list[list[int]]:
    sets = spec.get("sets")
    if not sets or not all(isinstance(s, list) for s in sets):
        raise ParameterError(f"{spec['kind']} audit needs a nonempty list of vertex sets")
    return sets


def _spectral(G: DenseBipartiteGraph, spec: dict, seed: int) -> AuditReport:
    opts = _take(spec, "bound", "method", "tol", "transfer")
    started = time.perf_counter()
    kwargs = {k: opts[k] for k in ("bound", "method", "tol") if k in opts}
    result = lambda2(G, seed=seed, **kwargs)
    report = AuditReport(kind="spectral", graph=result.graph, checksum=None, params=opts,
                         passed=result.passed, value=result.lambda2, mode=result.method, notes=list(result.notes))
    report.sizes.append(result.to_dict())
    if opts.get("transfer"):
        transfer = incidence_transfer(G)
        report.sizes.append({"incidence_transfer": transfer})
        off = max(transfer["deviation"], transfer["pairing_deviation"] or 0.0)
        report.passed = report.passed and off <= 1e-5
    report.wall_time = time.perf_counter() - started
    return report


def _expansion(G: DenseBipartiteGraph, spec: dict, seed: int) -> AuditReport:
    opts = _take(spec, "side", "size_bound", "threshold_kind", "epsilon", "d", "d_prime", "delta", "g",
                 "bicycle_free_radius", "min_count", "budget", "samples", "exhaustive_limit", "mode")
    params = {k: opts.pop(k) for k in ("epsilon", "d", "d_prime", "delta", "g", "bicycle_free_radius", "min_count")
              if k in opts}
    if opts.pop("mode", None) == "sampled":
        opts["exhaustive_limit"] = 0
    return expansion_audit(G, params=params, seed=seed, **opts)


def _unique_neighbors(G: DenseBipartiteGraph, spec: dict, seed: int) -> AuditReport:
    """Either explicit sets, or every set up to max_size (sampled with mode="sampled")."""
    if "sets" not in spec:
        opts = _take(spec, "side", "max_size", "min_count", "mode", "samples", "budget")
        return _expansion(G, {
            "kind": "expansion",
            "threshold_kind": "unique-neighbor-count",
            "size_bound": opts.pop("max_size", 4),
            "min_count": opts.pop("min_count", 1),
            **opts,
        }, seed)
    opts = _take(spec, "side", "sets", "min_count")
    started = time.perf_counter()
    side = parse_side(opts.get("side", "left"))
    need = opts.get("min_count", 1)
    report = AuditReport(kind="unique_neighbors", graph=G.name, checksum=None,
                         params={"side": opts.get("side", "left"), "min_count": need})
    for S in _sets(spec):
        un = unique_neighbors(G, S, side)
        ok = len(un) >= need
        report.sizes.append({"set": S, "t": len(set(S)), "unique": len(un), "ratio": len(un) / max(len(set(S)), 1),
                             "passed": ok})
        if not ok and report.witness is None:
            report.witness = sorted(S)
        report.passed = report.passed and ok
    report.wall_time = time.perf_counter() - started
    return report


def _density(G: DenseBipartiteGraph, spec: dict, seed: int) -> AuditReport:
    opts = _take(spec, "sets", "c", "d", "epsilon", "gate_waived", "lambda2")
    if "epsilon" not in opts:
        raise ParameterError("density audit needs epsilon")
    started = time.perf_counter()
    lam = opts.get("lambda2")
    if lam is None:
        lam = lambda2(G, seed=seed).lambda2
    report = AuditReport(kind="density", graph=G.name, checksum=None,
                         params={k: v for k, v in opts.items() if k != "sets"} | {"lambda2": lam})
    for S in _sets(spec):
        check = subgraph_density_check(G, S, opts.get("c"), opts.get("d"), opts["epsilon"],
                                       lambda2_value=lam, gate_waived=bool(opts.get("gate_waived")))
        report.sizes.append(check.to_dict())
        if not check.passed and report.witness is None:
            report.witness = sorted(S)
        report.passed = report.passed and check.passed
    if opts.get("gate_waived"):
        report.notes.append("size gate waived; the bound is asserted outside its proven range")
    report.wall_time = time.perf_counter() - started
    return report


def _bethe_hessian(G: DenseBipartiteGraph, spec: dict, seed: int) -> AuditReport:
    """A positive definite Bethe-Hessian at t must come with (d1-1)(d2-1) <= 1/t^2."""
    opts = _take(spec, "sets", "t")
    ts = opts.get("t", [0.5])
    ts = ts if isinstance(ts, list) else [ts]
    if not all(0 < t < 1 for t in ts):
        raise ParameterError("bethe_hessian audit needs every t in (0, 1)")
    started = time.perf_counter()
    report = AuditReport(kind="bethe_hessian", graph=G.name, checksum=None, params={"t": ts})
    for S in _sets(spec):
        crit = critical_t(G, S)
        for t in ts:
            pd = bethe_hessian_pd(G, S, t)
            density = density_inequality(G, S, t)
            ok = not pd or density["holds"]
            report.sizes.append({"set": S, "t": t, "positive_definite": pd, "critical_t": crit, **density,
                                 "passed": ok})
            if not ok and report.witness is None:
                report.witness = sorted(S)
            report.passed = report.passed and ok
    report.wall_time = time.perf_counter() - started
    return report


def run_audit(G: DenseBipartiteGraph, spec: dict, seed: int = 0) -> AuditReport:
    """Run one audit spec ({"kind": ..., params}) against G.

    Raises:
        ParameterError: on an unknown kind or field.
        ForgeError: whatever the audit raises for violated preconditions.
    """
    if not isinstance(spec, dict) or spec.get("kind") not in AUDIT_KINDS:
        kind = spec.get("kind") if isinstance(spec, dict) else spec
        raise ParameterError(f"unknown audit kind {kind!r}; expected one of {', '.join(AUDIT_KINDS)}")
    kind = spec["kind"]
    if kind == "girth":
        report = girth_report(G, **_take(spec, "minimum"))
    elif kind == "bicycle_free":
        opts = _take(spec, "radius")
        if "radius" not in opts:
            raise ParameterError("bicycle_free audit needs radius")
        report = bicycle_report(G, opts["radius"])
    elif kind == "biregular":
        report = biregularity_audit(G, **_take(spec, "c", "d"))
    elif kind == "spectral":
        report = _spectral(G, spec, seed)
    elif kind == "expansion":
        report = _expansion(G, spec, seed)
    elif kind == "unique_neighbors":
        report = _unique_neighbors(G, spec, seed)
    elif kind == "paths":
        report = path_count_audit(G, **_take(spec, "variant", "g", "max_k", "limit"))
    elif kind == "density":
        report = _density(G, spec, seed)
    else:
        report = _bethe_hessian(G, spec, seed)
    if report.checksum is None:
        report.checksum = checksum(G)
    return report


def load_audit_spec(path: str) -> tuple[list[dict], int]:
    """(audits, seed) from a spec file; a bare audit object is a one-item suite."""
    try:
        raw = read_json(path)
    except (OSError, ValueError) as e:
        raise ParameterError(f"cannot read audit spec {path}: {e}") from e
    if isinstance(raw, dict) and "kind" in raw:
        raw = {"audits": [raw]}
    if not isinstance(raw, dict) or not isinstance(raw.get("audits"), list):
        raise ParameterError("audit spec must be an object with an 'audits' list")
    seed = raw.get("seed", 0)
    if not isinstance(seed, int):
        raise ParameterError(f"seed must be an integer, got {seed!r}")
    return raw["audits"], seed


def summarize(report: AuditReport) -> str:
    value = report.value
    if isinstance(value, float) and not math.isinf(value):
        value = f"{value:.6g}"
    verdict = "PASS" if report.passed else "FAIL"
    text = f"  [{verdict}] {report.kind:<28} value={value}  mode={report.mode}  ({report.wall_time:.2f}s)"
    if report.witness is not None:
        text += f"\n         witness: {report.witness}"
    return text


# ── Main ───────────────────────────────────────────────────────────────────


def main() -> None:
    """Main entry point."""
    try:
        sys.exit(_main_logic())
    except ForgeError as e:
        fail("--json" in sys.argv, str(e), error=type(e).__name__)
        sys.exit(2)
    except Exception as e:
        fail("--json" in sys.argv, f"Critical Error: {e}")
        traceback.print_exc()
        sys.exit(2)


def _main_logic() -> int:
    """Core logic, wrapped by main() for error handling. Returns the exit code."""
    args = parse_args()
    json_mode = args.json

    graph, _ = read_graph(args.graph)
    audits, seed = load_audit_spec(args.audit)
    if args.seed is not None:
        seed = args.seed
    output = args.output or os.path.splitext(args.graph)[0] + ".report.json"

    say(json_mode, f"Auditing {graph.name}: {graph.n_left}+{graph.n_right} vertices, {graph.n_edges} edges")
    reports = []
    for i, spec in enumerate(audits, 1):
        emit(json_mode, {"type": "progress", "current": i, "total": len(audits), "kind": spec.get("kind")})
        report = run_audit(graph, spec, seed)
        reports.append(report)
        emit(json_mode, {"type": "result", **report.to_dict()})
        if not json_mode:
            print(summarize(report), flush=True)
        notes_to_warnings(json_mode, report.notes, audit=report.kind)

    passed = all(r.passed for r in reports)
    exit_code = 0 if passed else 1
    write_json(output, {
        "graph": args.graph,
        "checksum": reports[0].checksum if reports else None,
        "seed": seed,
        "passed": passed,
        "exit_code": exit_code,
        "audits": [r.to_dict() for r in reports],
    })
    emit(json_mode, {"type": "summary", "total": len(reports), "passed": sum(r.passed for r in reports),
                     "failed": sum(not r.passed for r in reports), "report": output})
    if not json_mode:
        print(f"\n{sum(r.passed for r in reports)}/{len(reports)} audits passed. Report: {output}")
    return exit_code


if __name__ == "__main__":
    main()
