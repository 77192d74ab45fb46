"""Command-line entry point for reproducible batch workflows.

Every command writes a manifest.json capturing its resolved parameters and
the toolkit version; `npagraph rerun manifest.json --out DIR` re-executes the
recorded run and reproduces the data files byte for byte. Exit codes:
0 success, 2 input error, 3 compute error, 4 optimization incomplete.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from . import __version__
from .calibrate import (CalibrateOptions, CalibrationTarget, calibrate_composite,
                        calibrate_single, edd_distance, preset_brightkite,
                        preset_gowalla, select_u)
from .errors import (AllRhoInfeasible, EmptyGraph, EmptyInput, MalformedLine,
                     NpaGraphError, SolverFailure, ValidationError,
                     ZeroTotalWeight)
from .growth import (RngStream, grow_aer, grow_composite, grow_npa, measure_edd,
                     measure_vdd, write_edge_list)
from .models import (AerModelSpec, BaTreeSpec, CompositeSpec, NpaModelSpec,
                     dump_model, load_model, validate_model)
from .datasets import (id_map_csv, load_edge_list, smooth_vdd, summarize,
                       vdd_counts_csv)
from .solver import (SolverOptions, edd_from_csv, edd_to_csv, solve_arc_dd,
                     solve_vdd, symmetrize, vdd_from_csv, vdd_to_csv)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_COMPUTE = 3
EXIT_INCOMPLETE = 4


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _write_json(path: Path, payload: dict) -> None:
    _write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_manifest(out: Path, command: str, params: dict) -> None:
    _write_json(out / "manifest.json", {
        "manifest_version": 1,
        "tool_version": __version__,
        "command": command,
        "params": params,
    })


def _load_spec(path: str):
    return validate_model(load_model(Path(path).read_text()))


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

def cmd_solve(params: dict) -> int:
    out = Path(params["out"])
    spec = _load_spec(params["spec"])
    if isinstance(spec, BaTreeSpec):
        spec = spec.to_npa()
    if not isinstance(spec, NpaModelSpec):
        print("solve expects a growth-model spec", file=sys.stderr)
        return EXIT_INPUT
    opts = SolverOptions(k_max=params["kmax"], u_max=params["umax"],
                         edd_variant=params["variant"])
    sol = solve_vdd(spec, opts)
    theta = symmetrize(solve_arc_dd(spec, sol, opts))
    _write(out / "vdd.csv", vdd_to_csv(sol.q))
    _write(out / "edd.csv", edd_to_csv(theta))
    _write_json(out / "solution.json", {
        "mean_weight": sol.mean_weight,
        "mean_degree": sol.mean_degree,
        "mean_increment": spec.increments.mean,
        "control_residual": sol.control_residual,
        "vdd_truncation_mass": sol.q.truncation_mass,
        "edd_truncation_mass": theta.truncation_mass,
        "recurrence_variant": params["variant"],
    })
    _write_manifest(out, "solve", params)
    return EXIT_OK


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------

def _generate_one(spec_text: str, n: int, seed: int, rep: int, u: int,
                  out_dir: str) -> dict:
    spec = load_model(spec_text)
    rng = RngStream(seed, rep)
    if isinstance(spec, CompositeSpec):
        spec = replace(spec, total_n=n) if spec.total_n != n else spec
        graph = grow_composite(spec, rng)
    elif isinstance(spec, AerModelSpec):
        graph = grow_aer(spec, rng)
    else:
        if isinstance(spec, BaTreeSpec):
            spec = spec.to_npa()
        graph = grow_npa(spec, n, rng).final_graph
    out = Path(out_dir)
    with open(out / f"graph_rep{rep}.txt", "w", newline="\n") as fh:
        write_edge_list(graph, fh)
    _write(out / f"vdd_rep{rep}.csv", vdd_to_csv(measure_vdd(graph)))
    _write(out / f"edd_rep{rep}.csv", edd_to_csv(measure_edd(graph, u)))
    return {"rep": rep, "vertices": graph.vertex_count, "edges": graph.edge_count}


def cmd_generate(params: dict) -> int:
    out = Path(params["out"])
    out.mkdir(parents=True, exist_ok=True)
    if params.get("preset"):
        spec = {"gowalla": preset_gowalla,
                "brightkite": preset_brightkite}[params["preset"]](params["n"])
    else:
        spec = _load_spec(params["spec"])
    spec_text = dump_model(spec)
    _write(out / "model.json", spec_text + "\n")
    reps = params["reps"]
    jobs = [(spec_text, params["n"], params["seed"], rep, params["u"], str(out))
            for rep in range(reps)]
    if params["threads"] > 1 and reps > 1:
        with ProcessPoolExecutor(max_workers=params["threads"]) as pool:
            infos = list(pool.map(_generate_one, *zip(*jobs)))
    else:
        infos = [_generate_one(*job) for job in jobs]
    _write_json(out / "runs.json", {"replications": infos})
    _write_manifest(out, "generate", params)
    return EXIT_OK


# ---------------------------------------------------------------------------
# ingest
# ---------------------------------------------------------------------------

def cmd_ingest(params: dict) -> int:
    out = Path(params["out"])
    graph, stats = load_edge_list(params["dataset"], return_stats=True)
    summary = summarize(graph)
    vdd = measure_vdd(graph)
    if params["smooth"] != "none":
        vdd = smooth_vdd(vdd, method=params["smooth"])
    max_deg = int(graph.degrees().max())
    edd = measure_edd(graph, min(max_deg, params["edd_extent"]))
    u = select_u(edd, params["u_mass"])
    _write(out / "vdd.csv", vdd_counts_csv(graph, vdd))
    _write(out / "edd.csv", edd_to_csv(edd))
    _write(out / "id_map.csv", id_map_csv(graph))
    _write_json(out / "summary.json", {
        **summary.to_dict(),
        "selected_u": u,
        "smoothing": params["smooth"],
        "self_loops_dropped": stats.self_loops_dropped,
        "duplicates_collapsed": stats.duplicates_collapsed,
        "max_degree": max_deg,
    })
    _write_manifest(out, "ingest", params)
    return EXIT_OK


# ---------------------------------------------------------------------------
# calibrate
# ---------------------------------------------------------------------------

def cmd_calibrate(params: dict) -> int:
    out = Path(params["out"])
    target_dir = Path(params["target"])
    vdd_path = target_dir / "vdd.csv"
    edd_path = target_dir / "edd.csv"
    summary_path = target_dir / "summary.json"
    if not vdd_path.exists() or not edd_path.exists():
        print(f"target directory {target_dir} lacks vdd.csv / edd.csv",
              file=sys.stderr)
        return EXIT_INPUT
    vdd = vdd_from_csv(vdd_path.read_text())
    edd = edd_from_csv(edd_path.read_text())
    meta = {}
    mean_inc = None
    if summary_path.exists():
        meta = json.loads(summary_path.read_text())
        mean_inc = meta.get("derived_m")
    u = params["u"] or meta.get("selected_u") or select_u(edd)
    u = min(u, edd.max_degree)
    target = CalibrationTarget(vdd=vdd, edd=edd, u=u, mean_increment=mean_inc,
                               source_meta=meta)
    opts = CalibrateOptions(r_max=params["rmax"],
                            rho_min=params["rho_min"],
                            rho_max=params["rho_max"],
                            rho_step=params["rho_step"])
    try:
        if params["mode"] == "single":
            result = calibrate_single(target, weight_mode=params["weights"],
                                      opts=opts)
        else:
            first = BaTreeSpec() if params["first"] == "ba-tree" else AerModelSpec(
                n1=int(round(0.35 * opts.total_n)), a=params["aer_a"])
            result = calibrate_composite(target, first, opts=opts)
    except AllRhoInfeasible as exc:
        _write_json(out / "report.json", {"error": str(exc)})
        _write_manifest(out, "calibrate", params)
        print(f"optimization incomplete: {exc}", file=sys.stderr)
        return EXIT_INCOMPLETE

    _write(out / "model.json", dump_model(result.model) + "\n")
    _write_json(out / "report.json", {
        "distance": result.distance,
        "vdd_tv_error": result.vdd_tv_error,
        "evaluations": result.iterations.evaluations,
        "stalled": result.iterations.stalled,
        "details": result.report,
    })
    comparison = _comparison_csv(result, target, opts)
    if comparison is not None:
        _write(out / "edd_compare.csv", comparison)
    _write_manifest(out, "calibrate", params)
    return EXIT_INCOMPLETE if result.iterations.stalled else EXIT_OK


def _comparison_csv(result, target: CalibrationTarget,
                    opts: CalibrateOptions) -> str | None:
    """Model vs target edge probabilities over the comparison window."""
    from .calibrate import component_profile
    from .solver import mix_edd
    model = result.model
    try:
        if isinstance(model, NpaModelSpec):
            sol = solve_vdd(model, opts.solver)
            theta = symmetrize(solve_arc_dd(
                model, sol, replace(opts.solver, u_max=target.u)))
        elif isinstance(model, CompositeSpec):
            parts = []
            for comp, rho in model.components:
                profile = component_profile(comp, target, opts)
                parts.append((profile.edd, profile.m, rho))
            m_mix = sum(m_i * rho for _, m_i, rho in parts)
            theta = mix_edd(parts, m_mix)
        else:
            return None
    except SolverFailure:
        return None  # comparison is a convenience output, never fatal
    g = max(1, theta.min_degree, target.edd.min_degree)
    lines = ["l,k,model,target"]
    a = theta.window(g, target.u)
    b = target.edd.window(g, target.u)
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            lines.append(f"{g + i},{g + j},{a[i, j]!r},{b[i, j]!r}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# compare
# ---------------------------------------------------------------------------

def cmd_compare(params: dict) -> int:
    out = Path(params["out"])
    a = edd_from_csv(Path(params["edd_a"]).read_text())
    b = edd_from_csv(Path(params["edd_b"]).read_text())
    g = params["g"] if params["g"] is not None else max(a.min_degree, b.min_degree)
    u = params["u"] if params["u"] is not None else min(a.max_degree, b.max_degree)
    distance = edd_distance(a, b, g, u)
    lines = ["l,k,difference"]
    diff = a.window(g, u) - b.window(g, u)
    for i in range(diff.shape[0]):
        for j in range(diff.shape[1]):
            lines.append(f"{g + i},{g + j},{diff[i, j]!r}")
    _write(out / "diff.csv", "\n".join(lines) + "\n")
    _write_json(out / "distance.json", {"distance": distance, "g": g, "u": u})
    _write_manifest(out, "compare", params)
    print(repr(distance))
    return EXIT_OK


# ---------------------------------------------------------------------------
# rerun
# ---------------------------------------------------------------------------

def cmd_rerun(params: dict) -> int:
    manifest = json.loads(Path(params["manifest"]).read_text())
    command = manifest["command"]
    inner = dict(manifest["params"])
    if params["out"]:
        inner["out"] = params["out"]
    return _DISPATCH[command](inner)


_DISPATCH = {
    "solve": cmd_solve,
    "generate": cmd_generate,
    "ingest": cmd_ingest,
    "calibrate": cmd_calibrate,
    "compare": cmd_compare,
}


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _add_out(parser: argparse.ArgumentParser) -> None:
    """Output directory; NPAGRAPH_OUT provides the default when set."""
    default = os.environ.get("NPAGRAPH_OUT")
    parser.add_argument("--out", default=default, required=default is None)
    parser.add_argument("-v", "--verbose", action="count", default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="npagraph",
        description="Growing-graph degree distributions: solve, simulate, "
                    "ingest, calibrate.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve analytic degree distributions")
    p.add_argument("spec", help="model spec JSON file")
    p.add_argument("--kmax", type=int, default=10000)
    p.add_argument("--umax", type=int, default=300)
    p.add_argument("--variant", default="printed",
                   choices=["printed", "mean-weight"])
    _add_out(p)

    p = sub.add_parser("generate", help="grow graphs by simulation")
    p.add_argument("spec", nargs="?", help="model spec JSON file")
    p.add_argument("--preset", choices=["gowalla", "brightkite"])
    p.add_argument("--n", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--u", type=int, default=300,
                   help="extent of the measured edge matrix")
    p.add_argument("--threads", type=int, default=1)
    _add_out(p)

    p = sub.add_parser("ingest", help="ingest a network edge list")
    p.add_argument("dataset", help="edge-list file (optionally .gz)")
    p.add_argument("--smooth", default="none",
                   choices=["none", "log-bin", "tail-powerlaw"])
    p.add_argument("--u-mass", dest="u_mass", type=float, default=0.95)
    p.add_argument("--edd-extent", dest="edd_extent", type=int, default=500)
    _add_out(p)

    p = sub.add_parser("calibrate", help="fit a model to an ingested target")
    p.add_argument("target", help="directory produced by ingest")
    p.add_argument("--mode", default="single", choices=["single", "composite"])
    p.add_argument("--first", default="ba-tree", choices=["ba-tree", "aer"])
    p.add_argument("--weights", default="linear", choices=["linear", "table-free"])
    p.add_argument("--u", type=int, default=None)
    p.add_argument("--rmax", type=int, default=50)
    p.add_argument("--rho-min", dest="rho_min", type=float, default=0.025)
    p.add_argument("--rho-max", dest="rho_max", type=float, default=0.975)
    p.add_argument("--rho-step", dest="rho_step", type=float, default=0.025)
    p.add_argument("--aer-a", dest="aer_a", type=float, default=2.75)
    _add_out(p)

    p = sub.add_parser("compare", help="distance between two edge matrices")
    p.add_argument("edd_a")
    p.add_argument("edd_b")
    p.add_argument("--g", type=int, default=None)
    p.add_argument("--u", type=int, default=None)
    _add_out(p)

    p = sub.add_parser("rerun", help="re-execute a recorded manifest")
    p.add_argument("manifest")
    p.add_argument("--out", default=None)
    p.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    command = args.pop("command")
    if args.pop("verbose", 0):
        logging.basicConfig(level=logging.INFO)
    if command == "generate" and not args.get("spec") and not args.get("preset"):
        print("generate needs a spec file or --preset", file=sys.stderr)
        return EXIT_INPUT
    handler = cmd_rerun if command == "rerun" else _DISPATCH[command]
    try:
        return handler(args)
    except (ValidationError, MalformedLine, EmptyInput, EmptyGraph,
            FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SolverFailure, ZeroTotalWeight) as exc:
        print(f"compute error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except AllRhoInfeasible as exc:
        print(f"optimization incomplete: {exc}", file=sys.stderr)
        return EXIT_INCOMPLETE
    except NpaGraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
