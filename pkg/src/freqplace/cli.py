"""Command line entry point: ``freqplace place|eval|render|gen``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import topology as topo_mod
from .errors import IntegrationFailed, PlacementError, ValidationError
from .layout import LayoutFile
from .model import GHZ, PlacerConfig
from .physics import ErrorModel, fidelity, parse_program, random_mappings, spatial_violations
from .pipeline import MODES, run_pipeline
from .render import render_svg

EXIT_OK, EXIT_INVALID, EXIT_INTEGRATION = 0, 2, 3

# flag -> (PlacerConfig field, type, multiplier to internal units)
_CONFIG_FLAGS = {
    "--lb": ("segment_size", float, 1.0),
    "--delta-c": ("delta_c", float, GHZ),
    "--target-density": ("target_density", float, 1.0),
    "--lambda-density": ("lambda_density", float, 1.0),
    "--lambda-freq": ("lambda_freq", float, 1.0),
    "--freq-weight": ("freq_weight", float, 1.0),
    "--lambda-growth": ("lambda_growth", float, 1.0),
    "--gamma": ("gamma_wl", float, 1.0),
    "--grid-dims": ("grid_dims", int, 1),
    "--max-iters": ("max_iters", int, 1),
    "--min-iters": ("min_iters", int, 1),
    "--stop-overflow": ("stop_overflow", float, 1.0),
    "--pad-qubit": ("pad_qubit", float, 1.0),
    "--pad-res": ("pad_res", float, 1.0),
    "--qubit-size": ("qubit_size", float, 1.0),
    "--level-spacing": ("level_spacing", float, 1.0),
    "--phase-velocity": ("phase_velocity", float, 1.0),
}


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="freqplace", description="Frequency-aware superconducting chip placement")
    sub = ap.add_subparsers(dest="command", required=True)

    place = sub.add_parser("place", help="run the placement pipeline")
    src = place.add_mutually_exclusive_group(required=True)
    src.add_argument("--topology", help="grid:MxN, octagon:R[,COLS], fixture name or edge-list path")
    src.add_argument("--fixture", choices=topo_mod.FIXTURES, help="bundled topology")
    place.add_argument("--mode", choices=MODES, default="qplacer")
    place.add_argument("--seed", type=int, default=0)
    place.add_argument("--out", required=True, help="layout file (JSON)")
    place.add_argument("--trace", help="objective trace (CSV)")
    place.add_argument("--human-spacing", choices=("reserved", "formula"), default="reserved")
    for flag, (name, typ, _) in _CONFIG_FLAGS.items():
        place.add_argument(flag, dest=name, type=typ, default=None)

    ev = sub.add_parser("eval", help="fidelity and layout metrics for a layout file")
    ev.add_argument("--layout", required=True)
    ev.add_argument("--program", default="bv:4", help="bv:N or ising:N")
    ev.add_argument("--mappings", type=int, default=20)
    ev.add_argument("--seed", type=int, default=0)
    ev.add_argument("--out", help="report file (JSON); printed when omitted")

    rd = sub.add_parser("render", help="draw a layout file as SVG")
    rd.add_argument("--layout", required=True)
    rd.add_argument("--out", required=True)

    gen = sub.add_parser("gen", help="write a topology as an edge list")
    gen.add_argument("--topology", required=True)
    gen.add_argument("--out", required=True)
    return ap


def _config(args) -> PlacerConfig:
    kw = {"seed": args.seed}
    for name, _, scale in _CONFIG_FLAGS.values():
        v = getattr(args, name)
        if v is not None:
            kw[name] = v * scale
    try:
        return PlacerConfig(**kw)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None


def cmd_place(args) -> int:
    topology = topo_mod.load_fixture(args.fixture) if args.fixture else topo_mod.resolve(args.topology)
    config = _config(args)
    layout, report = run_pipeline(topology, config, args.mode, trace_path=args.trace,
                                  human_spacing=args.human_spacing)
    layout.write(args.out)
    print(f"{args.mode}: {len(layout.design.instances)} instances, P_h={report.p_h:.4g}, "
          f"a_mer={report.a_mer:.4g} mm^2, utilization={report.utilization:.3f}")
    for w in layout.metrics.get("tm110_warnings", []):
        print(f"warning: {w}", file=sys.stderr)
    if layout.failed_resonators:
        print(f"integration failed for resonators {layout.failed_resonators}", file=sys.stderr)
        return EXIT_INTEGRATION
    return EXIT_OK


def cmd_eval(args) -> int:
    layout = LayoutFile.read(args.layout)
    model = ErrorModel(delta_c=layout.config.delta_c)
    program = parse_program(args.program, model)
    d, p = layout.design, layout.placement
    viol = spatial_violations(p, d.instances, model.delta_c)
    maps = random_mappings(program, d.topology.qubit_count, args.mappings, args.seed)
    fids = [fidelity(program, m, d, p, model, viol) for m in maps]
    report = dict(layout.metrics)
    report.update({
        "program": program.name,
        "mappings": args.mappings,
        "seed": args.seed,
        "fidelity_mean": float(np.mean(fids)) if fids else None,
        "fidelity_geomean": float(np.exp(np.mean(np.log(np.maximum(fids, 1e-300))))) if fids else None,
        "fidelities": [float(f"{f:.9g}") for f in fids],
    })
    text = json.dumps(report, indent=1) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_INTEGRATION if layout.failed_resonators else EXIT_OK


def cmd_render(args) -> int:
    Path(args.out).write_text(render_svg(LayoutFile.read(args.layout)))
    return EXIT_OK


def cmd_gen(args) -> int:
    t = topo_mod.resolve(args.topology)
    lines = [f"name {t.name}", f"qubits {t.qubit_count}"] + [f"{a} {b}" for a, b in t.edges]
    if t.coords is not None:
        lines += [f"pos {q} {r} {c}" for q, (r, c) in enumerate(t.coords)]
    Path(args.out).write_text("\n".join(lines) + "\n")
    return EXIT_OK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    handler = {"place": cmd_place, "eval": cmd_eval, "render": cmd_render, "gen": cmd_gen}[args.command]
    try:
        return handler(args)
    except IntegrationFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    except (PlacementError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
