"""End-to-end placement for the three comparison modes."""
from __future__ import annotations

from typing import Optional, Tuple

from .engine import CollisionMap, build_collision_map, global_place, write_trace
from .freqalloc import assign
from .layout import LayoutFile, rounded
from .legalizer import emit_polylines, legalize, rilc
from .model import Design, Placement, PlacerConfig, Topology
from .physics import ErrorModel, MetricsReport, evaluate, human_baseline, tm110_warnings
from .prep import build_design

MODES = ("qplacer", "classic", "human")


def mode_config(config: PlacerConfig, mode: str) -> PlacerConfig:
    """Classic differs from qplacer only by switching the frequency term off."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    if mode == "classic":
        return config.with_(use_freq=False, lambda_freq=None)
    return config


def prepare(topology: Topology, config: PlacerConfig) -> Design:
    fa = assign(topology, config.qubit_band, config.res_band, config.delta_c,
                seed=config.seed, spacing=config.level_spacing)
    return build_design(topology, fa, config)


def run_pipeline(topology: Topology, config: PlacerConfig, mode: str = "qplacer",
                 trace_path=None, model: Optional[ErrorModel] = None,
                 human_spacing: str = "reserved") -> Tuple[LayoutFile, MetricsReport]:
    cfg = mode_config(config, mode)
    model = model or ErrorModel(delta_c=cfg.delta_c)
    design = prepare(topology, cfg)
    failed, integration = [], None
    if mode == "human":
        placement = human_baseline(design, cfg.qubit_size, cfg.pad_qubit, cfg.pad_res,
                                   cfg.segment_size, spacing=human_spacing)
        pitch = cfg.segment_size + 2 * cfg.pad_res
    else:
        cmap = build_collision_map(design.instances, cfg.delta_c)
        gp_map = cmap if cfg.use_freq else CollisionMap.empty()
        gp = global_place(design, cfg, collision_map=gp_map)
        if trace_path is not None:
            write_trace(gp.trace, trace_path)
        # classic mode legalises without the resonance check as well
        legal = legalize(gp.placement, design, cfg, cmap if cfg.use_freq else None,
                         raise_on_failure=False)
        placement = legal.placement
        failed = legal.report.failed
        integration = legal.report
        pitch = legal.grid.pitch
    placement = rounded(placement)
    ok = [r.id for r in design.resonators if r.id not in failed and rilc(r, placement, pitch)]
    polylines = emit_polylines(placement, design, pitch, ok)
    report = evaluate(design, placement, model=model)
    metrics = report.to_dict()
    metrics["tm110_warnings"] = tm110_warnings(placement, design.instances)
    if integration is not None:
        metrics["swaps"] = integration.swaps
        metrics["regrown_resonators"] = list(integration.regrown)
    layout = LayoutFile(mode, cfg, design, placement, polylines, metrics, sorted(failed),
                        integration=integration)
    return layout, report
