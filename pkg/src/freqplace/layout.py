"""Layout file: a JSON document with unit-suffixed field names.

Floats are written with 9 significant digits, so emit -> parse -> emit is
byte-stable and two identical runs give identical files.
"""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import ValidationError
from .model import Design, FrequencyBand, Instance, Kind, Placement, PlacerConfig, Resonator, Topology
from .prep import build_nets

VERSION = "freqplace-layout/1"
SIG_DIGITS = 9

# unit suffix for each PlacerConfig field in the config echo
_CONFIG_UNITS = {
    "delta_c": "_hz",
    "segment_size": "_mm",
    "pad_qubit": "_mm",
    "pad_res": "_mm",
    "qubit_size": "_mm",
    "phase_velocity": "_m_per_s",
    "gamma_wl": "_mm",
}


def _num(x):
    if x is None:
        return None
    return float(f"{float(x):.{SIG_DIGITS}g}")


def config_to_dict(config: PlacerConfig) -> Dict[str, object]:
    out = {}
    for f in dataclasses.fields(config):
        v = getattr(config, f.name)
        if isinstance(v, FrequencyBand):
            out[f.name] = {"lo_hz": _num(v.lo), "hi_hz": _num(v.hi)}
        elif isinstance(v, bool) or isinstance(v, int):
            out[f.name] = v
        else:
            out[f.name + _CONFIG_UNITS.get(f.name, "")] = _num(v)
    return out


def config_from_dict(d: Dict[str, object]) -> PlacerConfig:
    kw = {}
    for f in dataclasses.fields(PlacerConfig):
        key = f.name + _CONFIG_UNITS.get(f.name, "")
        if f.name in ("qubit_band", "res_band"):
            if f.name in d:
                kw[f.name] = FrequencyBand(d[f.name]["lo_hz"], d[f.name]["hi_hz"])
        elif key in d:
            kw[f.name] = d[key]
        elif f.name in d:
            kw[f.name] = d[f.name]
    return PlacerConfig(**kw)


@dataclass
class LayoutFile:
    mode: str
    config: PlacerConfig
    design: Design
    placement: Placement
    polylines: Dict[int, List[Tuple[float, float]]] = field(default_factory=dict)
    metrics: Dict[str, object] = field(default_factory=dict)
    failed_resonators: List[int] = field(default_factory=list)
    version: str = VERSION
    # legaliser bookkeeping from the run that produced this layout; not serialised
    integration: Optional[object] = field(default=None, compare=False, repr=False)

    @property
    def integrated(self) -> bool:
        return not self.failed_resonators

    def to_dict(self) -> dict:
        d, p = self.design, self.placement
        insts = []
        for inst in d.instances:
            x, y = p.positions[inst.id]
            insts.append({
                "id": inst.id,
                "kind": inst.kind.value,
                "x_mm": _num(x),
                "y_mm": _num(y),
                "w_mm": _num(inst.width),
                "h_mm": _num(inst.height),
                "padding_mm": _num(inst.padding),
                "freq_hz": _num(inst.frequency),
                "resonator_id": inst.resonator_id,
                "segment_index": inst.segment_index,
                "qubit_id": inst.qubit_id,
            })
        resonators = []
        for r in d.resonators:
            line = self.polylines.get(r.id)
            resonators.append({
                "id": r.id,
                "endpoints": list(r.endpoints),
                "freq_hz": _num(r.frequency),
                "length_mm": _num(r.length),
                "segment_ids": list(r.segment_ids),
                "polyline_mm": None if line is None else [[_num(a), _num(b)] for a, b in line],
            })
        topo = d.topology
        return {
            "version": self.version,
            "mode": self.mode,
            "config": config_to_dict(self.config),
            "topology": {
                "name": topo.name,
                "qubits": topo.qubit_count,
                "edges": [list(e) for e in topo.edges],
                "coords": None if topo.coords is None else [list(c) for c in topo.coords],
            },
            "frequencies": {
                "qubit_hz": [_num(d.qubit_freqs[q]) for q in range(topo.qubit_count)],
                "resonator_hz": [_num(d.resonator_freqs[r]) for r in range(len(d.resonators))],
            },
            "region_mm": [_num(v) for v in p.region],
            "instances": insts,
            "resonators": resonators,
            "failed_resonators": list(self.failed_resonators),
            "metrics": {k: (_num(v) if isinstance(v, float) else v) for k, v in self.metrics.items()},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=False) + "\n"

    def write(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def from_dict(cls, doc: dict) -> "LayoutFile":
        if doc.get("version") != VERSION:
            raise ValidationError(f"unsupported layout version {doc.get('version')!r}")
        t = doc["topology"]
        topo = Topology(t["qubits"], tuple(tuple(e) for e in t["edges"]), name=t["name"],
                        coords=None if t["coords"] is None else tuple(tuple(c) for c in t["coords"]))
        instances = []
        pos = np.zeros((len(doc["instances"]), 2))
        for k, rec in enumerate(doc["instances"]):
            if rec["id"] != k:
                raise ValidationError(f"instance ids must be dense; got {rec['id']} at {k}")
            instances.append(Instance(
                id=rec["id"], kind=Kind(rec["kind"]), width=rec["w_mm"], height=rec["h_mm"],
                padding=rec["padding_mm"], frequency=rec["freq_hz"], resonator_id=rec["resonator_id"],
                segment_index=rec["segment_index"], qubit_id=rec["qubit_id"]))
            pos[k] = (rec["x_mm"], rec["y_mm"])
        resonators, polylines = [], {}
        for rec in doc["resonators"]:
            for s in rec["segment_ids"]:
                if not 0 <= s < len(instances) or instances[s].resonator_id != rec["id"]:
                    raise ValidationError(f"resonator {rec['id']} lists unknown segment {s}")
            resonators.append(Resonator(rec["id"], tuple(rec["endpoints"]), rec["freq_hz"],
                                        rec["length_mm"], tuple(rec["segment_ids"])))
            if rec["polyline_mm"] is not None:
                polylines[rec["id"]] = [tuple(pt) for pt in rec["polyline_mm"]]
        f = doc["frequencies"]
        design = Design(topo, instances, resonators, build_nets(topo, resonators),
                        qubit_freqs=dict(enumerate(f["qubit_hz"])),
                        resonator_freqs=dict(enumerate(f["resonator_hz"])))
        return cls(
            mode=doc["mode"],
            config=config_from_dict(doc["config"]),
            design=design,
            placement=Placement(pos, tuple(doc["region_mm"])),
            polylines=polylines,
            metrics=dict(doc.get("metrics", {})),
            failed_resonators=list(doc.get("failed_resonators", [])),
            version=doc["version"],
        )

    @classmethod
    def loads(cls, text: str) -> "LayoutFile":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"layout is not valid JSON: {exc}") from None
        try:
            return cls.from_dict(doc)
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed layout: {exc!r}") from None

    @classmethod
    def read(cls, path) -> "LayoutFile":
        return cls.loads(Path(path).read_text())


def rounded(placement: Placement) -> Placement:
    """Placement with coordinates quantised exactly as the file stores them."""
    pos = np.vectorize(_num)(placement.positions) if placement.positions.size else placement.positions
    return Placement(pos, tuple(_num(v) for v in placement.region))
