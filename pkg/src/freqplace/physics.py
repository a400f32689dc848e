"""Crosstalk physics and layout quality metrics.

Frequencies passed to the coupling helpers may be in any consistent unit;
``fidelity`` works in angular frequency (rad/s) internally so that
``sin^2(g_eff * t)`` is the transition probability of the exchange model.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import MappingInvalid, ValidationError
from .model import GHZ, MHZ, Design, Instance, Placement, Topology

LIGHT_SPEED = 299_792_458.0  # m/s
EPS_SILICON = 11.7
TOUCH_TOL = 1e-9  # mm; padded footprints closer than this are in contact
TWO_PI = 2.0 * math.pi


def fit_cp_model(cap: float, freq: float, near: Tuple[float, float], far: Tuple[float, float]):
    """Solve ``(c0, d0)`` of ``cp = c0/(d + d0)`` from two (distance, g) anchors.

    ``g`` is in the same units as ``freq``; both qubits share ``cap``.
    """
    def cp_for(g):
        r = 2.0 * g / freq  # = cp/(cap + cp) for identical qubits
        return r * cap / (1.0 - r)

    (d1, g1), (d2, g2) = near, far
    c1, c2 = cp_for(g1), cp_for(g2)
    d0 = (c2 * d2 - c1 * d1) / (c1 - c2)
    return c1 * (d1 + d0), d0


_CAP_QUBIT = 90e-15
_CP_SCALE, _CP_OFFSET = fit_cp_model(_CAP_QUBIT, 5 * GHZ, (0.4, 30 * MHZ), (1.2, 20 * MHZ))


@dataclass(frozen=True)
class ErrorModel:
    """Constants for the fidelity estimate. None of them are measured device values."""
    cap_qubit: float = _CAP_QUBIT              # F
    cap_res: float = 800e-15                   # F
    cp_scale: float = _CP_SCALE                # F*mm
    cp_offset: float = _CP_OFFSET              # mm
    res_cp_per_mm: float = 0.025e-15           # F per mm of shared padded edge
    # half the angular band-centre frequency, mirroring the qubit coupling form;
    # one 0.5 mm contact then couples at about 2*pi*50 kHz
    res_coupling_scale: float = math.pi * 6.5 * GHZ
    t1: float = 100e-6
    t2: float = 100e-6
    err_1q: float = 1e-3
    err_2q: float = 1e-2
    dur_1q: float = 35e-9
    dur_2q: float = 300e-9
    dur_idle_window: Optional[float] = None    # None: the program's serial span
    delta_c: float = 0.1 * GHZ                 # Hz

    def __post_init__(self):
        positive = ("cap_qubit", "cap_res", "cp_scale", "cp_offset", "res_cp_per_mm",
                    "res_coupling_scale", "t1", "t2", "dur_1q", "dur_2q", "delta_c")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive")
        for name in ("err_1q", "err_2q"):
            if not 0 <= getattr(self, name) <= 1:
                raise ValidationError(f"{name} must lie in [0, 1]")
        if self.t2 > 2 * self.t1:
            raise ValidationError("t2 must not exceed 2*t1")
        if self.dur_idle_window is not None and self.dur_idle_window < 0:
            raise ValidationError("dur_idle_window must be non-negative")


@dataclass(frozen=True)
class Gate:
    kind: str  # "G1" or "G2"
    qubits: Tuple[int, ...]
    duration: float


@dataclass(frozen=True)
class Program:
    logical_qubit_count: int
    gates: Tuple[Gate, ...]
    name: str = "program"

    def __post_init__(self):
        for g in self.gates:
            if g.kind not in ("G1", "G2"):
                raise ValidationError(f"unknown gate kind {g.kind!r}")
            if g.kind == "G2" and len(set(g.qubits)) != 2:
                raise ValidationError("two-qubit gates need two distinct qubits")
            if g.kind == "G1" and len(g.qubits) != 1:
                raise ValidationError("single-qubit gates act on one qubit")
            if any(q < 0 or q >= self.logical_qubit_count for q in g.qubits):
                raise ValidationError(f"gate qubit out of range: {g.qubits}")

    def span(self) -> float:
        return float(sum(g.duration for g in self.gates))

    def counts(self) -> Dict[int, Tuple[int, int]]:
        out = {q: [0, 0] for q in range(self.logical_qubit_count)}
        for g in self.gates:
            for q in g.qubits:
                out[q][0 if g.kind == "G1" else 1] += 1
        return {q: (a, b) for q, (a, b) in out.items()}


def bernstein_vazirani(n: int, model: ErrorModel = ErrorModel(), secret: Optional[int] = None) -> Program:
    """n data qubits plus one ancilla; all-ones secret unless given."""
    if n < 1:
        raise ValueError("n must be >= 1")
    secret = (1 << n) - 1 if secret is None else secret
    anc = n
    g1 = lambda q: Gate("G1", (q,), model.dur_1q)
    gates = [g1(anc)]  # X on the ancilla
    gates += [g1(q) for q in range(n + 1)]
    gates += [Gate("G2", (q, anc), model.dur_2q) for q in range(n) if secret >> q & 1]
    gates += [g1(q) for q in range(n)]
    return Program(n + 1, tuple(gates), name=f"bv-{n}")


def ising_chain(n: int, rounds: int = 1, model: ErrorModel = ErrorModel()) -> Program:
    """Transverse-field Ising steps on a line: ZZ on each bond (two CX) and an RX layer."""
    if n < 2:
        raise ValueError("n must be >= 2")
    gates = []
    for _ in range(rounds):
        for q in range(n - 1):
            gates += [Gate("G2", (q, q + 1), model.dur_2q), Gate("G1", (q + 1,), model.dur_1q),
                      Gate("G2", (q, q + 1), model.dur_2q)]
        gates += [Gate("G1", (q,), model.dur_1q) for q in range(n)]
    return Program(n, tuple(gates), name=f"ising-{n}")


def parse_program(spec: str, model: ErrorModel = ErrorModel()) -> Program:
    kind, _, arg = spec.partition(":")
    if kind == "bv":
        return bernstein_vazirani(int(arg), model)
    if kind == "ising":
        return ising_chain(int(arg), model=model)
    raise ValidationError(f"unknown program {spec!r}; expected bv:N or ising:N")


# couplings


def cp_of_distance(d: float, model: ErrorModel = ErrorModel()) -> float:
    if d <= 0:
        raise ValueError("distance must be positive")
    return model.cp_scale / (d + model.cp_offset)


def coupling_g(w1: float, w2: float, c1: float, c2: float, cp: float) -> float:
    return 0.5 * math.sqrt(w1 * w2) * cp / (math.sqrt(c1 + cp) * math.sqrt(c2 + cp))


def effective_coupling(g: float, delta: float, delta_c: float) -> float:
    delta = abs(delta)
    if delta <= delta_c * (1 + 1e-12):
        return g
    return g * g / delta


def crosstalk_error(g_eff: float, t: float) -> float:
    s = math.sin(g_eff * t)
    return min(max(s * s, 0.0), 1.0)


def resonator_coupling(cp: float, cr1: float, cr2: float, scale: float) -> float:
    if cr1 <= 0 or cr2 <= 0:
        raise ValueError("resonator capacitances must be positive")
    return scale * cp / math.sqrt(cr1 * cr2)


def _worst_case_error(g_eff: float, t: float) -> float:
    # past a quarter Rabi period the worst case over exposure windows is a full swap
    if g_eff * t >= math.pi / 2:
        return 1.0
    return crosstalk_error(g_eff, t)


# geometry


def _padded_boxes(placement: Placement, instances: Sequence[Instance]) -> np.ndarray:
    w = np.array([i.padded_width for i in instances])
    h = np.array([i.padded_height for i in instances])
    x, y = placement.positions[:, 0], placement.positions[:, 1]
    return np.stack([x - w / 2, y - h / 2, x + w / 2, y + h / 2], axis=1)


def _contact(boxes: np.ndarray, i: int, j: int) -> float:
    """Intersection length of two closed padded rectangles; -1 if they do not meet."""
    ox = min(boxes[i, 2], boxes[j, 2]) - max(boxes[i, 0], boxes[j, 0])
    oy = min(boxes[i, 3], boxes[j, 3]) - max(boxes[i, 1], boxes[j, 1])
    if ox < -TOUCH_TOL or oy < -TOUCH_TOL:
        return -1.0
    return max(ox, oy, 0.0)


def _chebyshev_gap(boxes, i, j) -> float:
    gx = max(boxes[i, 0], boxes[j, 0]) - min(boxes[i, 2], boxes[j, 2])
    gy = max(boxes[i, 1], boxes[j, 1]) - min(boxes[i, 3], boxes[j, 3])
    return max(gx, gy)


def _resonant_pairs(instances: Sequence[Instance], delta_c: float):
    from .engine import build_collision_map

    return build_collision_map(instances, delta_c).pairs()


@dataclass(frozen=True)
class Violation:
    pair: Tuple[int, int]
    distance: float   # centre distance, mm
    detuning: float   # Hz
    contact: float    # shared padded-edge length, mm


def spatial_violations(placement: Placement, instances: Sequence[Instance], delta_c: float,
                       radius_rule: float = 1e-6) -> List[Violation]:
    """Near-resonant foreign pairs whose padded footprints come within ``radius_rule``."""
    boxes = _padded_boxes(placement, instances)
    pi, pj = _resonant_pairs(instances, delta_c)
    out = []
    for i, j in zip(pi.tolist(), pj.tolist()):
        if _chebyshev_gap(boxes, i, j) <= radius_rule:
            d = float(np.hypot(*(placement.positions[i] - placement.positions[j])))
            out.append(Violation((i, j), d, abs(instances[i].frequency - instances[j].frequency),
                                 max(_contact(boxes, i, j), 0.0)))
    return out


def areas(placement: Placement, instances: Sequence[Instance]) -> Tuple[float, float, float]:
    if len(instances) == 0:
        return 0.0, 0.0, 0.0
    boxes = _padded_boxes(placement, instances)
    a_mer = float((boxes[:, 2].max() - boxes[:, 0].min()) * (boxes[:, 3].max() - boxes[:, 1].min()))
    a_poly = float(sum(i.padded_area for i in instances))
    return a_mer, a_poly, (a_poly / a_mer if a_mer > 0 else 0.0)


def hotspot_pairs(placement: Placement, instances: Sequence[Instance], delta_c: float):
    """(i, j, contact length, centre distance) for resonant foreign pairs in contact."""
    boxes = _padded_boxes(placement, instances)
    pi, pj = _resonant_pairs(instances, delta_c)
    if len(pi) == 0:
        return []
    # cheap vectorised prefilter before the exact per-pair contact test
    ox = np.minimum(boxes[pi, 2], boxes[pj, 2]) - np.maximum(boxes[pi, 0], boxes[pj, 0])
    oy = np.minimum(boxes[pi, 3], boxes[pj, 3]) - np.maximum(boxes[pi, 1], boxes[pj, 1])
    keep = np.nonzero((ox >= -TOUCH_TOL) & (oy >= -TOUCH_TOL))[0]
    out = []
    for k in keep.tolist():
        i, j = int(pi[k]), int(pj[k])
        length = _contact(boxes, i, j)
        if length > 0:
            d = float(np.hypot(*(placement.positions[i] - placement.positions[j])))
            out.append((i, j, length, d))
    return out


def hotspot_proportion(placement: Placement, instances: Sequence[Instance], delta_c: float,
                       resonators=None) -> Tuple[float, int]:
    pairs = hotspot_pairs(placement, instances, delta_c)
    _, a_poly, _ = areas(placement, instances)
    if a_poly == 0:
        return 0.0, 0
    p_h = sum(length * d for _, _, length, d in pairs) / a_poly
    impacted = set()
    endpoints = {r.id: r.endpoints for r in resonators} if resonators is not None else {}
    for i, j, _, _ in pairs:
        for k in (i, j):
            inst = instances[k]
            if inst.is_qubit:
                impacted.add(inst.qubit_id if inst.qubit_id is not None else k)
            elif inst.resonator_id in endpoints:
                impacted.update(endpoints[inst.resonator_id])
    return float(p_h), len(impacted)


# fidelity


@dataclass
class MetricsReport:
    fidelity: Optional[float]
    a_mer: float
    a_poly: float
    utilization: float
    p_h: float
    impacted_qubits: int
    violations: List[Violation] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "fidelity": self.fidelity,
            "a_mer_mm2": self.a_mer,
            "a_poly_mm2": self.a_poly,
            "utilization": self.utilization,
            "p_h": self.p_h,
            "impacted_qubits": self.impacted_qubits,
            "violation_count": len(self.violations),
        }


def _qubit_error(n1: int, n2: int, t_q: float, model: ErrorModel) -> float:
    survive = (1 - model.err_1q) ** n1 * (1 - model.err_2q) ** n2
    survive *= math.exp(-t_q / model.t1) * math.exp(-t_q / model.t2)
    return 1.0 - survive


def fidelity(program: Program, mapping: Sequence[int], design: Design, placement: Placement,
             model: ErrorModel = ErrorModel(), violations: Optional[List[Violation]] = None) -> float:
    """Worst-case product of qubit, qubit-pair and resonator-pair survival."""
    physical = list(mapping)
    n_phys = design.topology.qubit_count
    if len(physical) != program.logical_qubit_count or len(set(physical)) != len(physical):
        raise MappingInvalid("mapping must be injective and cover every logical qubit")
    if any(p < 0 or p >= n_phys for p in physical):
        raise MappingInvalid("mapping targets a qubit that is not placed")
    t_q = program.span()
    t_x = model.dur_idle_window if model.dur_idle_window is not None else t_q
    counts = program.counts()
    active = set(physical)
    f = 1.0
    for logical, phys in enumerate(physical):
        n1, n2 = counts[logical]
        f *= 1.0 - _qubit_error(n1, n2, t_q, model)
    if violations is None:
        violations = spatial_violations(placement, design.instances, model.delta_c)
    active_res = {r.id for r in design.resonators if set(r.endpoints) & active}
    insts = design.instances
    for v in violations:
        a, b = (insts[k] for k in v.pair)
        if a.is_qubit and b.is_qubit:
            if a.id not in active and b.id not in active:
                continue
            cp = cp_of_distance(max(v.distance, 1e-6), model)
            wa, wb = TWO_PI * a.frequency, TWO_PI * b.frequency
            g = coupling_g(wa, wb, model.cap_qubit, model.cap_qubit, cp)
        elif not a.is_qubit and not b.is_qubit:
            if a.resonator_id not in active_res and b.resonator_id not in active_res:
                continue
            cp = v.contact * model.res_cp_per_mm
            g = resonator_coupling(cp, model.cap_res, model.cap_res, model.res_coupling_scale)
        else:
            continue
        g_eff = effective_coupling(g, TWO_PI * (a.frequency - b.frequency), TWO_PI * model.delta_c)
        f *= 1.0 - _worst_case_error(g_eff, t_x)
    return min(max(f, 0.0), 1.0)


def random_mappings(program: Program, qubit_count: int, count: int, seed: int) -> List[List[int]]:
    rng = np.random.default_rng(seed)
    return [rng.choice(qubit_count, size=program.logical_qubit_count, replace=False).tolist()
            for _ in range(count)]


def evaluate(design: Design, placement: Placement, program: Optional[Program] = None,
             mapping: Optional[Sequence[int]] = None, model: ErrorModel = ErrorModel()) -> MetricsReport:
    a_mer, a_poly, util = areas(placement, design.instances)
    viol = spatial_violations(placement, design.instances, model.delta_c)
    p_h, impacted = hotspot_proportion(placement, design.instances, model.delta_c, design.resonators)
    fid = None
    if program is not None:
        mapping = list(range(program.logical_qubit_count)) if mapping is None else mapping
        fid = fidelity(program, mapping, design, placement, model, viol)
    return MetricsReport(fid, a_mer, a_poly, util, p_h, impacted, viol)


# human baseline


def human_spacing(length: float, d_r: float, l_q: float, d_q: float) -> float:
    """Inter-qubit gap from the resonator length and padded qubit size."""
    if d_r == 0:
        warnings.warn("d_r = 0 gives a zero human spacing", RuntimeWarning, stacklevel=2)
    return length * d_r / (l_q + 2 * d_q)


def reserved_spacing(segments: int, l_b: float, d_r: float, l_q: float, d_q: float) -> float:
    """Gap wide enough to hold ``segments`` padded segments in a strip beside the qubit."""
    pitch = l_b + 2 * d_r
    rows = max(1, int(math.floor((l_q + 2 * d_q) / pitch + 1e-9)))
    return math.ceil(segments / rows) * pitch


def human_baseline(design: Design, l_q: float, d_q: float, d_r: float, l_b: float,
                   spacing: str = "reserved") -> Placement:
    """Qubits on a square grid, each resonator laid as a straight strip along its edge.

    ``spacing="formula"`` uses the length-based gap; ``"reserved"`` sizes the gap
    so the strip physically holds the resonator's padded segments.
    """
    from .topology import grid_embedding

    topo = design.topology
    cells = grid_embedding(topo)
    if spacing == "formula":
        gap = max((human_spacing(r.length, d_r, l_q, d_q) for r in design.resonators), default=0.0)
    elif spacing == "reserved":
        gap = max((reserved_spacing(len(r.segment_ids), l_b, d_r, l_q, d_q) for r in design.resonators),
                  default=0.0)
    else:
        raise ValueError(f"unknown spacing {spacing!r}")
    pq = l_q + 2 * d_q
    pitch = pq + gap
    pos = np.zeros((len(design.instances), 2))
    for q in range(topo.qubit_count):
        r, c = cells[q]
        pos[q] = (c * pitch, -r * pitch)
    seg_pitch = l_b + 2 * d_r
    rows = max(1, int(math.floor(pq / seg_pitch + 1e-9)))
    for res in design.resonators:
        a, b = res.endpoints
        pa, pb = pos[a], pos[b]
        d = pb - pa
        axis = int(abs(d[1]) > abs(d[0]))
        if cells_adjacent(cells[a], cells[b]):
            lo, hi = (pa, pb) if d[axis] > 0 else (pb, pa)
            start = lo[axis] + pq / 2
            across0 = lo[1 - axis] - pq / 2
            for k, s in enumerate(res.segment_ids):
                col, row = divmod(k, rows)
                p = np.zeros(2)
                p[axis] = start + (col + 0.5) * seg_pitch
                p[1 - axis] = across0 + (row + 0.5) * seg_pitch
                pos[s] = p
        else:
            # no straight run exists: spread the segments along the connecting line
            n = len(res.segment_ids)
            for k, s in enumerate(res.segment_ids):
                pos[s] = pa + d * (k + 1) / (n + 1)
    pad = pq
    lo = pos.min(axis=0) - pad
    hi = pos.max(axis=0) + pad
    return Placement(pos, (float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1])))


def cells_adjacent(a, b) -> bool:
    return abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1


def tm110(a: float, b: float, eps_r: float = EPS_SILICON) -> float:
    """First substrate box mode of an ``a`` x ``b`` mm chip, in Hz."""
    if a <= 0 or b <= 0 or eps_r <= 0:
        raise ValueError("dimensions and permittivity must be positive")
    a_m, b_m = a * 1e-3, b * 1e-3
    return LIGHT_SPEED / (2 * math.sqrt(eps_r)) * math.sqrt(1 / a_m ** 2 + 1 / b_m ** 2)


def tm110_warnings(placement: Placement, instances: Sequence[Instance], eps_r: float = EPS_SILICON) -> List[str]:
    if not instances:
        return []
    boxes = _padded_boxes(placement, instances)
    a = float(boxes[:, 2].max() - boxes[:, 0].min())
    b = float(boxes[:, 3].max() - boxes[:, 1].min())
    limit = tm110(a, b, eps_r)
    top = max(i.frequency for i in instances)
    if top >= limit:
        return [f"component frequency {top / GHZ:.3f} GHz reaches the substrate TM110 mode "
                f"{limit / GHZ:.3f} GHz of the {a:.2f} x {b:.2f} mm enclosure"]
    return []
