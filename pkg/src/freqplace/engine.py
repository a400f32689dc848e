"""Frequency-aware electrostatic global placement.

The objective is ``WL + lambda * D + lambda_f * F``: weighted-average
wirelength over the segment chains, the electrostatic energy of the padded
footprint density, and an inverse-square repulsion between near-resonant
instances of different resonators. It is minimised with Nesterov's method
while both multipliers grow geometrically.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import fft

from . import kernels
from .errors import Diverged, GridTooCoarse
from .model import Design, Instance, Net, Placement, PlacerConfig
from .topology import grid_embedding

logger = logging.getLogger(__name__)

DIST_FLOOR = 1e-3  # mm


@dataclass
class CollisionMap:
    partners: Dict[int, List[int]]

    def pairs(self) -> Tuple[np.ndarray, np.ndarray]:
        pi, pj = [], []
        for i in sorted(self.partners):
            for j in self.partners[i]:
                if i < j:
                    pi.append(i)
                    pj.append(j)
        return np.asarray(pi, dtype=np.int64), np.asarray(pj, dtype=np.int64)

    def __len__(self) -> int:
        return sum(len(v) for v in self.partners.values()) // 2

    @classmethod
    def empty(cls) -> "CollisionMap":
        return cls({})


def resonant(f1: float, f2: float, delta_c: float) -> bool:
    return abs(f1 - f2) <= delta_c * (1 + 1e-12)


def build_collision_map(instances: Sequence[Instance], delta_c: float) -> CollisionMap:
    freqs = np.array([inst.frequency for inst in instances])
    res = np.array([-1 if inst.resonator_id is None else inst.resonator_id for inst in instances])
    ids = [inst.id for inst in instances]
    partners: Dict[int, List[int]] = {i: [] for i in ids}
    order = np.argsort(freqs, kind="stable")
    sf = freqs[order]
    lim = delta_c * (1 + 1e-12)
    for a in range(len(order)):
        hi = np.searchsorted(sf, sf[a] + lim, side="right")
        for b in range(a + 1, hi):
            i, j = order[a], order[b]
            if res[i] >= 0 and res[i] == res[j]:
                continue
            partners[ids[i]].append(ids[j])
            partners[ids[j]].append(ids[i])
    for v in partners.values():
        v.sort()
    return CollisionMap(partners)


def freq_penalty(placement: Placement, collision_map: CollisionMap, eps: float = DIST_FLOOR):
    pi, pj = collision_map.pairs()
    pos = np.ascontiguousarray(placement.positions)
    return kernels.freq_repulsion(pos, pi, pj, eps)


class NetArrays:
    """CSR view of a net list for the wirelength kernel."""

    def __init__(self, nets: Sequence, n_instances: int):
        pins: List[int] = []
        ptr = [0]
        weights = []
        for net in nets:
            ends = net.endpoints if isinstance(net, Net) else net
            pins.extend(ends)
            ptr.append(len(pins))
            weights.append(getattr(net, "weight", 1.0))
        self.pins = np.asarray(pins, dtype=np.int64)
        self.ptr = np.asarray(ptr, dtype=np.int64)
        self.weights = np.asarray(weights, dtype=float)
        self.degree = np.bincount(self.pins, minlength=n_instances).astype(float)


def wirelength(placement: Placement, nets, gamma: float):
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    arrays = nets if isinstance(nets, NetArrays) else NetArrays(nets, len(placement.positions))
    pos = np.ascontiguousarray(placement.positions)
    return kernels.wa_wirelength(pos, arrays.pins, arrays.ptr, arrays.weights, gamma)


def hpwl(positions: np.ndarray, nets) -> float:
    arrays = nets if isinstance(nets, NetArrays) else NetArrays(nets, len(positions))
    total = 0.0
    for e in range(len(arrays.ptr) - 1):
        p = positions[arrays.pins[arrays.ptr[e]:arrays.ptr[e + 1]]]
        total += arrays.weights[e] * float(np.ptp(p[:, 0]) + np.ptp(p[:, 1]))
    return total


def poisson_eigenvalues(m: int, n: int, bw: float, bh: float) -> np.ndarray:
    """Eigenvalues of the negative 5-point Neumann Laplacian in the DCT-II basis."""
    lu = (2.0 - 2.0 * np.cos(np.pi * np.arange(m) / m)) / bw ** 2
    lv = (2.0 - 2.0 * np.cos(np.pi * np.arange(n) / n)) / bh ** 2
    return lu[:, None] + lv[None, :]


def solve_poisson(rho: np.ndarray, bw: float, bh: float) -> np.ndarray:
    """Zero-mean potential with ``-Laplacian(phi) = rho - mean(rho)``, reflecting edges."""
    m, n = rho.shape
    lam = poisson_eigenvalues(m, n, bw, bh)
    coef = fft.dctn(rho, type=2, norm="ortho")
    lam[0, 0] = 1.0
    coef = coef / lam
    coef[0, 0] = 0.0
    return fft.idctn(coef, type=2, norm="ortho")


def electric_field(phi: np.ndarray, bw: float, bh: float) -> np.ndarray:
    gx, gy = np.gradient(phi, bw, bh)
    return np.stack([-gx, -gy], axis=-1)


@dataclass
class BinGrid:
    dims: Tuple[int, int]
    bin_size: Tuple[float, float]
    origin: Tuple[float, float]
    density: Optional[np.ndarray] = None
    potential: Optional[np.ndarray] = None
    field: Optional[np.ndarray] = None

    @classmethod
    def over(cls, region, m: int, n: Optional[int] = None) -> "BinGrid":
        n = n or m
        xl, yl, xh, yh = region
        return cls((m, n), ((xh - xl) / m, (yh - yl) / n), (xl, yl))

    @property
    def bin_area(self) -> float:
        return self.bin_size[0] * self.bin_size[1]


def padded_sizes(instances: Sequence[Instance]) -> np.ndarray:
    return np.array([[i.padded_width, i.padded_height] for i in instances], dtype=float).reshape(-1, 2)


def density_penalty(placement: Placement, grid: BinGrid, target: float, sizes: np.ndarray):
    """Electrostatic energy ``0.5 * sum(rho * phi)`` of the padded-footprint density.

    Returns ``(energy, gradient, overflow)`` and fills ``grid`` with density,
    potential and field. ``overflow`` is the density mass above ``target``
    divided by the total footprint area.
    """
    (m, n), (bw, bh), (xl, yl) = grid.dims, grid.bin_size, grid.origin
    if len(sizes) and (sizes[:, 0].max() > m * bw or sizes[:, 1].max() > n * bh):
        raise GridTooCoarse("an instance is larger than the whole bin grid")
    pos = np.ascontiguousarray(placement.positions)
    sizes = np.ascontiguousarray(sizes)
    rho = kernels.density_map(pos, sizes, xl, yl, bw, bh, m, n)
    phi = solve_poisson(rho, bw, bh)
    energy = 0.5 * float(np.sum(rho * phi))
    grad = kernels.density_grad(pos, sizes, xl, yl, bw, bh, np.ascontiguousarray(phi))
    total_area = float(np.sum(sizes[:, 0] * sizes[:, 1])) if len(sizes) else 1.0
    over = float(np.sum(np.maximum(rho - target, 0.0))) * bw * bh / total_area
    grid.density, grid.potential, grid.field = rho, phi, electric_field(phi, bw, bh)
    return energy, grad, over


@dataclass
class OptState:
    lambda_density: float
    lambda_freq: float
    gamma: float
    iteration: int = 0
    overflow: float = 1.0


@dataclass
class GlobalResult:
    placement: Placement
    trace: List[Dict[str, float]]
    state: OptState
    converged: bool


TRACE_FIELDS = ("iteration", "wl", "d_energy", "f_total", "overflow", "lambda", "lambda_f")


def write_trace(trace: Sequence[Dict[str, float]], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_FIELDS)
        for row in trace:
            w.writerow([row["iteration"]] + [f"{row[k]:.9g}" for k in TRACE_FIELDS[1:]])


def legal_cell_area(design: Design, config: PlacerConfig) -> float:
    """Area the legaliser's site lattice needs for this design."""
    pitch = config.segment_size + 2 * config.pad_res
    k = math.ceil((config.qubit_size + 2 * config.pad_qubit) / pitch - 1e-9)
    nq = len(design.qubit_ids)
    ns = len(design.instances) - nq
    return nq * (k * pitch) ** 2 + ns * pitch ** 2


def placement_region(design: Design, config: PlacerConfig) -> Tuple[float, float, float, float]:
    side = math.sqrt(legal_cell_area(design, config) / config.target_density)
    return (-side / 2, -side / 2, side / 2, side / 2)


def initial_positions(design: Design, region, seed: int) -> np.ndarray:
    """Qubits on their grid drawing scaled into the region; segments strung
    along the line between their endpoint qubits, with seeded jitter."""
    rng = np.random.default_rng(seed)
    xl, yl, xh, yh = region
    topo = design.topology
    cells = np.array(grid_embedding(topo), dtype=float).reshape(-1, 2)
    pos = np.zeros((len(design.instances), 2))
    if len(cells):
        rows, cols = cells[:, 0], cells[:, 1]
        span_c = max(cols.max() - cols.min(), 1.0)
        span_r = max(rows.max() - rows.min(), 1.0)
        scale = 0.8 * min((xh - xl) / span_c, (yh - yl) / span_r)
        cx, cy = (xl + xh) / 2, (yl + yh) / 2
        pos[: topo.qubit_count, 0] = cx + (cols - (cols.max() + cols.min()) / 2) * scale
        pos[: topo.qubit_count, 1] = cy - (rows - (rows.max() + rows.min()) / 2) * scale
    for res in design.resonators:
        a, b = res.endpoints
        n = len(res.segment_ids)
        t = (np.arange(n) + 1.0) / (n + 1.0)
        pos[list(res.segment_ids)] = pos[a] + t[:, None] * (pos[b] - pos[a])
    jitter = 0.01 * (xh - xl)
    pos += rng.uniform(-jitter, jitter, size=pos.shape)
    return pos


def _clamp(pos, sizes, region):
    xl, yl, xh, yh = region
    lo = np.array([xl, yl]) + sizes / 2
    hi = np.array([xh, yh]) - sizes / 2
    return np.clip(pos, lo, np.maximum(lo, hi))


def global_place(
    design: Design,
    config: PlacerConfig,
    collision_map: Optional[CollisionMap] = None,
    region=None,
    init: Optional[np.ndarray] = None,
    trace_path=None,
) -> GlobalResult:
    instances = design.instances
    n_inst = len(instances)
    region = tuple(region or placement_region(design, config))
    xl, yl, xh, yh = region
    sizes = padded_sizes(instances)
    grid = BinGrid.over(region, config.grid_dims)
    nets = NetArrays(design.nets, n_inst)
    if collision_map is None:
        collision_map = build_collision_map(instances, config.delta_c) if config.use_freq else CollisionMap.empty()
    pi, pj = collision_map.pairs()
    use_freq = config.use_freq and len(pi) > 0

    pos = init.copy() if init is not None else initial_positions(design, region, config.seed)
    pos = _clamp(pos, sizes, region)
    if n_inst == 0:
        st = OptState(1.0, 1.0, 1.0)
        return GlobalResult(Placement(pos, region), [], st, True)

    gamma0 = config.gamma_wl or 0.01 * (xh - xl)
    areas = sizes[:, 0] * sizes[:, 1] / grid.bin_area

    def terms(p, gamma):
        wl, gwl = kernels.wa_wirelength(p, nets.pins, nets.ptr, nets.weights, gamma)
        d, gd, over = density_penalty(Placement(p, region), grid, config.target_density, sizes)
        if use_freq:
            f, gf = kernels.freq_repulsion(p, pi, pj, DIST_FLOOR)
        else:
            f, gf = 0.0, np.zeros_like(p)
        return wl, gwl, d, gd, f, gf, over

    wl, gwl, d, gd, f, gf, over0 = terms(pos, gamma0)
    norm_wl = float(np.abs(gwl).sum()) or 1.0
    lam = config.lambda_density or norm_wl / max(float(np.abs(gd).sum()), 1e-30)
    lam_f = 0.0
    if use_freq:
        lam_f = config.lambda_freq or config.freq_weight * norm_wl / max(float(np.abs(gf).sum()), 1e-30)
    state = OptState(lam, lam_f, gamma0, 0, over0)

    def gradient(p, st):
        wl, gwl, d, gd, f, gf, over = terms(p, st.gamma)
        g = gwl + st.lambda_density * gd + st.lambda_freq * gf
        precond = np.maximum(1.0, nets.degree + st.lambda_density * areas)
        obj = wl + st.lambda_density * d + st.lambda_freq * f
        return g / precond[:, None], obj, (wl, d, f, over)

    trace: List[Dict[str, float]] = []
    u = pos
    v = pos
    g_v, obj, parts = gradient(v, state)
    # bootstrap the Lipschitz estimate with a tiny probe step
    probe = _clamp(v - 0.1 * min(grid.bin_size) * g_v / (np.abs(g_v).max() + 1e-30), sizes, region)
    g_probe, _, _ = gradient(probe, state)
    v_prev, g_prev = probe, g_probe
    a = 1.0
    converged = False
    for it in range(config.max_iters):
        if not np.isfinite(obj):
            raise Diverged(f"objective became non-finite at iteration {it}")
        wl, d, f, over = parts
        state.iteration, state.overflow = it, over
        trace.append({"iteration": it, "wl": wl, "d_energy": d, "f_total": f, "overflow": over,
                      "lambda": state.lambda_density, "lambda_f": state.lambda_freq})
        if it >= config.min_iters and over < config.stop_overflow:
            converged = True
            break
        dv = np.linalg.norm(v - v_prev)
        dg = np.linalg.norm(g_v - g_prev)
        step = dv / dg if dg > 0 else 0.1 * min(grid.bin_size)
        step = min(step, 0.1 * (xh - xl))
        u_next = _clamp(v - step * g_v, sizes, region)
        a_next = (1 + math.sqrt(4 * a * a + 1)) / 2
        v_next = _clamp(u_next + (a - 1) / a_next * (u_next - u), sizes, region)
        v_prev, g_prev = v, g_v
        u, v, a = u_next, v_next, a_next
        state.lambda_density *= config.lambda_growth
        state.lambda_freq *= config.lambda_growth
        state.gamma = gamma0 * min(1.0, max(0.1, over / max(over0, 1e-12)))
        g_v, obj, parts = gradient(v, state)
    if trace_path is not None:
        write_trace(trace, trace_path)
    logger.info("global placement: %d iterations, overflow %.4f", len(trace), state.overflow)
    return GlobalResult(Placement(u, region), trace, state, converged)
