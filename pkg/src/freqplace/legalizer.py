"""Integration-aware legalisation on a square site lattice.

The lattice pitch is one padded segment. A qubit occupies a ``k x k`` block
of cells whose side is the smallest multiple of the pitch covering its
padded footprint, and qubit blocks are aligned to multiples of ``k``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from .engine import CollisionMap, resonant
from .errors import IntegrationFailed, NoFeasibleSite, NotIntegrated
from .model import Design, Instance, Placement, PlacerConfig, Resonator

FREE = -1
NEIGHBOURS8 = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]
_WINDOW = 4  # coarse sites searched around each qubit by the assignment refinement
_BIG = 1e18
_REGROW_SEEDS = 400  # free cells tried as blob seeds, nearest first


@dataclass
class SiteGrid:
    pitch: float
    origin: Tuple[float, float]
    dims: Tuple[int, int]
    block: int
    occupancy: np.ndarray = field(default=None)
    cell_of: Dict[int, Tuple[int, int]] = field(default_factory=dict)

    def __post_init__(self):
        if self.occupancy is None:
            self.occupancy = np.full(self.dims, FREE, dtype=np.int64)

    @classmethod
    def for_design(cls, config: PlacerConfig, region, margin_frac: float = 0.25) -> "SiteGrid":
        pitch = config.segment_size + 2 * config.pad_res
        block = math.ceil((config.qubit_size + 2 * config.pad_qubit) / pitch - 1e-9)
        xl, yl, xh, yh = region
        margin = margin_frac * max(xh - xl, yh - yl) + block * pitch
        unit = block * pitch
        nx = block * math.ceil((xh - xl + 2 * margin) / unit)
        ny = block * math.ceil((yh - yl + 2 * margin) / unit)
        cx, cy = (xl + xh) / 2, (yl + yh) / 2
        return cls(pitch, (cx - nx * pitch / 2, cy - ny * pitch / 2), (nx, ny), block)

    @property
    def qubit_pitch(self) -> float:
        return self.block * self.pitch

    @property
    def coarse_dims(self) -> Tuple[int, int]:
        return self.dims[0] // self.block, self.dims[1] // self.block

    def center(self, i: int, j: int) -> Tuple[float, float]:
        return self.origin[0] + (i + 0.5) * self.pitch, self.origin[1] + (j + 0.5) * self.pitch

    def nearest_cell(self, x: float, y: float) -> Tuple[int, int]:
        i = int(math.floor((x - self.origin[0]) / self.pitch))
        j = int(math.floor((y - self.origin[1]) / self.pitch))
        return min(max(i, 0), self.dims[0] - 1), min(max(j, 0), self.dims[1] - 1)

    def site_center(self, si: int, sj: int) -> Tuple[float, float]:
        q = self.qubit_pitch
        return self.origin[0] + (si + 0.5) * q, self.origin[1] + (sj + 0.5) * q

    def nearest_site(self, x: float, y: float) -> Tuple[int, int]:
        q = self.qubit_pitch
        ci, cj = self.coarse_dims
        si = int(math.floor((x - self.origin[0]) / q))
        sj = int(math.floor((y - self.origin[1]) / q))
        return min(max(si, 0), ci - 1), min(max(sj, 0), cj - 1)

    def site_free(self, si: int, sj: int) -> bool:
        b = self.block
        return bool(np.all(self.occupancy[si * b:(si + 1) * b, sj * b:(sj + 1) * b] == FREE))

    def occupy_site(self, inst: int, si: int, sj: int) -> None:
        b = self.block
        self.occupancy[si * b:(si + 1) * b, sj * b:(sj + 1) * b] = inst

    def clear_site(self, si: int, sj: int) -> None:
        b = self.block
        self.occupancy[si * b:(si + 1) * b, sj * b:(sj + 1) * b] = FREE

    def put(self, inst: int, cell: Tuple[int, int]) -> None:
        self.occupancy[cell] = inst
        self.cell_of[inst] = cell

    def take(self, inst: int) -> Tuple[int, int]:
        cell = self.cell_of.pop(inst)
        self.occupancy[cell] = FREE
        return cell

    def inside(self, i: int, j: int) -> bool:
        return 0 <= i < self.dims[0] and 0 <= j < self.dims[1]


def _ring(ci: int, cj: int, r: int) -> Iterable[Tuple[int, int]]:
    if r == 0:
        yield ci, cj
        return
    for d in range(-r, r + 1):
        yield ci + d, cj - r
        yield ci + d, cj + r
    for d in range(-r + 1, r):
        yield ci - r, cj + d
        yield ci + r, cj + d


def _spiral_site(grid: SiteGrid, x: float, y: float, max_radius: int) -> Tuple[int, int]:
    ci, cj = grid.nearest_site(x, y)
    cdi, cdj = grid.coarse_dims
    best = None
    for r in range(max_radius + 1):
        if best is not None and (r - 1) * grid.qubit_pitch > best[0]:
            break
        for si, sj in _ring(ci, cj, r):
            if 0 <= si < cdi and 0 <= sj < cdj and grid.site_free(si, sj):
                sx, sy = grid.site_center(si, sj)
                d = math.hypot(sx - x, sy - y)
                key = (d, si, sj)
                if best is None or key < best:
                    best = key
    if best is None:
        raise NoFeasibleSite(f"no free qubit site within {max_radius} sites of ({x:.3f}, {y:.3f})")
    return best[1], best[2]


def legalize_qubits(placement: Placement, design: Design, grid: SiteGrid,
                    refine: bool = True, max_radius: Optional[int] = None) -> Placement:
    """Greedy spiral search, then windowed min-cost reassignment."""
    out = placement.copy()
    qubits = sorted(design.qubit_ids, key=lambda q: (-design.instances[q].padded_area, q))
    if not qubits:
        return out
    max_radius = max_radius or max(grid.coarse_dims)
    sites: Dict[int, Tuple[int, int]] = {}
    for q in qubits:
        x, y = placement.positions[q]
        s = _spiral_site(grid, x, y, max_radius)
        grid.occupy_site(q, *s)
        sites[q] = s
    if refine:
        sites = _refine_assignment(placement, grid, qubits, sites)
    for q in qubits:
        out.positions[q] = grid.site_center(*sites[q])
    return out


def _refine_assignment(placement, grid, qubits, sites):
    cdi, cdj = grid.coarse_dims
    cand: Set[Tuple[int, int]] = set(sites.values())
    for q in qubits:
        ci, cj = grid.nearest_site(*placement.positions[q])
        for si in range(ci - _WINDOW, ci + _WINDOW + 1):
            for sj in range(cj - _WINDOW, cj + _WINDOW + 1):
                if 0 <= si < cdi and 0 <= sj < cdj and (grid.site_free(si, sj) or (si, sj) in sites.values()):
                    cand.add((si, sj))
    cand_list = sorted(cand)
    centers = np.array([grid.site_center(*s) for s in cand_list])
    cost = np.full((len(qubits), len(cand_list)), _BIG)
    index = {s: k for k, s in enumerate(cand_list)}
    for row, q in enumerate(qubits):
        x, y = placement.positions[q]
        ci, cj = grid.nearest_site(x, y)
        d2 = (centers[:, 0] - x) ** 2 + (centers[:, 1] - y) ** 2
        for k, (si, sj) in enumerate(cand_list):
            if abs(si - ci) <= _WINDOW and abs(sj - cj) <= _WINDOW:
                cost[row, k] = d2[k]
        cost[row, index[sites[q]]] = d2[index[sites[q]]]
    rows, cols = linear_sum_assignment(cost)
    before = sum(cost[r, index[sites[qubits[r]]]] for r in range(len(qubits)))
    after = float(cost[rows, cols].sum())
    if after > before:
        return sites
    for q in qubits:
        grid.clear_site(*sites[q])
    new = {}
    for r, c in zip(rows, cols):
        q = qubits[r]
        new[q] = cand_list[c]
        grid.occupy_site(q, *cand_list[c])
    return new


def tetris_segments(placement: Placement, design: Design, grid: SiteGrid) -> Placement:
    """Left-to-right greedy packing of segments onto free cells."""
    out = placement.copy()
    segs = sorted(design.segment_ids, key=lambda i: (placement.positions[i, 0], placement.positions[i, 1], i))
    last_cell: Dict[int, Tuple[int, int]] = {}
    pitch = grid.pitch
    max_r = max(grid.dims)
    for s in segs:
        inst = design.instances[s]
        x, y = placement.positions[s]
        ci, cj = grid.nearest_cell(x, y)
        prev = last_cell.get(inst.resonator_id)
        best = None
        for r in range(max_r + 1):
            if best is not None and (r - 1) * pitch > best[0] + 1e-12:
                break
            for i, j in _ring(ci, cj, r):
                if not grid.inside(i, j) or grid.occupancy[i, j] != FREE:
                    continue
                cx, cy = grid.center(i, j)
                d = math.hypot(cx - x, cy - y)
                near_prev = 0 if prev is not None and max(abs(i - prev[0]), abs(j - prev[1])) <= 1 else 1
                key = (round(d, 9), near_prev, i, j)
                if best is None or key < best[1]:
                    best = (d, key, (i, j))
        if best is None:
            raise NoFeasibleSite(f"no free segment site for instance {s}")
        cell = best[2]
        grid.put(s, cell)
        last_cell[inst.resonator_id] = cell
        out.positions[s] = grid.center(*cell)
    return out


def _components(points: np.ndarray, ids: Sequence[int], reach: float) -> List[List[int]]:
    n = len(ids)
    seen = [False] * n
    comps = []
    for start in range(n):
        if seen[start]:
            continue
        seen[start] = True
        stack = [start]
        comp = []
        while stack:
            a = stack.pop()
            comp.append(ids[a])
            d = np.max(np.abs(points - points[a]), axis=1)
            for b in np.nonzero(d <= reach)[0]:
                if not seen[b]:
                    seen[b] = True
                    stack.append(int(b))
        comps.append(sorted(comp))
    comps.sort(key=lambda c: (-len(c), c[0]))
    return comps


def segment_clusters(resonator: Resonator, placement: Placement, pitch: float) -> List[List[int]]:
    """Connected clusters under 8-neighbourhood adjacency, largest first."""
    ids = list(resonator.segment_ids)
    pts = placement.positions[ids]
    return _components(pts, ids, pitch * (1 + 1e-6))


def rilc(resonator: Resonator, placement: Placement, pitch: float) -> bool:
    """True iff all segments of the resonator form one 8-connected cluster."""
    if len(resonator.segment_ids) <= 1:
        return True
    return len(segment_clusters(resonator, placement, pitch)) == 1


@dataclass
class IntegrationReport:
    rounds: int = 0
    swaps: int = 0
    regrown: List[int] = field(default_factory=list)
    failed: List[int] = field(default_factory=list)
    # (resonator id, cluster size before, cluster size after) per swap
    growth: List[Tuple[int, int, int]] = field(default_factory=list)


class _Integrator:
    def __init__(self, placement, design, grid, collision_map, delta_c):
        self.p = placement
        self.design = design
        self.grid = grid
        self.delta_c = delta_c
        self.partners = {i: set(v) for i, v in collision_map.partners.items()} if collision_map else {}

    def clusters(self, r: Resonator):
        ids = list(r.segment_ids)
        pts = np.array([self.grid.cell_of[i] for i in ids], dtype=float)
        return _components(pts, ids, 1.0)

    def resonant_neighbour(self, inst: int, cell, ignore=()) -> bool:
        """Would ``inst`` at ``cell`` touch a near-resonant instance of another resonator?"""
        i0, j0 = cell
        mine = self.design.instances[inst].resonator_id
        partners = self.partners.get(inst, ())
        for di, dj in NEIGHBOURS8:
            i, j = i0 + di, j0 + dj
            if not self.grid.inside(i, j):
                continue
            other = int(self.grid.occupancy[i, j])
            if other in (FREE, inst) or other in ignore:
                continue
            if self.design.instances[other].resonator_id == mine:
                continue
            if other in partners:
                return True
        return False

    def move(self, inst: int, cell) -> None:
        self.grid.take(inst)
        self.grid.put(inst, cell)
        self.p.positions[inst] = self.grid.center(*cell)


def integrate(placement: Placement, design: Design, grid: SiteGrid,
              collision_map: Optional[CollisionMap], delta_c: float,
              max_rounds: Optional[int] = None, regrow: bool = True,
              raise_on_failure: bool = True) -> Tuple[Placement, IntegrationReport]:
    """Grow each broken resonator's largest cluster by swapping its stray segments in."""
    out = placement.copy()
    worker = _Integrator(out, design, grid, collision_map, delta_c)
    report = IntegrationReport()
    resonators = design.resonators
    max_rounds = max_rounds if max_rounds is not None else 10 * max(1, len(resonators))
    fixed: Set[int] = set()
    for r in resonators:
        if len(worker.clusters(r)) == 1:
            fixed.add(r.id)
    owner = {s: inst.resonator_id for s, inst in enumerate(design.instances) if inst.resonator_id is not None}

    def largest_of(rid):
        return set(worker.clusters(resonators[rid])[0])

    for rnd in range(max_rounds):
        pending = [r for r in resonators if r.id not in fixed]
        if not pending:
            break
        report.rounds = rnd + 1
        progress = False
        for r in pending:
            grew = _grow(worker, r, fixed, owner, largest_of, report)
            progress = progress or grew
            if len(worker.clusters(r)) == 1:
                fixed.add(r.id)
        if not progress:
            break
    pending = [r for r in resonators if r.id not in fixed]
    if pending and regrow:
        for r in pending:
            if _regrow(worker, r, fixed):
                fixed.add(r.id)
                report.regrown.append(r.id)
    report.failed = sorted(r.id for r in resonators if r.id not in fixed)
    if report.failed and raise_on_failure:
        raise IntegrationFailed(report.failed, out)
    return out, report


def _grow(worker: _Integrator, r: Resonator, fixed, owner, largest_of, report) -> bool:
    grid = worker.grid
    grew = False
    while True:
        comps = worker.clusters(r)
        if len(comps) == 1:
            return grew
        main = comps[0]
        cells = np.array([grid.cell_of[s] for s in main], dtype=float)
        centroid = cells.mean(axis=0)
        strays = sorted((s for c in comps[1:] for s in c),
                        key=lambda s: (float(np.hypot(*(np.array(grid.cell_of[s]) - centroid))), s))
        main_set = set(main)
        frontier = set()
        for s in main:
            i0, j0 = grid.cell_of[s]
            for di, dj in NEIGHBOURS8:
                c = (i0 + di, j0 + dj)
                if grid.inside(*c):
                    frontier.add(c)
        options = []
        for c in frontier:
            occ = int(grid.occupancy[c])
            if occ == FREE:
                options.append((c, None))
            elif occ in owner and owner[occ] != r.id and owner[occ] not in fixed:
                if occ not in largest_of(owner[occ]):
                    options.append((c, occ))
        if not options:
            return grew
        best = None
        for rank, s in enumerate(strays):
            origin = grid.cell_of[s]
            for c, occ in options:
                if occ is not None and worker.resonant_neighbour(occ, origin, ignore=(s,)):
                    continue
                unclean = worker.resonant_neighbour(s, c, ignore=() if occ is None else (occ,))
                dist = float(np.hypot(c[0] - centroid[0], c[1] - centroid[1]))
                # clean landings first, then stray order, then closeness to the cluster
                key = (unclean, rank, dist, c[0], c[1])
                if best is None or key < best[0]:
                    best = (key, s, c, occ)
            if best is not None and not best[0][0]:
                break
        if best is None:
            return grew
        _, s, c, occ = best
        origin = grid.cell_of[s]
        before = len(main)
        if occ is None:
            worker.move(s, c)
        else:
            grid.take(occ)
            worker.move(s, c)
            grid.put(occ, origin)
            worker.p.positions[occ] = grid.center(*origin)
        after = len(worker.clusters(r)[0])
        report.swaps += 1
        report.growth.append((r.id, before, after))
        grew = True


def _regrow(worker: _Integrator, r: Resonator, fixed) -> bool:
    """Re-seat a resonator as one connected blob of free cells near its current centroid."""
    grid = worker.grid
    segs = list(r.segment_ids)
    cells = np.array([grid.cell_of[s] for s in segs], dtype=float)
    centroid = cells.mean(axis=0)
    for s in segs:
        grid.take(s)
    free = np.argwhere(grid.occupancy == FREE)
    order = np.argsort(np.hypot(free[:, 0] - centroid[0], free[:, 1] - centroid[1]), kind="stable")
    need = len(segs)
    unclean = lambda c: worker.resonant_neighbour(segs[0], c)
    best = None
    for k in order[:_REGROW_SEEDS]:
        seed = tuple(int(v) for v in free[k])
        blob = _flood(grid, seed, need, centroid, unclean)
        if blob is None:
            continue
        dirty = sum(unclean(c) for c in blob)
        spread = sum(math.hypot(c[0] - centroid[0], c[1] - centroid[1]) for c in blob)
        if best is None or (dirty, spread) < best[0]:
            best = ((dirty, spread), blob)
        if dirty == 0:
            break
    if best is not None:
        for s, c in zip(segs, best[1]):
            grid.put(s, c)
            worker.p.positions[s] = grid.center(*c)
        return True
    for s, c in zip(segs, cells.astype(int)):
        grid.put(s, (int(c[0]), int(c[1])))
    return False


def _flood(grid: SiteGrid, seed, need, centroid, unclean=lambda c: False):
    blob = [seed]
    seen = {seed}
    frontier = [seed]
    while frontier and len(blob) < need:
        nxt = []
        for i0, j0 in frontier:
            for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                c = (i0 + di, j0 + dj)
                if c in seen or not grid.inside(*c) or grid.occupancy[c] != FREE:
                    continue
                seen.add(c)
                nxt.append(c)
        nxt.sort(key=lambda c: (unclean(c), math.hypot(c[0] - centroid[0], c[1] - centroid[1]), c))
        for c in nxt:
            if len(blob) < need:
                blob.append(c)
        frontier = nxt
    return blob if len(blob) == need else None


def emit_polylines(placement: Placement, design: Design, pitch: float,
                   resonator_ids: Optional[Iterable[int]] = None) -> Dict[int, List[Tuple[float, float]]]:
    """Endpoint A, every segment centre once in nearest-neighbour order, endpoint B."""
    out = {}
    ids = resonator_ids if resonator_ids is not None else [r.id for r in design.resonators]
    for rid in ids:
        r = design.resonators[rid]
        if not rilc(r, placement, pitch):
            raise NotIntegrated(f"resonator {rid} is not contiguous")
        a, b = r.endpoints
        cur = placement.positions[a]
        remaining = list(r.segment_ids)
        path = [tuple(map(float, cur))]
        while remaining:
            d = [float(np.hypot(*(placement.positions[s] - cur))) for s in remaining]
            k = int(np.argmin(d))
            s = remaining.pop(k)
            cur = placement.positions[s]
            path.append(tuple(map(float, cur)))
        path.append(tuple(map(float, placement.positions[b])))
        out[rid] = path
    return out


@dataclass
class LegalResult:
    placement: Placement
    grid: SiteGrid
    report: IntegrationReport


def legalize(placement: Placement, design: Design, config: PlacerConfig,
             collision_map: Optional[CollisionMap], raise_on_failure: bool = True) -> LegalResult:
    grid = SiteGrid.for_design(config, placement.region)
    p = legalize_qubits(placement, design, grid)
    p = tetris_segments(p, design, grid)
    p, report = integrate(p, design, grid, collision_map, config.delta_c,
                          raise_on_failure=raise_on_failure)
    return LegalResult(p, grid, report)


def overlaps(placement: Placement, instances: Sequence[Instance], tol: float = 1e-9) -> List[Tuple[int, int]]:
    """Exhaustive audit: pairs whose padded footprints share positive area."""
    pos = placement.positions
    half = np.array([[i.padded_width / 2, i.padded_height / 2] for i in instances]).reshape(-1, 2)
    bad = []
    for i in range(len(instances)):
        ox = half[i, 0] + half[i + 1:, 0] - np.abs(pos[i + 1:, 0] - pos[i, 0])
        oy = half[i, 1] + half[i + 1:, 1] - np.abs(pos[i + 1:, 1] - pos[i, 1])
        for k in np.nonzero((ox > tol) & (oy > tol))[0]:
            bad.append((i, i + 1 + int(k)))
    return bad
