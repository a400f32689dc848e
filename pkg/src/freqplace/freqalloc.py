"""Frequency allocation by greedy colouring of the two conflict graphs.

Qubits conflict when they share a coupling edge; resonators conflict when
they share an endpoint qubit. Each colour class is mapped to one discrete
frequency level, and distinct colours are kept more than ``delta_c`` apart.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from .errors import InsufficientSpectrum, ValidationError
from .model import FrequencyBand, Topology, validate


@dataclass
class FrequencyAssignment:
    qubit_freqs: Dict[int, float]
    resonator_freqs: Dict[int, float]
    levels_used: Dict[str, int] = field(default_factory=dict)
    # resonator id -> topology edge it realises
    resonator_edges: Dict[int, Tuple[int, int]] = field(default_factory=dict)


def discretize(band: FrequencyBand, delta_c: float, spacing: float = 1.0) -> List[float]:
    step = delta_c * spacing
    # tolerate float noise at the top of the band
    count = int(math.floor((band.hi - band.lo) / step + 1e-9)) + 1
    return [band.lo + k * step for k in range(count)]


def greedy_coloring(adj: Sequence[Sequence[int]]) -> List[int]:
    """Welsh-Powell: colour vertices by descending degree, ties by id."""
    order = sorted(range(len(adj)), key=lambda v: (-len(adj[v]), v))
    colors = [-1] * len(adj)
    for v in order:
        taken = {colors[u] for u in adj[v] if colors[u] >= 0}
        c = 0
        while c in taken:
            c += 1
        colors[v] = c
    return colors


def resonator_conflicts(topology: Topology) -> List[List[int]]:
    """Line graph of the topology: resonators (edges) sharing an endpoint."""
    by_qubit: List[List[int]] = [[] for _ in range(topology.qubit_count)]
    for r, (a, b) in enumerate(topology.edges):
        by_qubit[a].append(r)
        by_qubit[b].append(r)
    adj = [set() for _ in topology.edges]
    for rs in by_qubit:
        for r1 in rs:
            for r2 in rs:
                if r1 != r2:
                    adj[r1].add(r2)
    return [sorted(s) for s in adj]


def _level_order(n_levels: int, stride: int) -> List[int]:
    """Round-robin over levels visiting every ``stride``-th one first."""
    order = []
    for start in range(stride):
        order.extend(range(start, n_levels, stride))
    return order


def _map_colors(colors, levels, delta_c, band, spacing):
    # smallest index stride whose level gap strictly exceeds delta_c
    stride = int(math.floor(1.0 / spacing + 1e-12)) + 1
    available = len(range(0, len(levels), stride))
    needed = max(colors) + 1 if colors else 0
    if needed > available:
        raise InsufficientSpectrum(band, needed, available)
    order = _level_order(len(levels), stride)
    return [levels[order[c]] for c in colors], needed


def assign(
    topology: Topology,
    qubit_band: FrequencyBand,
    res_band: FrequencyBand,
    delta_c: float,
    seed: int = 0,
    spacing: float = 1.0,
) -> FrequencyAssignment:
    """Assign isolated frequencies to every qubit and every edge resonator.

    ``seed`` is accepted for reproducibility bookkeeping; vertex ids already
    break every ordering tie, so the result does not depend on it.
    """
    problems = validate(topology)
    if problems:
        raise ValidationError("; ".join(problems))
    q_adj = topology.adjacency()
    q_colors = greedy_coloring(q_adj)
    q_freqs, q_used = _map_colors(q_colors, discretize(qubit_band, delta_c, spacing), delta_c, qubit_band, spacing)

    r_adj = resonator_conflicts(topology)
    r_colors = greedy_coloring(r_adj)
    r_freqs, r_used = _map_colors(r_colors, discretize(res_band, delta_c, spacing), delta_c, res_band, spacing)

    return FrequencyAssignment(
        qubit_freqs={q: f for q, f in enumerate(q_freqs)},
        resonator_freqs={r: f for r, f in enumerate(r_freqs)},
        levels_used={"qubit": q_used, "resonator": r_used},
        resonator_edges={r: e for r, e in enumerate(topology.edges)},
    )


def audit(topology: Topology, assignment: FrequencyAssignment, delta_c: float) -> List[str]:
    """Exhaustive scan for conflicting pairs detuned by no more than delta_c."""
    bad = []
    qf = assignment.qubit_freqs
    for a, b in topology.edges:
        if abs(qf[a] - qf[b]) <= delta_c:
            bad.append(f"qubits {a},{b} detuned by {abs(qf[a] - qf[b]):.6g} Hz")
    rf = assignment.resonator_freqs
    adj = resonator_conflicts(topology)
    for r1, nbrs in enumerate(adj):
        for r2 in nbrs:
            if r1 < r2 and abs(rf[r1] - rf[r2]) <= delta_c:
                bad.append(f"resonators {r1},{r2} detuned by {abs(rf[r1] - rf[r2]):.6g} Hz")
    return bad
