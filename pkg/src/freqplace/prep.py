"""Placement preprocessing: padding, resonator sizing and partitioning, nets."""
from __future__ import annotations

import math
from dataclasses import replace
from typing import Dict, List, Sequence

from .errors import DegenerateResonator, MissingResonator
from .freqalloc import FrequencyAssignment
from .model import Design, Instance, Kind, Net, PlacerConfig, Resonator, Topology

__all__ = ["pad", "resonator_length", "partition", "build_nets", "build_design", "Net"]


def pad(instance: Instance, d: float) -> Instance:
    if d < 0:
        raise ValueError("padding must be nonnegative")
    return replace(instance, padding=d)


def resonator_length(freq: float, v0: float = 1.3e8) -> float:
    """Half-wave resonator length in mm for frequency ``freq`` (Hz)."""
    if freq <= 0:
        raise ValueError("frequency must be positive")
    return v0 / (2.0 * freq) * 1e3


def segment_count(length: float, d_r: float, l_b: float) -> int:
    area = length * d_r
    n = math.ceil(area / (l_b * l_b) - 1e-9) if area > 0 else 0
    if n <= 0:
        raise DegenerateResonator(f"resonator area {area} mm^2 yields no segments")
    return n


def partition(resonator: Resonator, d_r: float, l_b: float, first_id: int = 0) -> List[Instance]:
    """Split the reserved area ``L * d_r`` into square blocks of side ``l_b``."""
    if l_b <= 0:
        raise ValueError("segment size must be positive")
    n = segment_count(resonator.length, d_r, l_b)
    return [
        Instance(
            id=first_id + k,
            kind=Kind.SEGMENT,
            width=l_b,
            height=l_b,
            padding=d_r,
            frequency=resonator.frequency,
            resonator_id=resonator.id,
            segment_index=k,
        )
        for k in range(n)
    ]


def build_nets(topology: Topology, resonators: Sequence[Resonator]) -> List[Net]:
    """Chain each resonator's segments between its two endpoint qubits."""
    by_edge: Dict[tuple, Resonator] = {}
    for r in resonators:
        by_edge[tuple(sorted(r.endpoints))] = r
    nets = []
    for a, b in topology.edges:
        r = by_edge.get(tuple(sorted((a, b))))
        if r is None or not r.segment_ids:
            raise MissingResonator((a, b))
        qa, qb = r.endpoints
        chain = [qa, *r.segment_ids, qb]
        nets.extend(Net((u, v)) for u, v in zip(chain, chain[1:]))
    return nets


def build_design(topology: Topology, assignment: FrequencyAssignment, config: PlacerConfig) -> Design:
    """Qubit instances take ids 0..N-1; segments follow, grouped by resonator."""
    instances = [
        Instance(
            id=q,
            kind=Kind.QUBIT,
            width=config.qubit_size,
            height=config.qubit_size,
            padding=config.pad_qubit,
            frequency=assignment.qubit_freqs[q],
            qubit_id=q,
        )
        for q in range(topology.qubit_count)
    ]
    resonators = []
    next_id = topology.qubit_count
    for rid, (a, b) in enumerate(topology.edges):
        freq = assignment.resonator_freqs[rid]
        res = Resonator(rid, (a, b), freq, resonator_length(freq, config.phase_velocity))
        segs = partition(res, config.pad_res, config.segment_size, first_id=next_id)
        next_id += len(segs)
        instances.extend(segs)
        resonators.append(replace(res, segment_ids=tuple(s.id for s in segs)))
    nets = build_nets(topology, resonators)
    return Design(
        topology=topology,
        instances=instances,
        resonators=resonators,
        nets=nets,
        qubit_freqs=dict(assignment.qubit_freqs),
        resonator_freqs=dict(assignment.resonator_freqs),
    )
