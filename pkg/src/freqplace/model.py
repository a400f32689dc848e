"""Domain types for frequency-aware placement.

Units are fixed throughout the package: lengths in millimetres, frequencies
in hertz, times in seconds, capacitances in farads.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

import numpy as np

GHZ = 1e9
MHZ = 1e6


class Kind(str, enum.Enum):
    QUBIT = "qubit"
    SEGMENT = "segment"


@dataclass(frozen=True)
class FrequencyBand:
    lo: float
    hi: float

    def __post_init__(self):
        if not (0 < self.lo < self.hi):
            raise ValueError(f"invalid band [{self.lo}, {self.hi}]")

    def contains(self, f: float, tol: float = 1e-6) -> bool:
        return self.lo - tol <= f <= self.hi + tol


@dataclass(frozen=True)
class Topology:
    """Undirected coupling graph over dense qubit ids.

    ``coords`` optionally maps each qubit to a (row, col) cell of a 2D grid
    drawing in which every edge joins neighbouring cells; it drives the
    manual-style baseline and the initial placement.
    """

    qubit_count: int
    edges: Tuple[Tuple[int, int], ...]
    name: str = "topology"
    coords: Optional[Tuple[Tuple[int, int], ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(a), int(b)) for a, b in self.edges))
        if self.coords is not None:
            object.__setattr__(self, "coords", tuple((int(r), int(c)) for r, c in self.coords))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def degree(self) -> List[int]:
        deg = [0] * self.qubit_count
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    def adjacency(self) -> List[List[int]]:
        adj: List[List[int]] = [[] for _ in range(self.qubit_count)]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj


def validate(topology: Topology) -> List[str]:
    """Return a list of human-readable invariant violations (empty if valid)."""
    problems = []
    n = topology.qubit_count
    if n < 0:
        problems.append(f"negative qubit count {n}")
    seen = set()
    for a, b in topology.edges:
        if a == b:
            problems.append(f"self-loop at {a}")
            continue
        for q in (a, b):
            if not 0 <= q < n:
                problems.append(f"qubit id {q} out of range [0, {n}) in edge ({a},{b})")
        key = (min(a, b), max(a, b))
        if key in seen:
            problems.append(f"duplicate edge ({a},{b})")
        seen.add(key)
    if topology.coords is not None:
        if len(topology.coords) != n:
            problems.append(f"coords length {len(topology.coords)} != qubit count {n}")
        elif len(set(topology.coords)) != n:
            problems.append("coords not distinct")
    return problems


@dataclass(frozen=True)
class Instance:
    id: int
    kind: Kind
    width: float
    height: float
    padding: float
    frequency: float
    resonator_id: Optional[int] = None
    segment_index: Optional[int] = None
    qubit_id: Optional[int] = None

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0 or self.padding < 0:
            raise ValueError(f"instance {self.id}: nonpositive geometry")
        if (self.kind is Kind.SEGMENT) != (self.resonator_id is not None):
            raise ValueError(f"instance {self.id}: segment kind requires a resonator id")

    @property
    def padded_width(self) -> float:
        return self.width + 2 * self.padding

    @property
    def padded_height(self) -> float:
        return self.height + 2 * self.padding

    @property
    def padded_area(self) -> float:
        return self.padded_width * self.padded_height

    @property
    def is_qubit(self) -> bool:
        return self.kind is Kind.QUBIT


@dataclass(frozen=True)
class Resonator:
    id: int
    endpoints: Tuple[int, int]
    frequency: float
    length: float
    segment_ids: Tuple[int, ...] = ()


@dataclass
class Placement:
    """Footprint-centre coordinates (mm), one row per instance id."""

    positions: np.ndarray
    region: Tuple[float, float, float, float]

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float).reshape(-1, 2)

    def copy(self) -> "Placement":
        return Placement(self.positions.copy(), tuple(self.region))

    @property
    def x(self) -> np.ndarray:
        return self.positions[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.positions[:, 1]


@dataclass(frozen=True)
class PlacerConfig:
    delta_c: float = 0.1 * GHZ
    target_density: float = 0.9
    lambda_density: Optional[float] = None
    lambda_freq: Optional[float] = None
    freq_weight: float = 0.1
    lambda_growth: float = 1.05
    gamma_wl: Optional[float] = None
    grid_dims: int = 64
    max_iters: int = 1000
    seed: int = 0
    segment_size: float = 0.3
    pad_qubit: float = 0.4
    pad_res: float = 0.1
    qubit_size: float = 0.4
    qubit_band: FrequencyBand = FrequencyBand(4.8 * GHZ, 5.2 * GHZ)
    res_band: FrequencyBand = FrequencyBand(6.0 * GHZ, 7.0 * GHZ)
    level_spacing: float = 1.0
    phase_velocity: float = 1.3e8
    stop_overflow: float = 0.07
    min_iters: int = 60
    use_freq: bool = True

    def __post_init__(self):
        if self.delta_c <= 0:
            raise ValueError("delta_c must be positive")
        if not 0 < self.target_density <= 1:
            raise ValueError("target_density must lie in (0, 1]")
        if self.lambda_growth <= 1:
            raise ValueError("lambda_growth must exceed 1")
        if self.grid_dims < 4:
            raise ValueError("grid_dims must be at least 4")
        if self.segment_size <= 0:
            raise ValueError("segment_size must be positive")
        if self.pad_qubit < 0 or self.pad_res < 0:
            raise ValueError("paddings must be nonnegative")

    def with_(self, **kw) -> "PlacerConfig":
        return replace(self, **kw)


# Names each formula in the package depends on, mapped to the field that
# carries it. Audited by tests so that no quantity is left implicit.
SYMBOLS: Dict[str, str] = {
    "omega_i": "Instance.frequency",
    "r_i": "Instance.resonator_id",
    "x_i": "Placement.positions[:, 0]",
    "y_i": "Placement.positions[:, 1]",
    "delta_c": "PlacerConfig.delta_c",
    "target_density": "PlacerConfig.target_density",
    "lambda": "PlacerConfig.lambda_density",
    "lambda_f": "PlacerConfig.lambda_freq",
    "gamma": "PlacerConfig.gamma_wl",
    "l_b": "PlacerConfig.segment_size",
    "d_q": "PlacerConfig.pad_qubit",
    "d_r": "PlacerConfig.pad_res",
    "v0": "PlacerConfig.phase_velocity",
    "C_1": "ErrorModel.cap_qubit",
    "C_2": "ErrorModel.cap_qubit",
    "C_p": "ErrorModel.cp_scale",
    "C_r": "ErrorModel.cap_res",
    "T1": "ErrorModel.t1",
    "T2": "ErrorModel.t2",
    "err_1q": "ErrorModel.err_1q",
    "err_2q": "ErrorModel.err_2q",
    "t": "ErrorModel.dur_idle_window",
}


@dataclass
class Design:
    """Everything produced by preprocessing: the placeable netlist."""

    topology: Topology
    instances: List[Instance]
    resonators: List[Resonator]
    nets: List["Net"]
    qubit_freqs: Dict[int, float] = field(default_factory=dict)
    resonator_freqs: Dict[int, float] = field(default_factory=dict)

    @property
    def qubit_ids(self) -> List[int]:
        return [inst.id for inst in self.instances if inst.is_qubit]

    @property
    def segment_ids(self) -> List[int]:
        return [inst.id for inst in self.instances if not inst.is_qubit]

    def qubit_instance(self, q: int) -> int:
        """Instance id of logical/physical qubit ``q`` (qubits come first)."""
        return q


@dataclass(frozen=True)
class Net:
    endpoints: Tuple[int, int]
    weight: float = 1.0

    def __post_init__(self):
        if self.endpoints[0] == self.endpoints[1]:
            raise ValueError("net endpoints must differ")
