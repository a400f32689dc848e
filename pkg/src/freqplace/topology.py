"""Device topologies: generators for regular families and bundled edge lists."""
from __future__ import annotations

import os
from importlib import resources
from pathlib import Path
from typing import List, Optional, Tuple

from .errors import ParseError, ValidationError
from .model import Topology, validate

FIXTURE_ENV = "FREQPLACE_FIXTURES"
FIXTURES = ("falcon-27", "eagle-127", "xtree-53")


def gen_grid(m: int, n: int) -> Topology:
    if m < 1 or n < 1:
        raise ValueError("grid dimensions must be >= 1")
    edges = []
    for r in range(m):
        for c in range(n):
            q = r * n + c
            if c + 1 < n:
                edges.append((q, q + 1))
            if r + 1 < m:
                edges.append((q, q + n))
    coords = [(r, c) for r in range(m) for c in range(n)]
    return Topology(m * n, tuple(edges), name=f"grid-{m}x{n}", coords=tuple(coords))


# Octagon nodes walk the border of a 3x3 cell block clockwise from the top-left.
_OCTAGON_CELLS = ((0, 0), (0, 1), (0, 2), (1, 2), (2, 2), (2, 1), (2, 0), (1, 0))
# (east node of ring k, west node of ring k+1) bridge pairs.
_BRIDGES = ((2, 0), (4, 6))


def gen_octagon(rings: int, layout_cols: Optional[int] = None) -> Topology:
    """Rings of eight qubits joined by two bridges to the ring on their right."""
    if rings < 1:
        raise ValueError("rings must be >= 1")
    cols = layout_cols or rings
    edges: List[Tuple[int, int]] = []
    coords = []
    for k in range(rings):
        row, col = divmod(k, cols)
        base = 8 * k
        for j in range(8):
            edges.append((base + j, base + (j + 1) % 8))
            r, c = _OCTAGON_CELLS[j]
            coords.append((3 * row + r, 3 * col + c))
        if col + 1 < cols and k + 1 < rings:
            nxt = 8 * (k + 1)
            for east, west in _BRIDGES:
                edges.append((base + east, nxt + west))
    return Topology(8 * rings, tuple(edges), name=f"octagon-{8 * rings}", coords=tuple(coords))


def parse_edge_list(text: str, name: str = "edge-list") -> Topology:
    """Parse ``qubits N`` / ``a b`` lines; optional ``pos q row col`` lines."""
    n = None
    edges = []
    pos = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "qubits":
                if len(parts) != 2 or n is not None:
                    raise ValueError("bad header")
                n = int(parts[1])
            elif parts[0] == "name":
                name = parts[1]
            elif parts[0] == "pos":
                if len(parts) != 4:
                    raise ValueError("expected 'pos q row col'")
                pos[int(parts[1])] = (int(parts[2]), int(parts[3]))
            else:
                if n is None:
                    raise ValueError("edge before 'qubits N' header")
                if len(parts) != 2:
                    raise ValueError("expected 'a b'")
                edges.append((int(parts[0]), int(parts[1])))
        except ValueError as exc:
            raise ParseError(lineno, f"{exc}: {raw!r}") from None
    if n is None:
        raise ParseError(0, "missing 'qubits N' header")
    coords = tuple(pos[q] for q in range(n)) if len(pos) == n else None
    topo = Topology(n, tuple(edges), name=name, coords=coords)
    problems = validate(topo)
    if problems:
        raise ValidationError("; ".join(problems))
    return topo


def load_edge_list(path) -> Topology:
    path = Path(path)
    return parse_edge_list(path.read_text(), name=path.stem)


def fixture_path(name: str) -> Path:
    override = os.environ.get(FIXTURE_ENV)
    if override:
        return Path(override) / f"{name}.txt"
    return Path(str(resources.files("freqplace") / "fixtures" / f"{name}.txt"))


def load_fixture(name: str) -> Topology:
    return load_edge_list(fixture_path(name))


def resolve(spec: str) -> Topology:
    """Resolve CLI topology strings: ``grid:5x5``, ``octagon:5``, ``falcon-27`` or a path."""
    if spec.startswith("grid:"):
        m, n = spec[5:].lower().split("x")
        return gen_grid(int(m), int(n))
    if spec.startswith("octagon:"):
        args = spec[8:].split(",")
        return gen_octagon(int(args[0]), int(args[1]) if len(args) > 1 else None)
    if spec in FIXTURES or spec.startswith("fixture:"):
        return load_fixture(spec.removeprefix("fixture:"))
    return load_edge_list(spec)


def spectral_order(topology: Topology) -> List[Tuple[int, int]]:
    """Place qubits on a near-square grid by sorting a 2D spectral embedding.

    Rows are filled by the Fiedler vector, columns within a row by the next
    Laplacian eigenvector; ties fall back to qubit id.
    """
    import numpy as np

    n = topology.qubit_count
    if n == 0:
        return []
    lap = np.zeros((n, n))
    for a, b in topology.edges:
        lap[a, b] -= 1
        lap[b, a] -= 1
        lap[a, a] += 1
        lap[b, b] += 1
    _, vecs = np.linalg.eigh(lap)
    v1 = vecs[:, 1] if n > 1 else np.zeros(n)
    v2 = vecs[:, 2] if n > 2 else np.zeros(n)
    # eigenvector sign is arbitrary; pin it for reproducibility
    for v in (v1, v2):
        k = int(np.argmax(np.abs(v))) if len(v) else 0
        if len(v) and v[k] < 0:
            v *= -1
    cols = int(np.ceil(np.sqrt(n)))
    order = sorted(range(n), key=lambda q: (round(v1[q], 9), q))
    cells = [None] * n
    for r in range(0, n, cols):
        row = sorted(order[r:r + cols], key=lambda q: (round(v2[q], 9), q))
        for c, q in enumerate(row):
            cells[q] = (r // cols, c)
    return cells


def grid_embedding(topology: Topology) -> List[Tuple[int, int]]:
    if topology.coords is not None:
        return list(topology.coords)
    return spectral_order(topology)
