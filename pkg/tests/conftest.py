import functools

import numpy as np
import pytest

from freqplace.model import GHZ, Design, Instance, Kind, Net, Placement, PlacerConfig, Resonator, Topology
from freqplace.pipeline import run_pipeline
from freqplace.topology import resolve


@functools.lru_cache(maxsize=None)
def pipeline(topology: str, mode: str, seed: int = 7, segment_size: float = 0.3):
    """Cached end-to-end run shared by the slower test modules."""
    cfg = PlacerConfig(seed=seed, segment_size=segment_size)
    return run_pipeline(resolve(topology), cfg, mode)


def toy_design(rng, n_inst=10, region=(0.0, 0.0, 4.0, 4.0)):
    """Random mix of qubits and segments with chained nets and shared frequencies."""
    nq = max(2, n_inst // 3)
    insts = []
    for i in range(nq):
        insts.append(Instance(i, Kind.QUBIT, 0.4, 0.4, 0.4, float(rng.choice([5.0, 5.05, 5.3])) * GHZ, qubit_id=i))
    resonators = []
    rid = 0
    k = nq
    edges = []
    while k < n_inst:
        a, b = rng.choice(nq, size=2, replace=False)
        take = min(int(rng.integers(1, 4)), n_inst - k)
        f = float(rng.choice([6.0, 6.05, 6.4])) * GHZ
        ids = tuple(range(k, k + take))
        for s, i in enumerate(ids):
            insts.append(Instance(i, Kind.SEGMENT, 0.3, 0.3, 0.1, f, resonator_id=rid, segment_index=s))
        resonators.append(Resonator(rid, (int(a), int(b)), f, 10.0, ids))
        edges.append((int(a), int(b)))
        k += take
        rid += 1
    nets = []
    for r in resonators:
        chain = [r.endpoints[0], *r.segment_ids, r.endpoints[1]]
        nets.extend(Net((u, v)) for u, v in zip(chain, chain[1:]))
    topo = Topology(nq, tuple(edges), name="toy")
    design = Design(topo, insts, resonators, nets)
    xl, yl, xh, yh = region
    pos = np.column_stack([rng.uniform(xl + 0.7, xh - 0.7, n_inst), rng.uniform(yl + 0.7, yh - 0.7, n_inst)])
    return design, Placement(pos, region)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
