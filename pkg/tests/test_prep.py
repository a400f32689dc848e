import math

import pytest
from hypothesis import given, strategies as st

from freqplace import prep
from freqplace.errors import DegenerateResonator, MissingResonator
from freqplace.freqalloc import assign
from freqplace.model import GHZ, Instance, Kind, PlacerConfig, Resonator
from freqplace.topology import gen_grid, load_fixture


def test_resonator_length_anchor():
    assert prep.resonator_length(6.0 * GHZ) == pytest.approx(10.833, rel=1e-3)
    assert prep.resonator_length(7.0 * GHZ) == pytest.approx(9.286, rel=1e-3)
    with pytest.raises(ValueError):
        prep.resonator_length(0)


@given(st.floats(1.0, 20.0), st.floats(0.02, 0.3), st.floats(0.1, 0.5))
def test_segment_count_covers_reserved_area(length, d_r, l_b):
    n = prep.segment_count(length, d_r, l_b)
    assert n * l_b * l_b >= length * d_r - 1e-9
    assert (n - 1) * l_b * l_b < length * d_r + 1e-9


def test_segment_count_examples():
    assert prep.segment_count(10.0, 0.1, 0.3) == 12
    with pytest.raises(DegenerateResonator):
        prep.segment_count(10.0, 0.0, 0.3)


def test_partition_geometry():
    r = Resonator(3, (0, 1), 6.5 * GHZ, 10.0)
    segs = prep.partition(r, 0.1, 0.3, first_id=40)
    assert [s.id for s in segs] == list(range(40, 52))
    assert all(s.kind is Kind.SEGMENT and s.resonator_id == 3 and s.padded_width == pytest.approx(0.5)
               for s in segs)
    assert [s.segment_index for s in segs] == list(range(12))


def test_pad_replaces_padding():
    q = Instance(0, Kind.QUBIT, 0.4, 0.4, 0.0, 5 * GHZ)
    assert prep.pad(q, 0.4).padded_width == pytest.approx(1.2)
    with pytest.raises(ValueError):
        prep.pad(q, -0.1)


def test_build_design_ids_and_nets():
    t = gen_grid(2, 2)
    cfg = PlacerConfig()
    d = prep.build_design(t, assign(t, cfg.qubit_band, cfg.res_band, cfg.delta_c), cfg)
    assert [i.id for i in d.instances] == list(range(len(d.instances)))
    assert d.qubit_ids == [0, 1, 2, 3]
    for r in d.resonators:
        ids = list(r.segment_ids)
        assert ids == list(range(ids[0], ids[0] + len(ids)))
    # each resonator contributes a chain of n + 1 two-pin nets
    assert len(d.nets) == sum(len(r.segment_ids) + 1 for r in d.resonators)


def test_missing_resonator():
    t = gen_grid(1, 3)
    r = Resonator(0, (0, 1), 6 * GHZ, 10.0, (3,))
    with pytest.raises(MissingResonator):
        prep.build_nets(t, [r])


@pytest.mark.parametrize("l_b, expected", [(0.2, 744), (0.3, 354), (0.4, 218)])
def test_falcon_instance_counts_near_reported(l_b, expected):
    t = load_fixture("falcon-27")
    cfg = PlacerConfig(segment_size=l_b)
    d = prep.build_design(t, assign(t, cfg.qubit_band, cfg.res_band, cfg.delta_c), cfg)
    assert abs(len(d.instances) - expected) <= 0.1 * expected
