import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from freqplace import physics as P
from freqplace.errors import MappingInvalid, ValidationError
from freqplace.legalizer import overlaps
from freqplace.model import GHZ, MHZ, Design, Instance, Kind, Placement, PlacerConfig, Topology
from freqplace.pipeline import prepare
from freqplace.topology import gen_grid

from oracles import exchange_transition

M = P.ErrorModel()
TWO_PI = 2 * math.pi


def qubits(n, freq=5 * GHZ):
    return [Instance(i, Kind.QUBIT, 0.4, 0.4, 0.4, freq, qubit_id=i) for i in range(n)]


def test_cp_model_shape():
    assert P.cp_of_distance(0.2) > P.cp_of_distance(0.4)
    assert P.cp_of_distance(1e9) < 1e-20
    with pytest.raises(ValueError):
        P.cp_of_distance(0.0)


def test_cp_calibration_reproduces_anchor_couplings():
    w = TWO_PI * 5 * GHZ
    for d, g in ((0.4, 30 * MHZ), (1.2, 20 * MHZ)):
        got = P.coupling_g(w, w, M.cap_qubit, M.cap_qubit, P.cp_of_distance(d))
        assert got == pytest.approx(TWO_PI * g, rel=1e-9)
    assert M.cp_offset == pytest.approx(1.1807, abs=1e-3)
    assert M.cp_scale == pytest.approx(1.728e-15, rel=2e-3)


@given(st.floats(0.4, 1.2))
def test_calibrated_coupling_stays_in_band(d):
    w = TWO_PI * 5 * GHZ
    g = P.coupling_g(w, w, M.cap_qubit, M.cap_qubit, P.cp_of_distance(d)) / TWO_PI
    assert 20 * MHZ - 1 <= g <= 30 * MHZ + 1


@given(st.floats(1e9, 1e11), st.floats(1e9, 1e11), st.floats(1e-14, 1e-12), st.floats(1e-14, 1e-12),
       st.floats(0, 1e-14))
def test_coupling_symmetric_and_monotone(w1, w2, c1, c2, cp):
    g = P.coupling_g(w1, w2, c1, c2, cp)
    assert g == pytest.approx(P.coupling_g(w2, w1, c2, c1, cp))
    assert P.coupling_g(w1, w2, c1, c2, cp * 1.5 + 1e-18) > g


def test_coupling_reductions():
    assert P.coupling_g(5.0, 5.0, 1.0, 1.0, 0.0) == 0.0
    assert P.coupling_g(5.0, 5.0, 2.0, 2.0, 0.5) == pytest.approx(0.5 * 5.0 * 0.5 / 2.5)


def test_effective_coupling_branches():
    assert P.effective_coupling(30 * MHZ, 300 * MHZ, 100 * MHZ) == pytest.approx(3 * MHZ)
    assert P.effective_coupling(30 * MHZ, 0.0, 100 * MHZ) == 30 * MHZ
    assert P.effective_coupling(0.0, 300 * MHZ, 100 * MHZ) == 0.0
    assert P.effective_coupling(30 * MHZ, -300 * MHZ, 100 * MHZ) == pytest.approx(3 * MHZ)


@given(st.floats(0, 1e8))
def test_effective_coupling_jumps_upward_at_threshold(g):
    dc = 1e8
    assert P.effective_coupling(g, dc, dc) >= P.effective_coupling(g, dc * (1 + 1e-9), dc)


def test_crosstalk_error_examples():
    assert P.crosstalk_error(0.0, 1e-6) == 0.0
    assert P.crosstalk_error(math.pi / 2, 1.0) == pytest.approx(1.0)
    g, t = TWO_PI * 3e6, 1e-7
    assert P.crosstalk_error(g, t) == pytest.approx(math.sin(g * t) ** 2)
    assert P.crosstalk_error(g, t) == pytest.approx(exchange_transition(g, t), abs=1e-12)


def test_resonator_coupling_linear():
    assert P.resonator_coupling(0.0, 1e-12, 1e-12, 1e9) == 0.0
    g1 = P.resonator_coupling(1e-17, 8e-13, 8e-13, M.res_coupling_scale)
    assert P.resonator_coupling(2e-17, 8e-13, 8e-13, M.res_coupling_scale) == pytest.approx(2 * g1)
    with pytest.raises(ValueError):
        P.resonator_coupling(1e-17, 0.0, 1e-12, 1.0)


def test_adjacent_detuned_segments_are_harmless():
    # one full 0.5 mm contact with calibrated constants
    g = P.resonator_coupling(0.5 * M.res_cp_per_mm, M.cap_res, M.cap_res, M.res_coupling_scale)
    assert g / TWO_PI == pytest.approx(50.8e3, rel=0.01)
    t = P.bernstein_vazirani(4).span()
    near = P.crosstalk_error(P.effective_coupling(g, 0.0, TWO_PI * M.delta_c), t)
    far = P.crosstalk_error(P.effective_coupling(g, TWO_PI * 0.2 * GHZ, TWO_PI * M.delta_c), t)
    assert 0.05 < near < 0.5
    assert far < 1e-6


def test_spatial_violations_examples():
    insts = qubits(2)
    far = Placement(np.array([[0.0, 0.0], [3.0, 0.0]]), (0, 0, 1, 1))
    assert P.spatial_violations(far, insts, 0.1 * GHZ) == []
    close = Placement(np.array([[0.0, 0.0], [1.0, 0.0]]), (0, 0, 1, 1))
    v = P.spatial_violations(close, insts, 0.1 * GHZ)
    assert len(v) == 1 and v[0].pair == (0, 1) and v[0].distance == pytest.approx(1.0)
    assert P.spatial_violations(close, qubits(1) + [qubits(2, 5.3 * GHZ)[1]], 0.1 * GHZ) == []


def test_hotspot_hand_geometry():
    insts = qubits(2)
    p = Placement(np.array([[0.0, 0.0], [1.0, 0.0]]), (0, 0, 1, 1))
    p_h, impacted = P.hotspot_proportion(p, insts, 0.1 * GHZ)
    assert p_h == pytest.approx(1.2 * 1.0 / 2.88)
    assert impacted == 2


def test_hotspot_zero_when_detuned():
    insts = [qubits(1)[0], Instance(1, Kind.QUBIT, 0.4, 0.4, 0.4, 5.5 * GHZ, qubit_id=1)]
    p = Placement(np.array([[0.0, 0.0], [0.1, 0.0]]), (0, 0, 1, 1))
    assert P.hotspot_proportion(p, insts, 0.1 * GHZ) == (0.0, 0)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6)), min_size=2, max_size=10, unique=True),
       st.floats(0.0001, 0.5))
def test_hotspot_zero_for_disjoint_footprints(cells, gap):
    insts = qubits(len(cells))
    pos = np.array(cells, dtype=float) * (1.2 + gap)
    assert P.hotspot_proportion(Placement(pos, (0, 0, 1, 1)), insts, 0.1 * GHZ)[0] == 0.0


def test_impacted_qubits_propagate_through_resonators():
    d = prepare(gen_grid(1, 3), PlacerConfig())
    r0, r1 = d.resonators
    pos = np.zeros((len(d.instances), 2))
    pos[:3] = [(-20, 0), (0, 20), (20, 0)]
    for k, s in enumerate(d.instances[3:]):
        pos[s.id] = (k * 0.6 - 50, 0)
    # force a resonant contact by equalising frequencies of two far resonators' segments
    insts = list(d.instances)
    a, b = r0.segment_ids[-1], r1.segment_ids[0]
    insts[b] = Instance(b, Kind.SEGMENT, 0.3, 0.3, 0.1, insts[a].frequency, resonator_id=1, segment_index=0)
    pos[b] = pos[a] + (0.5, 0)
    p_h, impacted = P.hotspot_proportion(Placement(pos, (0, 0, 1, 1)), insts, 0.1 * GHZ, d.resonators)
    assert p_h > 0 and impacted == 3


def test_areas_examples():
    one = qubits(1)
    assert P.areas(Placement(np.zeros((1, 2)), (0, 0, 1, 1)), one) == pytest.approx((1.44, 1.44, 1.0))
    two = Placement(np.array([[0.0, 0.0], [1.2, 0.0]]), (0, 0, 1, 1))
    assert P.areas(two, qubits(2)) == pytest.approx((2.88, 2.88, 1.0))


def test_human_spacing_formula():
    assert P.human_spacing(10.0, 0.1, 0.4, 0.4) == pytest.approx(1.0 / 1.2)
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        assert P.human_spacing(10.0, 0.0, 0.4, 0.4) == 0.0
    assert w and issubclass(w[0].category, RuntimeWarning)


def test_reserved_spacing_holds_segments():
    # 12 segments, two rows of 0.5 mm beside a 1.2 mm padded qubit -> 6 columns
    assert P.reserved_spacing(12, 0.3, 0.1, 0.4, 0.4) == pytest.approx(3.0)


@pytest.mark.parametrize("spacing", ["reserved", "formula"])
def test_human_baseline_grid(spacing):
    cfg = PlacerConfig()
    d = prepare(gen_grid(5, 5), cfg)
    p = P.human_baseline(d, cfg.qubit_size, cfg.pad_qubit, cfg.pad_res, cfg.segment_size, spacing=spacing)
    if spacing == "reserved":
        assert overlaps(p, d.instances) == []
        assert P.hotspot_pairs(p, d.instances, cfg.delta_c) == []
    q = p.positions[:25]
    assert len({tuple(np.round(x, 9)) for x in q}) == 25


def test_tm110():
    assert P.tm110(5, 5) == pytest.approx(12.41 * GHZ, rel=0.01)
    assert P.tm110(10, 10) == pytest.approx(6.20 * GHZ, rel=0.01)
    assert P.tm110(20, 20) == pytest.approx(P.tm110(10, 10) / 2)
    with pytest.raises(ValueError):
        P.tm110(0, 1)


def tiny_design(freqs, n=4):
    insts = [Instance(i, Kind.QUBIT, 0.4, 0.4, 0.4, f, qubit_id=i) for i, f in enumerate(freqs)]
    return Design(Topology(n, ()), insts, [], [])


def test_fidelity_trivial_cases():
    d = tiny_design([5 * GHZ] * 4)
    p = Placement(np.array([[0, 0], [5, 0], [10, 0], [15, 0]], dtype=float), (0, 0, 1, 1))
    empty = P.Program(2, ())
    assert P.fidelity(empty, [0, 1], d, p) == 1.0
    ideal = P.ErrorModel(err_1q=0, err_2q=0, t1=1e30, t2=1e30)
    assert P.fidelity(P.bernstein_vazirani(2, ideal), [0, 1, 2], d, p, ideal) == pytest.approx(1.0)
    f = P.fidelity(P.bernstein_vazirani(2), [0, 1, 2], d, p)
    assert 0 < f < 1


def test_fidelity_mapping_validation():
    d = tiny_design([5 * GHZ] * 4)
    p = Placement(np.zeros((4, 2)), (0, 0, 1, 1))
    prog = P.bernstein_vazirani(2)
    for bad in ([0, 0, 1], [0, 1], [0, 1, 9]):
        with pytest.raises(MappingInvalid):
            P.fidelity(prog, bad, d, p)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.9, 1.3), st.floats(0.0, 0.99))
def test_fidelity_monotone_in_violations(dist, shrink):
    d = tiny_design([5 * GHZ] * 4)
    prog = P.bernstein_vazirani(2)
    far = Placement(np.array([[0, 0], [5, 0], [10, 0], [15, 0]], dtype=float), (0, 0, 1, 1))
    near = far.copy()
    near.positions[3] = (dist, 0.0)  # idle qubit 3 touches active qubit 0
    nearer = far.copy()
    nearer.positions[3] = (dist * (1 - shrink), 0.0)
    f0 = P.fidelity(prog, [0, 1, 2], d, far)
    f1 = P.fidelity(prog, [0, 1, 2], d, near)
    f2 = P.fidelity(prog, [0, 1, 2], d, nearer)
    assert 0.0 <= f2 <= f1 <= f0 <= 1.0


def test_fidelity_ignores_inactive_violations():
    d = tiny_design([5 * GHZ] * 4)
    prog = P.bernstein_vazirani(1)
    p = Placement(np.array([[0, 0], [5, 0], [10, 0], [11, 0]], dtype=float), (0, 0, 1, 1))
    assert P.fidelity(prog, [0, 1], d, p) == pytest.approx(
        P.fidelity(prog, [0, 1], d, Placement(np.array([[0, 0], [5, 0], [10, 0], [20, 0]], dtype=float), (0, 0, 1, 1))))


def test_worst_case_envelope_is_monotone():
    vals = [P._worst_case_error(g, 1.0) for g in np.linspace(0, 4, 200)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_program_generators_and_validation():
    bv = P.bernstein_vazirani(4)
    assert bv.logical_qubit_count == 5
    assert sum(g.kind == "G2" for g in bv.gates) == 4
    assert bv.span() == pytest.approx(10 * M.dur_1q + 4 * M.dur_2q)
    ising = P.ising_chain(4, rounds=2)
    assert sum(g.kind == "G2" for g in ising.gates) == 12
    assert P.parse_program("bv:3").logical_qubit_count == 4
    with pytest.raises(ValidationError):
        P.parse_program("qaoa:3")
    with pytest.raises(ValidationError):
        P.Program(2, (P.Gate("G2", (0, 0), 1e-7),))
    with pytest.raises(ValidationError):
        P.Program(2, (P.Gate("G1", (3,), 1e-7),))


def test_error_model_invariants():
    with pytest.raises(ValidationError):
        P.ErrorModel(t1=10e-6, t2=30e-6)
    with pytest.raises(ValidationError):
        P.ErrorModel(cap_res=0)
    with pytest.raises(ValidationError):
        P.ErrorModel(err_2q=1.5)


def test_tm110_warning_on_large_chip():
    insts = qubits(2, 7 * GHZ)
    p = Placement(np.array([[0.0, 0.0], [20.0, 20.0]]), (0, 0, 1, 1))
    assert P.tm110_warnings(p, insts)
    small = Placement(np.array([[0.0, 0.0], [1.2, 0.0]]), (0, 0, 1, 1))
    assert P.tm110_warnings(small, insts) == []
