import pytest
from hypothesis import given, settings, strategies as st

from freqplace import topology as T
from freqplace.errors import ParseError, ValidationError


@given(st.integers(1, 8), st.integers(1, 8))
def test_grid_edge_count(m, n):
    t = T.gen_grid(m, n)
    assert t.qubit_count == m * n
    assert t.edge_count == 2 * m * n - m - n
    # every edge joins 4-neighbours in the drawing
    for a, b in t.edges:
        (ra, ca), (rb, cb) = t.coords[a], t.coords[b]
        assert abs(ra - rb) + abs(ca - cb) == 1


def test_grid_small_cases():
    assert T.gen_grid(5, 5).edge_count == 40
    assert T.gen_grid(1, 1).edge_count == 0
    assert T.gen_grid(1, 4).edges == ((0, 1), (1, 2), (2, 3))
    with pytest.raises(ValueError):
        T.gen_grid(0, 3)


@pytest.mark.parametrize("rings, edges", [(1, 8), (2, 18), (5, 48), (10, 98)])
def test_octagon_counts(rings, edges):
    t = T.gen_octagon(rings)
    assert t.qubit_count == 8 * rings
    assert t.edge_count == edges


def test_octagon_multi_row_layout_has_no_wraparound_bridges():
    t = T.gen_octagon(10, layout_cols=5)
    assert t.qubit_count == 80
    assert t.edge_count == 80 + 2 * 4 * 2
    assert T.validate(t) == []


@pytest.mark.parametrize("name, qubits", [("falcon-27", 27), ("eagle-127", 127), ("xtree-53", 53)])
def test_fixtures_load_and_validate(name, qubits):
    t = T.load_fixture(name)
    assert t.qubit_count == qubits
    assert T.validate(t) == []


def test_heavy_hex_degrees():
    for name in ("falcon-27", "eagle-127"):
        assert max(T.load_fixture(name).degree()) == 3


def test_xtree_is_a_tree():
    t = T.load_fixture("xtree-53")
    assert t.edge_count == t.qubit_count - 1


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ParseError) as exc:
        T.parse_edge_list("qubits 3\n0 1\n1 x\n")
    assert exc.value.line == 3
    with pytest.raises(ParseError):
        T.parse_edge_list("0 1\n")
    with pytest.raises(ParseError):
        T.parse_edge_list("# nothing\n")
    with pytest.raises(ValidationError):
        T.parse_edge_list("qubits 2\n0 2\n")


def test_parse_comments_and_positions():
    t = T.parse_edge_list("name tiny\nqubits 2  # header\n0 1\npos 0 0 0\npos 1 0 1\n")
    assert t.name == "tiny" and t.coords == ((0, 0), (0, 1))


def test_fixture_override_env(tmp_path, monkeypatch):
    (tmp_path / "falcon-27.txt").write_text("qubits 2\n0 1\n")
    monkeypatch.setenv(T.FIXTURE_ENV, str(tmp_path))
    assert T.load_fixture("falcon-27").qubit_count == 2


def test_resolve_forms(tmp_path):
    assert T.resolve("grid:3x4").qubit_count == 12
    assert T.resolve("octagon:2").qubit_count == 16
    assert T.resolve("falcon-27").qubit_count == 27
    p = tmp_path / "g.txt"
    p.write_text("qubits 2\n0 1\n")
    assert T.resolve(str(p)).edge_count == 1


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 30), st.randoms(use_true_random=False))
def test_spectral_order_gives_distinct_cells(n, rnd):
    edges = [(i, i + 1) for i in range(n - 1)]
    extra = {tuple(sorted(rnd.sample(range(n), 2))) for _ in range(n // 3)}
    t = T.Topology(n, tuple(sorted(set(edges) | extra)))
    cells = T.spectral_order(t)
    assert len(set(cells)) == n
    assert cells == T.spectral_order(t)
