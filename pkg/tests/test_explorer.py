import json

import pytest

from pachner import explorer
from pachner.canonical import from_signature, signature
from pachner.classify import (
    canonical_stacked_sphere,
    double_cone,
    is_flag,
    is_hamiltonian,
    is_stacked,
    is_stacked0,
)
from pachner.errors import BadSize, SizeLimit

# counts derived by agreement of the two independent enumeration methods
SPHERE_COUNTS = {4: 1, 5: 1, 6: 2, 7: 5, 8: 14, 9: 50, 10: 233}
STACKED_COUNTS = {4: 1, 5: 1, 6: 1, 7: 3, 8: 7, 9: 24, 10: 93}
FLAG_COUNTS = {6: 1, 7: 1, 8: 2, 9: 4, 10: 10}


def test_enumeration_methods_agree():
    for n in range(4, 10):
        closure = explorer.enumerate_all(n)
        oracle = explorer.enumerate_oracle(n)
        assert closure == oracle
        assert len(closure) == SPHERE_COUNTS[n]


def test_every_enumerated_sphere_validates():
    for sig in explorer.enumerate_all(8):
        t = from_signature(sig)
        assert signature(t) == sig


def test_stacked_enumeration_counts():
    for n, count in STACKED_COUNTS.items():
        assert len(explorer.enumerate_stacked(n)) == count


def test_stacked_enumeration_equals_filter():
    for n in range(4, 10):
        by_filter = [sig for sig in explorer.enumerate_all(n)
                     if is_stacked(from_signature(sig))]
        assert explorer.enumerate_stacked(n) == by_filter


def test_class_members():
    for n, count in FLAG_COUNTS.items():
        assert len(explorer.class_members(n, "flag")) == count
    ham = explorer.class_members(8, "hamiltonian")
    assert all(is_hamiltonian(from_signature(sig)) for sig in ham)
    stacked0 = explorer.class_members(9, "stacked0")
    assert all(is_stacked0(from_signature(sig)) for sig in stacked0)
    assert stacked0 == [sig for sig in explorer.enumerate_stacked(9)
                        if is_stacked0(from_signature(sig))]
    with pytest.raises(ValueError):
        explorer.class_members(8, "mystery")


def test_size_limits(monkeypatch):
    with pytest.raises(BadSize):
        explorer.enumerate_all(3)
    monkeypatch.setenv("PACHNER_MAX_N", "6")
    with pytest.raises(SizeLimit):
        explorer.enumerate_all(7)
    monkeypatch.delenv("PACHNER_MAX_N")


def test_level_graph_stacked_8():
    g = explorer.build_level_graph(8, "stacked")
    rep = explorer.components(g)
    assert rep.total_count == 7
    assert list(rep.component_sizes) == [1, 6]
    assert sum(rep.component_sizes) == rep.total_count


def test_level_graph_arcs_are_symmetric_flips():
    g = explorer.build_level_graph(7, "all")
    assert g.arcs == tuple(sorted(set(g.arcs)))
    assert all(i < j for i, j in g.arcs)


def test_full_level_connected():
    for n in range(4, 10):
        g = explorer.build_level_graph(n, "all")
        rep = explorer.components(g)
        assert len(rep.component_sizes) == 1


def test_flag_level_structure():
    for n in (8, 9):
        g = explorer.build_level_graph(n, "flag")
        rep = explorer.components(g)
        assert len(rep.component_sizes) == 2
        gam = signature(double_cone(n))
        gam_index = g.nodes.index(gam)
        assert not any(gam_index in arc for arc in g.arcs)


def test_diameter():
    single = explorer.LevelGraph(4, "all", ("x",), ())
    assert explorer.diameter(single) == 0
    disconnected = explorer.build_level_graph(8, "stacked")
    assert explorer.diameter(disconnected) is None
    g9 = explorer.build_level_graph(9, "hamiltonian")
    d = explorer.diameter(g9)
    assert d is not None and d <= 4 * 9 - 20


def test_exports(tmp_path):
    g = explorer.build_level_graph(7, "stacked")
    dot = tmp_path / "g.dot"
    explorer.export_dot(g, str(dot))
    text = dot.read_text()
    assert text.startswith('graph "stacked_7"')
    assert g.nodes[0] in text
    rep = explorer.components(g)
    out = tmp_path / "rep.json"
    explorer.export_json(rep, str(out))
    data = json.loads(out.read_text())
    assert data["n"] == 7 and data["total"] == 3
    assert [c["size"] for c in data["components"]] == [3]

    sig_file = tmp_path / "sigs.txt"
    explorer.write_signature_file(g.nodes, 7, "stacked", str(sig_file))
    lines = sig_file.read_text().splitlines()
    assert lines[0] == "# pachner-level n=7 class=stacked count=3"
    assert lines[1:] == list(g.nodes)


def test_empty_graph_dot(tmp_path):
    g = explorer.LevelGraph(4, "flag", (), ())
    path = tmp_path / "empty.dot"
    explorer.export_dot(g, str(path))
    assert path.read_text() == 'graph "flag_4" {\n}\n'


def test_threads_do_not_change_output():
    serial = explorer.enumerate_stacked(9, threads=1)
    parallel = explorer.enumerate_stacked(9, threads=2)
    assert serial == parallel
    explorer._CACHE.clear()
    parallel_fresh = explorer.enumerate_stacked(9, threads=2)
    assert serial == parallel_fresh
