import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pachner import build
from pachner.canonical import isomorphic, signature
from pachner.classify import CLASS_PREDICATES, double_cone, is_flag
from pachner.errors import IllegalFlip, IllegalMove, UnknownTriangle
from pachner.moves import (
    Certificate,
    FlipMove,
    certificate_for,
    concat_certificates,
    flip,
    inverse,
    legal_flips,
    make_flip,
    two_move,
    two_move_relabeling,
    verify_certificate,
    zero_move,
)

from conftest import STANDARD_TRIANGLES, random_stacked_sphere


def five_vertex_sphere():
    return zero_move(build(4, STANDARD_TRIANGLES), (1, 2, 3))


def test_standard_has_no_legal_flips(standard):
    assert legal_flips(standard) == []
    with pytest.raises(IllegalFlip) as err:
        flip(standard, make_flip((1, 2), (3, 4)))
    assert err.value.reason == "diagonal-exists"


def test_flip_missing_triangles(standard):
    g8 = double_cone(8)
    with pytest.raises(IllegalFlip) as err:
        flip(g8, make_flip((1, 3), (7, 8)))
    assert err.value.reason == "missing-triangles"


def test_flip_inverse_round_trip():
    g8 = double_cone(8)
    for m in legal_flips(g8):
        back = flip(flip(g8, m), inverse(m))
        assert back == g8  # exact labels, not just isomorphism


def test_rim_flip_produces_degree_three():
    g8 = double_cone(8)
    m = next(m for m in legal_flips(g8)
             if g8.degree(m.remove[0]) == 4 and g8.degree(m.remove[1]) == 4)
    t = flip(g8, m)
    assert any(t.degree(v) == 3 for v in t.vertices())
    assert not is_flag(t)


def test_legal_flips_octahedron():
    g6 = double_cone(6)
    moves = legal_flips(g6)
    # every edge whose apices are non-adjacent: all 12 edges qualify
    assert len(moves) == 12
    assert moves == sorted(moves)
    assert all(not g6.has_edge(*m.insert) for m in moves)


def test_flip_count_bound():
    for seed in range(5):
        t = random_stacked_sphere(9, seed)
        assert len(legal_flips(t)) <= 3 * t.n - 6


def test_zero_move_gives_unique_five_vertex_sphere(standard):
    results = {signature(zero_move(standard, tri))
               for tri in standard.triangles}
    assert len(results) == 1
    t = five_vertex_sphere()
    assert t.n == 5
    assert t.degree(5) == 3


def test_zero_move_unknown_triangle(standard):
    with pytest.raises(UnknownTriangle):
        zero_move(standard, (1, 2, 5))


def test_two_move_undoes_zero_move():
    for seed in range(4):
        t = random_stacked_sphere(8, seed)
        for tri in t.triangles:
            bigger = zero_move(t, tri)
            assert two_move(bigger, bigger.n) == t


def test_two_move_on_standard_rejected(standard):
    with pytest.raises(IllegalMove) as err:
        two_move(standard, 1)
    # every vertex has degree 3 but the link is already a triangle
    assert err.value.reason == "triangle-exists"


def test_two_move_degree_check():
    with pytest.raises(IllegalMove) as err:
        two_move(double_cone(8), 7)
    assert err.value.reason == "degree-not-3"


def test_two_move_relabeling():
    assert two_move_relabeling(5, 3) == {1: 1, 2: 2, 4: 3, 5: 4}


def test_five_vertex_reductions(standard):
    t = five_vertex_sphere()
    for v in t.vertices():
        if t.degree(v) == 3:
            assert isomorphic(two_move(t, v), standard)


def test_certificate_json_round_trip():
    g8 = double_cone(8)
    m = legal_flips(g8)[0]
    cert = certificate_for("any", g8, [m], flip(g8, m))
    again = Certificate.from_json(cert.to_json())
    assert again == cert
    assert '"class": "any"' in cert.to_json()


def test_verify_certificate_empty(standard):
    cert = certificate_for("any", standard, [], standard)
    assert verify_certificate(cert).ok


def test_verify_certificate_end_to_end():
    g6 = double_cone(6)
    m = legal_flips(g6)[0]
    target = flip(g6, m)
    good = certificate_for("any", g6, [m], target)
    assert verify_certificate(good).ok
    bad_end = Certificate("any", good.start, good.start_labeling,
                          good.moves, signature(g6))
    report = verify_certificate(bad_end)
    assert not report.ok and "end signature" in report.reason


def test_verify_flag_certificate_catches_nonflag_step():
    g8 = double_cone(8)
    m = next(m for m in legal_flips(g8)
             if g8.degree(m.remove[0]) == 4 and g8.degree(m.remove[1]) == 4)
    cert = certificate_for("flag", g8, [m], flip(g8, m))
    report = verify_certificate(cert, CLASS_PREDICATES)
    assert not report.ok
    assert report.step == 1


def test_verify_rejects_unknown_class(standard):
    cert = certificate_for("nonsense", standard, [], standard)
    assert not verify_certificate(cert).ok


def test_concat_certificates():
    g6 = double_cone(6)
    m = legal_flips(g6)[0]
    mid = flip(g6, m)
    c1 = certificate_for("any", g6, [m], mid)
    c2 = certificate_for("any", mid, [inverse(m)], g6)
    joined = concat_certificates("any", [c1, c2])
    assert verify_certificate(joined).ok
    assert joined.start == joined.end


@given(st.integers(6, 10), st.integers(0, 10 ** 6))
@settings(max_examples=25, deadline=None)
def test_flip_preserves_vertex_count_and_validity(n, seed):
    t = random_stacked_sphere(n, seed)
    moves = legal_flips(t)
    if moves:
        m = moves[seed % len(moves)]
        t2 = flip(t, m)  # build() revalidates
        assert t2.n == t.n
