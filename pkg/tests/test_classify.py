import pytest

from pachner import build
from pachner.canonical import isomorphic, signature
from pachner.classify import (
    canonical_stacked_sphere,
    clique_ball,
    double_cone,
    dual_tree,
    flag_target,
    is_flag,
    is_hamiltonian,
    is_stacked,
    is_stacked0,
    klee,
    primitive_components,
    quad_disc,
    sphere_dual_tree,
)
from pachner.errors import BadSize, NotStacked
from pachner.moves import zero_move

from conftest import STANDARD_TRIANGLES, random_stacked_sphere


def test_is_flag(standard):
    assert not is_flag(standard)
    for n in range(6, 12):
        assert is_flag(double_cone(n))
    assert not is_flag(random_stacked_sphere(6, seed=0))


def test_is_stacked(standard):
    assert is_stacked(standard)
    for seed in range(5):
        assert is_stacked(random_stacked_sphere(10, seed))
    for n in range(6, 11):
        assert not is_stacked(double_cone(n))


def test_stacked_iff_all_primitive_components_standard():
    samples = [random_stacked_sphere(n, s) for n in (7, 9, 11)
               for s in (0, 1)]
    samples += [double_cone(8), flag_target(9), klee(double_cone(6))]
    for t in samples:
        comps = primitive_components(t)
        assert is_stacked(t) == all(c.n == 4 for c in comps)


def test_nonfacial_count_of_stacked():
    for n in (6, 9, 12):
        t = random_stacked_sphere(n, seed=n)
        assert len(t.nonfacial_3cycles()) == n - 4


def test_clique_ball(standard):
    assert clique_ball(standard).tetrahedra == ((1, 2, 3, 4),)
    five = zero_move(standard, (1, 2, 3))
    ball = clique_ball(five)
    assert len(ball.tetrahedra) == 2
    shared = set(ball.tetrahedra[0]) & set(ball.tetrahedra[1])
    assert len(shared) == 3
    for n in (8, 11, 14):
        t = random_stacked_sphere(n, seed=n)
        ball = clique_ball(t)
        assert len(ball.tetrahedra) == n - 3
        assert ball.boundary_triangles() == list(t.triangles)
    with pytest.raises(NotStacked):
        clique_ball(double_cone(8))


def test_dual_tree_shapes(standard):
    single = dual_tree(clique_ball(standard))
    assert len(single.nodes) == 1 and single.arcs == ()
    # stacking always onto the newest triangle gives a path
    t = build(4, STANDARD_TRIANGLES)
    for _ in range(6):
        tri = next(x for x in t.triangles if t.n in x) \
            if t.n > 4 else t.triangles[0]
        t = zero_move(t, tri)
    tree = sphere_dual_tree(t)
    assert tree.is_path()
    for seed in range(4):
        tree = sphere_dual_tree(random_stacked_sphere(12, seed))
        assert tree.max_degree() <= 4
        assert len(tree.arcs) == len(tree.nodes) - 1


def test_primitive_components(standard):
    assert [c.n for c in primitive_components(standard)] == [4]
    fl = flag_target(9)
    comps = primitive_components(fl)
    assert len(comps) == 1 and isomorphic(comps[0], fl)
    t = random_stacked_sphere(9, seed=2)
    comps = primitive_components(t)
    assert len(comps) == t.n - 3
    assert all(c.n == 4 for c in comps)


def test_is_hamiltonian(standard):
    assert is_hamiltonian(standard)
    for n in range(6, 11):
        assert is_hamiltonian(double_cone(n))
        assert is_hamiltonian(flag_target(max(n, 7)))


def test_double_cone():
    with pytest.raises(BadSize):
        double_cone(4)
    g6 = double_cone(6)
    assert sorted(g6.degree(v) for v in g6.vertices()) == [4] * 6
    assert isomorphic(double_cone(7), flag_target(7))


def test_flag_target():
    with pytest.raises(BadSize):
        flag_target(6)
    a8, g8 = flag_target(8), double_cone(8)
    assert not isomorphic(a8, g8)
    assert sorted(a8.degree(v) for v in a8.vertices()) == [4, 4, 4, 4,
                                                           5, 5, 5, 5]
    for n in (9, 10, 12):
        assert is_flag(flag_target(n))


def test_quad_disc():
    with pytest.raises(BadSize):
        quad_disc(2)
    q3 = quad_disc(3)
    assert q3.n == 7
    assert len(q3.triangles) == 8
    # hub adjacent to the corner, interior path vertices have degree four
    hub_tris = [t for t in q3.triangles if q3.hub in t]
    corner_tris = [t for t in q3.triangles if q3.boundary[3] in t]
    assert len(corner_tris) == 2
    assert all(q3.hub in t for t in corner_tris)
    for k in (3, 4, 6):
        q = quad_disc(k)
        assert len(q.triangles) == 2 * k + 2
        # interior path vertices: apex, hub and their two path neighbors
        counts = {}
        for t in q.triangles:
            for v in t:
                counts[v] = counts.get(v, 0) + 1
        for v in q.diagonal[1:-1]:
            assert counts[v] == 4


def test_canonical_stacked_sphere(standard):
    assert isomorphic(canonical_stacked_sphere(4), standard)
    for n in (6, 10, 13):
        t = canonical_stacked_sphere(n)
        assert is_stacked(t) and is_stacked0(t)
        tree = sphere_dual_tree(t)
        assert tree.is_path()
        assert len(tree.nodes) == n - 3


def test_klee(standard):
    k = klee(standard)
    assert k.n == 8
    assert is_stacked(k)
    for base in (standard, double_cone(6), random_stacked_sphere(7, 1)):
        out = klee(base)
        assert out.n == base.n + 2 * base.n - 4
        assert not is_flag(out)
