"""Constructive connectivity inside the degree-at-most-3 stacked class, and
the tree-based lower-bound constructions for components of the stacked level.

``stacked_canonical_path`` produces, for any stacked sphere whose dual tree
has no degree-4 node, a replayable flip certificate ending at the canonical
stacked sphere, with every intermediate sphere in the same class.  It
composes two reductions:

* :func:`reduce_to_path_dual` repeatedly picks a (degree-3 node, leaf) pair
  at minimal tree distance and either removes the branching directly (when
  the leaf is adjacent to the degree-3 node) or walks it one step closer
  with a flip ladder that keeps the dual tree isomorphic;
* :func:`path_dual_to_delta` grows the maximal run of tetrahedra sharing a
  common edge one tetrahedron per ladder until all of them do.

``build_isolated_sphere`` realizes a max-degree-4 tree as the degree-4 core
of a stacked sphere that admits no stackedness-preserving flip at all,
which is what pins the lower bound t(floor((n-5)/3)) on the number of
components of the stacked level.
"""

from __future__ import annotations

from dataclasses import dataclass

from .canonical import signature
from .classify import (
    CliqueBall,
    DualTree,
    canonical_stacked_sphere,
    clique_ball,
    dual_tree,
    is_stacked,
    sphere_dual_tree,
)
from .errors import InternalBound, NotPathDual, NotStacked0, SizeLimit
from .moves import Certificate, FlipMove, certificate_for, flip
from .sphere import Triangulation, build


def _require_stacked0(s: Triangulation) -> DualTree:
    if not is_stacked(s):
        raise NotStacked0("sphere is not stacked")
    tree = sphere_dual_tree(s)
    if tree.max_degree() > 3:
        raise NotStacked0("dual tree has a degree-4 node")
    return tree


def _tree_distances(tree: DualTree, source: int) -> list[int]:
    dist = [-1] * len(tree.nodes)
    dist[source] = 0
    queue = [source]
    for u in queue:
        for w in tree.neighbors(u):
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def _tree_path(tree: DualTree, source: int, target: int) -> list[int]:
    dist = _tree_distances(tree, target)
    path = [source]
    while path[-1] != target:
        cur = path[-1]
        path.append(
            min(w for w in tree.neighbors(cur) if dist[w] == dist[cur] - 1))
    return path


def branching_measure(tree: DualTree) -> tuple[int, int]:
    """(number of degree-3 nodes, min leaf distance from one); (0, 0) for a
    path.  Strictly decreasing along the reduction."""
    deg = tree.degrees()
    threes = [i for i, d in enumerate(deg) if d == 3]
    if not threes:
        return (0, 0)
    leaves = [i for i, d in enumerate(deg) if d == 1]
    best = min(
        _tree_distances(tree, g)[leaf] for g in threes for leaf in leaves)
    return (len(threes), best)


def _closest_pair(tree: DualTree):
    """Minimal-distance (degree-3 node, leaf), ties broken by the
    lexicographically smallest tetrahedron pair."""
    deg = tree.degrees()
    threes = [i for i, d in enumerate(deg) if d == 3]
    leaves = [i for i, d in enumerate(deg) if d == 1]
    best = None
    for g in threes:
        dist = _tree_distances(tree, g)
        for leaf in leaves:
            cand = (dist[leaf], tree.nodes[g], tree.nodes[leaf], g, leaf)
            if best is None or cand < best:
                best = cand
    return best[0], best[3], best[4]


def _branch_frame(t: Triangulation, tree: DualTree, path: list[int]):
    """Resolve the local names at a degree-3 node: the shared face with the
    next node on the path is (one, two, three), the off-path vertex is four,
    and ``one`` is the face vertex shared with both other neighbors."""
    gamma = tree.nodes[path[0]]
    gamma1 = tree.nodes[path[1]]
    face = set(gamma) & set(gamma1)
    four = next(v for v in gamma if v not in face)
    others = [w for w in tree.neighbors(path[0]) if w != path[1]]
    shared = [set(gamma) & set(tree.nodes[w]) for w in others]
    one = next(v for v in face if all(v in f for f in shared))
    two, three = sorted(face - {one})
    return one, two, three, four


def reduce_to_path_dual(
    s: Triangulation,
) -> tuple[Triangulation, Certificate]:
    """Flip a degree-at-most-3 stacked sphere until its dual tree is a path."""
    tree = _require_stacked0(s)
    t = s
    moves: list[FlipMove] = []
    guard = 10 * s.n * s.n
    while not tree.is_path():
        guard -= 1
        if guard < 0:
            raise InternalBound("path reduction failed to make progress")
        ell, g, leaf = _closest_pair(tree)
        path = _tree_path(tree, g, leaf)
        one, two, three, four = _branch_frame(t, tree, path)
        if ell == 1:
            # leaf adjacent to the degree-3 node: one flip removes the branch
            delta = tree.nodes[path[1]]
            d = next(v for v in delta if v not in (one, two, three))
            step = [FlipMove((two, three), tuple(sorted((four, d))))]
        else:
            # walk along the tetrahedra still containing edge (two, three)
            xs = [next(v for v in tree.nodes[path[1]]
                       if v not in (one, two, three))]
            k = 1
            while (k < ell
                   and two in tree.nodes[path[k + 1]]
                   and three in tree.nodes[path[k + 1]]):
                nxt = tree.nodes[path[k + 1]]
                xs.append(next(v for v in nxt
                               if v not in (two, three, xs[-1])))
                k += 1
            if k == 1:
                step = [FlipMove((two, three), tuple(sorted((four, xs[0]))))]
            else:
                # the ladder needs the boundary triangle (two, x_{k-1}, x_k)
                if not t.has_triangle((two, xs[-2], xs[-1])):
                    two, three = three, two
                    if not t.has_triangle((two, xs[-2], xs[-1])):
                        raise InternalBound(
                            "no boundary triangle beside the walked edge")
                chain = [one] + xs
                step = [
                    FlipMove(tuple(sorted((two, chain[i]))),
                             tuple(sorted((xs[-1], chain[i - 1]))))
                    for i in range(k - 1, 0, -1)
                ]
                step.append(
                    FlipMove((two, three), tuple(sorted((four, xs[-1])))))
        before = branching_measure(tree)
        for m in step:
            t = flip(t, m)
            moves.append(m)
        tree = _require_stacked0(t)
        if not tree.is_path() and branching_measure(tree) >= before:
            raise InternalBound("branching measure did not decrease")
    return t, certificate_for("stacked0", s, moves, t)


def _path_order(tree: DualTree) -> list[int]:
    deg = tree.degrees()
    if len(tree.nodes) == 1:
        return [0]
    ends = [i for i, d in enumerate(deg) if d == 1]
    return _tree_path(tree, ends[0], ends[1])


def _prefix_run(nodes_in_order) -> tuple[int, set[int]]:
    """Longest prefix of tetrahedra with at least one common edge."""
    common = set(nodes_in_order[0])
    k = 1
    for tet in nodes_in_order[1:]:
        nxt = common & set(tet)
        if len(nxt) < 2:
            break
        common = nxt
        k += 1
    return k, common


def path_dual_to_delta(s: Triangulation) -> Certificate:
    """Flip a path-dual stacked sphere to the canonical stacked sphere."""
    if not is_stacked(s):
        raise NotPathDual("sphere is not stacked")
    tree = sphere_dual_tree(s)
    if not tree.is_path():
        raise NotPathDual("dual tree is not a path")
    t = s
    moves: list[FlipMove] = []
    guard = 10 * s.n * s.n
    while True:
        guard -= 1
        if guard < 0:
            raise InternalBound("prefix growth failed to make progress")
        order = _path_order(tree)
        seqs = [
            [tree.nodes[i] for i in order],
            [tree.nodes[i] for i in reversed(order)],
        ]
        runs = [_prefix_run(seq) for seq in seqs]
        pick = max(
            range(2), key=lambda i: (runs[i][0], seqs[i][0]))
        seq, (k, common) = seqs[pick], runs[pick]
        if k == len(seq):
            break
        if len(common) != 2 or k < 3:
            raise InternalBound(
                f"unexpected prefix run (k={k}, common={sorted(common)})")
        a, b = sorted(common)
        # seq[i] = {a, b, x_{i+1}, x_{i+2}}; xs collects x_1 .. x_{k+1}
        xs = [next(v for v in seq[0] if v not in common and v not in seq[1])]
        for i in range(k):
            xs.append(next(
                v for v in seq[i] if v not in common and v != xs[-1]))
        shared = set(seq[k - 1]) & set(seq[k])
        if a in shared:
            a, b = b, a
        x_top = xs[k]  # = x_{k+1}, the new spine endpoint
        for i in range(k, 1, -1):
            m = FlipMove(
                tuple(sorted((a, xs[i - 1]))),
                tuple(sorted((x_top, xs[i - 2]))))
            t = flip(t, m)
            moves.append(m)
        tree = sphere_dual_tree(t)
        if not tree.is_path():
            raise InternalBound("prefix ladder left the path class")
    target = canonical_stacked_sphere(s.n)
    cert = certificate_for("stacked0", s, moves, t)
    if cert.end != signature(target):
        raise InternalBound("prefix growth did not end at the canonical sphere")
    return cert


def stacked_canonical_path(s: Triangulation) -> Certificate:
    """Certificate from a degree-at-most-3 stacked sphere to the canonical
    stacked sphere, every intermediate in the same class."""
    reduced, first = reduce_to_path_dual(s)
    second = path_dual_to_delta(reduced)
    return Certificate(
        class_tag="stacked0",
        start=first.start,
        start_labeling=first.start_labeling,
        moves=first.moves + second.moves,
        end=second.end,
    )


# -- trees and isolated spheres -------------------------------------------


@dataclass(frozen=True)
class TreeShape:
    """An unlabeled tree with maximum degree four."""

    size: int
    arcs: tuple[tuple[int, int], ...]
    canon: str

    def degrees(self) -> list[int]:
        deg = [0] * self.size
        for i, j in self.arcs:
            deg[i] += 1
            deg[j] += 1
        return deg


def _tree_canon(size, arcs) -> str:
    from .stacked_flip import forest_canonical_form

    shapes = forest_canonical_form(tuple(range(size)), tuple(arcs))
    if len(shapes) != 1:
        raise ValueError("not a tree")
    return shapes[0]


def enumerate_deg4_trees(m: int, cap: int = 16) -> list[TreeShape]:
    """All isomorphism classes of m-node trees with degrees at most four."""
    if m < 1:
        raise SizeLimit("tree size must be positive")
    if m > cap:
        raise SizeLimit(f"tree size {m} above cap {cap}")
    level = {TreeShape(1, (), _tree_canon(1, ()))}
    for size in range(2, m + 1):
        nxt: dict[str, TreeShape] = {}
        for shape in level:
            deg = shape.degrees()
            for v in range(shape.size):
                if deg[v] >= 4:
                    continue
                arcs = shape.arcs + ((v, shape.size),)
                canon = _tree_canon(size, arcs)
                if canon not in nxt:
                    nxt[canon] = TreeShape(size, arcs, canon)
        level = set(nxt.values())
    return sorted(level, key=lambda s: s.canon)


def saturate_tree(shape: TreeShape) -> tuple[int, tuple[tuple[int, int], ...]]:
    """Attach (4 - deg) leaves to every node, making every original node
    degree four."""
    arcs = list(shape.arcs)
    size = shape.size
    deg = shape.degrees()
    for v in range(shape.size):
        for _ in range(4 - deg[v]):
            arcs.append((v, size))
            size += 1
    return size, tuple(arcs)


def pad_leaves(size, arcs, extra: int):
    """Attach ``extra`` new leaves to distinct degree-1 nodes (keeps the set
    of degree-4 nodes unchanged)."""
    deg = [0] * size
    for i, j in arcs:
        deg[i] += 1
        deg[j] += 1
    leaves = [v for v in range(size) if deg[v] == 1]
    if extra > len(leaves):
        raise ValueError("not enough leaves to pad")
    arcs = list(arcs)
    for v in leaves[:extra]:
        arcs.append((v, size))
        size += 1
    return size, tuple(arcs)


def ball_from_tree(size, arcs) -> CliqueBall:
    """A stacked ball whose dual tree is the given tree (unique up to
    isomorphism for a fixed tree)."""
    adj = {v: [] for v in range(size)}
    for i, j in arcs:
        adj[i].append(j)
        adj[j].append(i)
    tets: list[tuple[int, ...]] = [()] * size
    tets[0] = (1, 2, 3, 4)
    free = {0: [f for f in _tet_faces((1, 2, 3, 4))]}
    next_vertex = 5
    queue = [0]
    seen = {0}
    for u in queue:
        for w in sorted(adj[u]):
            if w in seen:
                continue
            seen.add(w)
            face = free[u].pop(0)
            tet = tuple(sorted(face + (next_vertex,)))
            tets[w] = tet
            free[w] = [f for f in _tet_faces(tet) if f != face]
            next_vertex += 1
            queue.append(w)
    return CliqueBall(tuple(sorted(tets)))


def _tet_faces(tet):
    a, b, c, d = tet
    return [(a, b, c), (a, b, d), (a, c, d), (b, c, d)]


def build_isolated_sphere(shape: TreeShape) -> Triangulation:
    """Stacked sphere on 3m+5 vertices whose dual tree is the saturation of
    the given m-node tree; no flip on it preserves stackedness."""
    size, arcs = saturate_tree(shape)
    ball = ball_from_tree(size, arcs)
    return build(size + 3, ball.boundary_triangles())


def isolation_witnesses(n: int) -> list[Triangulation]:
    """One stacked sphere per max-degree-4 tree on floor((n-5)/3) nodes,
    padded to exactly n vertices; different trees land in different
    components of the stacked level."""
    if n < 8:
        raise SizeLimit(f"witness construction needs n >= 8, got {n}")
    m = (n - 5) // 3
    extra = n - 3 * m - 5
    out = []
    for shape in enumerate_deg4_trees(m):
        size, arcs = saturate_tree(shape)
        size, arcs = pad_leaves(size, arcs, extra)
        ball = ball_from_tree(size, arcs)
        out.append(build(size + 3, ball.boundary_triangles()))
    return out


def lower_bound_components(n: int) -> int:
    """t(floor((n-5)/3)): a lower bound for the number of components of the
    n-vertex stacked level."""
    if n < 8:
        raise SizeLimit(f"lower bound defined for n >= 8, got {n}")
    return len(enumerate_deg4_trees((n - 5) // 3))
