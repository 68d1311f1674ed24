"""The exact characterization of stackedness-preserving flips.

A legal flip ab -> cd on a stacked sphere yields another stacked sphere
exactly when the tetrahedra of the clique ball containing abc and abd are
adjacent in the dual tree; equivalently, when a and b have exactly three
common neighbors.  The predicate here uses the common-neighbor count, the
other equivalent forms live alongside it so the tests can check that they
agree pairwise.

``rewrite_dual_tree`` applies the induced local rewrite of the dual tree
(replace both tetrahedra at the flipped edge, reattach up to four outside
arcs) without recomputing the clique ball from scratch.
"""

from __future__ import annotations

from .classify import DualTree, clique_ball, dual_tree, is_stacked
from .errors import IllegalFlip, NotStacked, PredicateFailed
from .moves import FlipMove
from .sphere import Triangulation


def _check_legal(s: Triangulation, m: FlipMove):
    a, b = m.remove
    c, d = m.insert
    if not s.has_edge(a, b) or set(s.edge_apices(m.remove)) != {c, d}:
        raise IllegalFlip("missing-triangles", f"{m} not applicable")
    if s.has_edge(c, d):
        raise IllegalFlip("diagonal-exists", f"{m.insert} already an edge")


def flip_preserves_stacked(
    s: Triangulation, m: FlipMove, check: bool = True
) -> bool:
    """True iff the flip result is stacked, decided without flipping."""
    if check:
        if not is_stacked(s):
            raise NotStacked("predicate requires a stacked sphere")
        _check_legal(s, m)
    a, b = m.remove
    return len(s.neighbors(a) & s.neighbors(b)) == 3


def common_neighbor_count(s, m) -> int:
    a, b = m.remove
    return len(s.neighbors(a) & s.neighbors(b))


def link_path_length_two(s, m) -> bool:
    """Path from c to d in the clique-ball link of ab has length two."""
    return tetrahedra_containing_edge(s, m.remove) == 2


def tetrahedra_containing_edge(s, edge) -> int:
    a, b = edge
    common = sorted(s.neighbors(a) & s.neighbors(b))
    count = 0
    for i, x in enumerate(common):
        for y in common[i + 1:]:
            if s.has_edge(x, y):
                count += 1
    return count


def unique_extra_neighbor(s, m) -> int | None:
    """The unique vertex e outside {c, d} adjacent to both a and b."""
    a, b = m.remove
    c, d = m.insert
    extra = sorted((s.neighbors(a) & s.neighbors(b)) - {c, d})
    return extra[0] if len(extra) == 1 else None


def rewrite_dual_tree(s: Triangulation, m: FlipMove) -> DualTree:
    """Dual tree of the flipped sphere, built by the local rewrite."""
    if not is_stacked(s):
        raise NotStacked("rewrite requires a stacked sphere")
    _check_legal(s, m)
    if not flip_preserves_stacked(s, m, check=False):
        raise PredicateFailed(f"flip {m} does not preserve stackedness")
    a, b = m.remove
    c, d = m.insert
    e = unique_extra_neighbor(s, m)
    old = dual_tree(clique_ball(s))
    alpha = tuple(sorted((a, b, c, e)))
    beta = tuple(sorted((a, b, d, e)))
    gamma = tuple(sorted((a, c, d, e)))
    delta = tuple(sorted((b, c, d, e)))

    keep = [tet for tet in old.nodes if tet != alpha and tet != beta]
    nodes = tuple(sorted(keep + [gamma, delta]))
    index = {tet: i for i, tet in enumerate(nodes)}

    arcs = set()
    old_index = {tet: i for i, tet in enumerate(old.nodes)}
    removed = {old_index[alpha], old_index[beta]}
    for i, j in old.arcs:
        if i in removed or j in removed:
            continue
        x, y = index[old.nodes[i]], index[old.nodes[j]]
        arcs.add((min(x, y), max(x, y)))

    def reattach(old_tet, face_to_gamma, face_to_delta):
        for k in old.neighbors(old_index[old_tet]):
            if k in removed:
                continue
            other = old.nodes[k]
            shared = set(old_tet) & set(other)
            if shared == face_to_gamma:
                target = gamma
            elif shared == face_to_delta:
                target = delta
            else:
                raise AssertionError(
                    f"unexpected shared face {shared} at {old_tet}")
            x, y = index[other], index[target]
            arcs.add((min(x, y), max(x, y)))

    reattach(alpha, {a, c, e}, {b, c, e})
    reattach(beta, {a, d, e}, {b, d, e})
    g, dl = index[gamma], index[delta]
    arcs.add((min(g, dl), max(g, dl)))
    return DualTree(nodes, tuple(sorted(arcs)))


def degree4_core(tree: DualTree):
    """Induced subgraph on the degree-4 nodes, as (nodes, arcs) tuples."""
    deg = tree.degrees()
    core_nodes = [tree.nodes[i] for i in range(len(tree.nodes)) if deg[i] == 4]
    keep = {tree.nodes[i]: k
            for k, i in enumerate(
                i for i in range(len(tree.nodes)) if deg[i] == 4)}
    arcs = []
    for i, j in tree.arcs:
        u, v = tree.nodes[i], tree.nodes[j]
        if u in keep and v in keep:
            x, y = keep[u], keep[v]
            arcs.append((min(x, y), max(x, y)))
    return tuple(core_nodes), tuple(sorted(arcs))


def forest_canonical_form(nodes, arcs):
    """Canonical form of a forest (rooted-tree hashing per component).

    The degree-4 core of a tree is always a forest, so this is a complete
    isomorphism invariant for cores.
    """
    k = len(nodes)
    adj = {i: [] for i in range(k)}
    for i, j in arcs:
        adj[i].append(j)
        adj[j].append(i)

    seen = [False] * k
    shapes = []
    for root in range(k):
        if seen[root]:
            continue
        comp = []
        stack = [root]
        seen[root] = True
        while stack:
            u = stack.pop()
            comp.append(u)
            for w in adj[u]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        shapes.append(_component_shape(comp, adj))
    return tuple(sorted(shapes))


def _component_shape(comp, adj):
    comp_set = set(comp)
    if len(comp) == 1:
        return "()"

    def rooted(u, parent):
        subs = sorted(rooted(w, u) for w in adj[u] if w != parent and w in comp_set)
        return "(" + "".join(subs) + ")"

    centers = _tree_centers(comp, adj)
    return min(rooted(c, None) for c in centers)


def _tree_centers(comp, adj):
    comp_set = set(comp)
    degree = {u: sum(1 for w in adj[u] if w in comp_set) for u in comp}
    leaves = [u for u in comp if degree[u] <= 1]
    remaining = len(comp)
    while remaining > 2:
        nxt = []
        for leaf in leaves:
            degree[leaf] = 0
            for w in adj[leaf]:
                if w in comp_set and degree[w] > 0:
                    degree[w] -= 1
                    if degree[w] == 1:
                        nxt.append(w)
        remaining -= len(leaves)
        leaves = nxt
    return leaves


def cores_isomorphic(core1, core2) -> bool:
    return forest_canonical_form(*core1) == forest_canonical_form(*core2)
