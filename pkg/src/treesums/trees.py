"""Trees, decorated trees, nests, and their enumeration up to isomorphism.

Isomorphism classes are handled with AHU canonical codes computed from the
centroid (or the centroid edge); vertex and edge decorations are folded
into the code, and the automorphism group order falls out of the same
recursion as a product of factorials of repeated child codes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, groupby
from math import factorial
from typing import Callable, Iterator, Mapping, Sequence

__all__ = [
    "Tree",
    "MarkedStableTree",
    "Nest",
    "AdmissibleTree",
    "CoveringTree",
    "canonical_code",
    "aut_order",
    "free_trees",
    "trees_up_to",
    "set_partitions",
    "enumerate_marked_stable",
    "enumerate_nests",
    "nest_to_tree",
    "tree_to_nest",
    "enumerate_covering_trees",
]


@dataclass(frozen=True)
class Tree:
    vertex_count: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        n = self.vertex_count
        if n < 1:
            raise ValueError("a tree needs at least one vertex")
        norm = tuple(sorted((min(u, v), max(u, v)) for u, v in self.edges))
        object.__setattr__(self, "edges", norm)
        if len(norm) != n - 1:
            raise ValueError(f"a tree on {n} vertices has {n - 1} edges, got {len(norm)}")
        if len(set(norm)) != len(norm):
            raise ValueError("duplicate edge")
        for u, v in norm:
            if u == v:
                raise ValueError("self-loop")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range")
        seen, stack = {0}, [0]
        adj = self.adjacency
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != n:
            raise ValueError("tree is not connected")

    @property
    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def valency(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    @property
    def valencies(self) -> list[int]:
        out = [0] * self.vertex_count
        for u, v in self.edges:
            out[u] += 1
            out[v] += 1
        return out

    @property
    def leaves(self) -> list[int]:
        return [v for v, k in enumerate(self.valencies) if k == 1]

    @property
    def flags(self) -> list[tuple[int, int]]:
        """All (vertex, edge index) incidences."""
        return [(w, i) for i, e in enumerate(self.edges) for w in e]

    def edge_index(self, u: int, v: int) -> int:
        return self.edges.index((min(u, v), max(u, v)))

    def relabel(self, perm: Sequence[int]) -> "Tree":
        return Tree(self.vertex_count, tuple((perm[u], perm[v]) for u, v in self.edges))

    def code(self) -> str:
        return canonical_code(self)

    def to_json(self) -> dict:
        return {"vertex_count": self.vertex_count, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_json(cls, data: Mapping) -> "Tree":
        return cls(int(data["vertex_count"]), tuple(tuple(e) for e in data["edges"]))


# --------------------------------------------------------------------------
# canonical codes and automorphisms

EdgeLabel = Callable[[int, int], str]


def _centroids(adj: list[list[int]]) -> list[int]:
    n = len(adj)
    if n == 1:
        return [0]
    parent = [-1] * n
    order, stack = [], [0]
    seen = [False] * n
    seen[0] = True
    while stack:
        v = stack.pop()
        order.append(v)
        for w in adj[v]:
            if not seen[w]:
                seen[w] = True
                parent[w] = v
                stack.append(w)
    size = [1] * n
    for v in reversed(order):
        if parent[v] >= 0:
            size[parent[v]] += size[v]
    best, out = n, []
    for v in range(n):
        heaviest = n - size[v]
        for w in adj[v]:
            if w != parent[v]:
                heaviest = max(heaviest, size[w])
        if heaviest < best:
            best, out = heaviest, [v]
        elif heaviest == best:
            out.append(v)
    return out


def _rooted(adj, root: int, block: int, vlab: Sequence[str], elab: EdgeLabel) -> tuple[str, int]:
    items, aut = [], 1
    for c in adj[root]:
        if c == block:
            continue
        code, a = _rooted(adj, c, root, vlab, elab)
        aut *= a
        items.append(f"<{elab(root, c)}>{code}")
    items.sort()
    for _, grp in groupby(items):
        aut *= factorial(sum(1 for _ in grp))
    return f"({vlab[root]}:{''.join(items)})", aut


def _decorations(
    tree: Tree,
    vertex_labels: Sequence | None,
    edge_labels: Sequence | None,
    arcs: Sequence[tuple[int, int]] | None,
) -> tuple[list[str], EdgeLabel]:
    vlab = ["" if vertex_labels is None else str(vertex_labels[v]) for v in range(tree.vertex_count)]
    index = {e: i for i, e in enumerate(tree.edges)}
    elabels = None if edge_labels is None else [str(x) for x in edge_labels]
    arcset = None if arcs is None else set(map(tuple, arcs))

    def elab(u: int, v: int) -> str:
        s = "" if elabels is None else elabels[index[(min(u, v), max(u, v))]]
        if arcset is not None:
            s += ">" if (u, v) in arcset else "<"
        return s

    return vlab, elab


def _code_and_aut(tree, vertex_labels=None, edge_labels=None, arcs=None) -> tuple[str, int]:
    adj = tree.adjacency
    vlab, elab = _decorations(tree, vertex_labels, edge_labels, arcs)
    cents = _centroids(adj)
    if len(cents) == 1:
        code, aut = _rooted(adj, cents[0], -1, vlab, elab)
        return "V" + code, aut
    u, v = cents
    cu, au = _rooted(adj, u, v, vlab, elab)
    cv, av = _rooted(adj, v, u, vlab, elab)
    s1 = f"{cu}<{elab(u, v)}>{cv}"
    s2 = f"{cv}<{elab(v, u)}>{cu}"
    return "E" + min(s1, s2), au * av * (2 if s1 == s2 else 1)


def canonical_code(
    tree: Tree,
    vertex_labels: Sequence | None = None,
    edge_labels: Sequence | None = None,
    arcs: Sequence[tuple[int, int]] | None = None,
) -> str:
    """Isomorphism-invariant string for a (decorated) tree.

    ``vertex_labels`` is indexed by vertex, ``edge_labels`` by position in
    ``tree.edges``; ``arcs`` lists the edges as (tail, head) pairs.
    """
    return _code_and_aut(tree, vertex_labels, edge_labels, arcs)[0]


def aut_order(
    tree: Tree,
    colors: Sequence | None = None,
    degrees: Sequence | None = None,
    orientation: Sequence[tuple[int, int]] | None = None,
    leaf_labels: Mapping[int, int] | None = None,
) -> int:
    """Order of the group of automorphisms preserving the given decorations."""
    vlabels = None
    if colors is not None or leaf_labels is not None:
        vlabels = [
            f"{'' if colors is None else colors[v]}.{'' if leaf_labels is None else leaf_labels.get(v, '')}"
            for v in range(tree.vertex_count)
        ]
    return _code_and_aut(tree, vlabels, degrees, orientation)[1]


# --------------------------------------------------------------------------
# unlabeled trees


@lru_cache(maxsize=None)
def free_trees(n_vertices: int) -> tuple[Tree, ...]:
    """All trees on ``n_vertices`` vertices up to isomorphism, sorted by code."""
    if n_vertices < 1:
        raise ValueError("trees have at least one vertex")
    if n_vertices == 1:
        return (Tree(1, ()),)
    found: dict[str, Tree] = {}
    for small in free_trees(n_vertices - 1):
        seen_roots = set()
        adj = small.adjacency
        for v in range(small.vertex_count):
            # vertices with equal rooted shape give the same extension
            key = _rooted(adj, v, -1, [""] * small.vertex_count, lambda a, b: "")[0]
            if key in seen_roots:
                continue
            seen_roots.add(key)
            t = Tree(n_vertices, small.edges + ((v, n_vertices - 1),))
            found.setdefault(t.code(), t)
    return tuple(found[k] for k in sorted(found))


def trees_up_to(max_vertices: int) -> Iterator[Tree]:
    for n in range(1, max_vertices + 1):
        yield from free_trees(n)


# --------------------------------------------------------------------------
# set partitions and nests


def set_partitions(items: Sequence) -> Iterator[list[list]]:
    """All partitions of ``items`` into non-empty blocks."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]


@lru_cache(maxsize=None)
def _broken_families(s: frozenset) -> tuple[frozenset, ...]:
    """Laminar families of subsets (size >= 2) of ``s`` not containing ``s``."""
    out = []
    for part in set_partitions(sorted(s)):
        if len(part) == 1:
            continue
        combos = [frozenset()]
        for block in part:
            if len(block) < 2:
                continue
            options = _whole_families(frozenset(block))
            combos = [c | o for c in combos for o in options]
        out.extend(combos)
    return tuple(out)


@lru_cache(maxsize=None)
def _whole_families(s: frozenset) -> tuple[frozenset, ...]:
    return tuple(f | {s} for f in _broken_families(s)) if len(s) >= 2 else ()


def _family_key(family) -> tuple:
    return (len(family), sorted((-len(x), sorted(x)) for x in family))


@dataclass(frozen=True)
class Nest:
    n: int
    subsets: frozenset

    def __post_init__(self):
        subs = frozenset(frozenset(s) for s in self.subsets)
        object.__setattr__(self, "subsets", subs)
        full = set(range(1, self.n + 1))
        for s in subs:
            if len(s) < 2:
                raise ValueError(f"nest member {sorted(s)} has fewer than 2 elements")
            if not s <= full:
                raise ValueError(f"nest member {sorted(s)} is not inside 1..{self.n}")
        for a, b in combinations(subs, 2):
            if a & b and not (a <= b or b <= a):
                raise ValueError(f"{sorted(a)} and {sorted(b)} overlap without nesting")

    @property
    def whole(self) -> bool:
        return frozenset(range(1, self.n + 1)) in self.subsets

    def completed(self) -> "Nest":
        return Nest(self.n, self.subsets | {frozenset(range(1, self.n + 1))})

    def sort_key(self) -> tuple:
        return _family_key(self.subsets)

    def __repr__(self) -> str:
        body = ", ".join("{" + ",".join(map(str, sorted(s))) + "}" for s in sorted(self.subsets, key=lambda x: (-len(x), sorted(x))))
        return f"Nest(n={self.n}, [{body}])"


def enumerate_nests(n: int) -> list[Nest]:
    """Every ``n``-nest, broken ones (including the empty nest) and whole ones."""
    if n < 2:
        raise ValueError("nests are defined for n >= 2")
    full = frozenset(range(1, n + 1))
    fams = list(_broken_families(full)) + list(_whole_families(full))
    return [Nest(n, f) for f in sorted(fams, key=_family_key)]


# --------------------------------------------------------------------------
# marked stable trees


@dataclass(frozen=True)
class MarkedStableTree:
    tree: Tree
    leaf_labels: tuple[tuple[int, int], ...]  # (vertex, label) pairs

    def __post_init__(self):
        vals = self.tree.valencies
        if self.tree.vertex_count > 1 and any(k == 2 for k in vals):
            raise ValueError("stable trees have no vertex of valency 2")
        labels = dict(self.leaf_labels)
        leaves = set(self.tree.leaves)
        if set(labels) != leaves:
            raise ValueError("leaf labels must be placed exactly on the end vertices")
        if sorted(labels.values()) != list(range(1, len(leaves) + 1)):
            raise ValueError("leaf labels must be a bijection onto 1..n")
        object.__setattr__(self, "leaf_labels", tuple(sorted(labels.items())))

    @property
    def n(self) -> int:
        return len(self.leaf_labels)

    @property
    def interior(self) -> list[int]:
        return [v for v, k in enumerate(self.tree.valencies) if k != 1]

    def code(self) -> str:
        labels = dict(self.leaf_labels)
        return canonical_code(self.tree, [labels.get(v, "") for v in range(self.tree.vertex_count)])

    def to_json(self) -> dict:
        d = self.tree.to_json()
        d["leaf_labels"] = {str(v): lab for v, lab in self.leaf_labels}
        return d


def _stable_from_family(n: int, family: frozenset) -> MarkedStableTree:
    # rooted at the leaf labelled n; members of the family are interior vertices
    members = sorted(family, key=lambda s: (-len(s), sorted(s)))
    index = {s: i + 1 for i, s in enumerate(members)}
    leaf_vertex = {i: len(members) + i for i in range(1, n)}
    edges = []
    for s in members:
        parents = [p for p in members if s < p]
        parent = min(parents, key=len) if parents else None
        edges.append((index[s], 0 if parent is None else index[parent]))
    for i in range(1, n):
        holders = [p for p in members if i in p]
        edges.append((leaf_vertex[i], index[min(holders, key=len)]))
    labels = [(0, n)] + [(leaf_vertex[i], i) for i in range(1, n)]
    return MarkedStableTree(Tree(n + len(members), tuple(edges)), tuple(labels))


def enumerate_marked_stable(n: int) -> list[MarkedStableTree]:
    """All stable trees with ``n`` labelled ends, one per isomorphism class.

    Rooting at end ``n``, interior vertices correspond to the sets of the
    other labels below them, which form a laminar family on ``1..n-1``
    containing the whole set; every such family occurs exactly once.
    """
    if n < 3:
        raise ValueError("marked stable trees need n >= 3")
    full = frozenset(range(1, n))
    fams = sorted(_whole_families(full), key=_family_key)
    return [_stable_from_family(n, f) for f in fams]


# --------------------------------------------------------------------------
# admissible (oriented) trees


@dataclass(frozen=True)
class AdmissibleTree:
    tree: Tree
    arcs: tuple[tuple[int, int], ...]  # (tail, head), aligned with tree.edges
    leaf_labels: tuple[tuple[int, int], ...]

    def __post_init__(self):
        t = self.tree
        if sorted((min(a, b), max(a, b)) for a, b in self.arcs) != list(t.edges):
            raise ValueError("arcs must orient exactly the tree's edges")
        arcs = tuple(sorted(self.arcs, key=lambda a: (min(a), max(a))))
        object.__setattr__(self, "arcs", arcs)
        indeg = [0] * t.vertex_count
        outdeg = [0] * t.vertex_count
        for a, b in arcs:
            outdeg[a] += 1
            indeg[b] += 1
        sources = [v for v in range(t.vertex_count) if indeg[v] == 0]
        if len(sources) != 1:
            raise ValueError("admissible trees have exactly one source")
        s = sources[0]
        if outdeg[s] < 2:
            raise ValueError("the source needs at least two outgoing edges")
        if any(indeg[v] != 1 for v in range(t.vertex_count) if v != s):
            raise ValueError("every non-source vertex needs exactly one incoming edge")
        vals = t.valencies
        if any(vals[v] == 2 for v in range(t.vertex_count) if v != s):
            raise ValueError("non-source interior vertices need valency >= 3")
        labels = dict(self.leaf_labels)
        if set(labels) != set(t.leaves):
            raise ValueError("leaf labels must sit on the end vertices")
        if sorted(labels.values()) != list(range(1, len(labels) + 1)):
            raise ValueError("leaf labels must be a bijection onto 1..n")
        object.__setattr__(self, "leaf_labels", tuple(sorted(labels.items())))

    @property
    def source(self) -> int:
        heads = {b for _, b in self.arcs}
        return next(v for v in range(self.tree.vertex_count) if v not in heads)

    @property
    def n(self) -> int:
        return len(self.leaf_labels)

    def out_degree(self, v: int) -> int:
        return sum(1 for a, _ in self.arcs if a == v)

    @property
    def interior_non_source(self) -> list[int]:
        s = self.source
        return [v for v, k in enumerate(self.tree.valencies) if k != 1 and v != s]

    def code(self) -> str:
        labels = dict(self.leaf_labels)
        return canonical_code(
            self.tree, [labels.get(v, "") for v in range(self.tree.vertex_count)], arcs=self.arcs
        )

    def to_json(self) -> dict:
        d = self.tree.to_json()
        d["orientation"] = [list(a) for a in self.arcs]
        d["leaf_labels"] = {str(v): lab for v, lab in self.leaf_labels}
        return d


def nest_to_tree(nest: Nest) -> AdmissibleTree:
    """The admissible tree of ``nest`` (a broken nest is completed first)."""
    whole = nest.completed()
    members = sorted(whole.subsets, key=lambda s: (-len(s), sorted(s)))
    verts = members + [frozenset({i}) for i in range(1, nest.n + 1)]
    index = {s: i for i, s in enumerate(verts)}
    arcs = []
    for s in verts[1:]:
        parent = min((p for p in members if s < p), key=len)
        arcs.append((index[parent], index[s]))
    labels = tuple((index[frozenset({i})], i) for i in range(1, nest.n + 1))
    return AdmissibleTree(Tree(len(verts), tuple(arcs)), tuple(arcs), labels)


def tree_to_nest(t: AdmissibleTree) -> Nest:
    """Inverse of :func:`nest_to_tree` on whole nests."""
    children: dict[int, list[int]] = {v: [] for v in range(t.tree.vertex_count)}
    for a, b in t.arcs:
        children[a].append(b)
    labels = dict(t.leaf_labels)

    def below(v: int) -> frozenset:
        if v in labels:
            return frozenset({labels[v]})
        return frozenset().union(*(below(c) for c in children[v]))

    subsets = {below(v) for v in range(t.tree.vertex_count) if v not in labels}
    return Nest(t.n, frozenset(subsets))


# --------------------------------------------------------------------------
# bicoloured trees with edge degrees


@dataclass(frozen=True)
class CoveringTree:
    tree: Tree
    colors: tuple[int, ...]
    degrees: tuple[int, ...]  # aligned with tree.edges

    def __post_init__(self):
        if len(self.colors) != self.tree.vertex_count:
            raise ValueError("one color per vertex")
        if len(self.degrees) != len(self.tree.edges):
            raise ValueError("one degree per edge")
        if any(c not in (1, 2) for c in self.colors):
            raise ValueError("colors are 1 or 2")
        if any(d < 1 for d in self.degrees):
            raise ValueError("edge degrees are positive")
        for u, v in self.tree.edges:
            if self.colors[u] == self.colors[v]:
                raise ValueError("adjacent vertices must have different colors")

    @property
    def total_degree(self) -> int:
        return sum(self.degrees)

    @property
    def F(self) -> int:
        return sum(1 for c in self.colors if c == 2)

    def sigma(self, v: int) -> int:
        return sum(d for (a, b), d in zip(self.tree.edges, self.degrees) if v in (a, b))

    def w(self, color: int) -> int:
        vals = self.tree.valencies
        return sum(vals[v] - 1 for v in range(self.tree.vertex_count) if self.colors[v] == color)

    def aut_order(self) -> int:
        return aut_order(self.tree, colors=self.colors, degrees=self.degrees)

    def code(self) -> str:
        return canonical_code(self.tree, self.colors, self.degrees)

    def to_json(self) -> dict:
        d = self.tree.to_json()
        d["colors"] = list(self.colors)
        d["degrees"] = list(self.degrees)
        return d


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    for cuts in combinations(range(1, total), parts - 1):
        bounds = (0,) + cuts + (total,)
        yield tuple(bounds[i + 1] - bounds[i] for i in range(parts))


def _two_colorings(tree: Tree) -> list[tuple[int, ...]]:
    parity = [0] * tree.vertex_count
    adj = tree.adjacency
    seen, stack = {0}, [0]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                parity[w] = 1 - parity[v]
                stack.append(w)
    return [tuple(1 + p for p in parity), tuple(2 - p for p in parity)]


def enumerate_covering_trees(d: int) -> list[CoveringTree]:
    """Bicoloured trees with positive edge degrees summing to ``d``, up to isomorphism."""
    if d < 1:
        raise ValueError("covering degree must be >= 1")
    found: dict[str, CoveringTree] = {}
    for n_edges in range(1, d + 1):
        for shape in free_trees(n_edges + 1):
            for degs in _compositions(d, n_edges):
                for cols in _two_colorings(shape):
                    ct = CoveringTree(shape, cols, degs)
                    found.setdefault(ct.code(), ct)
    return [found[k] for k in sorted(found)]
