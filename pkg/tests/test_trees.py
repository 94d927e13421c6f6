from __future__ import annotations

import random
from itertools import combinations, permutations
from math import factorial

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treesums.trees import (
    AdmissibleTree,
    CoveringTree,
    MarkedStableTree,
    Nest,
    Tree,
    aut_order,
    canonical_code,
    enumerate_covering_trees,
    enumerate_marked_stable,
    enumerate_nests,
    free_trees,
    nest_to_tree,
    set_partitions,
    tree_to_nest,
)


def _random_tree(n: int, rng: random.Random) -> Tree:
    return Tree(n, tuple((v, rng.randrange(v)) for v in range(1, n)))


def _brute_aut(tree: Tree, colors=None, degrees=None) -> int:
    edges = {frozenset(e): i for i, e in enumerate(tree.edges)}
    count = 0
    for perm in permutations(range(tree.vertex_count)):
        if colors is not None and any(colors[perm[v]] != colors[v] for v in range(tree.vertex_count)):
            continue
        ok = True
        for (u, v), i in zip(tree.edges, range(len(tree.edges))):
            j = edges.get(frozenset((perm[u], perm[v])))
            if j is None or (degrees is not None and degrees[j] != degrees[i]):
                ok = False
                break
        count += ok
    return count


# ---------------------------------------------------------------- free trees


@pytest.mark.parametrize("n", range(1, 12))
def test_free_tree_counts_match_networkx(n):
    oracle = sum(1 for _ in nx.nonisomorphic_trees(n)) if n > 1 else 1
    assert len(free_trees(n)) == oracle


@pytest.mark.parametrize("n", range(2, 9))
def test_free_trees_pairwise_non_isomorphic(n):
    graphs = [nx.Graph(list(t.edges)) for t in free_trees(n)]
    for g, h in combinations(graphs, 2):
        assert not nx.is_isomorphic(g, h)


@pytest.mark.parametrize("n", range(1, 8))
def test_aut_order_brute_force(n):
    for t in free_trees(n):
        assert aut_order(t) == _brute_aut(t)


def test_aut_order_small_cases():
    assert aut_order(Tree(2, ((0, 1),))) == 2
    star = Tree(4, ((0, 1), (0, 2), (0, 3)))
    assert aut_order(star) == 6
    assert aut_order(star, degrees=(1, 1, 2)) == 2


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 7), st.integers(0, 10 ** 6))
def test_decorated_aut_brute_force(n, seed):
    rng = random.Random(seed)
    t = _random_tree(n, rng)
    colors = [rng.randint(1, 2) for _ in range(n)]
    degrees = [rng.randint(1, 2) for _ in range(n - 1)]
    assert aut_order(t, colors=colors, degrees=degrees) == _brute_aut(t, colors, degrees)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 12), st.integers(0, 10 ** 6))
def test_canonical_code_relabel_invariant(n, seed):
    rng = random.Random(seed)
    t = _random_tree(n, rng)
    perm = list(range(n))
    rng.shuffle(perm)
    assert t.relabel(perm).code() == t.code()
    assert aut_order(t.relabel(perm)) == aut_order(t)


def test_tree_validation():
    with pytest.raises(ValueError):
        Tree(3, ((0, 1),))
    with pytest.raises(ValueError):
        Tree(4, ((0, 1), (1, 0), (2, 3)))
    with pytest.raises(ValueError):
        Tree(2, ((0, 2),))


def test_tree_json_round_trip():
    t = Tree(4, ((0, 1), (1, 2), (1, 3)))
    assert Tree.from_json(t.to_json()) == t


# ---------------------------------------------------------------- set partitions


def test_set_partitions_are_bell_numbers():
    assert [sum(1 for _ in set_partitions(list(range(n)))) for n in range(1, 7)] == [1, 2, 5, 15, 52, 203]


# ---------------------------------------------------------------- nests


def _laminar_brute(n: int) -> set[frozenset]:
    universe = range(1, n + 1)
    subsets = [frozenset(c) for k in range(2, n + 1) for c in combinations(universe, k)]
    out = set()
    for mask in range(1 << len(subsets)):
        fam = [s for i, s in enumerate(subsets) if mask >> i & 1]
        if all(not (a & b) or a <= b or b <= a for a, b in combinations(fam, 2)):
            out.add(frozenset(fam))
    return out


@pytest.mark.parametrize("n", [2, 3, 4])
def test_nests_match_brute_force(n):
    assert {x.subsets for x in enumerate_nests(n)} == _laminar_brute(n)


def test_nest_counts():
    assert [len(enumerate_nests(n)) for n in range(2, 6)] == [2, 8, 52, 472]


@pytest.mark.parametrize("n", range(2, 6))
def test_whole_nests_match_marked_stable_trees(n):
    # rooting at one extra end identifies whole nests on n with stable trees on n+1 ends
    whole = sum(1 for x in enumerate_nests(n) if x.whole)
    assert whole == len(enumerate_marked_stable(n + 1))
    assert whole * 2 == len(enumerate_nests(n))


def test_nest_validation():
    with pytest.raises(ValueError):
        Nest(3, frozenset({frozenset({1, 2}), frozenset({2, 3})}))
    with pytest.raises(ValueError):
        Nest(3, frozenset({frozenset({1})}))


@pytest.mark.parametrize("n", range(2, 6))
def test_nest_tree_round_trip(n):
    codes = set()
    for x in enumerate_nests(n):
        t = nest_to_tree(x)
        assert isinstance(t, AdmissibleTree)
        assert tree_to_nest(t) == x.completed()
        if x.whole:
            codes.add(t.code())
    assert len(codes) == sum(1 for x in enumerate_nests(n) if x.whole)


def test_admissible_tree_validation():
    path = Tree(3, ((0, 1), (1, 2)))
    with pytest.raises(ValueError):
        AdmissibleTree(path, ((0, 1), (1, 2)), ((2, 1),))


# ---------------------------------------------------------------- marked stable trees


def _stable_count_by_automorphisms(n: int) -> int:
    # labelled trees = sum over shapes of n!/|Aut| where Aut acts on the ends
    total = 0
    for v in range(n + 1, 2 * n - 1):
        for t in free_trees(v):
            vals = t.valencies
            if sum(1 for k in vals if k == 1) == n and 2 not in vals:
                total += factorial(n) // aut_order(t)
    return total


@pytest.mark.parametrize("n", range(3, 8))
def test_marked_stable_counts(n):
    trees = enumerate_marked_stable(n)
    assert len(trees) == _stable_count_by_automorphisms(n)
    assert len({t.code() for t in trees}) == len(trees)


def test_marked_stable_count_values():
    assert [len(enumerate_marked_stable(n)) for n in range(3, 8)] == [1, 4, 26, 236, 2752]


def test_marked_stable_rejects_bivalent():
    t = Tree(4, ((0, 1), (1, 2), (2, 3)))
    with pytest.raises(ValueError):
        MarkedStableTree(t, ((0, 1), (3, 2)))


# ---------------------------------------------------------------- covering trees


def _covering_brute(d: int) -> int:
    reps: list[nx.Graph] = []
    match = lambda a, b: a == b  # noqa: E731
    for e in range(1, d + 1):
        for shape in nx.nonisomorphic_trees(e + 1):
            nodes = list(shape.nodes)
            for degs in _all_compositions(d, e):
                for colours in _proper(shape):
                    g = nx.Graph()
                    for v in nodes:
                        g.add_node(v, c=colours[v])
                    for (u, v), k in zip(shape.edges, degs):
                        g.add_edge(u, v, k=k)
                    if not any(
                        nx.is_isomorphic(g, h, node_match=lambda a, b: a["c"] == b["c"], edge_match=lambda a, b: a["k"] == b["k"])
                        for h in reps
                    ):
                        reps.append(g)
    return len(reps)


def _all_compositions(total, parts):
    for cuts in combinations(range(1, total), parts - 1):
        b = (0,) + cuts + (total,)
        yield [b[i + 1] - b[i] for i in range(parts)]


def _proper(shape):
    root = next(iter(shape.nodes))
    depth = nx.single_source_shortest_path_length(shape, root)
    base = {v: 1 + depth[v] % 2 for v in shape.nodes}
    return [base, {v: 3 - c for v, c in base.items()}]


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_covering_classes_match_networkx(d):
    assert len(enumerate_covering_trees(d)) == _covering_brute(d)


def test_covering_class_counts():
    assert [len(enumerate_covering_trees(d)) for d in range(1, 6)] == [1, 3, 6, 16, 37]


def test_covering_statistics():
    # path 1 - 2 - 1 with degrees 1, 2
    ct = CoveringTree(Tree(3, ((0, 1), (1, 2))), (1, 2, 1), (1, 2))
    assert ct.total_degree == 3
    assert ct.F == 1
    assert ct.sigma(1) == 3
    assert ct.w(1) == 0 and ct.w(2) == 1
    assert ct.aut_order() == 1
    with pytest.raises(ValueError):
        CoveringTree(Tree(2, ((0, 1),)), (1, 1), (1,))
