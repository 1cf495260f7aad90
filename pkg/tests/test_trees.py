import math
from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from plk.trees import (chain_tree, collapses, corolla, encode, enumerate_stable, eps_close, four_point_ok,
                       interior_edges, is_stable, isometric, leq, leaves, metric_embed, poset_failures,
                       star_tree, subtree, tree_from_json, tree_to_json, two_group_tree)


@lru_cache(maxsize=None)
def count_oracle(d: int) -> int:
    """Planar rooted trees with d leaves and at least two children per vertex, by composition recurrence."""
    if d == 1:
        return 1
    return sum(forests(d, k) for k in range(2, d + 1))


@lru_cache(maxsize=None)
def forests(n: int, k: int) -> int:
    """Ordered k-tuples of such trees with n leaves in total."""
    if k == 0:
        return int(n == 0)
    return sum(count_oracle(a) * forests(n - a, k - 1) for a in range(1, n - k + 2))


def test_count_oracle_values():
    assert [count_oracle(d) for d in range(2, 7)] == [1, 3, 11, 45, 197]


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_enumeration_matches_oracle(d):
    ts = enumerate_stable(d)
    assert len(ts) == count_oracle(d)
    assert len({encode(t) for t in ts}) == len(ts)
    assert all(is_stable(t) and leaves(t) == list(range(1, d + 1)) for t in ts)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_collapse_order_is_poset(d):
    ts = enumerate_stable(d)
    assert not poset_failures(ts)
    c = corolla(d)
    assert all(leq(t, c) for t in ts)


def test_collapse_counts():
    # a binary tree with d leaves has d - 2 interior edges and 2^(d-2) distinct collapses
    for t in enumerate_stable(5):
        if len(interior_edges(t)) == 3:
            assert len(collapses(t)) == 8


def test_json_roundtrip():
    for t in enumerate_stable(4):
        assert tree_from_json(tree_to_json(t)) == t


def test_star_and_chain_metrics():
    s = star_tree(4)
    assert np.allclose(metric_embed(s), math.pi)
    c = two_group_tree(2, 2, 1.5)
    assert four_point_ok(c)
    assert isometric(chain_tree([2, 2], [0.0]), star_tree(4))
    assert eps_close(two_group_tree(2, 2, 1e-3), star_tree(4), 1e-2)
    assert not eps_close(two_group_tree(2, 2, 1.0), star_tree(4), 1e-2)


@given(st.lists(st.integers(1, 3), min_size=2, max_size=4), st.lists(st.floats(0.1, 3.0), min_size=3, max_size=3))
@settings(max_examples=40, deadline=None)
def test_chain_trees_satisfy_four_point(groups, gaps):
    # end centers need two exterior vertices to avoid valence 2
    groups = [max(groups[0], 2)] + groups[1:-1] + [max(groups[-1], 2)]
    m = chain_tree(groups, gaps[:len(groups) - 1])
    assert four_point_ok(m)
    n = len(m.boundary)
    a = list(range(0, n, 2)) + ([n - 1] if n % 2 == 0 else [])
    if len(set(a)) >= 3:
        sub = subtree(m, a)
        full = metric_embed(m)
        # the subtree's boundary distances are the restrictions of the ambient ones
        idx = {}
        k = 0
        for i in range(n):
            for j in range(i + 1, n):
                idx[(i, j)] = k
                k += 1
        aa = sorted(set(a))
        want = [full[idx[(aa[i], aa[j])]] for i in range(len(aa)) for j in range(i + 1, len(aa))]
        assert np.allclose(metric_embed(sub), want)


def test_rejects_unstable_input():
    with pytest.raises(ValueError):
        enumerate_stable(1)
    with pytest.raises(ValueError):
        star_tree(2)
