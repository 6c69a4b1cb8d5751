"""Vertex addressing, neighbourhoods, and the tree metric."""
from __future__ import annotations

import random

import pytest

from escape_lab.errors import AddressError, ConfigError
from escape_lab.tree import (
    TreeParams,
    ball_size,
    distance,
    format_vertex,
    in_forward_subtree,
    level,
    m_predecessor,
    min_distance,
    neighbors,
    parse_vertex,
    sphere_size,
    validate_vertex,
)

P2 = TreeParams(d=2)
P3 = TreeParams(d=3)


def random_vertex(rng: random.Random, params: TreeParams, max_level: int) -> tuple:
    n = rng.randrange(max_level + 1)
    if n == 0:
        return ()
    first = rng.randrange(params.d + 1)
    rest = tuple(rng.randrange(params.d) for _ in range(n - 1))
    return (first,) + rest


def test_params_validation():
    with pytest.raises(ConfigError):
        TreeParams(d=1)
    with pytest.raises(ConfigError):
        TreeParams(d=0)
    assert TreeParams(d=2).d == 2


def test_parse_format_roundtrip():
    assert parse_vertex("", P2) == ()
    assert parse_vertex("2", P2) == (2,)
    assert parse_vertex("2.0.1", P2) == (2, 0, 1)
    assert format_vertex(()) == ""
    assert format_vertex((2, 0, 1)) == "2.0.1"
    rng = random.Random(71)
    for _ in range(200):
        v = random_vertex(rng, P3, 8)
        assert parse_vertex(format_vertex(v), P3) == v


def test_address_validation():
    # The root has d + 1 outgoing branches; deeper vertices only d.
    validate_vertex((2,), P2)
    validate_vertex((2, 1, 0), P2)
    with pytest.raises(AddressError):
        validate_vertex((3,), P2)
    with pytest.raises(AddressError):
        validate_vertex((0, 2), P2)  # later coordinates range over 0..d-1
    with pytest.raises(AddressError):
        validate_vertex((-1,), P2)
    with pytest.raises(AddressError):
        parse_vertex("0.x", P2)
    with pytest.raises(AddressError):
        parse_vertex("0..1", P2)


def test_neighbors_shape():
    root_nbrs = neighbors((), P2)
    assert root_nbrs == [(0,), (1,), (2,)]
    v = (1, 0)
    nbrs = neighbors(v, P2)
    assert nbrs[0] == (1,)  # parent first
    assert nbrs[1:] == [(1, 0, 0), (1, 0, 1)]
    assert len(nbrs) == P2.d + 1
    for w in nbrs:
        assert distance(v, w) == 1


def test_neighbors_symmetric():
    rng = random.Random(5)
    for _ in range(100):
        v = random_vertex(rng, P2, 6)
        for w in neighbors(v, P2):
            assert v in neighbors(w, P2)


def test_level_and_distance_examples():
    assert level(()) == 0
    assert level((2, 1, 1)) == 3
    assert distance((), (2, 1)) == 2
    assert distance((0, 1), (0, 1)) == 0
    assert distance((0, 0), (0, 1)) == 2
    assert distance((0,), (1,)) == 2
    assert distance((2, 0, 1), (2,)) == 2


def brute_distance(x: tuple, y: tuple) -> int:
    # Walk both addresses up to the common prefix.
    k = 0
    while k < len(x) and k < len(y) and x[k] == y[k]:
        k += 1
    return (len(x) - k) + (len(y) - k)


def test_metric_axioms_random():
    rng = random.Random(20240817)
    for _ in range(2000):
        x = random_vertex(rng, P2, 7)
        y = random_vertex(rng, P2, 7)
        z = random_vertex(rng, P2, 7)
        dxy = distance(x, y)
        assert dxy == brute_distance(x, y)
        assert dxy == distance(y, x)
        assert (dxy == 0) == (x == y)
        assert dxy <= distance(x, z) + distance(z, y)


def test_m_predecessor():
    assert m_predecessor((2, 0, 1), 0) == (2, 0, 1)
    assert m_predecessor((2, 0, 1), 2) == (2,)
    assert m_predecessor((2, 0, 1), 3) == ()
    with pytest.raises(AddressError):
        m_predecessor((2, 0), 3)
    with pytest.raises(ConfigError):
        m_predecessor((2, 0), -1)


def test_in_forward_subtree():
    assert in_forward_subtree((), (1, 0))
    assert in_forward_subtree((1,), (1, 0, 1))
    assert in_forward_subtree((1, 0), (1, 0))
    assert not in_forward_subtree((1, 0), (1,))
    assert not in_forward_subtree((0,), (1, 0))


def test_sphere_and_ball_sizes():
    # Level 1 holds d + 1 vertices, not d: all of the root's neighbours.
    assert [sphere_size(n, P2) for n in range(5)] == [1, 3, 6, 12, 24]
    assert [ball_size(n, P2) for n in range(5)] == [1, 4, 10, 22, 46]
    for params in (P2, P3, TreeParams(d=5)):
        total = 0
        for n in range(9):
            total += sphere_size(n, params)
            assert ball_size(n, params) == total
    with pytest.raises(ConfigError):
        sphere_size(-1, P2)
    with pytest.raises(ConfigError):
        ball_size(-2, P2)


def test_min_distance_edge_cases():
    assert min_distance([], [()]) is None
    assert min_distance([()], []) is None
    assert min_distance([(0,)], [(0,)]) == 0
    assert min_distance([(), (1,)], [(1, 0)]) == 1


def test_min_distance_matches_brute_force():
    rng = random.Random(99)
    for _ in range(60):
        xs = [random_vertex(rng, P2, 6) for _ in range(rng.randrange(1, 8))]
        ys = [random_vertex(rng, P2, 6) for _ in range(rng.randrange(1, 8))]
        expected = min(distance(x, y) for x in xs for y in ys)
        assert min_distance(xs, ys) == expected
