import math
import random

import pytest

from scoperoute import build_network, make_scope

INF = math.inf


@pytest.fixture
def n1():
    """Four-vertex micro-network: s=0, a=1, b=2, t=3.

    e0=(s,a,2) level 0, e1=(a,b,10) unbounded, e2=(b,t,2) level 0,
    e3=(a,t,20) unbounded.
    """
    return build_network(4, [(0, 1), (1, 2), (2, 3), (1, 3)], [2, 10, 2, 20])


@pytest.fixture
def n1_scope5():
    return make_scope([0, 1, 0, 1], [5, INF])


@pytest.fixture
def n1_scope15():
    return make_scope([0, 1, 0, 1], [15, INF])


@pytest.fixture
def n1e5():
    """n1 plus a parallel level-0 shortcut e4=(a,b,4)."""
    return build_network(4, [(0, 1), (1, 2), (2, 3), (1, 3), (1, 2)], [2, 10, 2, 20, 4])


@pytest.fixture
def n1e5_scope5():
    return make_scope([0, 1, 0, 1, 0], [5, INF])


@pytest.fixture
def permit_fixture():
    """Line with an unbounded closure bypassable only on a level-0 road.

    s=0, a=1, b=2, t=3; e0=(s,a,10,inf), e1=(a,b,10,inf) to be closed,
    e2=(b,t,10,inf), e3=(a,b,4, level 0); budget 5 at level 0, so e3 is
    inadmissible from either end and needs a detour permit.
    """
    net = build_network(4, [(0, 1), (1, 2), (2, 3), (1, 2)], [10, 10, 10, 4])
    scope = make_scope([1, 1, 1, 0], [5, INF])
    return net.with_updated_weights({1: INF}), scope


def random_network(rng: random.Random, max_vertices=12, max_edges=30, max_levels=3, max_weight=20):
    n = rng.randint(3, max_vertices)
    m = rng.randint(n, min(max_edges, 3 * n))
    edges = [(rng.randrange(n), rng.randrange(n)) for _ in range(m)]
    weights = [rng.randint(1, max_weight) for _ in range(m)]
    net = build_network(n, edges, weights)
    levels_used = rng.randint(2, max_levels)
    lv = [rng.randrange(levels_used) for _ in range(m)]
    nu_vals = sorted(rng.sample(range(0, 50), levels_used - 1)) + [INF]
    scope = make_scope(lv, nu_vals)
    return net, scope


def strongly_connected_network(rng: random.Random, max_vertices=10, max_levels=3):
    n = rng.randint(4, max_vertices)
    order = list(range(n))
    rng.shuffle(order)
    edges = [(order[i], order[(i + 1) % n]) for i in range(n)]
    for _ in range(rng.randint(1, n)):
        edges.append((rng.randrange(n), rng.randrange(n)))
    weights = [rng.randint(1, 9) for _ in edges]
    net = build_network(n, edges, weights)
    levels_used = rng.randint(2, max_levels)
    lv = [rng.randrange(levels_used) for _ in edges]
    nu_vals = sorted(rng.sample(range(1, 30), levels_used - 1)) + [INF]
    return net, make_scope(lv, nu_vals)
