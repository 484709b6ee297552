"""Label-setting searches: classical Dijkstra and the scope-aware variant.

The scope-aware search keeps, per vertex, the distance estimate together
with a draw vector recording how much weight the best walks have travelled
on strictly-higher-level edges. An outgoing edge is relaxed only while the
draw component at the edge's level stays within that level's budget.

Edge usability is witness-based: an edge is usable from ``s`` exactly when
the settled draw label of its tail passes the gate, i.e. when some
cheapest admissible walk to the tail leaves enough budget. The
enumeration-based oracle in this module implements the same relation by
brute force and is the ground truth the searches are tested against.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .network import (
    INF,
    NetworkError,
    RoadNetwork,
    ScopeMapping,
    Walk,
    add_draw,
    check_walk,
    inf_vector,
    min_vec,
    zero_vector,
)


@dataclass
class SearchResult:
    """Labels of one classical Dijkstra run."""

    source: int
    dist: list[float]
    parent_edge: list[int | None]
    scanned_count: int = 0
    relaxed_count: int = 0

    def walk_to(self, target: int) -> Walk | None:
        if self.dist[target] == INF:
            return None
        edges: list[int] = []
        at = target
        while at != self.source:
            e = self.parent_edge[at]
            assert e is not None
            edges.append(e)
            at = self._tails[e]
        edges.reverse()
        return Walk(self.source, tuple(edges))

    _tails: tuple[int, ...] = ()


def dijkstra(
    network: RoadNetwork,
    weighting: str,
    source: int,
    target: int | None = None,
) -> SearchResult:
    """Classical Dijkstra; edges of infinite weight are never relaxed."""
    if not (0 <= source < network.vertex_count):
        raise NetworkError(f"unknown source vertex {source}")
    if target is not None and not (0 <= target < network.vertex_count):
        raise NetworkError(f"unknown target vertex {target}")
    w = network.weights(weighting) if isinstance(weighting, str) else weighting
    n = network.vertex_count
    dist = [INF] * n
    parent: list[int | None] = [None] * n
    done = [False] * n
    dist[source] = 0.0
    heap: list[tuple[float, int]] = [(0.0, source)]
    res = SearchResult(source, dist, parent)
    res._tails = network.tails
    while heap:
        d, u = heapq.heappop(heap)
        if done[u] or d > dist[u]:
            continue
        done[u] = True
        res.scanned_count += 1
        if target is not None and u == target:
            break
        for e in network.out_edges(u):
            we = w[e]
            if we == INF:
                continue
            v = network.heads[e]
            nd = d + we
            if nd < dist[v]:
                dist[v] = nd
                parent[v] = e
                res.relaxed_count += 1
                heapq.heappush(heap, (nd, v))
    return res


def _edge_pack(network: RoadNetwork, scope: ScopeMapping):
    """Per-vertex (edge, head, level) triples, cached on the network."""
    key = ("pack", False, scope.level)
    pack = network._aux.get(key)
    if pack is None:
        level = scope.level
        heads = network.heads
        pack = [
            tuple((e, heads[e], level[e]) for e in network.out_edges(v))
            for v in range(network.vertex_count)
        ]
        network._aux[key] = pack
    return pack


@dataclass
class ScopeSearchResult:
    """Labels of one scope-aware run: distances, draw vectors, tree draws.

    ``sigma`` holds the component-wise minimum draw over cheapest admissible
    arrivals (what the relaxation gate reads). ``tree_sigma`` holds the draw
    of the concrete predecessor-tree walk, which stays exact under merges and
    is what obstruction states are measured from.
    """

    source: int
    dist: list[float]
    parent_edge: list[int | None]
    sigma: list[tuple[float, ...]]
    tree_sigma: list[tuple[float, ...]]
    scanned_count: int = 0
    relaxed_count: int = 0

    _tails: tuple[int, ...] = ()

    def walk_to(self, target: int) -> Walk | None:
        if self.dist[target] == INF:
            return None
        edges: list[int] = []
        at = target
        while at != self.source:
            e = self.parent_edge[at]
            assert e is not None
            edges.append(e)
            at = self._tails[e]
        edges.reverse()
        return Walk(self.source, tuple(edges))


def s_dijkstra(
    network: RoadNetwork,
    scope: ScopeMapping,
    source: int,
    weighting: str = "base",
    seed_sigma: tuple[float, ...] | None = None,
    track_tree: bool = True,
) -> ScopeSearchResult:
    """Scope-aware Dijkstra from ``source``.

    Relaxation of an edge at level ``l`` requires ``sigma[l][tail] <= nu[l]``.
    A strict distance improvement resets the head's draw vector to the new
    arrival's; an exact tie merges component-wise minima over the equal-cost
    arrivals. ``seed_sigma`` pre-charges the source's budgets; ``track_tree``
    can be dropped by callers that do not read the predecessor-tree draws.
    """
    if not (0 <= source < network.vertex_count):
        raise NetworkError(f"unknown source vertex {source}")
    scope.validate(network)
    w = network.weights(weighting) if isinstance(weighting, str) else weighting
    n = network.vertex_count
    nu = scope.nu
    level = scope.level
    dist = [INF] * n
    parent: list[int | None] = [None] * n
    sigma: list[tuple[float, ...]] = [inf_vector(scope)] * n
    tree: list[tuple[float, ...]] = [inf_vector(scope)] * n
    done = [False] * n
    start_vec = zero_vector(scope) if seed_sigma is None else tuple(seed_sigma)
    dist[source] = 0.0
    sigma[source] = start_vec
    tree[source] = start_vec
    res = ScopeSearchResult(source, dist, parent, sigma, tree)
    res._tails = network.tails
    heap: list[tuple[float, int]] = [(0.0, source)]
    pack = _edge_pack(network, scope)
    push = heapq.heappush
    pop = heapq.heappop
    scanned = 0
    relaxed = 0
    while heap:
        d, u = pop(heap)
        if done[u] or d > dist[u]:
            continue
        done[u] = True
        scanned += 1
        sig_u = sigma[u]
        for e, v, lv in pack[u]:
            we = w[e]
            if we == INF:
                continue
            if sig_u[lv] > nu[lv]:
                continue
            nd = d + we
            if nd > dist[v]:
                continue
            arrival = add_draw(sig_u, lv, we)
            if nd < dist[v]:
                dist[v] = nd
                parent[v] = e
                sigma[v] = arrival
                if track_tree:
                    tree[v] = add_draw(tree[u], lv, we)
                relaxed += 1
                push(heap, (nd, v))
            else:
                sigma[v] = min_vec(sigma[v], arrival)
    res.scanned_count = scanned
    res.relaxed_count = relaxed
    return res


def is_saturated(sigma: tuple[float, ...], scope: ScopeMapping) -> bool:
    """True when every finite-level budget is exhausted in the given label."""
    return all(sigma[lv] > scope.nu[lv] for lv in scope.finite_levels())


@dataclass
class BidirectionalResult:
    """Split-minimal result of a forward and a reverse scope-aware run."""

    walk: Walk | None
    cost: float
    meeting: int | None
    split_index: int | None
    forward: ScopeSearchResult
    backward: ScopeSearchResult

    @property
    def reachable(self) -> bool:
        return self.walk is not None

    @property
    def scanned_count(self) -> int:
        return self.forward.scanned_count + self.backward.scanned_count


def bidirectional_s_dijkstra(
    network: RoadNetwork,
    scope: ScopeMapping,
    source: int,
    target: int,
    weighting: str = "base",
) -> BidirectionalResult:
    """Minimum-cost walk splitting into an admissible prefix from ``source``
    and a suffix whose reversal is admissible from ``target`` in the
    reversed network.

    The two searches alternate on the smaller queue head and stop once both
    heads reach the best meeting sum seen. The sum-of-heads rule of plain
    bidirectional search is unsound here: the prefix and suffix relations
    are different, so a vertex settled on one side only can still close a
    cheaper meeting. Requiring each head to pass the best sum guarantees the
    minimising vertex is settled on both sides, and the result then equals
    the split minimum of two drained unidirectional runs.
    """
    if not (0 <= source < network.vertex_count):
        raise NetworkError(f"unknown source vertex {source}")
    if not (0 <= target < network.vertex_count):
        raise NetworkError(f"unknown target vertex {target}")
    scope.validate(network)
    rev = network.reverse()
    nets = (network, rev)
    w = network.weights(weighting) if isinstance(weighting, str) else weighting
    n = network.vertex_count
    nu = scope.nu
    level = scope.level
    runs = []
    for side, src in enumerate((source, target)):
        dist = [INF] * n
        parent: list[int | None] = [None] * n
        sigma: list[tuple[float, ...]] = [inf_vector(scope)] * n
        tree: list[tuple[float, ...]] = [inf_vector(scope)] * n
        dist[src] = 0.0
        sigma[src] = zero_vector(scope)
        tree[src] = zero_vector(scope)
        res = ScopeSearchResult(src, dist, parent, sigma, tree)
        res._tails = nets[side].tails
        runs.append(res)
    heaps: list[list[tuple[float, int]]] = [[(0.0, source)], [(0.0, target)]]
    done = ([False] * n, [False] * n)
    best = INF
    while True:
        tops = []
        for side in (0, 1):
            heap = heaps[side]
            while heap and (done[side][heap[0][1]] or heap[0][0] > runs[side].dist[heap[0][1]]):
                heapq.heappop(heap)
            tops.append(heap[0][0] if heap else INF)
        if tops[0] >= best and tops[1] >= best:
            break
        if tops[0] == INF and tops[1] == INF:
            break
        side = 0 if tops[0] <= tops[1] else 1
        if tops[side] == INF or (tops[side] >= best and tops[1 - side] < best):
            side = 1 - side
        d, u = heapq.heappop(heaps[side])
        run = runs[side]
        other = runs[1 - side]
        done[side][u] = True
        run.scanned_count += 1
        if other.dist[u] < INF:
            best = min(best, d + other.dist[u])
        net = nets[side]
        sig_u = run.sigma[u]
        for e in net.out_edges(u):
            we = w[e]
            if we == INF:
                continue
            lv = level[e]
            if sig_u[lv] > nu[lv]:
                continue
            v = net.heads[e]
            nd = d + we
            if nd > run.dist[v]:
                continue
            arrival = add_draw(sig_u, lv, we)
            if nd < run.dist[v]:
                run.dist[v] = nd
                run.parent_edge[v] = e
                run.sigma[v] = arrival
                run.tree_sigma[v] = add_draw(run.tree_sigma[u], lv, we)
                run.relaxed_count += 1
                heapq.heappush(heaps[side], (nd, v))
                if other.dist[v] < INF:
                    best = min(best, nd + other.dist[v])
            else:
                run.sigma[v] = min_vec(run.sigma[v], arrival)
    fwd, bwd = runs
    best_cost = INF
    best_vertex: int | None = None
    for v in range(n):
        c = fwd.dist[v] + bwd.dist[v]
        if c < best_cost:
            best_cost = c
            best_vertex = v
    if best_vertex is None or best_cost == INF:
        return BidirectionalResult(None, INF, None, None, fwd, bwd)
    prefix = fwd.walk_to(best_vertex)
    suffix_rev = bwd.walk_to(best_vertex)
    assert prefix is not None and suffix_rev is not None
    suffix_edges = tuple(reversed(suffix_rev.edges))
    walk = Walk(source, prefix.edges + suffix_edges)
    return BidirectionalResult(walk, best_cost, best_vertex, len(prefix.edges), fwd, bwd)


def validate_s_admissible(
    walk: Walk,
    network: RoadNetwork,
    scope: ScopeMapping,
    source: int,
    weighting: str = "base",
    initial: tuple[float, ...] | None = None,
) -> bool:
    """Walk-local admissibility check against the walk's own running draw.

    Scans left to right; appending an edge of level ``l`` requires the
    prefix's draw component ``l`` (plus the optional initial charge) to stay
    within ``nu[l]``. This is the cheap per-walk check; the searches and the
    oracle use the witness-based relation instead, which may disagree on
    walks with non-optimal prefixes.
    """
    check_walk(walk, network)
    scope.validate(network)
    if walk.start != source:
        return False
    w = network.weights(weighting) if isinstance(weighting, str) else weighting
    sigma = list(initial) if initial is not None else [0.0] * scope.level_count
    for e in walk.edges:
        lv = scope.level[e]
        if sigma[lv] > scope.nu[lv]:
            return False
        we = w[e]
        for i in range(lv):
            sigma[i] += we
    return True


@dataclass
class SettledLabels:
    """Per-vertex optimum cost and merged draw of admissible walks.

    Mirrors what a drained scope-aware run settles to; produced either by
    ``s_dijkstra`` or independently by the enumeration oracle.
    """

    dist: list[float]
    sigma: list[tuple[float, ...]]

    def edge_usable(self, network: RoadNetwork, scope: ScopeMapping, e: int) -> bool:
        u = network.tails[e]
        lv = scope.level[e]
        return self.dist[u] < INF and self.sigma[u][lv] <= scope.nu[lv]


def settled_labels(
    network: RoadNetwork,
    scope: ScopeMapping,
    source: int,
    weighting: str = "base",
    seed_sigma: tuple[float, ...] | None = None,
) -> SettledLabels:
    res = s_dijkstra(network, scope, source, weighting, seed_sigma)
    return SettledLabels(res.dist, res.sigma)


def validate_split_admissible(
    walk: Walk,
    network: RoadNetwork,
    scope: ScopeMapping,
    source: int,
    target: int,
    weighting: str = "base",
    forward: SettledLabels | None = None,
    backward: SettledLabels | None = None,
) -> bool:
    """Witness-based check of the two-sided admissibility relation.

    True iff the walk splits into a prefix of edges usable from ``source``
    and a suffix of edges whose reversals are usable from ``target`` in the
    reversed network, with usability judged by the settled labels.
    """
    check_walk(walk, network)
    if walk.start != source or walk.end(network) != target:
        return False
    if forward is None:
        forward = settled_labels(network, scope, source, weighting)
    if backward is None:
        backward = settled_labels(network.reverse(), scope, target, weighting)
    k = len(walk.edges)
    ok_fwd = [False] * k
    ok_bwd = [False] * k
    for i, e in enumerate(walk.edges):
        u, v = network.tails[e], network.heads[e]
        lv = scope.level[e]
        ok_fwd[i] = forward.dist[u] < INF and forward.sigma[u][lv] <= scope.nu[lv]
        ok_bwd[i] = backward.dist[v] < INF and backward.sigma[v][lv] <= scope.nu[lv]
    suffix_ok = True
    feasible = [True] * (k + 1)
    for i in range(k - 1, -1, -1):
        suffix_ok = suffix_ok and ok_bwd[i]
        feasible[i] = suffix_ok
    prefix_ok = True
    for j in range(k + 1):
        if j > 0:
            prefix_ok = prefix_ok and ok_fwd[j - 1]
        if prefix_ok and feasible[j]:
            return True
    return False


class BudgetExceeded(RuntimeError):
    """Enumeration budget ran out before the oracle could settle."""


def oracle_settled_labels(
    network: RoadNetwork,
    scope: ScopeMapping,
    source: int,
    weighting: str = "base",
    hop_bound: int | None = None,
    budget: int = 2_000_000,
    seed_sigma: tuple[float, ...] | None = None,
) -> SettledLabels:
    """Settle per-vertex optima and merged draws by plain walk enumeration.

    Walks are generated by extending enumerated prefixes and processed in
    cost order; a walk is admissible when its prefix is and the appended
    edge's gate passes against the tail's already-settled merged draw.
    Independent of the heap-based search code by construction.
    """
    scope.validate(network)
    w = network.weights(weighting) if isinstance(weighting, str) else weighting
    if hop_bound is None:
        hop_bound = network.vertex_count + 4
    n = network.vertex_count
    nu = scope.nu
    start_vec = zero_vector(scope) if seed_sigma is None else tuple(seed_sigma)
    opt = [INF] * n
    merged: list[tuple[float, ...]] = [inf_vector(scope)] * n
    # Heap entries: (cost, sequence, end vertex, hops, own draw, last edge).
    # The last edge's gate is checked when the walk is popped: by then every
    # walk of lower or equal cost to the edge's tail has been processed, so
    # the tail's merged draw is final (weights are positive).
    counter = 0
    heap: list[tuple[float, int, int, int, tuple[float, ...], int | None]] = [
        (0.0, counter, source, 0, start_vec, None)
    ]
    processed = 0
    while heap:
        cost, _, v, hops, sigma, last = heapq.heappop(heap)
        processed += 1
        if processed > budget:
            raise BudgetExceeded(f"oracle enumeration exceeded {budget} walks")
        if last is not None:
            lv = scope.level[last]
            if merged[network.tails[last]][lv] > nu[lv]:
                continue
        if cost > opt[v]:
            continue
        if cost < opt[v]:
            opt[v] = cost
            merged[v] = sigma
        else:
            merged[v] = min_vec(merged[v], sigma)
        if hops >= hop_bound:
            continue
        for e in network.out_edges(v):
            we = w[e]
            if we == INF:
                continue
            counter += 1
            heapq.heappush(
                heap,
                (cost + we, counter, network.heads[e], hops + 1,
                 add_draw(sigma, scope.level[e], we), e),
            )
    return SettledLabels(opt, merged)


def brute_force_optimal_admissible(
    network: RoadNetwork,
    scope: ScopeMapping,
    source: int,
    target: int,
    hop_bound: int | None = None,
    weighting: str = "base",
    budget: int = 2_000_000,
    split: bool = True,
):
    """Enumeration oracle for the optimal admissible walk cost.

    With ``split`` the two-sided relation is used (prefix usable from the
    source, reversed suffix usable from the target); otherwise only the
    one-sided forward relation. Returns ``(cost, meeting_vertex)`` where the
    cost is ``inf`` for unreachable targets. Raises :class:`BudgetExceeded`
    when the enumeration budget runs out.
    """
    fwd = oracle_settled_labels(network, scope, source, weighting, hop_bound, budget)
    if not split:
        return fwd.dist[target], target if fwd.dist[target] < INF else None
    bwd = oracle_settled_labels(network.reverse(), scope, target, weighting, hop_bound, budget)
    best = INF
    meeting = None
    for v in range(network.vertex_count):
        c = fwd.dist[v] + bwd.dist[v]
        if c < best:
            best = c
            meeting = v
    return best, meeting
