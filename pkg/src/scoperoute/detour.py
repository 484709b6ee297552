"""Dynamic-closure machinery: obstruction records, detour permits, quasi-closures.

When roads close, the static admissibility relation is relaxed near the
closures. A vertex whose cheapest admissible continuation runs through a
closed road becomes *obstructed*; an obstructed vertex of finite obstruction
level licenses nearby edges of exactly that level ("detour permits") until a
vertex with an open higher-level departure is passed. The enhanced variant
first grows the closure set to its quasi-closure fixed point, adding open
edges from which the target (resp. start) cannot be reached admissibly at
all.

The walk validator and the routing search share one acceptance relation:

* a prefix edge is fine when usable from the start (witness-based settled
  gate on the closure-free network), a suffix edge when usable towards the
  target in reverse;
* any edge of finite level is fine when a matching-level obstruction record
  sits on the walk before it with a departure-clean corridor in between, or
  symmetrically after it with an entry-clean corridor (permit clauses).

The search explores (vertex, carried-permit mask, owed-permit mask) states
in both directions and joins them at a meeting vertex, so it is complete
for exactly the relation the validator decides.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field

from .network import (
    INF,
    RoadNetwork,
    ScopeMapping,
    Walk,
    check_walk,
    zero_vector,
)
from .search import ScopeSearchResult, _edge_pack, bidirectional_s_dijkstra, s_dijkstra


@dataclass(frozen=True)
class ClosureSet:
    """Edge ids treated as closed, with per-edge provenance tags.

    ``hard`` are the edges whose updated weight is infinite; ``edges`` is the
    full treated-as-closed set (equal to ``hard`` until quasi-closures are
    added). Tags: ``hard``, ``soft``, ``quasi-t``, ``quasi-s``.
    """

    edges: frozenset[int]
    hard: frozenset[int]
    kind: dict[int, str] = field(default_factory=dict)
    iterations: int = 0

    def __contains__(self, e: int) -> bool:
        return e in self.edges


def derive_closures(network: RoadNetwork) -> ClosureSet:
    """Edges with raised weight; those raised to infinity are flagged hard."""
    raised = [e for e in range(network.edge_count) if network.weight_updated[e] > network.weight[e]]
    hard = frozenset(e for e in raised if network.weight_updated[e] == INF)
    kind = {e: ("hard" if e in hard else "soft") for e in raised}
    return ClosureSet(frozenset(raised), hard, kind)


def _active_set(network: RoadNetwork, closures) -> frozenset[int]:
    """The set treated as closed: hard closures plus any quasi-closures."""
    if closures is None:
        return derive_closures(network).hard
    if isinstance(closures, ClosureSet):
        quasi = {e for e, k in closures.kind.items() if k.startswith("quasi")}
        return closures.hard | quasi
    return frozenset(closures)


@dataclass(frozen=True)
class ObstructionRecord:
    """An obstructed vertex: its state vector, level, and nearest closure.

    ``side`` is ``"t"`` when the obstruction blocks progress towards the
    target (grants forward permits) and ``"s"`` for the reverse case.
    ``omega`` carries the initial/final amendment vector for records found
    by combining both search directions near the endpoints.
    """

    vertex: int
    side: str
    state: tuple[float, ...]
    level: int
    closure_ref: int
    omega: tuple[float, ...] | None = None


def _state_level(state: tuple[float, ...], scope: ScopeMapping) -> int:
    for lv in range(scope.level_count):
        if state[lv] <= scope.nu[lv]:
            return lv
    return scope.top


def _vec_sub(a: tuple[float, ...], b: tuple[float, ...]) -> tuple[float, ...]:
    return tuple(max(0.0, x - y) for x, y in zip(a, b))


def _tree_records(
    network: RoadNetwork,
    scope: ScopeMapping,
    run: ScopeSearchResult,
    active: frozenset[int],
    side: str,
    other_reached: list[bool],
    finite_only: bool = False,
) -> list[ObstructionRecord]:
    """Records read off one drained search tree.

    Vertices whose tree walk crosses a closure get a plain record measured
    from the nearest crossing; additionally, vertices on the tree chain
    before a crossing whose far side connects to the other direction get an
    amended record carrying their own settled draw, provided their budgets
    are not yet exhausted (the near-endpoint case).
    """
    n = network.vertex_count
    # run operates on the reversed graph for side "t"; its edge ids are
    # shared, so the tree parent is the original head in that case.
    children: list[list[int]] = [[] for _ in range(n)]
    for v in range(n):
        e = run.parent_edge[v]
        if e is None:
            continue
        parent = network.tails[e] if side == "s" else network.heads[e]
        children[parent].append(v)
    anchor: list[int | None] = [None] * n
    records: list[ObstructionRecord] = []
    order: list[int] = []
    stack = [run.source]
    while stack:
        v = stack.pop()
        order.append(v)
        for c in sorted(children[v], reverse=True):
            stack.append(c)
    for v in order:
        e = run.parent_edge[v]
        if e is None:
            continue
        parent = network.tails[e] if side == "s" else network.heads[e]
        if e in active:
            anchor[v] = v
        else:
            anchor[v] = anchor[parent]
        if anchor[v] is not None:
            a = anchor[v]
            state = _vec_sub(run.tree_sigma[v], run.tree_sigma[a])
            lv = _state_level(state, scope)
            if finite_only and lv >= scope.top:
                continue
            ref = run.parent_edge[a]
            assert ref is not None
            records.append(ObstructionRecord(v, side, state, lv, ref))
    # Amended records: walk up from each closure tree edge whose subtree
    # meets the opposite search.
    subtree_meets = [False] * n
    for v in reversed(order):
        if other_reached[v]:
            subtree_meets[v] = True
        for c in children[v]:
            if subtree_meets[c]:
                subtree_meets[v] = True
    amended_side = "t" if side == "s" else "s"
    nu = scope.nu
    finite = tuple(scope.finite_levels())
    saturated: dict[int, bool] = {}
    for v in range(n):
        e = run.parent_edge[v]
        if e is None or e not in active or not subtree_meets[v]:
            continue
        parent = network.tails[e] if side == "s" else network.heads[e]
        at = parent
        while at is not None:
            sat = saturated.get(at)
            if sat is None:
                sigma_at = run.sigma[at]
                sat = all(sigma_at[lv] > nu[lv] for lv in finite)
                saturated[at] = sat
            if not sat:
                state = _vec_sub(run.tree_sigma[parent], run.tree_sigma[at])
                lv = _state_level(state, scope)
                if not (finite_only and lv >= scope.top):
                    records.append(
                        ObstructionRecord(at, amended_side, state, lv, e, omega=run.sigma[at])
                    )
            pe = run.parent_edge[at]
            if pe is None:
                break
            at = network.tails[pe] if side == "s" else network.heads[pe]
    return records


def find_obstructed(
    network: RoadNetwork,
    scope: ScopeMapping,
    closures,
    source: int,
    target: int,
) -> list[ObstructionRecord]:
    """Identify obstructed vertices by two drained scope-aware searches.

    Closed edges are traversed at their base weight so the searches flow
    through them and everything downstream in a tree is marked; open edges
    keep their updated weight. Closure tails additionally get a zero-state
    record towards the target (and heads one towards the start) whenever the
    far side connects, so a blocked route always leaves a permit anchor at
    the blocking spot.
    """
    active = _active_set(network, closures)
    scope.validate(network)
    w2 = [
        network.weight[e] if e in active else network.weight_updated[e]
        for e in range(network.edge_count)
    ]
    fwd = s_dijkstra(network, scope, source, w2)
    bwd = s_dijkstra(network.reverse(), scope, target, w2)
    return _records_from_runs(network, scope, active, fwd, bwd)


def _records_from_runs(
    network: RoadNetwork,
    scope: ScopeMapping,
    active: frozenset[int],
    fwd: ScopeSearchResult,
    bwd: ScopeSearchResult,
    finite_only: bool = False,
) -> list[ObstructionRecord]:
    fwd_reached = [d < INF for d in fwd.dist]
    bwd_reached = [d < INF for d in bwd.dist]
    records: list[ObstructionRecord] = []
    # Forward tree: closures behind a vertex obstruct it for the start.
    records.extend(_tree_records(network, scope, fwd, active, "s", bwd_reached, finite_only))
    # Reverse tree: closures ahead obstruct for the target.
    records.extend(_tree_records(network, scope, bwd, active, "t", fwd_reached, finite_only))
    zero = zero_vector(scope)
    for e in sorted(active):
        x, y = network.tails[e], network.heads[e]
        if bwd_reached[y]:
            records.append(ObstructionRecord(x, "t", zero, _state_level(zero, scope), e))
        if fwd_reached[x]:
            records.append(ObstructionRecord(y, "s", zero, _state_level(zero, scope), e))
    # Deduplicate on (vertex, side, level); plain records win over amended
    # ones, then the lowest state.
    seen: set[tuple[int, str, int]] = set()
    unique: list[ObstructionRecord] = []
    for r in sorted(
        records, key=lambda r: (r.vertex, r.side, r.level, r.omega is not None, r.state)
    ):
        key = (r.vertex, r.side, r.level)
        if key not in seen:
            seen.add(key)
            unique.append(r)
    return unique


@dataclass
class DetourContext:
    """Shared precomputation for one (network, closures, s, t) query."""

    network: RoadNetwork
    scope: ScopeMapping
    active: frozenset[int]
    source: int
    target: int
    records: list[ObstructionRecord]
    s_usable: list[bool]
    t_usable: list[bool]
    rec_t_mask: list[int]
    rec_s_mask: list[int]
    clean_dep_mask: list[int]
    clean_ent_mask: list[int]
    viable_s_mask: list[int]
    viable_t_mask: list[int]
    gate_fwd: ScopeSearchResult
    gate_bwd: ScopeSearchResult
    rec_fwd: ScopeSearchResult
    rec_bwd: ScopeSearchResult
    closed_flag: list[bool]
    out_pack: list[tuple[tuple[int, int, int], ...]]
    in_pack: list[tuple[tuple[int, int, int], ...]]
    pure_hard: bool


def build_detour_context(
    network: RoadNetwork,
    scope: ScopeMapping,
    closures,
    source: int,
    target: int,
) -> DetourContext:
    active = _active_set(network, closures)
    cache_key = ("ctx", tuple(sorted(active)), source, target, scope.level, scope.nu)
    cached = network._query_cache.get(cache_key)
    if cached is not None:
        return cached
    ctx = _build_detour_context(network, scope, active, source, target)
    network._query_cache[cache_key] = ctx
    return ctx


def _build_detour_context(
    network: RoadNetwork,
    scope: ScopeMapping,
    active: frozenset[int],
    source: int,
    target: int,
) -> DetourContext:
    scope.validate(network)
    n = network.vertex_count
    m = network.edge_count
    top = scope.top
    level = scope.level
    wstar = network.weight_updated
    base = network.weight
    closed_flag = [False] * m
    for e in active:
        closed_flag[e] = True
    pure_hard = all(closed_flag[e] or wstar[e] == base[e] for e in range(m))
    w2 = [base[e] if closed_flag[e] else wstar[e] for e in range(m)]
    rec_fwd = s_dijkstra(network, scope, source, w2)
    rec_bwd = s_dijkstra(network.reverse(), scope, target, w2)
    records = _records_from_runs(
        network, scope, active, rec_fwd, rec_bwd, finite_only=True
    )
    wg = [INF if closed_flag[e] else wstar[e] for e in range(m)]
    gate_fwd = s_dijkstra(network, scope, source, wg, track_tree=False)
    gate_bwd = s_dijkstra(network.reverse(), scope, target, wg, track_tree=False)
    nu = scope.nu
    s_usable = [False] * m
    t_usable = [False] * m
    fdist, fsig = gate_fwd.dist, gate_fwd.sigma
    bdist, bsig = gate_bwd.dist, gate_bwd.sigma
    tails, heads = network.tails, network.heads
    for e in range(m):
        if closed_flag[e] or wstar[e] == INF:
            continue
        lv = level[e]
        u = tails[e]
        if fdist[u] < INF and fsig[u][lv] <= nu[lv]:
            s_usable[e] = True
        v = heads[e]
        if bdist[v] < INF and bsig[v][lv] <= nu[lv]:
            t_usable[e] = True

    rec_t_mask = [0] * n
    rec_s_mask = [0] * n
    for r in records:
        if r.level >= top:
            continue
        if r.side == "t":
            rec_t_mask[r.vertex] |= 1 << r.level
        else:
            rec_s_mask[r.vertex] |= 1 << r.level

    full_mask = (1 << top) - 1
    clean_dep_mask = [0] * n
    clean_ent_mask = [0] * n
    for v in range(n):
        dep_max = -1
        for e in network.out_edges(v):
            if not closed_flag[e] and level[e] > dep_max:
                dep_max = level[e]
        ent_max = -1
        for e in network.in_edges(v):
            if not closed_flag[e] and level[e] > ent_max:
                ent_max = level[e]
        # Level l is clean when no open departing/entering edge exceeds it.
        clean_dep_mask[v] = full_mask & ~((1 << min(dep_max, top)) - 1) if dep_max > 0 else full_mask
        clean_ent_mask[v] = full_mask & ~((1 << min(ent_max, top)) - 1) if ent_max > 0 else full_mask

    viable_s_mask = _debt_viability(network, scope, active, rec_s_mask, clean_ent_mask, forward=True)
    viable_t_mask = _debt_viability(network, scope, active, rec_t_mask, clean_dep_mask, forward=False)
    out_pack = _adjacency_pack(network, scope, reverse=False)
    in_pack = _adjacency_pack(network, scope, reverse=True)
    return DetourContext(
        network,
        scope,
        active,
        source,
        target,
        records,
        s_usable,
        t_usable,
        rec_t_mask,
        rec_s_mask,
        clean_dep_mask,
        clean_ent_mask,
        viable_s_mask,
        viable_t_mask,
        gate_fwd,
        gate_bwd,
        rec_fwd,
        rec_bwd,
        closed_flag,
        out_pack,
        in_pack,
        pure_hard,
    )


def _debt_viability(
    network: RoadNetwork,
    scope: ScopeMapping,
    active: frozenset[int],
    rec_mask: list[int],
    clean_mask: list[int],
    forward: bool,
) -> list[int]:
    """Per vertex and level: can an owed permit still find its witness ahead.

    Level ``l`` is viable at ``v`` when some open-edge path from ``v`` (with
    ``forward``) or to ``v`` (without) reaches a vertex holding a matching
    record while every interior vertex stays corridor-clean at ``l``.
    """
    n = network.vertex_count
    viable = [0] * n
    for lv in range(scope.top):
        bit = 1 << lv
        if not any(rec_mask[v] & bit for v in range(n)):
            continue
        reach = [False] * n
        queue = deque(v for v in range(n) if rec_mask[v] & bit)
        for v in queue:
            reach[v] = True
        while queue:
            v = queue.popleft()
            edges = network.in_edges(v) if forward else network.out_edges(v)
            for e in edges:
                if e in active:
                    continue
                u = network.tails[e] if forward else network.heads[e]
                if reach[u]:
                    continue
                # u is an interior corridor vertex unless it holds a record.
                if not (rec_mask[u] & bit) and not (clean_mask[u] & bit):
                    continue
                reach[u] = True
                queue.append(u)
        for v in range(n):
            if reach[v]:
                viable[v] |= bit
    return viable


def _walk_permit_masks(ctx: DetourContext, vertices: list[int]) -> tuple[list[int], list[int]]:
    """Carried-permit masks along a concrete walk, both directions.

    ``live_t[p]`` is the mask of levels licensed for an edge departing
    position ``p``; ``live_s[p]`` licenses an edge arriving at position ``p``.
    """
    k = len(vertices)
    live_t = [0] * k
    live_s = [0] * k
    mask = ctx.rec_t_mask[vertices[0]]
    live_t[0] = mask
    for p in range(1, k):
        v = vertices[p]
        mask = ctx.rec_t_mask[v] | (mask & ctx.clean_dep_mask[v])
        live_t[p] = mask
    mask = ctx.rec_s_mask[vertices[k - 1]]
    live_s[k - 1] = mask
    for p in range(k - 2, -1, -1):
        v = vertices[p]
        mask = ctx.rec_s_mask[v] | (mask & ctx.clean_ent_mask[v])
        live_s[p] = mask
    return live_t, live_s


def validate_simple_detour(
    walk: Walk,
    network: RoadNetwork,
    scope: ScopeMapping,
    closures,
    source: int,
    target: int,
    context: DetourContext | None = None,
) -> bool:
    """Decide the detour acceptance relation for an explicit walk.

    The walk must avoid closed edges; each edge must be usable from the
    start (prefix side of some split), usable towards the target (suffix
    side), or licensed by a matching-level obstruction record on the walk
    with a clean corridor in between.
    """
    check_walk(walk, network)
    if walk.start != source or walk.end(network) != target:
        return False
    ctx = context or build_detour_context(network, scope, closures, source, target)
    if any(e in ctx.active for e in walk.edges):
        return False
    k = len(walk.edges)
    if k == 0:
        return True
    vertices = walk.vertices(network)
    live_t, live_s = _walk_permit_masks(ctx, vertices)
    top = ctx.scope.top
    prefix_ok = [False] * k
    suffix_ok = [False] * k
    for i, e in enumerate(walk.edges):
        lv = ctx.scope.level[e]
        licensed = lv < top and (
            (live_t[i] >> lv) & 1 or (live_s[i + 1] >> lv) & 1
        )
        prefix_ok[i] = licensed or ctx.s_usable[e]
        suffix_ok[i] = licensed or ctx.t_usable[e]
    feasible_suffix = True
    suffix_from = [True] * (k + 1)
    for i in range(k - 1, -1, -1):
        feasible_suffix = feasible_suffix and suffix_ok[i]
        suffix_from[i] = feasible_suffix
    feasible_prefix = True
    for j in range(k + 1):
        if j > 0:
            feasible_prefix = feasible_prefix and prefix_ok[j - 1]
        if feasible_prefix and suffix_from[j]:
            return True
    return False


@dataclass
class _StateSearch:
    """One direction of the permit-aware search over (vertex, masks) states.

    States are packed into ints: ``(vertex << 2F) | (carried << F) | owed``
    with ``F`` finite levels, ``carried`` the permit levels currently live on
    the walk and ``owed`` the levels of edges taken on credit that still need
    a matching record ahead.
    """

    bits: int
    cost: dict[int, float]
    parent: dict[int, tuple[int | None, int | None, str]]
    permits: dict[int, int]
    scanned: int = 0
    licensed_relaxations: int = 0
    scanned_keys: set = field(default_factory=set)

    def states_by_vertex(self) -> dict[int, list[tuple[int, int, int]]]:
        mask = (1 << self.bits) - 1
        grouped: dict[int, list[tuple[int, int, int]]] = {}
        for key in self.cost:
            v = key >> (2 * self.bits)
            live = (key >> self.bits) & mask
            debt = key & mask
            grouped.setdefault(v, []).append((key, live, debt))
        return grouped


def _state_search_halves(ctx: DetourContext) -> tuple[_StateSearch, _StateSearch]:
    """Interleaved forward/backward permit-aware searches with early stop.

    Both halves stop once their queue heads reach the best compatible
    meeting sum found so far; per the usual settling argument the minimising
    state pair is settled on both sides by then.
    """
    scope = ctx.scope
    top = scope.top
    wstar = ctx.network.weight_updated
    n = ctx.network.vertex_count
    bits = max(top, 1)
    vshift = 2 * bits
    closed = ctx.closed_flag
    searches = []
    heaps = []
    dones = []
    nodebt = []
    tabset = []
    for forward in (True, False):
        start = ctx.source if forward else ctx.target
        start_live = ctx.rec_t_mask[start] if forward else ctx.rec_s_mask[start]
        start_key = (start << vshift) | (start_live << bits)
        search = _StateSearch(
            bits, {start_key: 0.0}, {start_key: (None, None, "start")}, {start_key: 0}
        )
        searches.append(search)
        heaps.append([(0.0, 0, start, start_live, 0)])
        dones.append(search.scanned_keys)
        nodebt.append([INF] * n)
        if forward:
            tabset.append(
                (ctx.rec_s_mask, ctx.rec_t_mask, ctx.clean_ent_mask, ctx.clean_dep_mask,
                 ctx.viable_s_mask, ctx.out_pack, ctx.s_usable)
            )
        else:
            tabset.append(
                (ctx.rec_t_mask, ctx.rec_s_mask, ctx.clean_dep_mask, ctx.clean_ent_mask,
                 ctx.viable_t_mask, ctx.in_pack, ctx.t_usable)
            )
    best = INF
    heap0, heap1 = heaps
    push = heapq.heappush
    pop = heapq.heappop
    while True:
        t0 = heap0[0][0] if heap0 else INF
        t1 = heap1[0][0] if heap1 else INF
        # Raw heap tops may be stale (too small); that only delays the stop.
        if (t0 >= best and t1 >= best) or (t0 == INF and t1 == INF):
            break
        side = 0 if t0 <= t1 else 1
        if (t0 if side == 0 else t1) >= best:
            side = 1 - side
        heap = heaps[side]
        search = searches[side]
        cost = search.cost
        d, perms, v, live, debt = pop(heap)
        key = (v << vshift) | (live << bits) | debt
        done = dones[side]
        if key in done or d > cost[key]:
            continue
        done.add(key)
        search.scanned += 1
        if not debt:
            own = nodebt[side]
            if d < own[v]:
                own[v] = d
            total = d + nodebt[1 - side][v]
            if total < best:
                best = total
        rec_stop, rec_carry, clean_debt, clean_carry, viable, pack, usable = tabset[side]
        permits = search.permits
        parent = search.parent
        for e, u, lv in pack[v]:
            we = wstar[e]
            if we == INF or closed[e]:
                continue
            licensed = lv < top and (live >> lv) & 1
            if usable[e] or licensed:
                new_debt = debt
                tag = "permit" if (licensed and not usable[e]) else "plain"
            elif lv < top:
                new_debt = debt | (1 << lv)
                tag = "debt"
            else:
                continue
            nd_debt = new_debt & ~rec_stop[u]
            if nd_debt and (nd_debt & ~clean_debt[u] or nd_debt & ~viable[u]):
                continue
            nlive = rec_carry[u] | (live & clean_carry[u])
            nkey = (u << vshift) | (nlive << bits) | nd_debt
            ncost = d + we
            nperms = perms + (1 if tag != "plain" else 0)
            old = cost.get(nkey, INF)
            if ncost < old or (ncost == old and nperms < permits.get(nkey, 1 << 30)):
                cost[nkey] = ncost
                permits[nkey] = nperms
                parent[nkey] = (key, e, tag)
                if tag != "plain":
                    search.licensed_relaxations += 1
                push(heap, (ncost, nperms, u, nlive, nd_debt))
    return searches[0], searches[1]


@dataclass
class DetourSearchOutcome:
    walk: Walk | None
    cost: float
    permit_edges: tuple[int, ...]
    scanned: int
    scanned_vertices: int
    permits_issued: int


def _detour_state_search(ctx: DetourContext) -> DetourSearchOutcome:
    """Joint minimum over meeting vertices of compatible state pairs.

    A forward state's owed permits must be covered by the reverse state's
    carried mask at the meeting vertex and vice versa, which is exactly the
    cross-split witness condition of the acceptance relation.
    """
    fwd, bwd = _state_search_halves(ctx)
    grouped_f = fwd.states_by_vertex()
    best_key: tuple[float, int, int] | None = None
    best_pair = None
    for v, states_b in sorted(bwd.states_by_vertex().items()):
        states_f = grouped_f.get(v)
        if not states_f:
            continue
        for key_b, live_b, debt_b in states_b:
            for key_f, live_f, debt_f in states_f:
                if debt_f & ~live_b or debt_b & ~live_f:
                    continue
                cost = fwd.cost[key_f] + bwd.cost[key_b]
                perms = fwd.permits[key_f] + bwd.permits[key_b]
                key = (cost, perms, v)
                if best_key is None or key < best_key:
                    best_key = key
                    best_pair = (key_f, key_b)
    scanned = fwd.scanned + bwd.scanned
    vshift = 2 * fwd.bits
    scanned_vertices = len({k >> vshift for k in fwd.scanned_keys}) + len(
        {k >> vshift for k in bwd.scanned_keys}
    )
    issued = fwd.licensed_relaxations + bwd.licensed_relaxations
    if best_pair is None:
        return DetourSearchOutcome(None, INF, (), scanned, scanned_vertices, issued)
    key_f, key_b = best_pair
    edges: list[int] = []
    permit_edges: list[int] = []
    state = key_f
    while True:
        prev, e, tag = fwd.parent[state]
        if prev is None:
            break
        edges.append(e)
        if tag != "plain":
            permit_edges.append(e)
        state = prev
    edges.reverse()
    state = key_b
    while True:
        prev, e, tag = bwd.parent[state]
        if prev is None:
            break
        edges.append(e)
        if tag != "plain":
            permit_edges.append(e)
        state = prev
    walk = Walk(ctx.source, tuple(edges))
    return DetourSearchOutcome(
        walk, best_key[0], tuple(sorted(set(permit_edges))), scanned, scanned_vertices, issued
    )


@dataclass
class DetourResult:
    """Outcome of one routing query under closures."""

    walk: Walk | None
    cost_updated: float
    klass: str
    static_walk: Walk | None = None
    static_cost_base: float = INF
    static_cost_updated: float = INF
    permit_edges: tuple[int, ...] = ()
    scanned_static: int = 0
    scanned_detour: int = 0
    scanned_detour_vertices: int = 0
    permits_issued: int = 0
    qc_iterations: int = 0
    qc_added: int = 0
    context: DetourContext | None = None

    @property
    def reachable(self) -> bool:
        return self.walk is not None


def _static_from_runs(ctx: DetourContext) -> tuple[Walk | None, float]:
    """Split-minimal static walk recovered from the drained discovery runs.

    Valid when the discovery weighting equals the base weighting (no soft
    increases); uses the same meeting tie rule as the bidirectional search.
    """
    fwd, bwd = ctx.rec_fwd, ctx.rec_bwd
    best = INF
    meeting = None
    for v in range(ctx.network.vertex_count):
        c = fwd.dist[v] + bwd.dist[v]
        if c < best:
            best = c
            meeting = v
    if meeting is None or best == INF:
        return None, INF
    prefix = fwd.walk_to(meeting)
    suffix_rev = bwd.walk_to(meeting)
    assert prefix is not None and suffix_rev is not None
    return Walk(ctx.source, prefix.edges + tuple(reversed(suffix_rev.edges))), best


def _route(
    network: RoadNetwork,
    scope: ScopeMapping,
    source: int,
    target: int,
    active: frozenset[int],
    detour_class: str,
    qc_iterations: int = 0,
    qc_added: int = 0,
) -> DetourResult:
    res = DetourResult(None, INF, "unreachable")
    res.qc_iterations = qc_iterations
    res.qc_added = qc_added
    ctx = build_detour_context(network, scope, active, source, target)
    res.context = ctx
    if ctx.pure_hard:
        static_walk, static_cost = _static_from_runs(ctx)
        res.scanned_static = ctx.rec_fwd.scanned_count + ctx.rec_bwd.scanned_count
    else:
        static = bidirectional_s_dijkstra(network, scope, source, target, "base")
        static_walk, static_cost = static.walk, static.cost
        res.scanned_static = static.scanned_count
    if static_walk is not None:
        res.static_walk = static_walk
        res.static_cost_base = static_cost
        res.static_cost_updated = static_walk.cost(network, "updated")
        if res.static_cost_updated == res.static_cost_base:
            res.walk = static_walk
            res.cost_updated = res.static_cost_updated
            res.klass = "static"
            return res
    outcome = _detour_state_search(ctx)
    res.scanned_detour = outcome.scanned
    res.scanned_detour_vertices = outcome.scanned_vertices
    res.permits_issued = outcome.permits_issued
    if outcome.walk is not None and outcome.cost < res.static_cost_updated:
        res.walk = outcome.walk
        res.cost_updated = outcome.cost
        res.klass = detour_class
        res.permit_edges = outcome.permit_edges
    elif res.static_walk is not None and res.static_cost_updated < INF:
        res.walk = res.static_walk
        res.cost_updated = res.static_cost_updated
        res.klass = "static"
    return res


def simple_detour_route(
    network: RoadNetwork,
    scope: ScopeMapping,
    source: int,
    target: int,
    closures=None,
) -> DetourResult:
    """Static route if it survives the weight update, else the best simple detour.

    Follows the four-step scheme: static initialisation with early exit,
    obstruction identification, permit grants, and completion on the updated
    weights. The returned walk is the cheaper (under updated weights) of the
    static optimum and the best detour-admissible walk.
    """
    active = _active_set(network, closures)
    return _route(network, scope, source, target, active, "simple-detour")


def enhanced_detour_route(
    network: RoadNetwork,
    scope: ScopeMapping,
    source: int,
    target: int,
    closures=None,
) -> DetourResult:
    """Simple detour routing with the closure set grown to its quasi-closure fixed point."""
    qc = qc_closure(network, scope, closures, source, target)
    return _route(
        network,
        scope,
        source,
        target,
        qc.edges,
        "enhanced-detour",
        qc_iterations=qc.iterations,
        qc_added=len(qc.edges) - len(qc.hard),
    )


def _adjacency_pack(network: RoadNetwork, scope: ScopeMapping, reverse: bool):
    """Per-vertex (edge, far-vertex, level) triples; cached on the network.

    Packs are weight-independent, so weight variants produced by
    ``with_updated_weights`` and their reversals all share them.
    """
    return _edge_pack(network.reverse() if reverse else network, scope)


def _plain_reach(pack, vertex_count: int, source: int, blocked) -> list[bool]:
    """Vertices reachable from ``source`` over open edges, gates ignored."""
    reached = [False] * vertex_count
    reached[source] = True
    stack = [source]
    while stack:
        v = stack.pop()
        for e, u, _lv in pack[v]:
            if not reached[u] and not blocked[e]:
                reached[u] = True
                stack.append(u)
    return reached


def qc_closure(
    network: RoadNetwork,
    scope: ScopeMapping,
    closures,
    source: int,
    target: int,
) -> ClosureSet:
    """Least fixed point of adding quasi-closed edges to the closure set.

    An open edge is quasi-closed for the target when, in the network minus
    the current closures, no walk from its head reaches the target at all
    (a dead-end pocket behind the closures); symmetric for the start. The
    structural reading keeps every closure-avoiding walk quasi-closure
    avoiding, which is what makes the enhanced relaxation a true superset
    of the simple one. Iterates until no edge is added and reports the
    round count.
    """
    base = closures if isinstance(closures, ClosureSet) else None
    active = set(_active_set(network, closures))
    hard = frozenset(active) if base is None else base.hard
    kind = dict(base.kind) if base is not None else {e: "hard" for e in active}
    scope.validate(network)
    iterations = 0
    n = network.vertex_count
    m = network.edge_count
    fwd_pack = _adjacency_pack(network, scope, reverse=False)
    bwd_pack = _adjacency_pack(network, scope, reverse=True)
    tails, heads = network.tails, network.heads
    wstar = network.weight_updated
    while True:
        iterations += 1
        blocked = [e in active or wstar[e] == INF for e in range(m)]
        t_reach = _plain_reach(bwd_pack, n, target, blocked)
        s_reach = _plain_reach(fwd_pack, n, source, blocked)
        added: list[tuple[int, str]] = []
        for e in range(m):
            if blocked[e]:
                continue
            if not t_reach[heads[e]]:
                added.append((e, "quasi-t"))
            elif not s_reach[tails[e]]:
                added.append((e, "quasi-s"))
        if not added:
            break
        for e, tag in added:
            active.add(e)
            kind[e] = tag
    return ClosureSet(frozenset(active), hard, kind, iterations)
