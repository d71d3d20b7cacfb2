"""
Area diffusion as a maximum flow over the face graph.

Shrinking faces (delta < 0) supply area, growing faces (delta > 0) demand it
and every directed adjacency u -> v can carry up to its bending capacity. A
super source feeds one supply node per shrinking face, one demand node per
growing face drains into a super sink.
"""

import logging
import math
from collections import defaultdict, deque
from dataclasses import dataclass, field

import networkx as nx

from cartogram.exceptions import ConfigurationError

logger = logging.getLogger(__name__)

FLOW_EPS = 1e-12
BALANCE_TOL = 1e-9
SOURCE = 'source'
SINK = 'sink'


def supply_node(face):
    return f"supply:{face}"


def demand_node(face):
    return f"demand:{face}"


@dataclass(frozen=True)
class FlowNetwork:
    graph: nx.DiGraph
    dual_arcs: tuple
    demand: float
    supply: float
    source: str = SOURCE
    sink: str = SINK

    def capacity(self, u, v):
        if not self.graph.has_edge(u, v):
            return 0.0
        return self.graph.edges[u, v]['capacity']

    @property
    def sources(self):
        return sorted(int(node.split(':')[1]) for node in self.graph.successors(self.source))

    @property
    def sinks(self):
        return sorted(int(node.split(':')[1]) for node in self.graph.predecessors(self.sink))


@dataclass(frozen=True)
class FlowResult:
    value: float
    flows: dict = field(default_factory=dict)

    def on(self, u, v):
        return self.flows.get((u, v), 0.0)


@dataclass(frozen=True)
class TransferPlan:
    transfers: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.transfers)

    def __iter__(self):
        return iter(sorted(self.transfers.items()))

    def amount(self, u, v):
        return self.transfers.get((u, v), 0.0)

    def net_change(self, face):
        incoming = math.fsum(t for (_, v), t in self.transfers.items() if v == face)
        outgoing = math.fsum(t for (u, _), t in self.transfers.items() if u == face)
        return incoming - outgoing


def build_network(g, deltas, caps, sea=None, sea_slack=False, slack=0.0, balance_tol=BALANCE_TOL):
    """
    Flow network from face deltas and directed capacities.

    When the deltas do not balance (absolute targets), the sea covers the
    difference with a supply or demand arc of its own. sea_slack gives the
    sea supply and demand arcs of capacity `slack` so it can absorb whatever
    the land cannot route between its own faces.
    """
    graph = nx.DiGraph()
    graph.add_node(SOURCE)
    graph.add_node(SINK)
    for node in g.nodes:
        graph.add_node(node)

    dual_arcs = []
    for (u, v), capacity in sorted(caps.items()):
        total = capacity.total if hasattr(capacity, 'total') else float(capacity)
        if not math.isfinite(total) or total < 0:
            raise ConfigurationError(
                "Capacity of %(arc)s must be finite and non-negative.",
                code='invalid_capacity', params={'arc': f"{u}->{v}"})
        graph.add_edge(u, v, capacity=total, kind='dual')
        dual_arcs.append((u, v))

    supply = demand = 0.0
    for face, delta in sorted(deltas.items()):
        if delta < 0:
            _add_supply(graph, face, -delta)
            supply += -delta
        elif delta > 0:
            _add_demand(graph, face, delta)
            demand += delta

    imbalance = demand - supply
    scale = max(1.0, demand, supply)
    if abs(imbalance) > balance_tol * scale:
        if sea is None:
            raise ConfigurationError(
                "Supply %(supply)s and demand %(demand)s do not balance and there is no sea.",
                code='unbalanced', params={'supply': supply, 'demand': demand})
        if imbalance > 0:
            _add_supply(graph, sea, imbalance)
            supply += imbalance
        else:
            _add_demand(graph, sea, -imbalance)
            demand += -imbalance
        logger.debug("sea balances %.6g of area change", imbalance)

    if sea_slack and sea is not None and slack > 0:
        _add_supply(graph, sea, slack, slack=True)
        _add_demand(graph, sea, slack, slack=True)

    return FlowNetwork(graph, tuple(dual_arcs), demand, supply)


def _add_supply(graph, face, amount, slack=False):
    node = supply_node(face)
    previous = graph.edges[node, face]['capacity'] if graph.has_edge(node, face) else 0.0
    graph.add_edge(SOURCE, node, capacity=previous + amount, kind='source')
    graph.add_edge(node, face, capacity=previous + amount, kind='slack' if slack else 'supply')


def _add_demand(graph, face, amount, slack=False):
    node = demand_node(face)
    previous = graph.edges[face, node]['capacity'] if graph.has_edge(face, node) else 0.0
    graph.add_edge(face, node, capacity=previous + amount, kind='slack' if slack else 'demand')
    graph.add_edge(node, SINK, capacity=previous + amount, kind='sink')


def max_flow(n, eps=FLOW_EPS):
    """Dinic's blocking-flow algorithm on real capacities; residuals below eps count as saturated."""
    capacity = {}
    neighbours = {node: [] for node in n.graph.nodes}
    for u, v, data in n.graph.edges(data=True):
        capacity[(u, v)] = data['capacity']
        capacity.setdefault((v, u), 0.0)
        for a, b in ((u, v), (v, u)):
            if b not in neighbours[a]:
                neighbours[a].append(b)
    flow = defaultdict(float)
    s, t = n.source, n.sink

    def residual(u, v):
        return capacity[(u, v)] - flow[(u, v)]

    def bfs_level():
        level = {node: -1 for node in neighbours}
        q = deque([s])
        level[s] = 0
        while q:
            u = q.popleft()
            for v in neighbours[u]:
                if level[v] < 0 and residual(u, v) > eps:
                    level[v] = level[u] + 1
                    q.append(v)
        return level

    def dfs(u, pushed, level, it):
        if u == t:
            return pushed
        while it[u] < len(neighbours[u]):
            v = neighbours[u][it[u]]
            if level[v] == level[u] + 1 and residual(u, v) > eps:
                sent = dfs(v, min(pushed, residual(u, v)), level, it)
                if sent > eps:
                    flow[(u, v)] += sent
                    flow[(v, u)] -= sent
                    return sent
            it[u] += 1
        return 0.0

    value = 0.0
    while True:
        level = bfs_level()
        if level[t] < 0:
            break
        it = {node: 0 for node in neighbours}
        while True:
            pushed = dfs(s, math.inf, level, it)
            if pushed <= eps:
                break
            value += pushed

    flows = {
        (u, v): max(flow[(u, v)], 0.0) for u, v in n.graph.edges
    }
    logger.debug("max flow %.6g of demand %.6g", value, n.demand)
    return FlowResult(value, flows)


def extract_transfers(n, flow):
    """
    Net transfer per adjacent face pair; antiparallel flow cancels.

    Example:
        0.4 on u -> v and 0.1 on v -> u  ->  0.3 from u to v
    """
    flows = flow.flows if isinstance(flow, FlowResult) else flow
    transfers = {}
    seen = set()
    for u, v in n.dual_arcs:
        key = frozenset((u, v))
        if key in seen:
            continue
        seen.add(key)
        net = flows.get((u, v), 0.0) - flows.get((v, u), 0.0)
        if net > FLOW_EPS:
            transfers[(u, v)] = net
        elif net < -FLOW_EPS:
            transfers[(v, u)] = -net
    return TransferPlan(transfers)


def constrained_value(n, flow):
    """Flow reaching real demand arcs; slack arcs at the sea are left out."""
    flows = flow.flows if isinstance(flow, FlowResult) else flow
    return math.fsum(
        flows.get((u, v), 0.0)
        for u, v, kind in n.graph.edges(data='kind') if kind == 'demand'
    )


def dump_network(n, flow=None):
    """JSON-ready description of the network and, when given, its flow."""
    flows = {}
    if flow is not None:
        flows = flow.flows if isinstance(flow, FlowResult) else flow
    return {
        'nodes': [str(node) for node in n.graph.nodes],
        'arcs': [
            {
                'source': str(u),
                'target': str(v),
                'kind': data.get('kind'),
                'capacity': data['capacity'],
                'flow': flows.get((u, v), 0.0),
            }
            for u, v, data in n.graph.edges(data=True)
        ],
        'demand': n.demand,
        'supply': n.supply,
        'value': flow.value if isinstance(flow, FlowResult) else None,
    }
