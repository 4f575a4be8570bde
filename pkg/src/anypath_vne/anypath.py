"""Anypath route computation over a wireless substrate.

A route toward a destination is built in three stages: restrict the substrate
to links with enough spare bandwidth, orient every surviving link toward the
destination by unicast distance (dropping ties, which yields a DAG), then run
a Dijkstra-like sweep that grows per-node forwarding sets in settle order and
prices each hop as a hyperlink: one broadcast transmission that any member of
the forwarding set may relay.

Hyperlink metrics for an ordered forwarding set with link reliabilities p_m
and delays d_m:

    reliability = 1 - prod(1 - p_m)          (any member receives)
    delay       = max(d_m)                   (worst member may be the relay)
    cost        = delay / reliability
    w_m         = p_m * prod_{k<m}(1 - p_k) / reliability

The expected anypath transmission time of a node is then the hyperlink cost
plus the w-weighted mean of its members' own costs.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Sequence

from .netmodel import SubstrateNetwork, natural_key

INFINITY = math.inf


class UnreachableSourceError(Exception):
    """Raised when a route closure is requested from a node with no route."""


@dataclass
class SubstrateView:
    """Read-only bandwidth-filtered view sharing node objects with its parent."""

    nodes: dict
    links: dict
    adjacency: dict

    def incident_links(self, node_id):
        for link_id in self.adjacency.get(node_id, ()):
            yield self.links[link_id]


def bandwidth_subgraph(net: SubstrateNetwork, bw: int) -> SubstrateView:
    """View with every node but only the links having available bw >= bw."""
    links = {lid: l for lid, l in net.links.items() if l.bw >= bw}
    adjacency = {
        nid: [lid for lid in lids if lid in links]
        for nid, lids in net.adjacency.items()
    }
    return SubstrateView(net.nodes, links, adjacency)


def unicast_distances(view, dst: str) -> dict[str, float]:
    """Single-source shortest-path cost to dst under delay/pdr link weights."""
    dist = {nid: INFINITY for nid in view.nodes}
    dist[dst] = 0.0
    heap = [(0.0, natural_key(dst), dst)]
    done = set()
    while heap:
        d, _, nid = heapq.heappop(heap)
        if nid in done:
            continue
        done.add(nid)
        for link in view.incident_links(nid):
            other = link.other(nid)
            if other not in dist:
                continue
            alt = d + link.delay / link.pdr
            if alt < dist[other]:
                dist[other] = alt
                heapq.heappush(heap, (alt, natural_key(other), other))
    return dist


@dataclass(frozen=True)
class DagEdge:
    """Directed use of a substrate link, from the farther endpoint to the nearer."""

    tail: str
    head: str
    link_id: str
    delay: float
    pdr: float


@dataclass
class PrunedDag:
    """Destination-oriented DAG; every edge is one substrate link, oriented."""

    dst: str
    nodes: set
    edges: list = field(default_factory=list)
    incoming: dict = field(default_factory=dict)   # head -> [DagEdge]

    def add_edge(self, edge: DagEdge) -> None:
        self.edges.append(edge)
        self.incoming.setdefault(edge.head, []).append(edge)


def prune(view, dst: str) -> PrunedDag:
    """Orient each link from its farther endpoint toward dst; drop ties."""
    dist = unicast_distances(view, dst)
    dag = PrunedDag(dst, set(view.nodes))
    for link in view.links.values():
        da, db = dist[link.a], dist[link.b]
        if da > db:
            dag.add_edge(DagEdge(link.a, link.b, link.id, link.delay, link.pdr))
        elif db > da:
            dag.add_edge(DagEdge(link.b, link.a, link.id, link.delay, link.pdr))
        # equal distance (including both unreachable): no usable direction
    return dag


def hyperlink_metrics(members: Sequence[tuple[float, float]]):
    """(reliability, delay, cost) of one broadcast step over ordered (pdr, delay) pairs."""
    miss = 1.0
    delay = 0.0
    for pdr, d in members:
        miss *= 1.0 - pdr
        delay = max(delay, d)
    reliability = 1.0 - miss
    return reliability, delay, delay / reliability


def forwarder_weights(pdrs: Sequence[float]) -> list[float]:
    """Relay probability of each member given the priority order; sums to 1."""
    total = 1.0
    for pdr in pdrs:
        total *= 1.0 - pdr
    total = 1.0 - total
    weights = []
    ahead_miss = 1.0
    for pdr in pdrs:
        weights.append(pdr * ahead_miss / total)
        ahead_miss *= 1.0 - pdr
    return weights


@dataclass(frozen=True)
class Forwarder:
    """One member of a forwarding set with the link that reaches it."""

    node: str
    link_id: str
    delay: float
    pdr: float


@dataclass
class Hyperlink:
    """A transmitter and its priority-ordered forwarding set."""

    transmitter: str
    members: tuple


class AnypathRouteTable:
    """Per-node forwarding sets and expected anypath transmission times to dst."""

    def __init__(self, dst: str, cost: dict, forwarding: dict, settle_order: list):
        self.dst = dst
        self.cost = cost                  # node id -> float (inf if unreachable)
        self.forwarding = forwarding      # node id -> tuple[Forwarder, ...]
        self.settle_order = settle_order  # reached nodes in ascending cost
        self._link_counts = None

    def hyperlink(self, node_id: str) -> Hyperlink:
        return Hyperlink(node_id, self.forwarding[node_id])

    def closure_link_count(self, node_id: str) -> int:
        """Number of distinct substrate links used by the route from node_id."""
        if self._link_counts is None:
            self._compute_link_counts()
        return self._link_counts[node_id]

    def _compute_link_counts(self):
        # Forwarding sets point strictly downhill in cost, so settle order is a
        # topological order; accumulate link sets as bitmasks over that order.
        link_bit = {}
        masks = {}
        counts = {}
        for nid in self.settle_order:
            mask = 0
            for member in self.forwarding[nid]:
                bit = link_bit.setdefault(member.link_id, len(link_bit))
                mask |= masks[member.node] | (1 << bit)
            masks[nid] = mask
            counts[nid] = bin(mask).count("1")
        self._link_counts = counts

    def to_dict(self) -> dict:
        reached = {n for n in self.cost if self.cost[n] < INFINITY}
        return {
            "destination": self.dst,
            "routes": [
                {
                    "node": nid,
                    "eatt": self.cost[nid],
                    "forwarding": [
                        {"node": m.node, "link": m.link_id,
                         "delay": m.delay, "pdr": m.pdr}
                        for m in self.forwarding[nid]
                    ],
                }
                for nid in sorted(reached, key=natural_key)
            ],
        }


def anypath_routes(dag: PrunedDag, dst: str) -> AnypathRouteTable:
    """Settle nodes in ascending cost, growing forwarding sets as neighbors settle.

    When a node settles, every DAG predecessor whose current cost exceeds the
    settled cost appends it to its forwarding set and reprices its own cost as
    hyperlink cost plus weighted remaining cost.  The repricing is applied even
    if it raises the predecessor's cost, so a fresh heap entry is pushed on
    every update and stale entries are skipped by value comparison.
    """
    cost = {nid: INFINITY for nid in dag.nodes}
    forwarding = {nid: () for nid in dag.nodes}
    cost[dst] = 0.0
    settled = set()
    settle_order = []
    heap = [(0.0, natural_key(dst), dst)]
    while heap:
        settled_cost, _, nid = heapq.heappop(heap)
        if nid in settled or settled_cost != cost[nid]:
            continue
        settled.add(nid)
        settle_order.append(nid)
        for edge in dag.incoming.get(nid, ()):
            pred = edge.tail
            if pred in settled or cost[pred] <= settled_cost:
                continue
            members = forwarding[pred] + (
                Forwarder(nid, edge.link_id, edge.delay, edge.pdr),)
            _, _, hyper_cost = hyperlink_metrics(
                [(m.pdr, m.delay) for m in members])
            weights = forwarder_weights([m.pdr for m in members])
            remaining = sum(w * cost[m.node] for w, m in zip(weights, members))
            cost[pred] = hyper_cost + remaining
            forwarding[pred] = members
            heapq.heappush(heap, (cost[pred], natural_key(pred), pred))
    return AnypathRouteTable(dst, cost, forwarding, settle_order)


def route_closure(table: AnypathRouteTable, src: str):
    """(node set, link set) of the route from src; empty sets when src is dst."""
    if src == table.dst:
        return set(), set()
    if table.cost.get(src, INFINITY) == INFINITY:
        raise UnreachableSourceError(f"node {src} has no route to {table.dst}")
    nodes = {src}
    links = set()
    stack = [src]
    while stack:
        nid = stack.pop()
        for member in table.forwarding[nid]:
            links.add(member.link_id)
            if member.node not in nodes:
                nodes.add(member.node)
                stack.append(member.node)
    return nodes, links
