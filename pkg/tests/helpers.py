"""Shared fuzzing helpers and independent oracles for the test suite."""

from __future__ import annotations

import math

import numpy as np

from anypath_vne.netmodel import (
    Channel,
    NanoService,
    ReservationLedger,
    SubstrateNetwork,
    VirtualRequest,
    reserve_channel,
    reserve_service,
)


def example_after_steps(example, steps: int) -> SubstrateNetwork:
    """Example substrate with the first N embedding reservations applied."""
    net, request, _ = example
    ledger = ReservationLedger()
    if steps >= 1:
        reserve_service(net, "n4", request.services["s2"], ledger)
    if steps >= 2:
        reserve_service(net, "n1", request.services["s1"], ledger)
        reserve_channel(net, {"l1", "l2", "l3", "l4"}, 50, ledger)
    if steps >= 3:
        reserve_service(net, "n5", request.services["s3"], ledger)
        reserve_channel(net, {"l2", "l5"}, 30, ledger)
    return net


def random_substrate(rng: np.random.Generator, max_nodes: int = 8,
                     connected: bool = True, extra_edge_factor: float = 1.0,
                     min_nodes: int = 2) -> SubstrateNetwork:
    """Random substrate: optional spanning tree plus extra non-parallel links."""
    n = int(rng.integers(min_nodes, max_nodes + 1))
    net = SubstrateNetwork()
    for i in range(1, n + 1):
        net.add_node(f"n{i}", cpu=int(rng.integers(0, 61)),
                     gpu=int(rng.integers(0, 31)), mem=int(rng.integers(0, 61)))
    pairs = set()
    seq = 0

    def add(i, j):
        nonlocal seq
        seq += 1
        net.add_link(f"l{seq}", f"n{i}", f"n{j}", bw=int(rng.integers(0, 101)),
                     delay=float(rng.uniform(1.0, 30.0)),
                     pdr=float(rng.uniform(0.05, 1.0)))
        pairs.add(frozenset((i, j)))

    if connected:
        for i in range(2, n + 1):
            add(i, int(rng.integers(1, i)))
    extra = int(rng.integers(0, max(1, int(n * extra_edge_factor)) + 1))
    for _ in range(extra):
        i, j = int(rng.integers(1, n + 1)), int(rng.integers(1, n + 1))
        if i != j and frozenset((i, j)) not in pairs:
            add(i, j)
    return net


def random_tree_substrate(rng: np.random.Generator, max_nodes: int = 9):
    """Random tree plus the parent map used for independent path-cost sums."""
    n = int(rng.integers(2, max_nodes + 1))
    net = SubstrateNetwork()
    for i in range(1, n + 1):
        net.add_node(f"n{i}", cpu=10, gpu=10, mem=10)
    parent = {}
    for i in range(2, n + 1):
        j = int(rng.integers(1, i))
        net.add_link(f"l{i - 1}", f"n{i}", f"n{j}", bw=100,
                     delay=float(rng.uniform(1.0, 30.0)),
                     pdr=float(rng.uniform(0.05, 1.0)))
        parent[f"n{i}"] = (f"n{j}", f"l{i - 1}")
    return net, parent


def random_request(rng: np.random.Generator, max_services: int = 4,
                   max_demand: int = 15) -> VirtualRequest:
    """Small random request with modest demands and loose quality bounds."""
    k = int(rng.integers(1, max_services + 1))
    request = VirtualRequest("fuzz")
    for i in range(1, k + 1):
        request.add_service(NanoService(
            f"s{i}", cpu=int(rng.integers(0, max_demand + 1)),
            gpu=int(rng.integers(0, max_demand // 2 + 1)),
            mem=int(rng.integers(0, max_demand + 1))))
    seq = 0
    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            if rng.random() < 0.5:
                seq += 1
                request.add_channel(Channel(
                    f"c{seq}", f"s{i}", f"s{j}",
                    bw=int(rng.integers(1, 11)),
                    max_delay=float(rng.uniform(20.0, 400.0)),
                    min_pdr=float(rng.uniform(0.3, 1.0))))
    return request


def eatt_recursive(table) -> dict[str, float]:
    """Straight-line recomputation of route costs over the produced forwarding sets.

    Deliberately independent of the routing algorithm: it evaluates, per node,
    the hyperlink reliability/delay product formulas and the priority-weighted
    remaining cost by direct recursion.
    """
    memo = {table.dst: 0.0}

    def evaluate(node: str) -> float:
        if node in memo:
            return memo[node]
        members = table.forwarding[node]
        if not members:
            memo[node] = math.inf
            return math.inf
        miss = 1.0
        delay = 0.0
        for m in members:
            miss *= 1.0 - m.pdr
            delay = max(delay, m.delay)
        reliability = 1.0 - miss
        remaining = 0.0
        ahead = 1.0
        for m in members:
            weight = m.pdr * ahead / reliability
            remaining += weight * evaluate(m.node)
            ahead *= 1.0 - m.pdr
        memo[node] = delay / reliability + remaining
        return memo[node]

    for node in table.settle_order:
        evaluate(node)
    return memo


def has_cycle(nodes, edges) -> bool:
    """Kahn's algorithm cycle check over (tail, head) pairs."""
    indegree = {n: 0 for n in nodes}
    out = {n: [] for n in nodes}
    for tail, head in edges:
        indegree[head] += 1
        out[tail].append(head)
    queue = [n for n, deg in indegree.items() if deg == 0]
    seen = 0
    while queue:
        node = queue.pop()
        seen += 1
        for nxt in out[node]:
            indegree[nxt] -= 1
            if indegree[nxt] == 0:
                queue.append(nxt)
    return seen != len(nodes)
