"""Substrate and virtual-request graph models with transactional resource accounting.

The substrate is an undirected graph of compute nodes (CPU/GPU/MEM units plus
optional capability labels) joined by lossy wireless links (bandwidth, one-way
delay, packet delivery ratio).  A virtual request is a directed graph of
nano-services connected by communication channels with bandwidth, delay and
reliability demands.  All reservations go through a ledger so that a partially
embedded request can be undone exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator

RESOURCES = ("cpu", "gpu", "mem")

_DIGIT_RUN = re.compile(r"(\d+)")


def natural_key(identifier: str) -> tuple:
    """Sort key that orders embedded integers numerically (n2 before n10).

    The raw string is appended so ids that only differ in zero padding still
    compare deterministically.
    """
    parts = tuple(int(part) if part.isdigit() else part
                  for part in _DIGIT_RUN.split(identifier))
    return parts + (identifier,)


class InsufficientCapacityError(Exception):
    """Raised when a reservation would drive an available capacity negative."""


@dataclass
class SubstrateNode:
    """A compute node. cpu/gpu/mem are the mutable available units."""

    id: str
    cpu: int
    gpu: int
    mem: int
    functionals: frozenset = frozenset()
    cpu0: int = None
    gpu0: int = None
    mem0: int = None

    def __post_init__(self):
        self.functionals = frozenset(self.functionals)
        # original capacities default to the initial available amounts
        if self.cpu0 is None:
            self.cpu0 = self.cpu
        if self.gpu0 is None:
            self.gpu0 = self.gpu
        if self.mem0 is None:
            self.mem0 = self.mem

    def available(self) -> tuple[int, int, int]:
        return (self.cpu, self.gpu, self.mem)

    def original(self) -> tuple[int, int, int]:
        return (self.cpu0, self.gpu0, self.mem0)


@dataclass
class SubstrateLink:
    """An undirected link with symmetric delay/reliability in both directions."""

    id: str
    a: str
    b: str
    bw: int
    delay: float
    pdr: float
    bw0: int = None

    def __post_init__(self):
        if self.bw0 is None:
            self.bw0 = self.bw

    def endpoints(self) -> frozenset:
        return frozenset((self.a, self.b))

    def other(self, node_id: str) -> str:
        return self.b if node_id == self.a else self.a


def link_cost(link: SubstrateLink) -> float:
    """Unicast cost of a single link: delay divided by delivery ratio."""
    return link.delay / link.pdr


@dataclass
class NanoService:
    """An atomic task with fixed resource demands and required capabilities."""

    id: str
    cpu: int = 0
    gpu: int = 0
    mem: int = 0
    functionals: frozenset = frozenset()

    def __post_init__(self):
        self.functionals = frozenset(self.functionals)

    def demands(self) -> tuple[int, int, int]:
        return (self.cpu, self.gpu, self.mem)


@dataclass
class Channel:
    """A directed flow between two services with bandwidth/quality demands."""

    id: str
    src: str
    dst: str
    bw: int
    max_delay: float
    min_pdr: float

    def __post_init__(self):
        if self.src == self.dst:
            raise ValueError(f"channel {self.id} connects a service to itself")

    @property
    def max_cost(self) -> float:
        """Largest tolerable route cost, max_delay / min_pdr."""
        return self.max_delay / self.min_pdr


@dataclass
class VirtualRequest:
    """A directed service graph; channel order is the arrival order."""

    id: str
    services: dict = field(default_factory=dict)   # service id -> NanoService
    channels: list = field(default_factory=list)   # list[Channel]

    def add_service(self, service: NanoService) -> NanoService:
        self.services[service.id] = service
        return service

    def add_channel(self, channel: Channel) -> Channel:
        for end in (channel.src, channel.dst):
            if end not in self.services:
                raise ValueError(
                    f"channel {channel.id} references unknown service {end}")
        self.channels.append(channel)
        return channel


class SubstrateNetwork:
    """Node/link stores plus an adjacency index from node id to link ids."""

    def __init__(self):
        self.nodes: dict[str, SubstrateNode] = {}
        self.links: dict[str, SubstrateLink] = {}
        self.adjacency: dict[str, list[str]] = {}

    def add_node(self, node_id: str, cpu: int, gpu: int, mem: int,
                 functionals: Iterable[str] = ()) -> SubstrateNode:
        node = SubstrateNode(node_id, cpu, gpu, mem, frozenset(functionals))
        self.nodes[node_id] = node
        self.adjacency.setdefault(node_id, [])
        return node

    def add_link(self, link_id: str, a: str, b: str, bw: int,
                 delay: float, pdr: float) -> SubstrateLink:
        link = SubstrateLink(link_id, a, b, bw, delay, pdr)
        self.links[link_id] = link
        self.adjacency.setdefault(a, []).append(link_id)
        if b != a:
            self.adjacency.setdefault(b, []).append(link_id)
        return link

    def incident_links(self, node_id: str) -> Iterator[SubstrateLink]:
        for link_id in self.adjacency.get(node_id, ()):
            yield self.links[link_id]

    def clone(self) -> "SubstrateNetwork":
        """Independent copy; capability sets are shared (immutable)."""
        dup = SubstrateNetwork()
        for node in self.nodes.values():
            dup.nodes[node.id] = SubstrateNode(
                node.id, node.cpu, node.gpu, node.mem, node.functionals,
                node.cpu0, node.gpu0, node.mem0)
        for link in self.links.values():
            dup.links[link.id] = SubstrateLink(
                link.id, link.a, link.b, link.bw, link.delay, link.pdr, link.bw0)
        dup.adjacency = {nid: list(lids) for nid, lids in self.adjacency.items()}
        return dup

    def snapshot(self) -> tuple:
        """Hashable view of all mutable state, for exact-restoration checks."""
        return (
            tuple((n.id, n.cpu, n.gpu, n.mem) for n in self.nodes.values()),
            tuple((l.id, l.bw) for l in self.links.values()),
        )


def validate_substrate(net: SubstrateNetwork) -> list[str]:
    """Return a list of invariant violations; an empty list means valid."""
    report = []
    for node in net.nodes.values():
        for name in RESOURCES:
            avail = getattr(node, name)
            orig = getattr(node, name + "0")
            if avail < 0 or orig < 0:
                report.append(f"node {node.id}: negative {name} capacity")
            elif avail > orig:
                report.append(f"node {node.id}: available {name} exceeds original")
    seen_pairs = {}
    for link in net.links.values():
        if link.a == link.b:
            report.append(f"link {link.id}: self-loop at {link.a}")
        for end in (link.a, link.b):
            if end not in net.nodes:
                report.append(f"link {link.id}: dangling endpoint {end}")
        if not (0.0 < link.pdr <= 1.0):
            report.append(f"link {link.id}: pdr {link.pdr} outside (0, 1]")
        if link.delay <= 0:
            report.append(f"link {link.id}: non-positive delay {link.delay}")
        if link.bw < 0 or link.bw0 < 0:
            report.append(f"link {link.id}: negative bandwidth")
        elif link.bw > link.bw0:
            report.append(f"link {link.id}: available bandwidth exceeds original")
        pair = link.endpoints()
        if pair in seen_pairs:
            report.append(
                f"link {link.id}: duplicates pair of link {seen_pairs[pair]}")
        else:
            seen_pairs[pair] = link.id
    return report


def local_pdr(net: SubstrateNetwork, node_id: str) -> float:
    """Mean delivery ratio over the node's incident links; 0 when isolated."""
    pdrs = [link.pdr for link in net.incident_links(node_id)]
    if not pdrs:
        return 0.0
    return sum(pdrs) / len(pdrs)


def suitable_nodes(net: SubstrateNetwork, service: NanoService) -> set[str]:
    """Nodes whose available resources and capabilities satisfy the service."""
    found = set()
    for node in net.nodes.values():
        if (service.cpu <= node.cpu and service.gpu <= node.gpu
                and service.mem <= node.mem
                and service.functionals <= node.functionals):
            found.add(node.id)
    return found


class ReservationLedger:
    """Ordered reservation records; replaying them backwards undoes everything."""

    def __init__(self):
        self.records: list[tuple] = []

    def __len__(self) -> int:
        return len(self.records)


def reserve_service(net: SubstrateNetwork, node_id: str,
                    service: NanoService, ledger: ReservationLedger) -> None:
    """Debit the service's cpu/gpu/mem demands from the node."""
    node = net.nodes[node_id]
    if (service.cpu > node.cpu or service.gpu > node.gpu
            or service.mem > node.mem):
        raise InsufficientCapacityError(
            f"node {node_id} cannot host service {service.id}")
    node.cpu -= service.cpu
    node.gpu -= service.gpu
    node.mem -= service.mem
    ledger.records.append(("node", node_id, service.cpu, service.gpu, service.mem))


def reserve_channel(net: SubstrateNetwork, link_ids: Iterable[str],
                    bw: int, ledger: ReservationLedger) -> None:
    """Debit the channel bandwidth from every link of its route."""
    link_ids = sorted(link_ids, key=natural_key)
    for link_id in link_ids:
        if net.links[link_id].bw < bw:
            raise InsufficientCapacityError(
                f"link {link_id} has {net.links[link_id].bw} < {bw} bandwidth")
    for link_id in link_ids:
        net.links[link_id].bw -= bw
        ledger.records.append(("link", link_id, bw))


def rollback(net: SubstrateNetwork, ledger: ReservationLedger) -> None:
    """Undo all ledger records in reverse order and empty the ledger."""
    for record in reversed(ledger.records):
        if record[0] == "node":
            _, node_id, dcpu, dgpu, dmem = record
            node = net.nodes[node_id]
            node.cpu += dcpu
            node.gpu += dgpu
            node.mem += dmem
        else:
            _, link_id, dbw = record
            net.links[link_id].bw += dbw
    ledger.records.clear()


# --- JSON-friendly (de)serialization -----------------------------------------

class SchemaError(ValueError):
    """Input document does not match the expected schema; names the field."""

    def __init__(self, field_name: str, message: str):
        self.field = field_name
        super().__init__(f"{field_name}: {message}")


def _require(doc: dict, key: str, types, where: str):
    if key not in doc:
        raise SchemaError(f"{where}.{key}", "missing required field")
    value = doc[key]
    if not isinstance(value, types) or isinstance(value, bool):
        raise SchemaError(f"{where}.{key}", f"expected {types}, got {type(value).__name__}")
    return value


def substrate_to_dict(net: SubstrateNetwork) -> dict:
    return {
        "nodes": [
            {"id": n.id, "cpu": n.cpu, "gpu": n.gpu, "mem": n.mem,
             "functionals": sorted(n.functionals)}
            for n in net.nodes.values()
        ],
        "links": [
            {"id": l.id, "a": l.a, "b": l.b, "bw": l.bw,
             "delay": l.delay, "pdr": l.pdr}
            for l in net.links.values()
        ],
    }


def substrate_from_dict(doc: dict) -> SubstrateNetwork:
    """Build a substrate from JSON data; capacities are taken as originals."""
    net = SubstrateNetwork()
    if not isinstance(doc, dict):
        raise SchemaError("substrate", "expected a JSON object")
    nodes = _require(doc, "nodes", list, "substrate")
    links = _require(doc, "links", list, "substrate")
    for i, nd in enumerate(nodes):
        where = f"nodes[{i}]"
        net.add_node(
            str(_require(nd, "id", (str, int), where)),
            _require(nd, "cpu", int, where),
            _require(nd, "gpu", int, where),
            _require(nd, "mem", int, where),
            nd.get("functionals", ()),
        )
    for i, ld in enumerate(links):
        where = f"links[{i}]"
        net.add_link(
            str(_require(ld, "id", (str, int), where)),
            str(_require(ld, "a", (str, int), where)),
            str(_require(ld, "b", (str, int), where)),
            _require(ld, "bw", int, where),
            float(_require(ld, "delay", (int, float), where)),
            float(_require(ld, "pdr", (int, float), where)),
        )
    return net


def request_to_dict(request: VirtualRequest) -> dict:
    return {
        "id": request.id,
        "services": [
            {"id": s.id, "cpu": s.cpu, "gpu": s.gpu, "mem": s.mem,
             "functionals": sorted(s.functionals)}
            for s in request.services.values()
        ],
        "channels": [
            {"id": c.id, "src": c.src, "dst": c.dst, "bw": c.bw,
             "max_delay": c.max_delay, "min_pdr": c.min_pdr}
            for c in request.channels
        ],
    }


def request_from_dict(doc: dict) -> VirtualRequest:
    if not isinstance(doc, dict):
        raise SchemaError("request", "expected a JSON object")
    request = VirtualRequest(str(doc.get("id", "request")))
    services = _require(doc, "services", list, "request")
    channels = _require(doc, "channels", list, "request")
    for i, sd in enumerate(services):
        where = f"services[{i}]"
        request.add_service(NanoService(
            str(_require(sd, "id", (str, int), where)),
            _require(sd, "cpu", int, where),
            _require(sd, "gpu", int, where),
            _require(sd, "mem", int, where),
            frozenset(sd.get("functionals", ())),
        ))
    for i, cd in enumerate(channels):
        where = f"channels[{i}]"
        channel = Channel(
            str(_require(cd, "id", (str, int), where)),
            str(_require(cd, "src", (str, int), where)),
            str(_require(cd, "dst", (str, int), where)),
            _require(cd, "bw", int, where),
            float(_require(cd, "max_delay", (int, float), where)),
            float(_require(cd, "min_pdr", (int, float), where)),
        )
        try:
            request.add_channel(channel)
        except ValueError as exc:
            raise SchemaError(where, str(exc)) from exc
    return request
