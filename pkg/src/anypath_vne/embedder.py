"""Channel-driven embedding of one virtual request onto the substrate.

Channels are processed in descending pair quality-revenue order.  Each channel
fixes the anypath destination from the allocation state of its two endpoint
services, computes routes on the bandwidth-feasible pruned subgraph, filters
candidate nodes by the channel's cost bound, and picks the candidate whose
route uses the fewest physical links.  Every reservation lands in a ledger so
a failure at any point restores the substrate exactly and blocks the request.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import anypath
from .netmodel import (
    Channel,
    NanoService,
    ReservationLedger,
    SubstrateNetwork,
    VirtualRequest,
    local_pdr,
    natural_key,
    reserve_channel,
    reserve_service,
    rollback,
    suitable_nodes,
)


class EmbeddingError(Exception):
    """Base class for embedding failures that block a request."""


class NoSuitableNodeError(EmbeddingError):
    """No substrate node can host the service."""

    def __init__(self, service_id: str):
        self.service_id = service_id
        super().__init__(f"no suitable node for service {service_id}")


class NoFeasiblePathError(EmbeddingError):
    """No candidate node satisfies the channel's route cost bound."""

    def __init__(self, channel_id: str):
        self.channel_id = channel_id
        super().__init__(f"no feasible route for channel {channel_id}")


@dataclass(frozen=True)
class Coefficients:
    """Revenue/cost/ordering weights.

    alpha and alpha_cost weight node resources in (cpu, gpu, mem) order; beta
    and beta_cost weight channel bandwidth; gamma weights the reliability over
    delay quality term used only for ordering.
    """

    alpha: tuple = (1.0, 1.0, 1.0)
    beta: float = 1.0
    alpha_cost: tuple = (1.0, 1.0, 1.0)
    beta_cost: float = 1.0
    gamma: float = 0.0

    def node_term(self, service: NanoService) -> float:
        a = self.alpha
        return a[0] * service.cpu + a[1] * service.gpu + a[2] * service.mem

    def node_cost_term(self, service: NanoService) -> float:
        a = self.alpha_cost
        return a[0] * service.cpu + a[1] * service.gpu + a[2] * service.mem


@dataclass
class ChannelRoute:
    """Realized route of one channel, oriented in the data-flow direction."""

    channel_id: str
    src_node: str
    dst_node: str
    nodes: frozenset
    links: frozenset
    hyperlinks: tuple          # tuple[anypath.Hyperlink, ...]
    eatt: float                # realized route cost checked against the bound


@dataclass
class Embedding:
    """Accepted mapping of one request plus the ledger that produced it."""

    request_id: str
    service_map: dict = field(default_factory=dict)   # service id -> node id
    channel_routes: dict = field(default_factory=dict)  # channel id -> ChannelRoute
    ledger: ReservationLedger = field(default_factory=ReservationLedger)

    def to_dict(self) -> dict:
        return {
            "request": self.request_id,
            "services": {sid: self.service_map[sid]
                         for sid in sorted(self.service_map, key=natural_key)},
            "channels": [
                {
                    "id": route.channel_id,
                    "src_node": route.src_node,
                    "dst_node": route.dst_node,
                    "eatt": route.eatt,
                    "links": sorted(route.links, key=natural_key),
                    "hyperlinks": [
                        {"transmitter": h.transmitter,
                         "members": [{"node": m.node, "link": m.link_id}
                                     for m in h.members]}
                        for h in route.hyperlinks
                    ],
                }
                for route in (self.channel_routes[cid] for cid in
                              sorted(self.channel_routes, key=natural_key))
            ],
        }


def pair_quality_revenue(channel: Channel, request: VirtualRequest,
                         coeffs: Coefficients) -> float:
    """Revenue of the two endpoint services and the channel, plus the quality term."""
    src = request.services[channel.src]
    dst = request.services[channel.dst]
    return (coeffs.node_term(src) + coeffs.node_term(dst)
            + coeffs.beta * channel.bw
            + coeffs.gamma * channel.min_pdr / channel.max_delay)


def rank_channels(request: VirtualRequest, coeffs: Coefficients) -> list[Channel]:
    """Channels in descending pair quality-revenue; ties keep arrival order."""
    return sorted(request.channels,
                  key=lambda c: -pair_quality_revenue(c, request, coeffs))


def select_max_pdr(net: SubstrateNetwork, service: NanoService) -> str:
    """Suitable node with the highest local PDR; ties go to the smallest id."""
    candidates = suitable_nodes(net, service)
    if not candidates:
        raise NoSuitableNodeError(service.id)
    return min(candidates, key=lambda n: (-local_pdr(net, n), natural_key(n)))


def select_min_links(table: anypath.AnypathRouteTable, candidates) -> str:
    """Candidate using the fewest route links; ties by cost then node id."""
    return min(candidates, key=lambda n: (table.closure_link_count(n),
                                          table.cost[n], natural_key(n)))


def _flow_hyperlinks(table, closure_nodes, reverse: bool) -> tuple:
    """Hyperlinks of the closure, transposed when the route was computed backwards."""
    if not reverse:
        return tuple(
            anypath.Hyperlink(nid, table.forwarding[nid])
            for nid in sorted(closure_nodes, key=natural_key)
            if table.forwarding[nid])
    transposed: dict[str, list] = {}
    for nid in closure_nodes:
        for member in table.forwarding[nid]:
            transposed.setdefault(member.node, []).append(
                anypath.Forwarder(nid, member.link_id, member.delay, member.pdr))
    return tuple(
        anypath.Hyperlink(nid, tuple(sorted(transposed[nid],
                                            key=lambda m: natural_key(m.node))))
        for nid in sorted(transposed, key=natural_key))


def embed(net: SubstrateNetwork, request: VirtualRequest,
          coeffs: Coefficients) -> Embedding:
    """Embed the whole request or raise an EmbeddingError after a full rollback.

    Per ranked channel there are four cases.  With no endpoint allocated, the
    destination service goes to the suitable node with the highest local PDR
    and candidates are gathered for the source.  With only the destination
    allocated its node is reused.  With only the source allocated, routing
    runs backwards toward the source's node (links are symmetric), candidates
    are gathered for the destination service, and the chosen route is
    transposed.  With both allocated the single candidate is validated.  The
    final candidate filter keeps nodes whose route cost stays within
    max_delay / min_pdr, and the route with the fewest links wins.
    """
    embedding = Embedding(request.id)
    placed = embedding.service_map
    ledger = embedding.ledger
    try:
        for channel in rank_channels(request, coeffs):
            src_svc = request.services[channel.src]
            dst_svc = request.services[channel.dst]
            src_placed = channel.src in placed
            dst_placed = channel.dst in placed
            reverse = False
            pending = None   # service to place on the selected node
            if not src_placed and not dst_placed:
                n_dst = select_max_pdr(net, dst_svc)
                reserve_service(net, n_dst, dst_svc, ledger)
                placed[channel.dst] = n_dst
                candidates = suitable_nodes(net, src_svc)
                pending = src_svc
            elif not src_placed and dst_placed:
                n_dst = placed[channel.dst]
                candidates = suitable_nodes(net, src_svc)
                pending = src_svc
            elif src_placed and not dst_placed:
                n_dst = placed[channel.src]
                candidates = suitable_nodes(net, dst_svc)
                pending = dst_svc
                reverse = True
            else:
                n_dst = placed[channel.dst]
                candidates = {placed[channel.src]}
            if not candidates:
                raise NoSuitableNodeError(pending.id)

            view = anypath.bandwidth_subgraph(net, channel.bw)
            dag = anypath.prune(view, n_dst)
            table = anypath.anypath_routes(dag, n_dst)
            bound = channel.max_cost
            feasible = [n for n in sorted(candidates, key=natural_key)
                        if table.cost[n] <= bound]
            if not feasible:
                raise NoFeasiblePathError(channel.id)
            selected = select_min_links(table, feasible)
            if pending is not None:
                reserve_service(net, selected, pending, ledger)
                placed[pending.id] = selected

            nodes, links = anypath.route_closure(table, selected)
            reserve_channel(net, links, channel.bw, ledger)
            flow_src, flow_dst = (n_dst, selected) if reverse else (selected, n_dst)
            embedding.channel_routes[channel.id] = ChannelRoute(
                channel.id, flow_src, flow_dst,
                frozenset(nodes), frozenset(links),
                _flow_hyperlinks(table, nodes, reverse),
                table.cost[selected])

        # services with no incident channel are placed on their own
        for sid in sorted(request.services, key=natural_key):
            if sid not in placed:
                service = request.services[sid]
                node_id = select_max_pdr(net, service)
                reserve_service(net, node_id, service, ledger)
                placed[sid] = node_id
    except EmbeddingError:
        rollback(net, ledger)
        raise
    return embedding
