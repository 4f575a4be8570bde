import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anypath_vne.anypath import anypath_routes, bandwidth_subgraph, prune
from anypath_vne.embedder import (
    Coefficients,
    EmbeddingError,
    NoFeasiblePathError,
    NoSuitableNodeError,
    embed,
    pair_quality_revenue,
    rank_channels,
    select_max_pdr,
    select_min_links,
)
from anypath_vne.netmodel import (
    Channel,
    NanoService,
    SubstrateNetwork,
    VirtualRequest,
)

from helpers import random_request, random_substrate


def two_node_net(cpu1=100, cpu2=100):
    net = SubstrateNetwork()
    net.add_node("n1", cpu=cpu1, gpu=50, mem=50)
    net.add_node("n2", cpu=cpu2, gpu=50, mem=50)
    net.add_link("l1", "n1", "n2", bw=100, delay=5.0, pdr=0.9)
    return net


def test_pair_quality_revenue_example(example_request, example_coeffs):
    values = {
        c.id: pair_quality_revenue(c, example_request, example_coeffs)
        for c in example_request.channels
    }
    assert values["c1"] == pytest.approx(225.0, abs=1e-6)
    assert values["c2"] == pytest.approx(198.0, abs=1e-6)
    assert values["c3"] == pytest.approx(143.333333, abs=1e-6)


def test_pair_quality_revenue_zero_gamma():
    request = VirtualRequest("r")
    request.add_service(NanoService("s1"))
    request.add_service(NanoService("s2"))
    request.add_channel(Channel("c1", "s1", "s2", bw=7, max_delay=10.0,
                                min_pdr=0.5))
    coeffs = Coefficients(beta=3.0, gamma=0.0)
    assert pair_quality_revenue(request.channels[0], request, coeffs) == 21.0


def test_rank_channels_descending_and_stable(example_request, example_coeffs):
    assert [c.id for c in rank_channels(example_request, example_coeffs)] \
        == ["c1", "c2", "c3"]
    # equal quality-revenue keeps arrival order
    request = VirtualRequest("r")
    for i in (1, 2, 3):
        request.add_service(NanoService(f"s{i}", cpu=1))
    request.add_channel(Channel("cA", "s1", "s2", bw=5, max_delay=10, min_pdr=0.5))
    request.add_channel(Channel("cB", "s2", "s3", bw=5, max_delay=10, min_pdr=0.5))
    assert [c.id for c in rank_channels(request, Coefficients())] == ["cA", "cB"]


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1))
def test_rank_channels_matches_independent_sort(seed):
    rng = np.random.default_rng(seed)
    request = random_request(rng, max_services=5)
    coeffs = Coefficients(beta=2.0, gamma=300.0)
    # recompute the ordering key from scratch and stable-sort independently
    keyed = []
    for pos, channel in enumerate(request.channels):
        src = request.services[channel.src]
        dst = request.services[channel.dst]
        value = (2.0 * channel.bw + 300.0 * channel.min_pdr / channel.max_delay
                 + src.cpu + src.gpu + src.mem + dst.cpu + dst.gpu + dst.mem)
        keyed.append((-value, pos, channel.id))
    expected = [cid for _, _, cid in sorted(keyed)]
    assert [c.id for c in rank_channels(request, coeffs)] == expected


def test_select_max_pdr_example(example_net, example_request):
    assert select_max_pdr(example_net, example_request.services["s2"]) == "n4"


def test_select_max_pdr_single_and_empty(example_net):
    only_n1 = NanoService("s", cpu=30)
    assert select_max_pdr(example_net, only_n1) == "n1"
    with pytest.raises(NoSuitableNodeError):
        select_max_pdr(example_net, NanoService("s", cpu=1000))


def test_select_max_pdr_tie_breaks_by_id():
    net = SubstrateNetwork()
    net.add_node("n2", 1, 1, 1)
    net.add_node("n1", 1, 1, 1)
    net.add_node("n3", 1, 1, 1)
    net.add_link("l1", "n1", "n2", bw=1, delay=1.0, pdr=0.8)
    net.add_link("l2", "n2", "n3", bw=1, delay=1.0, pdr=0.8)
    net.add_link("l3", "n1", "n3", bw=1, delay=1.0, pdr=0.8)
    assert select_max_pdr(net, NanoService("s")) == "n1"


def test_select_min_links_prefers_fewest_links(example_net):
    table = anypath_routes(prune(bandwidth_subgraph(example_net, 1), "n4"), "n4")
    # n2 routes over 1 link, n1 over 4, destination itself over 0
    assert select_min_links(table, ["n1", "n2"]) == "n2"
    assert select_min_links(table, ["n1", "n2", "n4"]) == "n4"


def test_embed_reproduces_reference_mapping(example):
    net, request, coeffs = example
    embedding = embed(net, request, coeffs)
    assert embedding.service_map == {"s1": "n1", "s2": "n4", "s3": "n5"}
    assert {cid: set(r.links) for cid, r in embedding.channel_routes.items()} == {
        "c1": {"l1", "l2", "l3", "l4"},
        "c2": {"l2", "l5"},
        "c3": {"l4", "l5", "l6"},
    }
    assert net.nodes["n1"].available() == (0, 0, 0)
    assert net.nodes["n4"].available() == (0, 0, 10)
    assert net.nodes["n5"].available() == (10, 10, 0)
    assert {lid: link.bw for lid, link in net.links.items()} == {
        "l1": 20, "l2": 0, "l3": 50, "l4": 10, "l5": 60, "l6": 90}
    # flow orientation: c2 runs from s1's node toward s3's node
    assert embedding.channel_routes["c2"].src_node == "n1"
    assert embedding.channel_routes["c2"].dst_node == "n5"


def test_embed_unmappable_service_rolls_back(example):
    net, request, coeffs = example
    request.services["s2"] = NanoService("s2", cpu=10_000)
    before = net.snapshot()
    with pytest.raises(NoSuitableNodeError):
        embed(net, request, coeffs)
    assert net.snapshot() == before


def test_embed_infeasible_path_rolls_back(example):
    net, request, coeffs = example
    # c1 becomes impossible to route within its cost bound
    request.channels[0] = Channel("c1", "s1", "s2", bw=50, max_delay=1.0,
                                  min_pdr=0.99)
    before = net.snapshot()
    with pytest.raises(NoFeasiblePathError):
        embed(net, request, coeffs)
    assert net.snapshot() == before


def test_embed_colocates_when_one_node_fits_both():
    net = two_node_net(cpu1=5, cpu2=100)
    request = VirtualRequest("r")
    request.add_service(NanoService("s1", cpu=30))
    request.add_service(NanoService("s2", cpu=30))
    request.add_channel(Channel("c1", "s1", "s2", bw=10, max_delay=50.0,
                                min_pdr=0.5))
    embedding = embed(net, request, Coefficients())
    assert embedding.service_map == {"s1": "n2", "s2": "n2"}
    route = embedding.channel_routes["c1"]
    assert route.links == frozenset()
    assert route.eatt == 0.0
    assert net.links["l1"].bw == 100


def test_embed_places_channel_free_services():
    net = two_node_net()
    request = VirtualRequest("r")
    request.add_service(NanoService("s1", cpu=10))
    embedding = embed(net, request, Coefficients())
    assert embedding.service_map["s1"] in {"n1", "n2"}
    assert embedding.channel_routes == {}


def test_embed_reversed_case_transposes_route():
    # force the source-allocated-only case with an isolated dst candidate
    net = SubstrateNetwork()
    net.add_node("n1", cpu=50, gpu=0, mem=0)    # only fit for s1
    net.add_node("n2", cpu=0, gpu=0, mem=0)
    net.add_node("n3", cpu=0, gpu=50, mem=40)   # only fit for s3 and s2
    net.add_link("l1", "n1", "n2", bw=100, delay=2.0, pdr=0.9)
    net.add_link("l2", "n2", "n3", bw=100, delay=2.0, pdr=0.9)
    request = VirtualRequest("r")
    request.add_service(NanoService("s1", cpu=50))
    request.add_service(NanoService("s2", mem=40))
    request.add_service(NanoService("s3", gpu=50))
    # c1 dominates the ordering and pins s1; c2 then finds its source placed
    request.add_channel(Channel("c1", "s1", "s3", bw=90, max_delay=100.0,
                                min_pdr=0.9))
    request.add_channel(Channel("c2", "s1", "s2", bw=1, max_delay=100.0,
                                min_pdr=0.5))
    embedding = embed(net, request, Coefficients())
    assert embedding.service_map["s1"] == "n1"
    assert embedding.service_map["s2"] == "n3"
    route = embedding.channel_routes["c2"]
    assert route.src_node == "n1" and route.dst_node == "n3"
    transmitters = {h.transmitter: [m.node for m in h.members]
                    for h in route.hyperlinks}
    assert transmitters == {"n1": ["n2"], "n2": ["n3"]}


def test_embed_is_deterministic(example):
    net, request, coeffs = example
    first = embed(net.clone(), request, coeffs)
    second = embed(net.clone(), request, coeffs)
    assert first.service_map == second.service_map
    assert {c: r.links for c, r in first.channel_routes.items()} \
        == {c: r.links for c, r in second.channel_routes.items()}


def test_embedding_serialization(example):
    net, request, coeffs = example
    doc = embed(net, request, coeffs).to_dict()
    assert doc["services"] == {"s1": "n1", "s2": "n4", "s3": "n5"}
    c1 = doc["channels"][0]
    assert c1["id"] == "c1"
    assert c1["links"] == ["l1", "l2", "l3", "l4"]
    assert {h["transmitter"] for h in c1["hyperlinks"]} == {"n1", "n2", "n3"}


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_fuzzed_embeds_respect_bounds_or_roll_back(seed):
    rng = np.random.default_rng(seed)
    net = random_substrate(rng, max_nodes=6)
    request = random_request(rng)
    coeffs = Coefficients(beta=2.0, gamma=100.0)
    before = net.snapshot()
    try:
        embedding = embed(net, request, coeffs)
    except EmbeddingError:
        assert net.snapshot() == before
        return
    # every accepted channel meets its cost bound and pays its bandwidth
    for channel in request.channels:
        route = embedding.channel_routes[channel.id]
        assert route.eatt <= channel.max_cost
        for link_id in route.links:
            assert net.links[link_id].bw >= 0
    for sid, nid in embedding.service_map.items():
        node = net.nodes[nid]
        assert min(node.cpu, node.gpu, node.mem) >= 0
