"""Virtual network embedding for dataflow applications on wireless mesh substrates.

The package maps directed graphs of nano-services and channels onto a shared
substrate of compute nodes and lossy links, routing each channel with anypath
(multi-receiver broadcast) forwarding and pricing routes by expected anypath
transmission time.
"""

from .anypath import (
    AnypathRouteTable,
    Forwarder,
    Hyperlink,
    PrunedDag,
    anypath_routes,
    bandwidth_subgraph,
    forwarder_weights,
    hyperlink_metrics,
    prune,
    route_closure,
    unicast_distances,
)
from .embedder import (
    ChannelRoute,
    Coefficients,
    Embedding,
    EmbeddingError,
    NoFeasiblePathError,
    NoSuitableNodeError,
    embed,
    pair_quality_revenue,
    select_max_pdr,
    select_min_links,
)
from .metrics import (
    MetricsReport,
    cost,
    metrics_report,
    ratios,
    revenue,
    revenue_cost_ratio,
    usage_report,
)
from .netmodel import (
    Channel,
    NanoService,
    ReservationLedger,
    SubstrateLink,
    SubstrateNetwork,
    SubstrateNode,
    VirtualRequest,
    link_cost,
    local_pdr,
    reserve_channel,
    reserve_service,
    rollback,
    suitable_nodes,
    validate_substrate,
)
from .scenario import (
    GeneratorConfig,
    SimulationConfig,
    SimulationResults,
    example_fixture,
    generate_request,
    run_simulation,
    simulation_substrate,
)
from .windowing import (
    WindowOutcome,
    process_window,
    request_quality_revenue,
)

__version__ = "0.1.0"
