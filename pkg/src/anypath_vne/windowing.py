"""Window-level request handling: rank a batch of requests and embed in turn."""

from __future__ import annotations

from dataclasses import dataclass, field

from .embedder import Coefficients, Embedding, EmbeddingError, embed
from .netmodel import SubstrateNetwork, VirtualRequest


def request_quality_revenue(request: VirtualRequest,
                            coeffs: Coefficients) -> float:
    """Whole-request revenue plus the summed channel quality term."""
    value = sum(coeffs.node_term(s) for s in request.services.values())
    value += coeffs.beta * sum(c.bw for c in request.channels)
    value += coeffs.gamma * sum(c.min_pdr / c.max_delay
                                for c in request.channels)
    return value


@dataclass
class RequestOutcome:
    """Result of one embedding attempt within a window."""

    request: VirtualRequest
    accepted: bool
    embedding: Embedding = None
    reason: str = None


@dataclass
class WindowOutcome:
    """Per-request outcomes in processing order plus the mutated substrate."""

    results: list = field(default_factory=list)
    substrate: SubstrateNetwork = None

    @property
    def accepted(self) -> list:
        return [r for r in self.results if r.accepted]

    @property
    def blocked(self) -> list:
        return [r for r in self.results if not r.accepted]


def process_window(net: SubstrateNetwork, requests,
                   coeffs: Coefficients) -> WindowOutcome:
    """Embed a window of requests in descending quality-revenue order.

    Blocked requests are rolled back inside embed() and leave no trace on the
    substrate, so later requests see only the accepted reservations.
    """
    ranked = sorted(requests,
                    key=lambda r: -request_quality_revenue(r, coeffs))
    outcome = WindowOutcome(substrate=net)
    for request in ranked:
        try:
            embedding = embed(net, request, coeffs)
        except EmbeddingError as exc:
            outcome.results.append(
                RequestOutcome(request, False, reason=str(exc)))
        else:
            outcome.results.append(
                RequestOutcome(request, True, embedding=embedding))
    return outcome
