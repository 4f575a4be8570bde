"""Command-line interface: worked example, ad-hoc embedding, load sweep, validation.

Exit codes: 0 success, 2 blocked embedding, 3 input error, 4 internal
invariant violation.

Input schemas (JSON):
  substrate: {"nodes": [{"id", "cpu", "gpu", "mem", "functionals"?}, ...],
              "links": [{"id", "a", "b", "bw", "delay", "pdr"}, ...]}
  request:   {"id"?, "services": [{"id", "cpu", "gpu", "mem", "functionals"?}, ...],
              "channels": [{"id", "src", "dst", "bw", "max_delay", "min_pdr"}, ...]}
  coefficients: {"alpha"?, "beta"?, "cost_alpha"?, "cost_beta"?, "gamma"?}
      where alpha/cost_alpha are a number or a {"cpu", "gpu", "mem"} object
  simulation config: {"substrate"?, "loads"?, "iterations"?, "seed"?,
      "pool_size"?, "coefficients"?, "generator"?}
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import scenario
from .embedder import Coefficients, EmbeddingError, embed, pair_quality_revenue
from .netmodel import (
    SchemaError,
    natural_key,
    request_from_dict,
    substrate_from_dict,
    validate_substrate,
)

EXIT_OK = 0
EXIT_BLOCKED = 2
EXIT_INPUT = 3
EXIT_INTERNAL = 4

# ground truth for the `example` subcommand self-check
_EXAMPLE_SERVICES = {"s1": "n1", "s2": "n4", "s3": "n5"}
_EXAMPLE_ROUTES = {
    "c1": {"l1", "l2", "l3", "l4"},
    "c2": {"l2", "l5"},
    "c3": {"l4", "l5", "l6"},
}
_EXAMPLE_NODES = {"n1": (0, 0, 0), "n4": (0, 0, 10), "n5": (10, 10, 0)}
_EXAMPLE_BW = {"l1": 20, "l2": 0, "l3": 50, "l4": 10, "l5": 60, "l6": 90}


def fmt(value) -> str:
    """Render numbers with 6 significant digits; integers stay integral."""
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, int):
        return str(value)
    return f"{value:.6g}"


def _load_json(path: str, what: str) -> dict:
    try:
        with open(path) as handle:
            return json.load(handle)
    except OSError as exc:
        raise SchemaError(what, f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(what, f"malformed JSON in {path}: {exc}") from exc


def _alpha_triple(value, where: str) -> tuple:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return (float(value),) * 3
    if isinstance(value, dict):
        try:
            return (float(value["cpu"]), float(value["gpu"]), float(value["mem"]))
        except KeyError as exc:
            raise SchemaError(f"{where}.{exc.args[0]}", "missing resource weight")
    raise SchemaError(where, "expected a number or a cpu/gpu/mem object")


def coefficients_from_dict(doc: dict, defaults: Coefficients = None) -> Coefficients:
    base = defaults or Coefficients()
    if not isinstance(doc, dict):
        raise SchemaError("coefficients", "expected a JSON object")
    alpha = (_alpha_triple(doc["alpha"], "coefficients.alpha")
             if "alpha" in doc else base.alpha)
    alpha_cost = (_alpha_triple(doc["cost_alpha"], "coefficients.cost_alpha")
                  if "cost_alpha" in doc else base.alpha_cost)
    return Coefficients(
        alpha=alpha,
        beta=float(doc.get("beta", base.beta)),
        alpha_cost=alpha_cost,
        beta_cost=float(doc.get("cost_beta", base.beta_cost)),
        gamma=float(doc.get("gamma", base.gamma)),
    )


def simulation_config_from_dict(doc: dict) -> scenario.SimulationConfig:
    if not isinstance(doc, dict):
        raise SchemaError("config", "expected a JSON object")
    defaults = scenario.SimulationConfig()
    generator = scenario.GeneratorConfig(**doc.get("generator", {})) \
        if isinstance(doc.get("generator", {}), dict) else None
    if generator is None:
        raise SchemaError("config.generator", "expected a JSON object")
    coeffs = coefficients_from_dict(doc.get("coefficients", {}),
                                    defaults.coefficients)
    try:
        return scenario.SimulationConfig(
            substrate=doc.get("substrate", defaults.substrate),
            loads=tuple(doc.get("loads", defaults.loads)),
            iterations=int(doc.get("iterations", defaults.iterations)),
            seed=int(doc.get("seed", defaults.seed)),
            pool_size=int(doc.get("pool_size", defaults.pool_size)),
            coefficients=coeffs,
            generator=generator,
        )
    except (TypeError, ValueError) as exc:
        raise SchemaError("config", str(exc)) from exc


def cmd_example(_args) -> int:
    net, request, coeffs = scenario.example_fixture()
    ranked = sorted(request.channels,
                    key=lambda c: -pair_quality_revenue(c, request, coeffs))
    print("channel order by pair quality-revenue:")
    for channel in ranked:
        print(f"  {channel.id}: {fmt(pair_quality_revenue(channel, request, coeffs))}")
    try:
        embedding = embed(net, request, coeffs)
    except EmbeddingError as exc:
        print(f"embedding unexpectedly blocked: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    print("service placement:")
    for sid in sorted(embedding.service_map, key=natural_key):
        print(f"  {sid} -> {embedding.service_map[sid]}")
    print("channel routes:")
    for cid in sorted(embedding.channel_routes, key=natural_key):
        route = embedding.channel_routes[cid]
        links = ",".join(sorted(route.links, key=natural_key))
        print(f"  {cid}: {route.src_node} -> {route.dst_node} via {{{links}}}"
              f" (eatt {fmt(route.eatt)})")
    print("residual node resources (cpu, gpu, mem):")
    for nid in sorted(net.nodes, key=natural_key):
        node = net.nodes[nid]
        print(f"  {nid}: ({node.cpu}, {node.gpu}, {node.mem})")
    print("residual link bandwidth:")
    for lid in sorted(net.links, key=natural_key):
        print(f"  {lid}: {net.links[lid].bw}")

    ok = embedding.service_map == _EXAMPLE_SERVICES
    ok &= {cid: set(r.links) for cid, r in embedding.channel_routes.items()} \
        == _EXAMPLE_ROUTES
    ok &= all(net.nodes[nid].available() == avail
              for nid, avail in _EXAMPLE_NODES.items())
    ok &= all(net.links[lid].bw == bw for lid, bw in _EXAMPLE_BW.items())
    if not ok:
        print("self-check failed: result differs from the reference tables",
              file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


def cmd_validate(args) -> int:
    net = substrate_from_dict(_load_json(args.substrate, "substrate"))
    report = validate_substrate(net)
    for violation in report:
        print(violation)
    if report:
        return EXIT_INPUT
    print(f"substrate ok: {len(net.nodes)} nodes, {len(net.links)} links")
    return EXIT_OK


def cmd_embed(args) -> int:
    net = substrate_from_dict(_load_json(args.substrate, "substrate"))
    violations = validate_substrate(net)
    if violations:
        raise SchemaError("substrate", "; ".join(violations))
    request = request_from_dict(_load_json(args.request, "request"))
    coeffs = Coefficients()
    if args.coeffs:
        coeffs = coefficients_from_dict(_load_json(args.coeffs, "coefficients"))
    try:
        embedding = embed(net, request, coeffs)
    except EmbeddingError as exc:
        detail = {"error": str(exc)}
        if hasattr(exc, "service_id"):
            detail["service"] = exc.service_id
        if hasattr(exc, "channel_id"):
            detail["channel"] = exc.channel_id
        print(json.dumps(detail, indent=2))
        return EXIT_BLOCKED
    print(json.dumps(embedding.to_dict(), indent=2))
    return EXIT_OK


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)


def write_results(results: scenario.SimulationResults, out_dir: Path) -> None:
    """Emit summary.csv, node_usage.csv, link_usage.csv, and raw.csv."""
    out_dir.mkdir(parents=True, exist_ok=True)
    summary_rows = []
    for summary in results.summaries:
        for metric, mean, std in [
            ("acceptance_ratio", summary.acceptance_mean, summary.acceptance_std),
            ("revenue", summary.revenue_mean, summary.revenue_std),
            ("cost", summary.cost_mean, summary.cost_std),
            ("rc_ratio", summary.rc_mean, summary.rc_std),
        ]:
            summary_rows.append([summary.load, metric, fmt(mean), fmt(std)])
    _write_csv(out_dir / "summary.csv",
               ["load", "metric", "mean", "stddev"], summary_rows)

    node_rows = []
    link_rows = []
    for usage in results.usage:
        for (node, services, cpu_u, cpu_t, gpu_u, gpu_t, mem_u, mem_t) \
                in usage.node_rows:
            node_rows.append([usage.load, node, fmt(services),
                              fmt(cpu_u), cpu_t, fmt(gpu_u), gpu_t,
                              fmt(mem_u), mem_t])
        for (link, channels, bw_u, bw_t) in usage.link_rows:
            link_rows.append([usage.load, link, fmt(channels), fmt(bw_u), bw_t])
    _write_csv(out_dir / "node_usage.csv",
               ["load", "node", "services_mean",
                "cpu_used_mean", "cpu_total", "gpu_used_mean", "gpu_total",
                "mem_used_mean", "mem_total"], node_rows)
    _write_csv(out_dir / "link_usage.csv",
               ["load", "link", "channels_mean", "bw_used_mean", "bw_total"],
               link_rows)

    raw_rows = [
        [row.iteration, row.load, row.accepted, row.blocked,
         fmt(row.acceptance_ratio), fmt(row.revenue), fmt(row.cost),
         fmt(row.rc_ratio)]
        for row in results.raw_rows
    ]
    _write_csv(out_dir / "raw.csv",
               ["iteration", "load", "accepted", "blocked",
                "acceptance_ratio", "revenue", "cost", "rc_ratio"], raw_rows)


def cmd_simulate(args) -> int:
    cfg = scenario.SimulationConfig()
    if args.config:
        cfg = simulation_config_from_dict(_load_json(args.config, "config"))
    results = scenario.run_simulation(cfg)
    out_dir = Path(args.out)
    write_results(results, out_dir)
    print(f"wrote {out_dir / 'summary.csv'}")
    print(f"wrote {out_dir / 'node_usage.csv'}")
    print(f"wrote {out_dir / 'link_usage.csv'}")
    print(f"wrote {out_dir / 'raw.csv'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anypath-vne",
        description="Embed dataflow virtual networks on a wireless mesh substrate")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("example",
                   help="run the built-in worked example and self-check it")

    p_embed = sub.add_parser("embed", help="embed one request onto a substrate")
    p_embed.add_argument("--substrate", required=True, help="substrate JSON file")
    p_embed.add_argument("--request", required=True, help="request JSON file")
    p_embed.add_argument("--coeffs", help="coefficients JSON file")

    p_sim = sub.add_parser("simulate", help="run the seeded load sweep")
    p_sim.add_argument("--config", help="simulation config JSON file")
    p_sim.add_argument("--out", required=True, help="output directory for CSVs")

    p_val = sub.add_parser("validate", help="check substrate invariants")
    p_val.add_argument("--substrate", required=True, help="substrate JSON file")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags; map to the input-error code
        return EXIT_INPUT if exc.code else EXIT_OK
    handlers = {
        "example": cmd_example,
        "embed": cmd_embed,
        "simulate": cmd_simulate,
        "validate": cmd_validate,
    }
    try:
        return handlers[args.command](args)
    except SchemaError as exc:
        print(json.dumps({"error": str(exc), "field": exc.field}),
              file=sys.stderr)
        return EXIT_INPUT


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
