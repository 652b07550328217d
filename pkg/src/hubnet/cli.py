"""Command-line front end: graph generation and analysis, simulation runs,
figure experiments, and the acceptance verification suite.

The HUBNET_THREADS environment variable caps the compiled kernels' thread
count; all outputs are deterministic for a fixed seed regardless of it.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np


def _apply_thread_env() -> None:
    val = os.environ.get("HUBNET_THREADS")
    if not val:
        return
    try:
        threads = max(1, int(val))
    except ValueError:
        raise SystemExit(f"HUBNET_THREADS must be an integer, got {val!r}")
    import numba
    numba.set_num_threads(min(threads, numba.config.NUMBA_NUM_THREADS))


def _cmd_gen_graph(args) -> int:
    from .graphs import ChungLuParams, expected_weights, sample_chung_lu

    params = ChungLuParams(n=args.n, beta=args.beta, mean_w=args.mean_w,
                           max_w=args.max_w)
    g = sample_chung_lu(expected_weights(params), seed=args.seed)
    g.save(args.out)
    print(f"wrote {args.out}: n={g.n} edges={g.n_edges} "
          f"max_degree={g.max_degree}")
    return 0


def _cmd_analyze_graph(args) -> int:
    from .graphs import (Graph, giant_component, star_like_report,
                         star_like_csv)

    g = Graph.load(args.graph)
    sub, _ = giant_component(g)
    hub_s = args.hub_scale or max(2, int(round(0.9 * sub.max_degree)))
    ldn_s = args.ldn_scale or max(1, int(round(sub.max_degree ** (2.0 / 3.0))))
    rep = star_like_report(sub, hub_s, ldn_s)
    print(f"n={g.n} edges={g.n_edges} giant={sub.n} max_degree={sub.max_degree}")
    print(f"hub scale {hub_s}, low-degree scale {ldn_s}: "
          f"hubs M={rep.n_hubs}, low-degree L={rep.n_ldns}, nu={rep.nu:.4f}"
          + (" (no hubs)" if rep.no_hubs else ""))
    if args.out:
        star_like_csv(sub, rep, args.out)
        print(f"wrote {args.out}")
    return 0


def _cmd_simulate(args) -> int:
    from .dynamics import Coupling, MapFamily
    from .engine import SimConfig, SimState, StateRecorder, simulate
    from .experiments import write_csv
    from .graphs import Graph, giant_component
    from .noise import NoiseOracle

    g = Graph.load(args.graph)
    g, _ = giant_component(g)
    family = MapFamily.tent_contractions()
    coupling = Coupling.sine_exchange()
    oracle = NoiseOracle(args.seed)
    cfg = SimConfig(alpha=args.alpha, steps=args.steps,
                    transient=args.transient, seed=args.seed)
    nodes = ([int(v) for v in args.nodes.split(",")] if args.nodes
             else [int(np.argmax(g.degrees))])
    rec = StateRecorder(nodes)
    simulate(SimState.uniform(g.n, oracle), g, cfg, family, coupling, oracle,
             [rec])
    series = rec.series()
    ts = np.asarray(rec.ts, dtype=np.int64)
    cols = [ts] + [series[:, k] for k in range(len(nodes))]
    write_csv(args.out, ["t"] + [f"node_{v}" for v in nodes], cols)
    print(f"wrote {args.out}: {len(ts)} recorded steps for nodes {nodes}")
    return 0


def _cmd_experiment(args) -> int:
    from .experiments import ExperimentConfig, parse_config, run_experiment

    overrides = {"experiment": args.id, "seed": args.seed, "out": args.out}
    if args.config:
        with open(args.config) as fh:
            cfg = parse_config(fh.read(), overrides)
    else:
        cfg = parse_config("", overrides)
    summary = run_experiment(cfg)
    for chk in summary["checks"]:
        verdict = "PASS" if chk["passed"] else "FAIL"
        print(f"[{verdict}] {chk['id']}: {chk['detail']}")
    print(f"summary: {os.path.join(cfg.out, cfg.experiment + '_summary.json')}")
    return 0 if summary["passed"] else 1


def _cmd_verify(args) -> int:
    from .experiments import run_acceptance_suite

    names = args.only.split(",") if args.only else None
    results = run_acceptance_suite(seed=args.seed, names=names)
    ok = True
    for cid, res in results:
        print(f"{cid} {res.line()}")
        ok &= res.passed
    if args.out:
        summary = {
            "checks": [{"id": cid, "name": r.name, "passed": bool(r.passed),
                        "detail": r.detail, "seconds": round(r.seconds, 2)}
                       for cid, r in results],
            "passed": bool(ok),
        }
        os.makedirs(os.path.dirname(os.path.abspath(args.out)), exist_ok=True)
        with open(args.out, "w", newline="\n") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
    print("verification " + ("PASSED" if ok else "FAILED"))
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hubnet",
        description="coupled random contractions on heterogeneous networks")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-graph", help="sample a power-law random graph")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--beta", type=float, default=3.0)
    g.add_argument("--mean-w", type=float, default=10.0, dest="mean_w")
    g.add_argument("--max-w", type=float, required=True, dest="max_w")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(fn=_cmd_gen_graph)

    a = sub.add_parser("analyze-graph", help="star-like structure report")
    a.add_argument("graph")
    a.add_argument("--hub-scale", type=int, default=None, dest="hub_scale")
    a.add_argument("--ldn-scale", type=int, default=None, dest="ldn_scale")
    a.add_argument("--out", default=None)
    a.set_defaults(fn=_cmd_analyze_graph)

    s = sub.add_parser("simulate", help="run the coupled dynamics on a graph")
    s.add_argument("graph")
    s.add_argument("--alpha", type=float, default=0.9)
    s.add_argument("--steps", type=int, default=5000)
    s.add_argument("--transient", type=int, default=500)
    s.add_argument("--nodes", default=None,
                   help="comma-separated node ids to record (default: top hub)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(fn=_cmd_simulate)

    e = sub.add_parser("experiment", help="run a figure experiment")
    e.add_argument("id", choices=["fig2", "fig3", "fig4", "fig5", "fig6",
                                  "fig7", "custom"])
    e.add_argument("--config", default=None)
    e.add_argument("--seed", type=int, default=None)
    e.add_argument("--out", default=None)
    e.set_defaults(fn=_cmd_experiment)

    v = sub.add_parser("verify", help="run the acceptance suite")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--only", default=None,
                   help="comma-separated check ids (e.g. criterion-01)")
    v.add_argument("--out", default=None, help="write a JSON summary here")
    v.set_defaults(fn=_cmd_verify)
    return p


def main(argv=None) -> int:
    _apply_thread_env()
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
