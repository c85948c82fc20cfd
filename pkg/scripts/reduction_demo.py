#!/usr/bin/env python3
"""Build the clique reduction for a random graph and verify it end to end.

    python scripts/reduction_demo.py --vertices 7 --edges 5 --k 3 --plant
"""

import argparse
import json
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from bsm import gs, hardness  # noqa: E402
from bsm.generate import random_graph, random_triangle_free_graph  # noqa: E402


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--vertices", type=int, default=7)
    parser.add_argument("--edges", type=int, default=5)
    parser.add_argument("--k", type=int, default=3)
    parser.add_argument("--seed", type=int, default=42)
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--plant", action="store_true", help="plant a triangle")
    group.add_argument("--triangle-free", action="store_true")
    args = parser.parse_args()

    rng = random.Random(args.seed)
    if args.triangle_free:
        graph = random_triangle_free_graph(rng, args.vertices, args.edges)
    else:
        graph = random_graph(rng, args.vertices, args.edges, plant_triangle=args.plant)

    art = hardness.reduce_clique(graph, args.k)
    report = hardness.verify_reduction(graph, args.k)
    payload = {
        "graph": {"vertices": list(graph.vertices), "edges": [list(e) for e in graph.edges]},
        "fallback": art.fallback,
        "delta": art.delta,
        "k_hat": art.k_hat,
        "t": art.t,
        "people_per_side": len(art.inst.men),
        "clique": list(report.clique) if report.clique else None,
        "reduction_answer": report.reduction_answer,
        "agree": report.agree,
        "ok": report.ok,
    }
    if report.clique and not art.fallback:
        witness = hardness.witness_matching(art, report.clique)
        objectives = gs.objectives(art.inst, witness)
        payload["witness_costs"] = {
            "men": objectives.men_cost,
            "women": objectives.women_cost,
            "balance": objectives.balance,
        }
    print(json.dumps(payload, indent=2))
    return 0 if report.ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
