"""Throughput comparison of the compiled and pure-Python engines.

Runs the same seeded workloads on each available backend, confirms the
outcomes agree exactly (modulo the backend label), and reports events
per second.

    python3 benchmarks/bench_engines.py --events 200000 --repeats 3
"""
from __future__ import annotations

import argparse
import dataclasses
import time

from escape_lab.analytic import ModelParams
from escape_lab.engine import default_backend
from escape_lab.escape import Budget, InitialConfig, run

# Pure front growth (no antagonist): always runs the full event budget.
GROWTH = InitialConfig(a0=((),), b0=())
# Slow chase: the takeover type starts five levels away at a rate low
# enough that both populations keep churning events for a long time.
CHASE = InitialConfig(a0=((),), b0=((0, 0, 0, 0, 0),))


def bench_once(engine: str, cfg, params, budget, seed):
    start = time.perf_counter()
    outcome = run(cfg, params, budget, seed=seed, engine=engine)
    elapsed = time.perf_counter() - start
    return outcome, elapsed


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--events", type=int, default=200_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    budget = Budget(max_events=args.events)
    backends = ["python"]
    if default_backend() == "compiled":
        backends.insert(0, "compiled")
    else:
        print("compiled engine not available; timing the python engine only")

    exit_code = 0
    for label, cfg, lam in (("growth", GROWTH, 2.0), ("chase", CHASE, 1.5)):
        params = ModelParams(d=2, lam=lam)
        print(f"-- {label} workload (lam={lam}, budget {args.events} events)")
        results = {}
        for engine in backends:
            best = float("inf")
            outcome = None
            for _ in range(args.repeats):
                outcome, elapsed = bench_once(engine, cfg, params, budget, args.seed)
                best = min(best, elapsed)
            rate = outcome.events / best if best > 0 else float("inf")
            results[engine] = (outcome, best)
            print(
                f"  {engine:>8}: {outcome.events} events in {best:.3f}s "
                f"({rate:,.0f} events/s; stop={outcome.stop_reason}, "
                f"type1={outcome.n_type1}, type2={outcome.n_type2})"
            )
        if len(results) == 2:
            normalize = lambda o: dataclasses.replace(o, backend="*")  # noqa: E731
            fast, slow = results["compiled"], results["python"]
            if normalize(fast[0]) != normalize(slow[0]):
                print("  MISMATCH: backends disagree on the outcome")
                exit_code = 1
            else:
                print(f"  outcomes identical; speedup x{slow[1] / fast[1]:.1f}")
    return exit_code


if __name__ == "__main__":
    raise SystemExit(main())
