"""Count fixpoint iteration lengths for random positive patterns.

For each sampled structure and each random body positive in X0, the least
fixpoint is reached by iterating from the empty set.  The census tallies
how many steps that takes against the universe size, which bounds the
chain length.  Useful for eyeballing how tight the bound is in practice.
"""

import argparse
import random
import sys
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

import oracles
from aml.model import SuiteSpec, Valuation
from aml.semantics import evaluate
from aml.sugar import render_sugar
from aml.syntax import Signature


@dataclass(frozen=True)
class CensusConfig:
    max_size: int = 4
    samples: int = 300
    bodies: int = 400
    depth: int = 3
    seed: int = 0


def iteration_length(structure, valuation, body) -> int:
    current = frozenset()
    steps = 0
    while True:
        after = evaluate(structure, valuation.with_set(0, current), body)
        if after == current:
            return steps
        current = after
        steps += 1


def run(cfg: CensusConfig) -> int:
    sig = Signature(("c",))
    spec = SuiteSpec(sig, max_size=cfg.max_size, seed=cfg.seed, samples=cfg.samples)
    pool = list(spec.structures())
    rng = random.Random(cfg.seed)

    tally: Counter[tuple[int, int]] = Counter()
    deepest = (0, None, None)
    for i in range(cfg.bodies):
        s = pool[(i * 31) % len(pool)]
        body = oracles.random_positive_pattern(rng, sig, 0, max_depth=cfg.depth)
        v = Valuation({0: s.universe[0]}, {1: s.carrier})
        steps = iteration_length(s, v, body)
        n = len(s.universe)
        assert steps <= n, "chain exceeded universe size"
        tally[(n, steps)] += 1
        if steps > deepest[0]:
            deepest = (steps, body, s)

    print(f"{cfg.bodies} bodies over {len(pool)} structure(s), depth <= {cfg.depth}")
    print("size  steps  count")
    for (n, steps), count in sorted(tally.items()):
        print(f"{n:>4}  {steps:>5}  {count:>5}")
    steps, body, s = deepest
    if body is not None:
        print(f"longest chain: {steps} step(s) on a {len(s.universe)}-element "
              f"universe, body {render_sugar(body)}")
    return 0


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-size", type=int, default=4)
    ap.add_argument("--samples", type=int, default=300)
    ap.add_argument("--bodies", type=int, default=400)
    ap.add_argument("--depth", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    return run(CensusConfig(args.max_size, args.samples, args.bodies, args.depth, args.seed))


if __name__ == "__main__":
    sys.exit(main())
