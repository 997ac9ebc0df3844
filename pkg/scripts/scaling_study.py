#!/usr/bin/env python3
"""Measure how the three tree builders scale over a doubling ladder of sizes.

Prints one row per size with median wall times and the ratio to the previous
size; a quadratic builder should settle near 4 per doubling once matrices
outgrow the caches.

    python scripts/scaling_study.py --sizes 128,256,512,1024 --reps 5
"""

from __future__ import annotations

import argparse
import gc
import statistics
import time
from dataclasses import dataclass, field

from robinspace import cli, copoints, dendrogram, mmodtree


@dataclass
class StudyConfig:
    sizes: list[int] = field(default_factory=lambda: [128, 256, 512, 1024])
    reps: int = 5
    seed: int = 0
    profile: str = "generic"
    inner: int = 3  # back-to-back calls per sample; the minimum is kept


BUILDERS = {
    "dendrogram": dendrogram.build_dendrogram,
    "mmodule-tree": mmodtree.mmodule_tree,
    "pq-tree": copoints.pq_tree2,
}


def sample(fn, matrix, inner: int) -> float:
    gc.disable()
    try:
        fn(matrix, range(matrix.n))  # warm
        best = float("inf")
        for _ in range(inner):
            t0 = time.perf_counter()
            fn(matrix, range(matrix.n))
            best = min(best, time.perf_counter() - t0)
        return best
    finally:
        gc.enable()


def run(config: StudyConfig) -> dict[int, dict[str, float]]:
    times: dict[int, dict[str, list[float]]] = {
        n: {name: [] for name in BUILDERS} for n in config.sizes
    }
    # interleave reps across sizes so host load drift spreads evenly
    for rep in range(config.reps):
        for n in config.sizes:
            matrix = cli.generate_matrix(n, config.seed + rep, config.profile)
            for name, fn in BUILDERS.items():
                times[n][name].append(sample(fn, matrix, config.inner))
    return {
        n: {name: statistics.median(vals) for name, vals in per.items()}
        for n, per in times.items()
    }


def print_table(config: StudyConfig, medians: dict[int, dict[str, float]]) -> None:
    names = list(BUILDERS)
    header = f"{'n':>6}" + "".join(f"{name:>18}" for name in names)
    print(f"profile={config.profile} reps={config.reps} seed={config.seed}")
    print(header)
    prev: dict[str, float] | None = None
    for n in config.sizes:
        cells = []
        for name in names:
            t = medians[n][name]
            ratio = f" (x{t / prev[name]:.2f})" if prev else ""
            cells.append(f"{t * 1000:9.1f}ms{ratio:>8}")
        print(f"{n:>6}" + "".join(f"{c:>18}" for c in cells))
        prev = medians[n]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="128,256,512,1024")
    parser.add_argument("--reps", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--profile", default="generic", choices=cli.PROFILES)
    args = parser.parse_args()
    config = StudyConfig(
        sizes=[int(s) for s in args.sizes.split(",")],
        reps=args.reps,
        seed=args.seed,
        profile=args.profile,
    )
    print_table(config, run(config))


if __name__ == "__main__":
    main()
