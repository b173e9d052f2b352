"""Sweep every triplet-component combination of an example and test the extremal-scenario claim.

The claim under test: the all-low scenario gives the smallest optimum over
the parameter space and the all-high scenario the largest. The script
reports what it observes.
"""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass
from pathlib import Path

from multigp import load_document, sweep_scenarios

ROOT = Path(__file__).resolve().parent.parent


@dataclass
class Config:
    problem: str = "example1"
    workers: int = 1
    cap: int = 1_000_000


def run(cfg: Config) -> None:
    doc = load_document(ROOT / "problems" / f"{cfg.problem}.gp.json")
    start = time.perf_counter()
    rep = sweep_scenarios(doc.problem, workers=cfg.workers, cap=cfg.cap)
    print(f"{cfg.problem}: {time.perf_counter() - start:.1f} s")
    print(rep.summary())
    if rep.failures:
        tags = sorted(set(rep.failures.values()))
        print(f"failure tags: {tags}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("problem", nargs="?", default="example1", choices=("example1", "example2"))
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    run(Config(args.problem, args.workers))
