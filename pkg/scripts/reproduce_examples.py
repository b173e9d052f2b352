"""Solve both bundled examples in every scenario and compare with the published values."""

from __future__ import annotations

import argparse
from dataclasses import dataclass
from pathlib import Path

from multigp import Scenario, load_document, solve_problem

ROOT = Path(__file__).resolve().parent.parent

PUBLISHED = {
    "example1": {"L": 125.9045, "M": 194.9390, "U": 296.2627},
    "example2": {"L": 47.47193, "M": 44.53226, "U": 23.22874},
}


@dataclass
class Config:
    problems: tuple[str, ...] = ("example1", "example2")
    oracle_check: bool = True


def run(cfg: Config) -> None:
    for name in cfg.problems:
        doc = load_document(ROOT / "problems" / f"{name}.gp.json")
        print(f"== {name}")
        for r in solve_problem(doc.problem, list(Scenario), oracle_check=cfg.oracle_check,
                               timing=True):
            ref = PUBLISHED[name][r.scenario]
            err = abs(r.dual_value - ref) / ref
            line = (f"  {r.scenario}: Z = {r.dual_value:.7g} (published {ref}, rel err {err:.1e}) "
                    f"{r.status} in {r.wall_time * 1e3:.1f} ms")
            if r.oracle is not None:
                line += f"; oracle rel diff {r.oracle.relative_difference:.1e}"
            print(line)
            print("     x = " + ", ".join(f"{k}={v:.7g}" for k, v in r.x.items()))
            if r.inactive:
                print(f"     inactive constraints: {r.inactive}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--no-oracle", action="store_true")
    args = ap.parse_args()
    run(Config(oracle_check=not args.no_oracle))
