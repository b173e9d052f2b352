"""Compare the dual route with the primal log-space oracle on generated instances."""

from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np

from multigp import (NonConvergedError, build_dual, certify, maximize_dual, oracle_solve,
                     random_instance, recover_primal)


@dataclass
class Config:
    instances: int = 200
    seed: int = 0
    max_n: int = 5
    max_m: int = 3
    max_terms: int = 4
    rtol: float = 1e-5


def shapes(cfg: Config):
    rng = np.random.default_rng(cfg.seed)
    while True:
        n, m = int(rng.integers(1, cfg.max_n + 1)), int(rng.integers(0, cfg.max_m + 1))
        t_min = max(2, -(-(n + 2) // (m + 1)))
        if t_min <= cfg.max_terms:
            yield n, m, int(rng.integers(t_min, cfg.max_terms + 1)), int(rng.integers(2**31))


def run(cfg: Config) -> None:
    certified = agree = 0
    diffs = []
    gen = shapes(cfg)
    for _ in range(cfg.instances):
        n, m, t, seed = next(gen)
        g = random_instance(n, m, t, seed).gp
        try:
            ds = maximize_dual(build_dual(g))
        except NonConvergedError as exc:
            print(f"n={n} m={m} T={t} seed={seed}: dual did not converge ({exc})")
            continue
        ps = recover_primal(g, ds)
        cert = certify(g, ds, ps)
        po = oracle_solve(g)
        d = abs(ds.dual_value - po.objective_value) / ds.dual_value
        if cert.certified:
            certified += 1
            agree += d <= cfg.rtol
            diffs.append(d)
        else:
            print(f"n={n} m={m} T={t} seed={seed}: {cert.verdict.value}, rel diff {d:.1e}")
    diffs = np.array(diffs)
    print(f"{certified}/{cfg.instances} certified; {agree}/{certified} within {cfg.rtol:g}")
    if diffs.size:
        print(f"rel diff median {np.median(diffs):.1e}, max {diffs.max():.1e}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--instances", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    run(Config(instances=args.instances, seed=args.seed))
