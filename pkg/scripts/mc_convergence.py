"""Monte Carlo standard errors against sample size on the standard instance.

    python scripts/mc_convergence.py [--threads 4]
"""
import argparse

import numpy as np

from levyjacobi.config import standard_config
from levyjacobi.equivalence import mc_sample, oracle_moment
from levyjacobi.instance import Instance


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--threads", type=int, default=1)
    args = p.parse_args()
    inst = Instance(standard_config())
    oracle = None
    print(f"{'samples':>9} {'max |z|':>8} {'median SE':>10} {'SE ratio':>9}")
    prev = None
    for n in (10**4, 4 * 10**4, 16 * 10**4, 64 * 10**4):
        res = mc_sample(inst.nu_tilde, inst.grid, inst.letters, n, inst.config.mc.seed, threads=args.threads)
        if oracle is None:
            oracle = np.array([oracle_moment([inst.letters[i] for i in w], inst.nu_moments, inst.grid) for w in res.words])
        z = np.abs(res.mean - oracle) / res.se
        ratio = "" if prev is None else f"{np.median(res.se / prev):9.3f}"
        print(f"{n:>9} {z.max():8.2f} {np.median(res.se):10.2e} {ratio}")
        prev = res.se


if __name__ == "__main__":
    main()
