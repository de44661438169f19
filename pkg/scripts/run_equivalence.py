"""Three-way moment table and intertwiner residuals for a config.

    python scripts/run_equivalence.py [configs/three_atom.json] [--max-len 6]
"""
import argparse
import time

import numpy as np

from levyjacobi.config import parse_config, three_atom_config
from levyjacobi.equivalence import all_words, build_intertwiner, compare_moments, intertwine_residual
from levyjacobi.instance import Instance


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("config", nargs="?")
    p.add_argument("--max-len", type=int, default=None)
    args = p.parse_args()
    inst = Instance(parse_config(args.config) if args.config else three_atom_config())
    L = inst.K if args.max_len is None else args.max_len

    t0 = time.perf_counter()
    reps = compare_moments(inst.jfield, inst.afield, inst.letters, inst.nu_moments, all_words(len(inst.letters), L))
    print(f"{len(reps)} words up to length {L} in {time.perf_counter() - t0:.2f}s")
    print(f"{'word':>14} {'J':>22} {'A':>22} {'oracle':>22} {'max dev':>9}")
    for r in reps:
        if len(r.word) <= 3 or r.max_dev > inst.config.tolerances.rel:
            w = ",".join(map(str, r.word)) or "()"
            print(f"{w:>14} {r.value_J:22.15g} {r.value_A:22.15g} {r.value_oracle:22.15g} {r.max_dev:9.1e}")
    print(f"max deviation over all words: {max(r.max_dev for r in reps):.2e}")

    K = min(inst.K, 4)
    jf, af = inst.fields_for(K)
    for parts in (("full",), ("plus", "zero", "minus")):
        I = build_intertwiner(jf, af, inst.letters, K, parts=parts, gram_tol=np.inf)
        res = {
            part: max(intertwine_residual(I, part, phi, K - 1) for phi in inst.letters)
            for part in ("plus", "zero", "minus", "full")
        }
        print(f"\nwords from {'+'.join(parts)}: {len(I.words)} words, rank {I.rank}, "
              f"Gram dev {I.gram_deviation:.2e}, isometry defect {I.isometry_defect():.2e}")
        for part, v in res.items():
            print(f"  residual {part:>5}: {v:.2e}")


if __name__ == "__main__":
    main()
