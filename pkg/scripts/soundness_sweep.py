"""Random factored states: how often does the factorization recover the construction?

    python scripts/soundness_sweep.py --trials 1000 --max-sites 8
"""

import argparse
import time

import numpy as np

from puritylab.separability import finest_factorization
from puritylab.states import PureState, permute_sites, tensor_all


def random_case(rng, max_sites):
    sizes = []
    while sum(sizes) < max_sites:
        k = int(rng.choice([1, 2, 3]))
        if sum(sizes) + k > max_sites:
            break
        sizes.append(k)
        if rng.random() < 0.3:
            break
    factors = []
    for k in sizes:
        z = rng.normal(size=2 ** k) + 1j * rng.normal(size=2 ** k)
        factors.append(PureState((2,) * k, z / np.linalg.norm(z)))
    psi = tensor_all(factors)
    order = [int(i) for i in rng.permutation(psi.n)]
    where = {old: new for new, old in enumerate(order)}
    blocks, start = [], 0
    for k in sizes:
        blocks.append(tuple(sorted(where[o] for o in range(start, start + k))))
        start += k
    return permute_sites(psi, order), sorted(blocks)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--max-sites", type=int, default=6)
    ap.add_argument("--tol", type=float, default=1e-9)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    t0 = time.perf_counter()
    hits = 0
    for _ in range(args.trials):
        psi, blocks = random_case(rng, args.max_sites)
        hits += sorted(finest_factorization(psi, args.tol).partition) == blocks
    print(f"{hits}/{args.trials} partitions recovered in {time.perf_counter() - t0:.2f} s")


if __name__ == "__main__":
    main()
