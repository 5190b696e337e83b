"""Recompute the derived example values with the oracle and write data fixtures.

Everything printed here comes from the SVD / loop-based partial trace in
puritylab.oracle, never from the purity-number code under test.

    python scripts/derive_fixtures.py
"""

from itertools import combinations
from pathlib import Path

import numpy as np

from puritylab.corpus import GHZ_BELL, maximally_mixed_pair, mixed_fixture
from puritylab.dsl import state
from puritylab.oracle import brute_partial_trace, schmidt_rank
from puritylab.statefile import save_state
from puritylab.states import DensityMatrix

DATA = Path(__file__).resolve().parent.parent / "data"


def oracle_gamma(psi, s):
    return sum(schmidt_rank(psi, c).schmidt_rank == 1 for c in combinations(range(psi.n), s))


def oracle_purity(rho, keep):
    m = brute_partial_trace(rho, keep)
    return float(np.trace(m @ m).real)


def oracle_stages(rho, tol=1e-9):
    """Sequential trace-out using only oracle partial traces."""
    remaining = list(range(rho.n))
    current = rho
    gammas = []
    for s in range(1, rho.n):
        taken, used = [], set()
        for c in combinations(range(len(remaining)), s):
            if used.isdisjoint(c) and oracle_purity(current, c) >= 1 - tol:
                taken.append(c)
                used.update(c)
        gammas.append(len(taken))
        keep = [k for k in range(len(remaining)) if k not in used]
        if used and keep:
            current = DensityMatrix(tuple(current.dims[k] for k in keep), brute_partial_trace(current, keep))
        remaining = [remaining[k] for k in keep]
    return gammas, sum(s * g for s, g in enumerate(gammas, 1))


def main():
    psi = state(GHZ_BELL)
    print(GHZ_BELL, "gammas", [oracle_gamma(psi, s) for s in range(1, psi.n)])
    for e in ("ghz(3)", "w(3)"):
        p = state(e)
        print(e, "gammas", [oracle_gamma(p, s) for s in (1, 2)],
              "single-site purity", schmidt_rank(p, [0]).purity)
    rho = mixed_fixture()
    print("mixed fixture stages, n_p:", oracle_stages(rho))
    print("I/2 x I/2 stages, n_p:", oracle_stages(maximally_mixed_pair()))
    DATA.mkdir(exist_ok=True)
    save_state(rho, DATA / "mixed_example.json")
    save_state(maximally_mixed_pair(), DATA / "maximally_mixed_pair.json")
    save_state(state(GHZ_BELL), DATA / "ghz_bell.json")
    print("wrote fixtures to", DATA)


if __name__ == "__main__":
    main()
