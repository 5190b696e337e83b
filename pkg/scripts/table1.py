"""Reproduce the entanglement-rate table and the GHZ (x) Bell example.

    python scripts/table1.py
"""

import time

from puritylab.corpus import GHZ_BELL, TABLE1
from puritylab.dsl import state
from puritylab.rate import total_rate
from puritylab.states import dim_cap


def main():
    print(f"{'state':<20} {'n':>3} {'factors':<22} {'e_total':>8} {'expected':>8}  seconds")
    for expr, expected in [(GHZ_BELL, None), *TABLE1]:
        t0 = time.perf_counter()
        with dim_cap(32768):
            psi = state(expr)
            r = total_rate(psi)
        dt = time.perf_counter() - t0
        sizes = "+".join(str(f.s) for f in r.per_factor)
        exp = "" if expected is None else str(expected)
        mark = "" if expected is None else ("ok" if r.e_total == expected else "MISMATCH")
        print(f"{expr:<20} {psi.n:>3} {sizes:<22} {str(r.e_total):>8} {exp:>8}  {dt:7.3f} {mark}")


if __name__ == "__main__":
    main()
