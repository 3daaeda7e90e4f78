"""Sieve the conductor-37 curve and print counts per status plus the members.

    python3 scripts/sieve_table.py --hi 2000
"""

import argparse
import time

from kforge.oracles import sieve_second_path
from kforge.sieve import RepData, ec_table, kolyvagin_sieve, sieve_primes, status_sets


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--hi", type=int, default=2000)
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--dk", type=int, default=-7)
    ap.add_argument("--t1", type=int, default=1)
    args = ap.parse_args()

    t0 = time.perf_counter()
    table = ec_table(-16, 16, range(5, args.hi))
    data = RepData(args.p, 37, args.dk, table)
    ells = [ell for ell in sieve_primes(5, args.hi, data) if ell in table]
    recs = kolyvagin_sieve(ells, data, args.t1)
    sets = status_sets(recs)
    other = sieve_second_path({ell: table[ell] for ell in ells}, args.p, args.dk, 37, args.t1)
    print(f"primes {len(recs)}  inert {len(sets['inert'])}  candidates {len(sets['candidate'])}  "
          f"members {len(sets['member'])}")
    print("members:", " ".join(str(e) for e in sorted(sets["member"])))
    print("second path", "agrees" if other == sets else "DIFFERS")
    print(f"{time.perf_counter() - t0:.2f} s")


if __name__ == "__main__":
    main()
