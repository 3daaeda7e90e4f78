"""Key-formula instances and single-condition mutants, tallied per profile.

For each (p, s) profile and seed: build an instance, check the formula on
the main path and with plain integer arithmetic, then mutate every
condition and record which conditions the validator names.
"""

import argparse
import collections
import time

from kforge.keyformula import CONDITIONS, MutationUnavailable, generate_instance, key_formula_check, mutate, validate
from kforge.oracles import naive_key_formula


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--profiles", default="3:1,5:1,3:2,5:2")
    args = ap.parse_args()

    for prof in args.profiles.split(","):
        p, s = (int(x) for x in prof.split(":"))
        t0 = time.perf_counter()
        ok = agree = 0
        named = collections.Counter()
        other = []
        for seed in range(1, args.seeds + 1):
            inst = generate_instance(seed, p, s)
            rep = key_formula_check(inst)
            naive = naive_key_formula(inst)
            ok += rep.passed
            agree += naive.get("lhs") == rep.lhs
            for cond in CONDITIONS:
                try:
                    fails = validate(mutate(inst, cond)).failures
                except MutationUnavailable:
                    other.append((seed, cond, "unavailable"))
                    continue
                if fails == [cond]:
                    named[cond] += 1
                else:
                    other.append((seed, cond, fails))
        print(f"p={p} s={s}: {ok}/{args.seeds} pass, naive agrees {agree}/{args.seeds}, "
              f"mutants named {sum(named.values())}/{args.seeds * len(CONDITIONS)} "
              f"({time.perf_counter() - t0:.1f} s)")
        for row in other:
            print("   unexpected:", row)


if __name__ == "__main__":
    main()
