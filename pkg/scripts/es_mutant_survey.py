"""Which output checks notice a broken Euler system?

Each seed gets an E1 mutant and an E2 mutant (E2 broken, E1 kept).  The
descent is run on both and the K1 / K2 outcomes are printed.  In every run
so far an E2 break shows up in K2 while K1 still holds.
"""

import argparse

from kforge.eulersys import EmptySolutionSpace, generate_es, mutate_es, run_descent, validate_E


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=6)
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--s", type=int, default=1)
    args = ap.parse_args()

    print("seed axiom  E1    E2    K1    K2")
    for seed in range(1, args.seeds + 1):
        inst = generate_es(seed, args.p, args.s)
        ell = inst.tower.primes[0]
        for axiom in ("E1", "E2"):
            try:
                m = mutate_es(inst, axiom, seed=seed)
            except EmptySolutionSpace:
                print(f"{seed:4d} {axiom}     no mutant found")
                continue
            rep = validate_E(m)
            if axiom == "E1":
                # descent needs E1, so only the validator verdict is shown
                print(f"{seed:4d} {axiom}    {rep[f'E1[{ell}]'][0]!s:5} {rep[f'E2[{ell}]'][0]!s:5} -     -")
                continue
            out = run_descent(m)
            print(f"{seed:4d} {axiom}    {rep[f'E1[{ell}]'][0]!s:5} {rep[f'E2[{ell}]'][0]!s:5} "
                  f"{all(out.K1.values())!s:5} {out.K2[(1, ell)][0]!s:5}")


if __name__ == "__main__":
    main()
