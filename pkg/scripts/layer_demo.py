"""p-complete Euler systems up to a given layer, checked layer by layer.

    python3 scripts/layer_demo.py --alpha 2 --p 3 --s 2 --seeds 2
"""

import argparse
import time

from kforge.eulersys import (check_layer_K1_K2, descend_iwasawa, generate_es, layer_projection_ok,
                             localization_diagram_ok, validate_pE)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=int, default=1)
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--s", type=int, default=1)
    ap.add_argument("--seeds", type=int, default=2)
    args = ap.parse_args()

    for seed in range(1, args.seeds + 1):
        t0 = time.perf_counter()
        pinst = generate_es(seed, args.p, args.s, alpha_max=args.alpha)
        axioms = all(ok for ok, _ in validate_pE(pinst).values())
        print(f"seed {seed}: ell = {pinst.tower.primes[0]}, axioms {'ok' if axioms else 'FAIL'}")
        for alpha in range(args.alpha + 1):
            k = check_layer_K1_K2(pinst, alpha)
            diag, proj = True, True
            for n in pinst.base.indices():
                descend_iwasawa(pinst, n, alpha)
                diag = diag and localization_diagram_ok(pinst, n, alpha)
                if alpha < args.alpha:
                    proj = proj and layer_projection_ok(pinst, n, alpha)
            print(f"  alpha {alpha}: K1/K2 {'ok' if all(k.values()) else k}, diagram {diag}, projection {proj}")
        print(f"  {time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    main()
