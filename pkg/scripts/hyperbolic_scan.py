"""Where do hyperbolic-transverse rank-one points appear for W1Hyperbolic?

Scans (t, j), counts hyperbolic reduced critical points and cross-checks
each level with an independent gradient sweep.
"""

import argparse

import numpy as np

from semitoric.model_systems import W1Hyperbolic
from semitoric.reduced_spaces import Morse, gradient_sweep, missed_by_radial_search, reduced_critical_points, reduced_hamiltonian


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--beta", type=float, default=1.0)
    ap.add_argument("--gamma", type=float, default=1.0)
    ap.add_argument("--nt", type=int, default=9)
    ap.add_argument("--nj", type=int, default=9)
    ap.add_argument("--sweep", type=int, default=16, help="random starts for the cross-check")
    args = ap.parse_args()
    sys = W1Hyperbolic(args.alpha, args.beta, args.gamma)
    jmax = args.alpha + args.beta
    print("t j hyperbolic elliptic degenerate missed")
    for t in np.linspace(0.05, 0.95, args.nt):
        for j in np.linspace(0.05, 0.95, args.nj) * jmax:
            rh = reduced_hamiltonian(sys, (float(t),), float(j))
            crit = reduced_critical_points(rh)
            kinds = [c.morse for c in crit]
            missed = missed_by_radial_search(rh, crit, gradient_sweep(rh, starts=args.sweep)) if args.sweep else []
            print(f"{t:.3f} {j:.3f} {kinds.count(Morse.HYPERBOLIC)} {kinds.count(Morse.ELLIPTIC)} "
                  f"{kinds.count(Morse.DEGENERATE)} {len(missed)}")


if __name__ == "__main__":
    main()
