"""Run the W0 -> Wn polygon pipeline over a parameter sweep and audit the
transition-time bracket of the starting coupled-spins family."""

import argparse
from fractions import Fraction

from semitoric.hirzebruch_pipeline import PipelineError, run_pipeline, verify_against_standard


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nmax", type=int, default=5)
    ap.add_argument("--alphas", default="1/4,1/2,1,2,3,7")
    ap.add_argument("--betas", default="1/2,1,5/2,4")
    args = ap.parse_args()
    print("n alpha beta alpha' orbit_checks lower_ok upper_ok straddles_half")
    for a in args.alphas.split(","):
        for b in args.betas.split(","):
            for n in range(args.nmax + 1):
                try:
                    res = run_pipeline(n, Fraction(a), Fraction(b))
                except PipelineError as exc:
                    print(n, a, b, "infeasible:", exc)
                    continue
                ok = all(verify_against_standard(res).values())
                br = res.bracket
                print(n, a, b, res.alpha_prime, ok, br.lower_ok, br.upper_ok, br.straddles_half)


if __name__ == "__main__":
    main()
