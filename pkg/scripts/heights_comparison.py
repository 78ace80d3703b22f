"""h1 of the W2 system against the S2 x S2 system at matched scalings.

Runs a list of (R1, R2) pairs, reports whether the two h1 curves cross in
the gamma window and where.
"""

import argparse
from pathlib import Path

from semitoric.invariants import match_and_compare


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pairs", default="1,2;3,4;2,3;1,1.5")
    ap.add_argument("--points", type=int, default=20)
    ap.add_argument("--mc", type=int, default=0, help="oracle samples per gamma (0 = off)")
    ap.add_argument("--out", default="results")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for pair in args.pairs.split(";"):
        R1, R2 = (float(v) for v in pair.split(","))
        c = match_and_compare(R1, R2, points=args.points, mc_samples=args.mc)
        hs = [h for _, h, _ in c.rows]
        (out / f"heights_R{R1:g}_{R2:g}.csv").write_text(c.to_csv())
        star = "none" if c.gamma_star is None else f"{c.gamma_star:.9f}"
        print(f"R=({R1:g},{R2:g}) alpha={c.alpha:g} beta={c.beta:g} window=({c.window[0]:.6f},{c.window[1]:.6f}) "
              f"h1_s2={c.h1_s2:.6f} h1_w2 in [{min(hs):.6f},{max(hs):.6f}] decreasing={c.decreasing} "
              f"crossing={star}")


if __name__ == "__main__":
    main()
