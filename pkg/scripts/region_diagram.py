"""Williamson types of B and C over the (s1, s2) square for W2TwoParam."""

import argparse
import json
from pathlib import Path

from semitoric.model_systems import W2TwoParam
from semitoric.spectral_classification import region_diagram


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", type=int, default=41)
    ap.add_argument("--gamma", type=float, default=9 / 20)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()
    rd = region_diagram(W2TwoParam(1.0, 1.0, args.gamma), args.grid)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"regions_{args.grid}.csv").write_text(rd.to_csv())
    comps = rd.components()
    names = {0: "EE/EE", 1: "FF/EE", 2: "EE/FF", 3: "FF/FF"}
    print(json.dumps({names[k]: v for k, v in comps.items()}, indent=2))
    # coarse text picture, s1 across and s2 upward
    cl = rd.classes()
    glyph = {0: ".", 1: "b", 2: "c", 3: "#", -1: "?"}
    for j in reversed(range(args.grid)):
        print("".join(glyph[int(cl[i, j])] for i in range(args.grid)))


if __name__ == "__main__":
    main()
