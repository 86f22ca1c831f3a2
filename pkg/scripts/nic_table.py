#!/usr/bin/env python3
"""Print IC and N_IC for a range of "fraction of genes" cutoffs.

    python3 scripts/nic_table.py [--genes 8176]
"""

import argparse
import math

from crossmine.thresholds import percent_to_nic


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--genes", type=int, default=8176)
    ap.add_argument("--percents", default="25,20,15,10,5,4,3,2,1")
    args = ap.parse_args()
    print("percent\tIC\tN_IC")
    for pct in (float(p) for p in args.percents.split(",")):
        print(f"{pct:g}\t{-math.log2(pct / 100):.2f}\t{percent_to_nic(pct, args.genes):.2f}")


if __name__ == "__main__":
    main()
