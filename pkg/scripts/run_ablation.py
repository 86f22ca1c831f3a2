#!/usr/bin/env python3
"""Run the four-arm pruning ablation on a fixture directory and print a table.

The directory must hold anatomy.obo, go.obo and annotations.tsv.

    python3 scripts/run_ablation.py fixtures/medium --nic-percent 20 --fpr 0.05
"""

import argparse
import tempfile
from pathlib import Path

from crossmine.pipeline import RunConfig, run_pipeline


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("fixture", type=Path)
    ap.add_argument("--nic-percent", type=float, default=20.0)
    ap.add_argument("--fpr", type=float, default=0.05)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    d = args.fixture
    with tempfile.TemporaryDirectory() as out:
        cfg = RunConfig(
            [d / "anatomy.obo", d / "go.obo"], ["Anatomy", "GO"], d / "annotations.tsv",
            fpr=args.fpr, output_dir=out, nic_percent=args.nic_percent, seed=args.seed, ablation=True,
        )
        arms = run_pipeline(cfg).manifest["ablation"]
    print("arm\tn_rules\tmean_n_ic\tmean_n_comi")
    for name, arm in arms.items():
        cells = [arm["n_rules"]] + [("NA" if arm[k] is None else f"{arm[k]:.4f}") for k in ("mean_n_ic", "mean_n_comi")]
        print(name, *cells, sep="\t")


if __name__ == "__main__":
    main()
