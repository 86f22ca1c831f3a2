#!/usr/bin/env python3
"""Generate fixtures/medium: two random ontologies and planted gene annotations.

Genes belong to latent modules; each module prefers a handful of anatomy
and GO leaves, so real cross-ontology associations exist alongside noise.
Some genes carry annotations from only one ontology.

    python3 scripts/make_fixtures.py [--seed 7] [--genes 400]
"""

import argparse
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]


def random_ontology(rng, prefix, namespace, n_terms, p_second_parent=0.15, p_part_of=0.3):
    """Tree grown breadth-first plus occasional extra parents; returns (obo text, leaves)."""
    ids = [f"{prefix}:{i:07d}" for i in range(1, n_terms + 1)]
    parents = {ids[0]: []}
    for i, tid in enumerate(ids[1:], start=1):
        # parents come from earlier terms, so the graph stays acyclic
        first = ids[int(rng.integers(max(0, i - 8), i))]
        links = [(("part_of" if rng.random() < p_part_of else "is_a"), first)]
        if i > 3 and rng.random() < p_second_parent:
            extra = ids[int(rng.integers(0, i))]
            if extra != first:
                links.append(("is_a", extra))
        parents[tid] = links
    has_child = {p for links in parents.values() for _, p in links}
    leaves = [t for t in ids if t not in has_child]
    lines = ["format-version: 1.2", f"ontology: synthetic-{prefix.lower()}", ""]
    for tid in ids:
        lines += ["[Term]", f"id: {tid}", f"name: {namespace} term {tid.split(':')[1].lstrip('0')}", f"namespace: {namespace}"]
        for kind, p in parents[tid]:
            lines.append(f"is_a: {p}" if kind == "is_a" else f"relationship: part_of {p}")
        lines.append("")
    return "\n".join(lines), leaves


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--genes", type=int, default=400)
    ap.add_argument("--modules", type=int, default=10)
    ap.add_argument("--out", type=Path, default=ROOT / "fixtures" / "medium")
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    anat_text, anat_leaves = random_ontology(rng, "MA", "anatomy", 45)
    go_text, go_leaves = random_ontology(rng, "GO", "biological_process", 70)
    modules = [
        (list(rng.choice(anat_leaves, size=2, replace=False)), list(rng.choice(go_leaves, size=3, replace=False)))
        for _ in range(args.modules)
    ]

    rows = []
    for g in range(1, args.genes + 1):
        gene = f"gene{g:04d}"
        anat_pref, go_pref = modules[int(rng.integers(len(modules)))]
        kind = rng.random()
        cats = []
        if kind < 0.9:
            cats.append((anat_pref, anat_leaves))
        if kind > 0.1:
            cats.append((go_pref, go_leaves))
        for pref, leaves in cats:
            for _ in range(int(rng.integers(1, 4))):
                pool = pref if rng.random() < 0.8 else leaves
                rows.append((gene, str(pool[int(rng.integers(len(pool)))])))

    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "anatomy.obo").write_text(anat_text)
    (args.out / "go.obo").write_text(go_text)
    body = "".join(f"{g}\t{t}\n" for g, t in sorted(set(rows)))
    (args.out / "annotations.tsv").write_text(f"# generated by scripts/make_fixtures.py --seed {args.seed}\n" + body)
    print(f"wrote {args.out}: {args.genes} genes, {len(set(rows))} annotation rows")


if __name__ == "__main__":
    main()
