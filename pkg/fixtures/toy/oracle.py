"""Brute-force reference for the toy fixture. Standard library only.

Re-derives every candidate rule of the toy run without touching the
crossmine package: naive OBO read, breadth-first ancestor closure, a
double loop over all term pairs and all transactions, and the metric
formulas written out on plain probabilities.

Writes expected_rules.tsv: every cross-ontology rule that survives the
N_IC term filter and the support floor, ranked by IRIC (ties by ids).
The N_COMI cutoff depends on the seeded null, so the test applies the
cutoff recorded in manifest.json to this table before comparing.

Run config (must match tests/test_cli.py::TOY_ARGS):
    --nic-percent 50 --min-support 0.001 --alpha 0.5 --fpr 0.5 --seed 42
"""

import math
from collections import deque
from pathlib import Path

HERE = Path(__file__).parent
NIC_PERCENT = 50.0
MIN_SUPPORT = 0.001
ALPHA = 0.5
CATS = [("Anatomy", HERE / "anatomy.obo"), ("GO", HERE / "go.obo")]


def read_obo(path):
    terms, parents, obsolete = {}, {}, set()
    cur = None
    for line in path.read_text().splitlines():
        line = line.strip()
        if line.startswith("["):
            cur = {"parents": []} if line == "[Term]" else None
            continue
        if cur is None or ":" not in line:
            continue
        tag, value = line.split(":", 1)
        value = value.split(" !")[0].strip()
        if tag == "id":
            cur["id"] = value
            terms[value] = cur
        elif tag == "name":
            cur["name"] = value
        elif tag == "is_a":
            cur["parents"].append(value)
        elif tag == "relationship" and value.split()[0] == "part_of":
            cur["parents"].append(value.split()[1])
        elif tag == "is_obsolete" and value == "true":
            obsolete.add(cur["id"])
    names = {t: d.get("name", "") for t, d in terms.items() if t not in obsolete}
    for t in names:
        parents[t] = [p for p in terms[t]["parents"] if p in names]
    return names, parents


def bfs_ancestors(t, parents):
    seen, queue = set(), deque(parents[t])
    while queue:
        p = queue.popleft()
        if p not in seen:
            seen.add(p)
            queue.extend(parents[p])
    return seen


def main():
    names, cat_of, parents = {}, {}, {}
    for cat, path in CATS:
        n, p = read_obo(path)
        names.update(n)
        parents.update(p)
        cat_of.update({t: cat for t in n})

    genes = {}
    for line in (HERE / "annotations.tsv").read_text().splitlines():
        if not line or line.startswith("#"):
            continue
        g, t = line.split("\t")[:2]
        genes.setdefault(g, set()).add(t)
    closed = {g: set(ts) | set().union(*(bfs_ancestors(t, parents) for t in ts)) for g, ts in genes.items()}
    G = len(closed)

    def nic_of(t):
        p = sum(t in ts for ts in closed.values()) / G
        return -math.log2(p) / math.log2(G)

    cutoff = -math.log2(NIC_PERCENT / 100) / math.log2(G)
    all_terms = set().union(*closed.values())
    keep = {t for t in all_terms if nic_of(t) >= cutoff}
    txs = [ts & keep for ts in closed.values()]

    def has(tx, cat):
        return any(cat_of[t] == cat for t in tx)

    rows = []
    for x in sorted(keep):
        for y in sorted(keep):
            cx, cy = cat_of[x], cat_of[y]
            if cx == cy:
                continue
            co = [tx for tx in txs if has(tx, cx) and has(tx, cy)]
            N = len(co)
            nx = sum(x in tx for tx in co)
            ny = sum(y in tx for tx in co)
            nxy = sum(x in tx and y in tx for tx in co)
            if nxy == 0 or nxy / N < MIN_SUPPORT:
                continue
            px, py, pxy = nx / N, ny / N, nxy / N
            mi = pxy * math.log2(pxy / (px * py))
            ent = [-p * math.log2(p) if 0 < p < 1 else 0.0 for p in (px, py)]
            ncomi = mi / min(ent) if min(ent) > 0 else 0.0
            nic_x, nic_y = nic_of(x), nic_of(y)
            # alpha weights the Anatomy term, whichever side it is on
            nic_anat, nic_go = (nic_x, nic_y) if cx == "Anatomy" else (nic_y, nic_x)
            iric = (ALPHA * nic_anat + (1 - ALPHA) * nic_go) * max(ncomi, 0.0)
            ig = math.log2(pxy / (px * py))
            rows.append([x, names[x], y, names[y], nx, ny, nxy, N, nic_x, nic_y,
                         ncomi, mi, ig, pxy, nxy / nx, iric])
    rows.sort(key=lambda r: (-r[15], r[0], r[2]))
    header = ["antecedent_id", "antecedent_name", "consequent_id", "consequent_name",
              "n_x", "n_y", "n_xy", "n_cocat", "n_ic_x", "n_ic_y",
              "n_comi", "mi", "info_gain", "support", "confidence", "iric", "rank"]
    out = ["\t".join(header)]
    for i, r in enumerate(rows, 1):
        cells = [str(v) if isinstance(v, (int, str)) else f"{v:.6f}" for v in r] + [str(i)]
        out.append("\t".join(cells))
    (HERE / "expected_rules.tsv").write_text("\n".join(out) + "\n")
    print(f"{len(rows)} candidate rules, N_IC cutoff {cutoff:.6f}, |G| = {G}")


if __name__ == "__main__":
    main()
