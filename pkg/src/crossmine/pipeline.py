"""End-to-end run: parse, ingest, generalize, filter, mine, calibrate, rank, write."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path
from statistics import fmean

from crossmine.errors import DataError, UsageError
from crossmine.metrics import IricWeights
from crossmine.miner import RANK_KEYS, MiningConfig, compare_rankings, mine, rank
from crossmine.ontology import RelationKind, parse_obo
from crossmine.thresholds import (
    POOL_MODES,
    SyntheticConfig,
    apply_ncomi_filter,
    calibrate,
    nic_filter,
    percent_to_nic,
)
from crossmine.transactions import generalize, load_annotations

log = logging.getLogger(__name__)

TOOL_VERSION = "crossmine 0.1.0"

RULE_COLUMNS = (
    "antecedent_id", "antecedent_name", "consequent_id", "consequent_name",
    "n_x", "n_y", "n_xy", "n_cocat", "n_ic_x", "n_ic_y",
    "n_comi", "mi", "info_gain", "support", "confidence", "iric", "rank",
)


@dataclass
class RunConfig:
    obo_paths: list
    categories: list
    annotation_path: str
    fpr: float
    output_dir: str
    category_pair: tuple | None = None
    nic_percent: float | None = None
    nic_value: float | None = None
    min_support: float = 0.001
    alpha: float = 0.5
    seed: int = 0
    rank_key: str = "iric"
    emit_both_directions: bool = True
    relations: tuple = ("is_a", "part_of")
    pool_mode: str = "occurrence"
    threads: int = 1
    ablation: bool = False
    compare_top: int | None = None

    def __post_init__(self):
        # accept pathlib paths from library callers; the manifest stores strings
        self.obo_paths = [str(p) for p in self.obo_paths]
        self.annotation_path = str(self.annotation_path)
        self.output_dir = str(self.output_dir)
        if len(self.obo_paths) != len(self.categories):
            raise UsageError("each --obo needs exactly one --category")
        if (self.nic_percent is None) == (self.nic_value is None):
            raise UsageError("give exactly one of --nic-percent / --nic-value")
        if self.nic_percent is not None and not 0 < self.nic_percent <= 100:
            raise UsageError("--nic-percent must be in (0, 100]")
        if self.nic_value is not None and not 0 <= self.nic_value <= 1:
            raise UsageError("--nic-value must be in [0, 1]")
        if not 0 <= self.alpha <= 1:
            raise UsageError("--alpha must be in [0, 1]")
        if not 0 < self.fpr <= 1:
            raise UsageError("--fpr must be in (0, 1]")
        if not 0 <= self.min_support <= 1:
            raise UsageError("--min-support must be in [0, 1]")
        if self.rank_key not in RANK_KEYS:
            raise UsageError(f"--rank-key must be one of {', '.join(RANK_KEYS)}")
        if self.pool_mode not in POOL_MODES:
            raise UsageError(f"--pool-mode must be one of {', '.join(POOL_MODES)}")
        if not 0 <= self.seed < 2**64:
            raise UsageError("--seed must be a 64-bit unsigned integer")
        if self.threads < 1:
            raise UsageError("--threads must be >= 1")
        if self.compare_top is not None and self.compare_top < 1:
            raise UsageError("--compare-top must be >= 1")
        labels = [c.split("=", 1)[0] for c in self.categories]
        if len(set(labels)) != len(labels):
            raise UsageError("category labels must be distinct")
        if self.category_pair is None:
            if len(labels) != 2:
                raise UsageError("with more than two ontologies, choose two with --pair")
            self.category_pair = tuple(labels)
        self.category_pair = tuple(self.category_pair)
        if len(self.category_pair) != 2 or any(c not in labels for c in self.category_pair):
            raise UsageError(f"--pair must name two of {labels}")

    @property
    def weights(self) -> IricWeights:
        return IricWeights.from_alpha(self.alpha)

    def echo(self) -> dict:
        # threads and output_dir never affect results, so they stay out of the manifest
        out = asdict(self)
        out.pop("threads")
        out.pop("output_dir")
        out["category_pair"] = list(self.category_pair)
        out["relations"] = list(self.relations)
        out["beta"] = 1.0 - self.alpha
        return out


def fmt(v) -> str:
    """Six decimals, round-half-even on the exact binary value."""
    if v is None:
        return "NA"
    s = f"{v:.6f}"
    return "0.000000" if s == "-0.000000" else s


def rule_row(rule, names: dict) -> list:
    c, m = rule.counts, rule.metrics
    return [
        rule.antecedent, names.get(rule.antecedent, ""), rule.consequent, names.get(rule.consequent, ""),
        str(c.n_x), str(c.n_y), str(c.n_xy), str(c.n_cocat),
        fmt(rule.n_ic_x), fmt(rule.n_ic_y),
        fmt(m.n_comi), fmt(m.mi), fmt(m.info_gain), fmt(m.support), fmt(m.confidence), fmt(m.iric),
        str(rule.rank),
    ]


def rules_tsv(rules, names: dict) -> str:
    lines = ["\t".join(RULE_COLUMNS)]
    lines += ["\t".join(rule_row(r, names)) for r in rules]
    return "\n".join(lines) + "\n"


def _digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _mean_nic(rules) -> float | None:
    return fmean((r.n_ic_x + r.n_ic_y) / 2 for r in rules) if rules else None


def _mean_ncomi(rules) -> float | None:
    return fmean(r.metrics.n_comi for r in rules) if rules else None


def _arm(rules, threshold=None) -> dict:
    return {
        "n_rules": len(rules),
        "mean_n_ic": _mean_nic(rules),
        "mean_n_comi": _mean_ncomi(rules),
        "ncomi_threshold": threshold,
    }


@dataclass
class RunResult:
    manifest: dict
    rules: list = field(repr=False)
    files: dict = field(default_factory=dict)


class _Stage:
    """Prefixes errors raised inside a block with the pipeline stage name."""

    def __init__(self, name):
        self.name = name

    def __enter__(self):
        log.info("stage: %s", self.name)
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is not None and isinstance(exc, (DataError, ValueError)) and not isinstance(exc, UsageError):
            raise DataError(f"[{self.name}] {exc}") from exc
        if isinstance(exc, OSError):
            exc.stage = self.name
        return False


def load_inputs(config: RunConfig):
    kinds = frozenset(RelationKind(r, True) for r in config.relations)
    graphs = []
    for path, label in zip(config.obo_paths, config.categories):
        label, _, namespace = label.partition("=")
        with _Stage(f"parse {path}"), open(path, encoding="utf-8") as fh:
            graphs.append(parse_obo(fh, label, transitive=config.relations, namespace=namespace or None))
    with _Stage("ingest"), open(config.annotation_path, encoding="utf-8", newline="") as fh:
        ts = load_annotations(fh, graphs)
    with _Stage("generalize"):
        gen = generalize(ts, graphs, kinds)
    return graphs, ts, gen


def run_pipeline(config: RunConfig) -> RunResult:
    """Run every stage and write the output files into ``config.output_dir``.

    Outputs are staged in a temporary directory and moved into place only
    after every stage succeeded.
    """
    graphs, raw_ts, ts = load_inputs(config)
    names = {t: term.name for g in graphs for t, term in g.terms.items()}
    g_total = len(ts)
    if g_total < 2:
        raise DataError("[ingest] need at least two genes")
    cat_a, cat_b = config.category_pair

    with _Stage("nic-filter"):
        cutoff = percent_to_nic(config.nic_percent, g_total) if config.nic_percent is not None else config.nic_value
        filtered, removed = nic_filter(ts, cutoff)

    mcfg = MiningConfig(
        category_pair=config.category_pair,
        min_support=config.min_support,
        emit_both_directions=config.emit_both_directions,
        nic_threshold=cutoff,
        weights=config.weights,
        threads=config.threads,
    )
    synth = SyntheticConfig(seed=config.seed, pool_mode=config.pool_mode)

    with _Stage("mine"):
        mined = mine(filtered, mcfg)
    with _Stage("calibrate"):
        report, _ = calibrate(filtered, mcfg, mined, config.fpr, synth)
    applied = max(report.threshold, 0.0)
    with _Stage("ncomi-filter"):
        kept = apply_ncomi_filter(mined, applied)
        ranked = rank(kept, config.rank_key)

    terms_before = {c: len(ts.term_ids(c)) for c in (cat_a, cat_b)}
    terms_after = {c: len(filtered.term_ids(c)) for c in (cat_a, cat_b)}
    manifest = {
        "tool_version": TOOL_VERSION,
        "config": config.echo(),
        "inputs": {
            "obo": {str(p): _digest(p) for p in config.obo_paths},
            "annotations": {str(config.annotation_path): _digest(config.annotation_path)},
        },
        "n_genes": g_total,
        "n_cocategory": sum(1 for tr in ts if tr.has(cat_a) and tr.has(cat_b)),
        "nic_cutoff": cutoff,
        "stages": {
            "terms_generalized": sum(terms_before.values()),
            "terms_after_nic_filter": sum(terms_after.values()),
            "rules_mined": len(mined),
            "rules_after_ncomi_filter": len(kept),
            "rules_ranked": len(ranked),
        },
        "terms_by_category": {c: {"generalized": terms_before[c], "after_nic_filter": terms_after[c]} for c in (cat_a, cat_b)},
        "threshold_report": report.summary() | {"applied_threshold": applied},
    }
    if config.compare_top:
        manifest["compare_top"] = compare_rankings(kept, "iric", "info_gain", config.compare_top).as_dict()
    if config.ablation:
        with _Stage("ablation"):
            manifest["ablation"] = ablation(ts, filtered, mined, report.threshold, mcfg, config.fpr, synth)

    files = {
        "rules.tsv": rules_tsv(ranked, names),
        "removed_terms.tsv": "term_id\tcategory\tterm_name\tgene_count\tn_ic\n"
        + "".join(f"{r.term}\t{r.category}\t{names.get(r.term, '')}\t{r.gene_count}\t{fmt(r.n_ic)}\n" for r in removed),
        "null_scores.tsv": "n_comi\n" + "".join(f"{fmt(s)}\n" for s in report.null_scores),
        "manifest.json": json.dumps(manifest, indent=2, sort_keys=True) + "\n",
    }
    written = write_outputs(config.output_dir, files)
    return RunResult(manifest, ranked, written)


def ablation(ts, filtered, mined_filtered, threshold_filtered, mcfg, fpr, synth) -> dict:
    """Rule counts and mean N_IC / N_COMI with each threshold alone and both together."""
    before = mine(ts, mcfg)
    report_raw, _ = calibrate(ts, mcfg, before, fpr, synth)
    only_ncomi = apply_ncomi_filter(before, max(report_raw.threshold, 0.0))
    both = apply_ncomi_filter(mined_filtered, max(threshold_filtered, 0.0))
    return {
        "before_pruning": _arm(before),
        "only_nic": _arm(mined_filtered),
        "only_ncomi": _arm(only_ncomi, report_raw.threshold),
        "both": _arm(both, threshold_filtered),
    }


def write_outputs(output_dir, files: dict) -> dict:
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=".crossmine-", dir=out))
    written = {}
    try:
        for name, text in files.items():
            (tmp / name).write_bytes(text.encode("utf-8"))
        # rules.tsv moves last, so a crash never leaves it beside stale companions
        for name in sorted(files, key=lambda n: n == "rules.tsv"):
            os.replace(tmp / name, out / name)
            written[name] = out / name
    finally:
        for leftover in tmp.iterdir():
            leftover.unlink()
        tmp.rmdir()
    return written
