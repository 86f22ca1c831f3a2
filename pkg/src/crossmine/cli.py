"""Command-line entry point.

Exit codes: 0 ok, 1 usage, 2 I/O, 3 data validation, 4 internal.
"""

from __future__ import annotations

import argparse
import logging
import sys

from crossmine.errors import CrossmineError, UsageError
from crossmine.miner import RANK_KEYS
from crossmine.pipeline import RunConfig, run_pipeline
from crossmine.thresholds import POOL_MODES

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="crossmine",
        description="Mine cross-ontology association rules from gene annotations and rank them by IRIC.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    p.add_argument("--obo", action="append", required=True, metavar="PATH",
                   help="OBO ontology file; repeat once per ontology")
    p.add_argument("--category", action="append", required=True, metavar="LABEL[=NAMESPACE]",
                   help="category label for the matching --obo (same order); "
                        "'=NAMESPACE' keeps only terms of that OBO namespace")
    p.add_argument("--annotations", required=True, metavar="PATH",
                   help="tab-separated gene_id<TAB>term_id rows")
    nic = p.add_mutually_exclusive_group(required=True)
    nic.add_argument("--nic-percent", type=float, metavar="PCT",
                     help="drop terms annotated to more than PCT%% of genes")
    nic.add_argument("--nic-value", type=float, metavar="X",
                     help="drop terms with N_IC below X")
    p.add_argument("--fpr", type=float, required=True,
                   help="target false positive rate for the N_COMI threshold (no default)")
    p.add_argument("--min-support", type=float, default=0.001,
                   help="minimum pair support relative to co-annotated genes")
    p.add_argument("--alpha", type=float, default=0.5,
                   help="IRIC weight of the first category; beta = 1 - alpha")
    p.add_argument("--seed", type=int, default=0, help="seed for the synthetic null")
    p.add_argument("--threads", type=int, default=1, help="mining worker threads (output unaffected)")
    p.add_argument("--output-dir", default="crossmine-out", help="directory for result files")
    p.add_argument("--rank-key", default="iric", choices=RANK_KEYS, help="metric used to rank rules")
    p.add_argument("--both-directions", default=True, action=argparse.BooleanOptionalAction,
                   help="emit x->y and y->x; --no-both-directions keeps the smaller antecedent id")
    p.add_argument("--pair", metavar="A,B", help="category pair to mine (default: the two given)")
    p.add_argument("--relations", default="is_a,part_of",
                   help="comma-separated relation kinds followed during generalization")
    p.add_argument("--pool-mode", default="occurrence", choices=POOL_MODES,
                   help="null sampling pool: term occurrences or distinct terms")
    p.add_argument("--ablation", action="store_true",
                   help="also report each threshold alone and both together")
    p.add_argument("--compare-top", type=int, metavar="K",
                   help="report the top-K overlap of IRIC and information gain rankings")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def parse_config(argv) -> RunConfig:
    args = build_parser().parse_args(argv)
    pair = None
    if args.pair:
        pair = tuple(s.strip() for s in args.pair.split(","))
    return RunConfig(
        obo_paths=args.obo,
        categories=args.category,
        annotation_path=args.annotations,
        fpr=args.fpr,
        output_dir=args.output_dir,
        category_pair=pair,
        nic_percent=args.nic_percent,
        nic_value=args.nic_value,
        min_support=args.min_support,
        alpha=args.alpha,
        seed=args.seed,
        rank_key=args.rank_key,
        emit_both_directions=args.both_directions,
        relations=tuple(r.strip() for r in args.relations.split(",") if r.strip()),
        pool_mode=args.pool_mode,
        threads=args.threads,
        ablation=args.ablation,
        compare_top=args.compare_top,
    )


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    logging.basicConfig(
        level=logging.INFO if "-v" in argv or "--verbose" in argv else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = parse_config(argv)
        result = run_pipeline(config)
    except UsageError as exc:
        print(f"crossmine: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        stage = getattr(exc, "stage", "io")
        print(f"crossmine: [{stage}] {exc}", file=sys.stderr)
        return EXIT_IO
    except CrossmineError as exc:
        print(f"crossmine: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:  # noqa: BLE001
        logging.getLogger(__name__).exception("internal error")
        print(f"crossmine: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    stages = result.manifest["stages"]
    print(
        f"{stages['rules_ranked']} rules written to {config.output_dir}/rules.tsv "
        f"(mined {stages['rules_mined']}, N_COMI cutoff "
        f"{result.manifest['threshold_report']['applied_threshold']:.6f})"
    )
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
