"""Cross-ontology association rule mining with information-theoretic ranking."""

from crossmine.errors import CrossmineError, DataError, OntologyError, UsageError
from crossmine.metrics import (
    IricWeights,
    MetricValues,
    RuleCounts,
    TermStats,
    classic_measures,
    information_gain,
    iric,
    mi,
    n_comi,
    n_ic,
    rule_counts,
    term_probability,
    term_stats,
)
from crossmine.miner import MinedRule, MiningConfig, compare_rankings, mine, rank
from crossmine.ontology import (
    DEFAULT_KINDS,
    IS_A,
    PART_OF,
    OntologyGraph,
    RelationKind,
    Term,
    ancestors,
    descendants,
    parse_obo,
    validate,
)
from crossmine.thresholds import (
    SyntheticConfig,
    ThresholdReport,
    apply_ncomi_filter,
    generate_synthetic,
    nic_filter,
    percent_to_nic,
    select_ncomi_threshold,
)
from crossmine.transactions import (
    Transaction,
    TransactionSet,
    cocategory_ids,
    generalize,
    load_annotations,
)

__version__ = "0.1.0"
