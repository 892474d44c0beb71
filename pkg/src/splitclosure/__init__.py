"""Amalgamation of partial phylogenetic splits by closure rules.

The package turns collections of partial splits (for example, the
splits of leaf-labelled trees on overlapping taxon sets) into better
resolved split systems by repeatedly firing local amalgamation rules,
with weak compatibility guarding the runs and circular orderings as
the target representation.
"""

from .closure import (
    CANONICAL,
    ClosureOperatorReport,
    ClosureOutcome,
    ClosureStepLimitError,
    OrderPolicy,
    RuleSelector,
    closure,
    closure_operator_check,
    is_closed,
    y_length_bound,
)
from .compat import (
    CycleSearchInfeasibleError,
    CyclicOrdering,
    WcWitness,
    displays,
    find_cycle,
    is_displayed,
    wc_triple_witness,
    wc_witness,
    weakly_compatible,
    weakly_compatible_triple,
)
from .core import (
    DEFAULT_MAX_UNIVERSE,
    PartialSplit,
    RESERVED_LABEL_CHARS,
    SplitSystem,
    TaxonSet,
    TaxonUniverse,
    UniverseMismatchError,
    extends,
    pairwise_compatible,
    preceq,
    reduce_system,
)
from .formats import (
    NoFullSplitsError,
    SplitsFormatError,
    read_splits_file,
    write_nexus_splits,
    write_splits_file,
    write_trace,
)
from .newick import (
    NewickParseError,
    PhyloTree,
    extract_splits,
    parse_newick,
    prune,
)
from .report import (
    ExperimentSummary,
    TrialResult,
    render_figures,
    run_experiment,
    write_tsv,
)
from .rules import (
    InvalidOrientationError,
    Orientation,
    RuleApplication,
    apply_m,
    apply_y,
    apply_z,
    is_trivial_application,
    m_orientations,
    y_orientations,
    z_orientations,
)

__version__ = "0.1.0"

__all__ = [
    "CANONICAL",
    "ClosureOperatorReport",
    "ClosureOutcome",
    "ClosureStepLimitError",
    "CycleSearchInfeasibleError",
    "CyclicOrdering",
    "DEFAULT_MAX_UNIVERSE",
    "ExperimentSummary",
    "InvalidOrientationError",
    "NewickParseError",
    "NoFullSplitsError",
    "OrderPolicy",
    "Orientation",
    "PartialSplit",
    "PhyloTree",
    "RESERVED_LABEL_CHARS",
    "RuleApplication",
    "RuleSelector",
    "SplitsFormatError",
    "SplitSystem",
    "TaxonSet",
    "TaxonUniverse",
    "TrialResult",
    "UniverseMismatchError",
    "WcWitness",
    "apply_m",
    "apply_y",
    "apply_z",
    "closure",
    "closure_operator_check",
    "displays",
    "extends",
    "extract_splits",
    "find_cycle",
    "is_closed",
    "is_displayed",
    "is_trivial_application",
    "m_orientations",
    "pairwise_compatible",
    "parse_newick",
    "preceq",
    "prune",
    "read_splits_file",
    "reduce_system",
    "render_figures",
    "run_experiment",
    "wc_triple_witness",
    "wc_witness",
    "weakly_compatible",
    "weakly_compatible_triple",
    "write_nexus_splits",
    "write_splits_file",
    "write_trace",
    "write_tsv",
    "y_length_bound",
    "y_orientations",
    "z_orientations",
]
