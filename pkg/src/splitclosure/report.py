"""Recovery experiment: partial trees sampled around a hidden cycle.

Each trial hides a random circular ordering of the taxa, samples a few
trees on overlapping taxon subsets so that every split of every tree is
displayed by the hidden cycle, pools the nontrivial partial splits, and
runs the guarded closure.  The interesting questions per trial: did the
run abort on a weak compatibility violation, is the closed system still
displayed by the hidden cycle, and how many splits stayed partial.

write_tsv() serializes the per-trial rows; render_figures() draws small
summary charts next to them.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass

from .closure import CANONICAL, RuleSelector, closure
from .compat import CyclicOrdering, displays
from .core import SplitSystem, TaxonUniverse
from .newick import extract_splits, parse_newick


@dataclass(frozen=True)
class TrialResult:
    trial: int
    input_splits: int
    steps: int
    omega: bool
    displayed: bool | None
    full_splits: int
    partial_splits: int


@dataclass(frozen=True)
class ExperimentSummary:
    n_taxa: int
    tree_taxa: int
    n_trees: int
    seed: int
    rule: str
    cycle_labels: tuple
    trials: tuple

    @property
    def n_trials(self):
        return len(self.trials)

    @property
    def n_omega(self):
        return sum(1 for t in self.trials if t.omega)

    @property
    def n_displayed(self):
        return sum(1 for t in self.trials if t.displayed)

    @property
    def n_with_partials(self):
        return sum(1 for t in self.trials if not t.omega and t.partial_splits)

    @property
    def displayed_rate(self):
        """Fraction of completed (non-aborted) trials still displayed."""
        done = [t for t in self.trials if not t.omega]
        if not done:
            return 0.0
        return sum(1 for t in done if t.displayed) / len(done)


def _covering_subsets(rng, n_taxa, tree_taxa, n_trees):
    """Random taxon subsets, redrawn until their union is everything."""
    taxa = range(n_taxa)
    for _ in range(1000):
        subsets = [frozenset(rng.sample(taxa, tree_taxa)) for _ in range(n_trees)]
        if len(frozenset().union(*subsets)) == n_taxa:
            return subsets
    raise ValueError(
        "could not cover %d taxa with %d subsets of size %d"
        % (n_taxa, n_trees, tree_taxa)
    )


def _arc_merge_newick(rng, labels):
    """A random Newick tree all of whose splits are arcs of the cycle.

    labels must be in (restricted) cycle order.  Adjacent fragments are
    merged until three remain, so every cluster the tree exhibits is a
    contiguous arc.
    """
    frags = list(labels)
    while len(frags) > 3:
        k = rng.randrange(len(frags))
        frags = frags[k:] + frags[:k]
        frags[0] = "(%s,%s)" % (frags[0], frags[1])
        del frags[1]
    return "(%s);" % ",".join(frags)


def run_experiment(trials=100, n_taxa=7, tree_taxa=5, n_trees=5, seed=0, rule="MY"):
    """Run the hidden-cycle recovery experiment and summarize it."""
    if n_taxa < 4:
        raise ValueError("the experiment needs at least four taxa")
    if not 3 <= tree_taxa <= n_taxa:
        raise ValueError("tree_taxa must be between 3 and the taxon count")
    if n_trees * tree_taxa < n_taxa:
        raise ValueError("%d trees on %d taxa can never cover all %d taxa"
                         % (n_trees, tree_taxa, n_taxa))

    universe = TaxonUniverse([str(i + 1) for i in range(n_taxa)])
    rng = random.Random(seed)
    order = list(range(n_taxa))
    rng.shuffle(order)
    hidden = CyclicOrdering(universe, order)
    selector = RuleSelector.of(rule)

    results = []
    for t in range(trials):
        subsets = _covering_subsets(rng, n_taxa, tree_taxa, n_trees)
        chunks = []
        for sub in subsets:
            arc = [universe.label_of(i) for i in hidden.order if i in sub]
            chunks.append(_arc_merge_newick(rng, arc))
        trees = parse_newick("\n".join(chunks), universe)
        collected = []
        for tree in trees:
            collected.extend(extract_splits(tree, include_trivial=False))
        system = SplitSystem(universe, collected).reduce()
        outcome = closure(system, selector, CANONICAL)
        if outcome.is_omega:
            results.append(
                TrialResult(t, len(system), outcome.steps, True, None, 0, 0)
            )
        else:
            closed = outcome.system
            results.append(
                TrialResult(
                    t,
                    len(system),
                    outcome.steps,
                    False,
                    displays(closed, hidden),
                    len(closed.full_splits()),
                    len(closed.partial_only()),
                )
            )
    return ExperimentSummary(
        n_taxa=n_taxa,
        tree_taxa=tree_taxa,
        n_trees=n_trees,
        seed=seed,
        rule=rule,
        cycle_labels=hidden.labels(),
        trials=tuple(results),
    )


_TSV_COLUMNS = (
    "trial",
    "input_splits",
    "steps",
    "outcome",
    "displayed",
    "full_splits",
    "partial_splits",
)


def write_tsv(summary):
    """Per-trial rows as tab-separated text with a header row."""
    lines = ["\t".join(_TSV_COLUMNS)]
    for t in summary.trials:
        if t.omega:
            outcome, shown = "omega", ""
        else:
            outcome = "closed"
            shown = "yes" if t.displayed else "no"
        lines.append(
            "\t".join(
                str(x)
                for x in (
                    t.trial,
                    t.input_splits,
                    t.steps,
                    outcome,
                    shown,
                    t.full_splits,
                    t.partial_splits,
                )
            )
        )
    return "\n".join(lines) + "\n"


def render_figures(summary, outdir):
    """Write summary charts as PNG files; returns their paths."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    os.makedirs(outdir, exist_ok=True)
    paths = []

    displayed = summary.n_displayed
    completed = summary.n_trials - summary.n_omega
    counts = [displayed, completed - displayed, summary.n_omega]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.bar(
        ["displayed", "not displayed", "aborted"],
        counts,
        color=["#4c72b0", "#dd8452", "#c44e52"],
    )
    ax.set_ylabel("trials")
    ax.set_title("Closure outcomes over %d trials" % summary.n_trials)
    for x, c in enumerate(counts):
        ax.text(x, c, str(c), ha="center", va="bottom")
    fig.tight_layout()
    path = os.path.join(outdir, "outcomes.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    paths.append(path)

    steps = [t.steps for t in summary.trials]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    upper = max(steps) if steps else 0
    ax.hist(steps, bins=range(0, upper + 2), color="#4c72b0", edgecolor="white")
    ax.set_xlabel("fired applications per run")
    ax.set_ylabel("trials")
    ax.set_title("Closure length")
    fig.tight_layout()
    path = os.path.join(outdir, "steps.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    paths.append(path)

    partials = [t.partial_splits for t in summary.trials if not t.omega]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    upper = max(partials) if partials else 0
    ax.hist(partials, bins=range(0, upper + 2), color="#55a868", edgecolor="white")
    ax.set_xlabel("splits left partial after closure")
    ax.set_ylabel("trials")
    ax.set_title("Partial splits remaining")
    fig.tight_layout()
    path = os.path.join(outdir, "partial_splits.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    paths.append(path)

    return paths
