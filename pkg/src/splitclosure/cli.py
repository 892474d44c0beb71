"""Command line front end.

Subcommands:
    extract       Newick trees in, partial splits out.
    closure       saturate a splits file under the chosen rules.
    check         weak compatibility or circularity of a splits file.
    export-nexus  full splits as a Nexus SPLITS block for network viewers.
    report        hidden-cycle recovery experiment with TSV + figures.

Exit codes: 0 success/yes, 1 predicate answered no, 2 errors (bad
input, infeasible search, step cap), 3 closure aborted on a weak
compatibility violation.
"""

from __future__ import annotations

import argparse
import os
import sys

from .closure import (
    CANONICAL,
    ClosureStepLimitError,
    OrderPolicy,
    RuleSelector,
    closure,
)
from .compat import (
    CycleSearchInfeasibleError,
    CyclicOrdering,
    displays,
    find_cycle,
    weakly_compatible,
    wc_witness,
)
from .core import PartialSplit, SplitSystem, TaxonUniverse
from .formats import (
    read_splits_file,
    write_nexus_splits,
    write_splits_file,
    write_trace,
)
from .newick import extract_splits, parse_newick, prune
from .report import render_figures, run_experiment, write_tsv

_DOMAIN_ERRORS = (ValueError, OSError, CycleSearchInfeasibleError, ClosureStepLimitError)


def _read_input(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _write_output(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _parse_policy(text):
    if text == "canonical":
        return CANONICAL
    if text.startswith("random:"):
        seed = text.split(":", 1)[1]
        try:
            return OrderPolicy.seeded(int(seed))
        except ValueError:
            pass
    raise argparse.ArgumentTypeError(
        "policy must be 'canonical' or 'random:<seed>', got %r" % text
    )


def cmd_extract(args):
    trees = parse_newick(_read_input(args.trees))
    universe = trees[0].universe
    dropped = []
    if args.prune:
        dropped = [x.strip() for x in args.prune.split(",") if x.strip()]
        for label in dropped:
            if label not in universe:
                raise ValueError(
                    "cannot prune %r: no tree has such a leaf" % label
                )
        pruned = []
        for tree in trees:
            keep = tree.leaf_taxa()
            present = [l for l in dropped if l in keep]
            pruned.append(prune(tree, present) if present else tree)
        trees = pruned
    collected = []
    for tree in trees:
        collected.extend(extract_splits(tree, include_trivial=not args.drop_trivial))
    system = SplitSystem(universe, collected).reduce()
    if dropped:
        # Pruned taxa carry no splits; shrink the declared universe.
        survivors = [l for l in universe.labels if l not in dropped]
        shrunk = TaxonUniverse(survivors)
        system = SplitSystem(
            shrunk,
            [
                PartialSplit.from_labels(
                    shrunk, s.side_a.labels(), s.side_b.labels()
                )
                for s in system
            ],
        )
    _write_output(None, write_splits_file(system))
    return 0


def cmd_closure(args):
    system = read_splits_file(_read_input(args.splits))
    guarded = False if args.unguarded else None
    selector = RuleSelector.of(args.rule, guarded=guarded)
    outcome = closure(
        system, selector, args.policy, want_trace=args.trace is not None
    )
    if args.trace is not None:
        _write_output(args.trace, write_trace(outcome.trace))
    if outcome.is_omega:
        print(
            "inconsistent after %d steps: %s"
            % (outcome.steps, outcome.witness.describe()),
            file=sys.stderr,
        )
        return 3
    _write_output(None, write_splits_file(outcome.system))
    return 0


def cmd_check(args):
    system = read_splits_file(_read_input(args.splits))
    if args.weakly_compatible:
        witness = wc_witness(system)
        if witness is None:
            print("weakly compatible: yes")
            return 0
        print("weakly compatible: no")
        print(witness.describe())
        return 1
    cycle = find_cycle(system, max_n=args.max_n)
    if cycle is not None:
        print("circular: yes")
        print("cycle: %s" % ",".join(cycle.labels()))
        return 0
    if weakly_compatible(system):
        print("circular: no (weakly compatible but not circular)")
    else:
        print("circular: no")
    return 1


def cmd_export_nexus(args):
    system = read_splits_file(_read_input(args.splits))
    cycle = None
    if args.cycle == "auto":
        try:
            cycle = find_cycle(system)
        except CycleSearchInfeasibleError as exc:
            print("warning: %s; omitting CYCLE" % exc, file=sys.stderr)
    elif args.cycle != "none":
        labels = [x.strip() for x in args.cycle.split(",") if x.strip()]
        cycle = CyclicOrdering.from_labels(system.universe, labels)
        if not displays(system, cycle):
            raise ValueError(
                "the given cycle does not display every input split"
            )
    text, skipped = write_nexus_splits(system, cycle)
    for s in skipped:
        print(
            "warning: split %s is partial and was not exported" % s,
            file=sys.stderr,
        )
    _write_output(args.output, text)
    return 0


def cmd_report(args):
    summary = run_experiment(
        trials=args.trials,
        n_taxa=args.taxa,
        tree_taxa=args.tree_taxa,
        n_trees=args.trees,
        seed=args.seed,
    )
    os.makedirs(args.out, exist_ok=True)
    tsv_path = os.path.join(args.out, "trials.tsv")
    with open(tsv_path, "w", encoding="utf-8") as fh:
        fh.write(write_tsv(summary))
    figure_paths = render_figures(summary, args.out)

    completed = summary.n_trials - summary.n_omega
    print("hidden cycle: %s" % ",".join(summary.cycle_labels))
    print(
        "trials: %d  aborted: %d  displayed by hidden cycle: %d/%d (%.1f%%)"
        % (
            summary.n_trials,
            summary.n_omega,
            summary.n_displayed,
            completed,
            100.0 * summary.displayed_rate,
        )
    )
    print("trials leaving partial splits: %d" % summary.n_with_partials)
    print("wrote %s" % tsv_path)
    for p in figure_paths:
        print("wrote %s" % p)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="splitclosure",
        description="amalgamate partial phylogenetic splits by closure rules",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "extract", help="read Newick trees and write their partial splits"
    )
    p.add_argument("trees", help="Newick file, or - for stdin")
    p.add_argument(
        "--drop-trivial",
        action="store_true",
        help="omit splits with a singleton side",
    )
    p.add_argument(
        "--prune",
        metavar="LABELS",
        help="comma-separated leaf labels to remove before extraction",
    )
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("closure", help="saturate a splits file under the rules")
    p.add_argument("splits", help="splits file, or - for stdin")
    p.add_argument(
        "--rule",
        choices=["m", "y", "my", "z"],
        default="my",
        help="rule set to apply (default: my)",
    )
    p.add_argument(
        "--unguarded",
        action="store_true",
        help="skip the weak compatibility guard between steps",
    )
    p.add_argument(
        "--policy",
        type=_parse_policy,
        default=CANONICAL,
        help="candidate order: canonical (default) or random:<seed>",
    )
    p.add_argument(
        "--trace",
        metavar="FILE",
        help="write one line per fired application to FILE",
    )
    p.set_defaults(func=cmd_closure)

    p = sub.add_parser(
        "check", help="test weak compatibility or circularity"
    )
    p.add_argument("splits", help="splits file, or - for stdin")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument(
        "--weakly-compatible",
        action="store_true",
        help="test the triple condition on all member triples",
    )
    group.add_argument(
        "--circular",
        action="store_true",
        help="search for a circular ordering displaying every split",
    )
    p.add_argument(
        "--max-n",
        type=int,
        default=10,
        metavar="N",
        help="refuse --circular search above N taxa (default: 10)",
    )
    p.set_defaults(func=cmd_check)

    p = sub.add_parser(
        "export-nexus",
        help="write the full splits as a Nexus SPLITS block",
    )
    p.add_argument("splits", help="splits file, or - for stdin")
    p.add_argument(
        "--cycle",
        default="auto",
        metavar="auto|none|LABELS",
        help="CYCLE line: auto-search (default), none, or an explicit "
        "comma-separated taxon ordering",
    )
    p.add_argument("-o", "--output", metavar="FILE", help="write to FILE")
    p.set_defaults(func=cmd_export_nexus)

    p = sub.add_parser(
        "report",
        help="run the hidden-cycle recovery experiment, write TSV and figures",
    )
    p.add_argument(
        "-o",
        "--out",
        default="splitclosure-report",
        metavar="DIR",
        help="output directory (default: splitclosure-report)",
    )
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--taxa", type=int, default=7)
    p.add_argument("--tree-taxa", type=int, default=5)
    p.add_argument("--trees", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _DOMAIN_ERRORS as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


def entry_point():
    sys.exit(main())
