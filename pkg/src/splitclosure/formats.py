"""Plain-text split files, Nexus export, and closure trace serialization.

The native splits file is line oriented:

    # optional comments
    taxa 1 2 3 4 5
    1 2 | 3 4
    1 5 | 2 4

The first content line declares the universe; every following line is
one partial split with whitespace-separated labels and a single pipe.

The Nexus export writes a TAXA block plus a SPLITS block understood by
circular network viewers; only full splits can be represented there,
partial ones are reported back to the caller as skipped.
"""

from __future__ import annotations

from .core import PartialSplit, SplitSystem, TaxonUniverse


class SplitsFormatError(ValueError):
    """A malformed splits file, with 1-based line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)


class NoFullSplitsError(ValueError):
    """Nexus export was asked for a system with no full splits."""


def read_splits_file(text):
    """Parse the native splits format into a SplitSystem."""
    universe = None
    splits = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].strip()
        if not content:
            continue
        if universe is None:
            fields = content.split()
            if fields[0] != "taxa" or len(fields) < 2:
                raise SplitsFormatError(
                    "expected a 'taxa <name>...' header line", lineno
                )
            try:
                universe = TaxonUniverse(fields[1:])
            except ValueError as exc:
                raise SplitsFormatError(str(exc), lineno) from exc
            continue
        if content.count("|") != 1:
            raise SplitsFormatError(
                "each split line needs exactly one '|'", lineno
            )
        left, right = content.split("|")
        side_a = left.split()
        side_b = right.split()
        if not side_a or not side_b:
            raise SplitsFormatError("both sides must be nonempty", lineno)
        seen = set()
        for label in side_a + side_b:
            if label not in universe:
                raise SplitsFormatError(
                    "label %r is not declared in the taxa header" % label,
                    lineno,
                )
            if label in seen:
                raise SplitsFormatError(
                    "label %r appears twice in one split" % label, lineno
                )
            seen.add(label)
        splits.append(PartialSplit.from_labels(universe, side_a, side_b))
    if universe is None:
        raise SplitsFormatError("no 'taxa' header found")
    return SplitSystem(universe, splits)


def write_splits_file(system):
    """Serialize a SplitSystem in the native splits format."""
    universe = system.universe
    lines = ["taxa " + " ".join(universe.labels)]
    for s in system.ordered():
        lines.append(
            " ".join(s.side_a.labels()) + " | " + " ".join(s.side_b.labels())
        )
    return "\n".join(lines) + "\n"


def write_nexus_splits(system, cycle=None):
    """Render the full splits of the system as a Nexus SPLITS block.

    Returns (text, skipped) where skipped lists the partial splits that
    cannot appear in the matrix, in canonical order.  When a cycle is
    given, a CYCLE line with 1-based taxon indices is included.

    Raises:
        NoFullSplitsError: when the system has no full split at all.
    """
    universe = system.universe
    full = system.full_splits()
    skipped = system.partial_only()
    if not full:
        raise NoFullSplitsError(
            "the system has no full splits; nothing to export"
        )
    n = len(universe)
    lines = [
        "#NEXUS",
        "BEGIN TAXA;",
        "DIMENSIONS ntax=%d;" % n,
        "TAXLABELS %s;" % " ".join(universe.labels),
        "END;",
        "BEGIN SPLITS;",
        "DIMENSIONS ntax=%d nsplits=%d;" % (n, len(full)),
    ]
    if cycle is not None:
        if cycle.universe != universe:
            raise ValueError("cycle is over a different universe")
        lines.append(
            "CYCLE %s;" % " ".join(str(i + 1) for i in cycle.order)
        )
    lines.append("MATRIX")
    for sid, s in enumerate(full, start=1):
        # The canonical sideA of a full split contains the first taxon.
        idx = " ".join(str(i + 1) for i in s.side_a.indices())
        lines.append("%d 1.0 %s," % (sid, idx))
    lines.append(";")
    lines.append("END;")
    return "\n".join(lines) + "\n", skipped


def format_application(app, step):
    """One trace line for a fired rule application.

    Inputs are listed in role order, so the orientation reduces to the
    flip bits: bit k is 1 when the stored sideB of the k-th listed
    input plays the A role.
    """
    inputs = ";".join(str(s) for s in app.inputs_in_role_order())
    outputs = ";".join(str(s) for s in sorted(app.outputs, key=PartialSplit.sort_key))
    return "step=%d rule=%s inputs=%s orientation=%s outputs=%s" % (
        step,
        app.rule,
        inputs,
        app.orientation.bits(),
        outputs,
    )


def write_trace(trace):
    """Serialize a sequence of rule applications, one line per step."""
    lines = [format_application(app, i) for i, app in enumerate(trace, start=1)]
    return "\n".join(lines) + ("\n" if lines else "")
