"""Weak compatibility of split triples and circular orderings.

A triple of splits, each oriented by choosing a side A_k, violates weak
compatibility when all four of

    A1 & A2 & A3,  A1 & B2 & B3,  B1 & A2 & B3,  B1 & B2 & A3

are nonempty.  A triple is weakly compatible when no orientation
violates it.  Flipping the sides of a single split swaps the quad above
with its complement-parity counterpart, so only two orientations need
checking: the stored sides as they are, and the stored sides with the
first split swapped.

A split system is weakly compatible when every triple of its members
is.  Systems displayed by a common circular ordering of the taxa are
always weakly compatible; the converse fails.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .core import (
    PartialSplit,
    SplitSystem,
    TaxonSet,
    TaxonUniverse,
    UniverseMismatchError,
    eight_intersections,
)


class CycleSearchInfeasibleError(RuntimeError):
    """The universe is too large for exhaustive cycle search."""


# Quad indices into the eight pairwise-side overlaps, for the identity
# orientation and for the orientation with split 1's sides swapped.
# Index layout: bit k of an index is 1 when split k+1 contributes its
# stored sideB.
_EVEN_QUAD = (0, 3, 5, 6)
_ODD_QUAD = (4, 7, 1, 2)

_EVEN_FLIPS = (0, 0, 0)
_ODD_FLIPS = (1, 0, 0)


def wc_violation(p1, p2, p3):
    """Mask-level weak compatibility test on three canonical pairs.

    Returns None when the triple is weakly compatible, otherwise a pair
    (flips, overlap_masks) exhibiting an orientation whose four
    characteristic overlaps are all nonempty.
    """
    inter = eight_intersections(p1, p2, p3)
    quad = tuple(inter[i] for i in _EVEN_QUAD)
    if all(quad):
        return _EVEN_FLIPS, quad
    quad = tuple(inter[i] for i in _ODD_QUAD)
    if all(quad):
        return _ODD_FLIPS, quad
    return None


@dataclass(frozen=True)
class WcWitness:
    """A concrete orientation showing a triple is not weakly compatible.

    intersections holds the four taxon sets A1&A2&A3, A1&B2&B3,
    B1&A2&B3 and B1&B2&A3 for the sides selected by flips; all four are
    nonempty.
    """

    splits: tuple
    flips: tuple
    intersections: tuple

    def describe(self):
        parts = []
        for ts in self.intersections:
            parts.append("{%s}" % ",".join(ts.labels()))
        spl = "; ".join(str(s) for s in self.splits)
        bits = "".join(str(f) for f in self.flips)
        return (
            "triple %s with side choice %s has nonempty overlaps %s"
            % (spl, bits, ", ".join(parts))
        )


def _common_universe(splits):
    universe = splits[0].universe
    for s in splits[1:]:
        if s.universe != universe:
            raise UniverseMismatchError("splits over different universes")
    return universe


def wc_triple_witness(s1, s2, s3):
    """A WcWitness for the triple, or None when it is weakly compatible."""
    universe = _common_universe((s1, s2, s3))
    hit = wc_violation(s1.pair, s2.pair, s3.pair)
    if hit is None:
        return None
    flips, masks = hit
    return WcWitness(
        splits=(s1, s2, s3),
        flips=flips,
        intersections=tuple(TaxonSet(universe, m) for m in masks),
    )


def weakly_compatible_triple(s1, s2, s3):
    _common_universe((s1, s2, s3))
    return wc_violation(s1.pair, s2.pair, s3.pair) is None


def wc_witness(system):
    """First violating triple of the system in canonical order, or None."""
    members = system.ordered()
    pairs = [s.pair for s in members]
    for i, j, k in itertools.combinations(range(len(members)), 3):
        hit = wc_violation(pairs[i], pairs[j], pairs[k])
        if hit is not None:
            return wc_triple_witness(members[i], members[j], members[k])
    return None


def weakly_compatible(system):
    """Whether every triple of members is weakly compatible."""
    return wc_witness(system) is None


# ---------------------------------------------------------------------
# Circular orderings
# ---------------------------------------------------------------------


class CyclicOrdering:
    """A circular arrangement of all taxa of a universe.

    Two orderings compare equal when one is a rotation or reflection of
    the other; canonical() returns the representative that starts at
    the first taxon and continues toward its smaller neighbour.
    """

    __slots__ = ("universe", "order", "_canon")

    def __init__(self, universe, order):
        order = tuple(order)
        n = len(universe)
        if n < 3:
            raise ValueError("a circular ordering needs at least three taxa")
        if sorted(order) != list(range(n)):
            raise ValueError("order must list every taxon index exactly once")
        k = order.index(0)
        canon = order[k:] + order[:k]
        if canon[1] > canon[-1]:
            canon = (canon[0],) + tuple(reversed(canon[1:]))
        object.__setattr__(self, "universe", universe)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "_canon", canon)

    def __setattr__(self, name, value):
        raise AttributeError("CyclicOrdering is immutable")

    @classmethod
    def from_labels(cls, universe, labels):
        return cls(universe, [universe.index_of(l) for l in labels])

    def labels(self):
        return tuple(self.universe.label_of(i) for i in self.order)

    def canonical(self):
        if self.order == self._canon:
            return self
        return CyclicOrdering(self.universe, self._canon)

    def __len__(self):
        return len(self.order)

    def __eq__(self, other):
        if not isinstance(other, CyclicOrdering):
            return NotImplemented
        return self.universe == other.universe and self._canon == other._canon

    def __hash__(self):
        return hash((self.universe, self._canon))

    def __str__(self):
        return "(" + ",".join(self.labels()) + ")"

    def __repr__(self):
        return "CyclicOrdering(%s)" % ",".join(self.labels())


def split_transitions(pair, order):
    """Side changes met walking the cycle restricted to the support."""
    a, b = pair
    sides = []
    for t in order:
        bit = 1 << t
        if a & bit:
            sides.append(0)
        elif b & bit:
            sides.append(1)
    if not sides:
        return 0
    trans = 0
    prev = sides[-1]
    for s in sides:
        if s != prev:
            trans += 1
        prev = s
    return trans


def is_displayed(split, ordering):
    """Whether the support taxa of each side sit on contiguous arcs."""
    if split.universe != ordering.universe:
        raise UniverseMismatchError("split and ordering over different universes")
    return split_transitions(split.pair, ordering.order) <= 2


def displays(system, ordering):
    """Whether the ordering displays every split of the system."""
    if system.universe != ordering.universe:
        raise UniverseMismatchError("system and ordering over different universes")
    return all(
        split_transitions(p, ordering.order) <= 2 for p in system.pairs()
    )


def find_cycle(system, max_n=10):
    """Search for a circular ordering displaying every split.

    Returns the lexicographically first such ordering (which is already
    canonical), or None when no ordering displays the whole system.

    The search is exhaustive with pruning, so it is limited to
    universes of at most max_n taxa; larger universes raise
    CycleSearchInfeasibleError.

    Raises:
        ValueError: on universes with fewer than three taxa.
    """
    universe = system.universe
    n = len(universe)
    if n < 3:
        raise ValueError("a circular ordering needs at least three taxa")
    if n > max_n:
        raise CycleSearchInfeasibleError(
            "exhaustive cycle search on %d taxa exceeds the limit of %d"
            % (n, max_n)
        )

    pairs = system.pairs()
    m = len(pairs)
    amask = [p[0] for p in pairs]
    support = [p[0] | p[1] for p in pairs]
    full = (1 << n) - 1

    # Per-split placement state: (placed support count, side of the
    # first placed support taxon, side of the last one, transitions so
    # far along the placed arc).
    states = [(0, 0, 0, 0)] * m
    for i in range(m):
        if support[i] & 1:
            side = 0 if amask[i] & 1 else 1
            states[i] = (1, side, side, 0)

    order = [0]
    placed = 1

    def admit(t):
        """State updates for appending taxon t, or None when pruned."""
        bit = 1 << t
        unplaced_after = full & ~(placed | bit)
        changes = []
        for i in range(m):
            if not support[i] & bit:
                continue
            cnt, first, last, trans = states[i]
            side = 0 if amask[i] & bit else 1
            if cnt == 0:
                changes.append((i, (1, side, side, 0)))
                continue
            ntrans = trans + (side != last)
            if ntrans > 2:
                return None
            if ntrans == 2 and trans == 1:
                # The arc now reads side/other/side; any support taxon
                # of the middle side placed later would force a third
                # transition, and so would the wrap-around.
                middle = support[i] & ~amask[i] if first == 0 else amask[i]
                if middle & unplaced_after:
                    return None
            changes.append((i, (cnt + 1, first, side, ntrans)))
        return changes

    def extend():
        nonlocal placed
        if len(order) == n:
            return True
        for t in range(1, n):
            bit = 1 << t
            if placed & bit:
                continue
            changes = admit(t)
            if changes is None:
                continue
            saved = [(i, states[i]) for i, _ in changes]
            for i, st in changes:
                states[i] = st
            order.append(t)
            placed |= bit
            if extend():
                return True
            placed &= ~bit
            order.pop()
            for i, st in saved:
                states[i] = st
        return False

    if extend():
        return CyclicOrdering(universe, order)
    return None
