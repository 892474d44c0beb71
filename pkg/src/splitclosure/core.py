"""Taxon universes, taxon sets, partial splits and split systems.

A partial split is an unordered bipartition A|B of a subset of a fixed
taxon universe X; it is full when A and B together cover X.  Everything
downstream (rule application, compatibility checks, closure computation)
is built on the small algebra defined here: extension between splits,
reduction of a collection to its maximal members, and the resulting
partial order on irreducible split systems.

Taxon sets are stored as integer bitmasks, so all the set algebra is a
few machine operations per call.
"""

from __future__ import annotations

from typing import Iterable, Iterator

RESERVED_LABEL_CHARS = frozenset("|(),;:#")

DEFAULT_MAX_UNIVERSE = 64


class UniverseMismatchError(ValueError):
    """Two objects over different taxon universes were combined."""


def _validate_label(label):
    if not isinstance(label, str):
        raise TypeError("taxon labels must be strings, got %r" % (label,))
    if not label:
        raise ValueError("taxon labels must be nonempty")
    for ch in label:
        if ch in RESERVED_LABEL_CHARS or ch.isspace():
            raise ValueError(
                "taxon label %r contains reserved character %r" % (label, ch)
            )


class TaxonUniverse:
    """An ordered collection of distinct taxon labels.

    All sets, splits and split systems refer back to one universe and
    handle taxa internally as indices into it.
    """

    __slots__ = ("_labels", "_index", "_hash", "_full_mask")

    def __init__(self, labels, max_size=DEFAULT_MAX_UNIVERSE):
        labels = tuple(labels)
        if not labels:
            raise ValueError("a taxon universe needs at least one label")
        if len(labels) > max_size:
            raise ValueError(
                "universe has %d labels, cap is %d" % (len(labels), max_size)
            )
        index = {}
        for i, label in enumerate(labels):
            _validate_label(label)
            if label in index:
                raise ValueError("duplicate taxon label %r" % (label,))
            index[label] = i
        object.__setattr__(self, "_labels", labels)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_hash", hash(labels))
        object.__setattr__(self, "_full_mask", (1 << len(labels)) - 1)

    def __setattr__(self, name, value):
        raise AttributeError("TaxonUniverse is immutable")

    @property
    def labels(self):
        return self._labels

    def __len__(self):
        return len(self._labels)

    def __iter__(self) -> Iterator[str]:
        return iter(self._labels)

    def __contains__(self, label):
        return label in self._index

    def index_of(self, label):
        """Index of a label, raising KeyError for unknown labels."""
        try:
            return self._index[label]
        except KeyError:
            raise KeyError("unknown taxon label %r" % (label,)) from None

    def label_of(self, index):
        return self._labels[index]

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, TaxonUniverse):
            return NotImplemented
        return self._labels == other._labels

    def __hash__(self):
        return self._hash

    def __repr__(self):
        if len(self._labels) <= 8:
            return "TaxonUniverse(%s)" % (", ".join(self._labels))
        return "TaxonUniverse(%d taxa)" % len(self._labels)

    # -- set constructors ---------------------------------------------

    def empty_set(self):
        return TaxonSet(self, 0)

    def full_set(self):
        return TaxonSet(self, self._full_mask)

    def set_of(self, labels: Iterable[str]) -> "TaxonSet":
        mask = 0
        for label in labels:
            mask |= 1 << self.index_of(label)
        return TaxonSet(self, mask)

    def set_of_indices(self, indices: Iterable[int]) -> "TaxonSet":
        mask = 0
        for i in indices:
            if not 0 <= i < len(self._labels):
                raise IndexError("taxon index %d out of range" % i)
            mask |= 1 << i
        return TaxonSet(self, mask)


def _same_universe(a, b):
    if a.universe is not b.universe and a.universe != b.universe:
        raise UniverseMismatchError(
            "operands belong to different taxon universes"
        )


class TaxonSet:
    """An immutable subset of a taxon universe, stored as a bitmask."""

    __slots__ = ("universe", "mask")

    def __init__(self, universe, mask):
        if mask & ~universe._full_mask:
            raise ValueError("mask has bits outside the universe")
        object.__setattr__(self, "universe", universe)
        object.__setattr__(self, "mask", mask)

    def __setattr__(self, name, value):
        raise AttributeError("TaxonSet is immutable")

    def __len__(self):
        return self.mask.bit_count()

    def __bool__(self):
        return self.mask != 0

    def __contains__(self, label):
        return bool(self.mask >> self.universe.index_of(label) & 1)

    def indices(self) -> Iterator[int]:
        mask = self.mask
        while mask:
            low = mask & -mask
            yield low.bit_length() - 1
            mask ^= low

    def labels(self):
        return tuple(self.universe.label_of(i) for i in self.indices())

    def __iter__(self) -> Iterator[str]:
        return iter(self.labels())

    def __and__(self, other):
        _same_universe(self, other)
        return TaxonSet(self.universe, self.mask & other.mask)

    def __or__(self, other):
        _same_universe(self, other)
        return TaxonSet(self.universe, self.mask | other.mask)

    def __sub__(self, other):
        _same_universe(self, other)
        return TaxonSet(self.universe, self.mask & ~other.mask)

    def __le__(self, other):
        _same_universe(self, other)
        return self.mask & ~other.mask == 0

    def issubset(self, other):
        return self <= other

    def isdisjoint(self, other):
        _same_universe(self, other)
        return self.mask & other.mask == 0

    def complement(self):
        """All universe taxa not in this set."""
        return TaxonSet(self.universe, self.universe._full_mask & ~self.mask)

    def __eq__(self, other):
        if not isinstance(other, TaxonSet):
            return NotImplemented
        return self.mask == other.mask and self.universe == other.universe

    def __hash__(self):
        return hash((self.universe._hash, self.mask))

    def __repr__(self):
        return "{%s}" % ",".join(self.labels())


# ---------------------------------------------------------------------
# Mask-pair primitives.  The hot paths (rule scans, closure loops) work
# on canonical (sideA, sideB) integer pairs and only materialize
# PartialSplit objects at API boundaries.
# ---------------------------------------------------------------------


def canon_pair(a, b):
    """Order a disjoint mask pair so the side holding the lowest support bit comes first."""
    support = a | b
    if a & (support & -support):
        return (a, b)
    return (b, a)


def extends_pair(s, t):
    """Whether mask pair s extends mask pair t (each part of t inside a distinct part of s)."""
    sa, sb = s
    ta, tb = t
    if ta & ~sa == 0 and tb & ~sb == 0:
        return True
    return ta & ~sb == 0 and tb & ~sa == 0


def reduce_pairs(pairs):
    """Maximal members of a collection of canonical mask pairs, deduplicated, sorted."""
    pool = sorted(set(pairs))
    keep = []
    for s in pool:
        extended = False
        for t in pool:
            if t != s and extends_pair(t, s):
                extended = True
                break
        if not extended:
            keep.append(s)
    return keep


def preceq_pairs(smaller, larger):
    for s in smaller:
        for t in larger:
            if extends_pair(t, s):
                break
        else:
            return False
    return True


def eight_intersections(p1, p2, p3):
    """The eight triple intersections of three mask pairs.

    Entry index is e1*4 + e2*2 + e3 where e_i selects side A (0) or
    side B (1) of the i-th pair.
    """
    a1, b1 = p1
    a2, b2 = p2
    a3, b3 = p3
    x00 = a1 & a2
    x01 = a1 & b2
    x10 = b1 & a2
    x11 = b1 & b2
    return (
        x00 & a3, x00 & b3,
        x01 & a3, x01 & b3,
        x10 & a3, x10 & b3,
        x11 & a3, x11 & b3,
    )


# ---------------------------------------------------------------------
# Partial splits
# ---------------------------------------------------------------------


class PartialSplit:
    """An unordered bipartition A|B of a subset of the universe.

    Both sides are nonempty and disjoint.  The split is stored
    canonically: the side containing the smallest support index is
    sideA, so A|B and B|A compare and hash equal.
    """

    __slots__ = ("universe", "a_mask", "b_mask", "_hash")

    def __init__(self, side_a, side_b):
        _same_universe(side_a, side_b)
        universe = side_a.universe
        a, b = side_a.mask, side_b.mask
        if not a or not b:
            raise ValueError("both sides of a split must be nonempty")
        if a & b:
            raise ValueError("the sides of a split must be disjoint")
        a, b = canon_pair(a, b)
        object.__setattr__(self, "universe", universe)
        object.__setattr__(self, "a_mask", a)
        object.__setattr__(self, "b_mask", b)
        object.__setattr__(self, "_hash", hash((universe._hash, a, b)))

    def __setattr__(self, name, value):
        raise AttributeError("PartialSplit is immutable")

    @classmethod
    def from_masks(cls, universe, a, b):
        split = cls.__new__(cls)
        if not a or not b or a & b or (a | b) & ~universe._full_mask:
            raise ValueError("invalid split masks")
        a, b = canon_pair(a, b)
        object.__setattr__(split, "universe", universe)
        object.__setattr__(split, "a_mask", a)
        object.__setattr__(split, "b_mask", b)
        object.__setattr__(split, "_hash", hash((universe._hash, a, b)))
        return split

    @classmethod
    def from_labels(cls, universe, side_a, side_b):
        return cls(universe.set_of(side_a), universe.set_of(side_b))

    @property
    def side_a(self):
        return TaxonSet(self.universe, self.a_mask)

    @property
    def side_b(self):
        return TaxonSet(self.universe, self.b_mask)

    @property
    def support(self):
        return TaxonSet(self.universe, self.a_mask | self.b_mask)

    @property
    def pair(self):
        return (self.a_mask, self.b_mask)

    @property
    def is_full(self):
        return self.a_mask | self.b_mask == self.universe._full_mask

    @property
    def is_trivial(self):
        """Whether one side is a single taxon."""
        return (
            self.a_mask.bit_count() == 1 or self.b_mask.bit_count() == 1
        )

    def extends(self, other):
        """Whether each part of ``other`` lies inside a distinct part of this split.

        Extension is reflexive: every split extends itself.
        """
        _same_universe(self, other)
        return extends_pair(self.pair, other.pair)

    def strictly_extends(self, other):
        return self != other and self.extends(other)

    def compatible_with(self, other):
        """Whether some part of this split is disjoint from some part of the other."""
        _same_universe(self, other)
        a1, b1 = self.pair
        a2, b2 = other.pair
        return not (a1 & a2) or not (a1 & b2) or not (b1 & a2) or not (b1 & b2)

    def restrict(self, keep):
        """The split induced on a taxon subset, or None if a side empties out."""
        _same_universe(self, keep)
        a = self.a_mask & keep.mask
        b = self.b_mask & keep.mask
        if not a or not b:
            return None
        return PartialSplit.from_masks(self.universe, a, b)

    def __eq__(self, other):
        if not isinstance(other, PartialSplit):
            return NotImplemented
        return (
            self.a_mask == other.a_mask
            and self.b_mask == other.b_mask
            and self.universe == other.universe
        )

    def __hash__(self):
        return self._hash

    def __str__(self):
        return "%s|%s" % (
            ",".join(self.side_a.labels()),
            ",".join(self.side_b.labels()),
        )

    def __repr__(self):
        return "PartialSplit(%s)" % self

    def sort_key(self):
        return (self.a_mask, self.b_mask)


def extends(s, t):
    """Module-level alias: does split s extend split t."""
    return s.extends(t)


def pairwise_compatible(s, t):
    """Module-level alias: are two splits compatible."""
    return s.compatible_with(t)


# ---------------------------------------------------------------------
# Split systems
# ---------------------------------------------------------------------


class SplitSystem:
    """A duplicate-free collection of partial splits over one universe."""

    __slots__ = ("universe", "splits", "_irreducible")

    def __init__(self, universe, splits=(), irreducible=None):
        splits = frozenset(splits)
        for s in splits:
            if s.universe is not universe and s.universe != universe:
                raise UniverseMismatchError(
                    "split %s does not belong to the system's universe" % s
                )
        object.__setattr__(self, "universe", universe)
        object.__setattr__(self, "splits", splits)
        object.__setattr__(self, "_irreducible", irreducible)

    def __setattr__(self, name, value):
        raise AttributeError("SplitSystem is immutable")

    @classmethod
    def from_pairs(cls, universe, pairs, irreducible=None):
        splits = [PartialSplit.from_masks(universe, a, b) for a, b in pairs]
        return cls(universe, splits, irreducible=irreducible)

    def pairs(self):
        return [s.pair for s in self.ordered()]

    def ordered(self):
        """The splits in canonical (mask pair) order."""
        return sorted(self.splits, key=PartialSplit.sort_key)

    def __len__(self):
        return len(self.splits)

    def __iter__(self) -> Iterator[PartialSplit]:
        return iter(self.ordered())

    def __contains__(self, split):
        return split in self.splits

    def __eq__(self, other):
        if not isinstance(other, SplitSystem):
            return NotImplemented
        return self.universe == other.universe and self.splits == other.splits

    def __hash__(self):
        return hash((self.universe._hash, self.splits))

    def __repr__(self):
        return "SplitSystem(%d taxa, %d splits)" % (
            len(self.universe),
            len(self.splits),
        )

    @property
    def is_irreducible(self):
        cached = self._irreducible
        if cached is None:
            cached = len(reduce_pairs([s.pair for s in self.splits])) == len(
                self.splits
            )
            object.__setattr__(self, "_irreducible", cached)
        return cached

    def reduce(self):
        """Drop every split strictly extended by another member.

        The result is irreducible; reducing an irreducible system
        returns an equal system.
        """
        kept = reduce_pairs([s.pair for s in self.splits])
        if len(kept) == len(self.splits):
            object.__setattr__(self, "_irreducible", True)
            return self
        return SplitSystem.from_pairs(self.universe, kept, irreducible=True)

    def preceq(self, other):
        """Whether every member here is extended by some member of ``other``."""
        if self.universe != other.universe:
            raise UniverseMismatchError("systems over different universes")
        other_pairs = [s.pair for s in other.splits]
        return preceq_pairs([s.pair for s in self.splits], other_pairs)

    def merged(self, extra):
        """A new system holding this system's splits plus ``extra``."""
        return SplitSystem(self.universe, list(self.splits) + list(extra))

    def restrict(self, keep):
        """Induced system on a taxon subset: sides intersected, emptied splits dropped, reduced."""
        restricted = []
        for s in self.splits:
            r = s.restrict(keep)
            if r is not None:
                restricted.append(r)
        return SplitSystem(self.universe, restricted).reduce()

    def full_splits(self):
        return [s for s in self.ordered() if s.is_full]

    def partial_only(self):
        return [s for s in self.ordered() if not s.is_full]

    def is_pairwise_compatible(self):
        members = self.ordered()
        for i, s in enumerate(members):
            for t in members[i + 1 :]:
                if not s.compatible_with(t):
                    return False
        return True


def reduce_system(system):
    """Module-level alias for SplitSystem.reduce."""
    return system.reduce()


def preceq(smaller, larger):
    """Module-level alias for SplitSystem.preceq."""
    return smaller.preceq(larger)
