"""Shared fixtures, generators and independent oracles for the test suite."""

from __future__ import annotations

import itertools

import pytest
from hypothesis import strategies as st

from splitclosure import (
    CyclicOrdering,
    PartialSplit,
    SplitSystem,
    TaxonUniverse,
)


# ---------------------------------------------------------------------
# Small constructors.  Taxa are single-character labels so that splits
# can be written compactly as "12|34".
# ---------------------------------------------------------------------


def mk_universe(n_or_labels):
    if isinstance(n_or_labels, int):
        return TaxonUniverse([str(i + 1) for i in range(n_or_labels)])
    return TaxonUniverse(list(n_or_labels))


def mk_split(universe, text):
    a, b = text.split("|")
    return PartialSplit.from_labels(universe, list(a), list(b))


def mk_system(universe, texts):
    if isinstance(texts, str):
        texts = texts.split()
    return SplitSystem(universe, [mk_split(universe, t) for t in texts])


@pytest.fixture
def u5():
    return mk_universe(5)


@pytest.fixture
def u6():
    return mk_universe(6)


@pytest.fixture
def u7():
    return mk_universe(7)


# ---------------------------------------------------------------------
# Random generators
# ---------------------------------------------------------------------


def rnd_split(rng, universe):
    """A uniform-ish random partial split with both sides nonempty."""
    n = len(universe)
    while True:
        a = b = 0
        for t in range(n):
            r = rng.random()
            if r < 0.35:
                a |= 1 << t
            elif r < 0.7:
                b |= 1 << t
        if a and b:
            return PartialSplit.from_masks(universe, a, b)


def rnd_system(rng, universe, k):
    return SplitSystem(
        universe, {rnd_split(rng, universe) for _ in range(k)}
    ).reduce()


def rnd_cycle(rng, universe):
    order = list(range(len(universe)))
    rng.shuffle(order)
    return CyclicOrdering(universe, order)


def rnd_arc_split(rng, universe, cycle, partial=True):
    """A random split displayed by the cycle: one contiguous arc versus
    the rest, optionally with taxa deleted from both sides."""
    n = len(universe)
    order = cycle.order
    length = rng.randint(1, n - 1)
    start = rng.randrange(n)
    arc = {order[(start + i) % n] for i in range(length)}
    rest = set(range(n)) - arc
    if partial:
        arc = {t for t in arc if rng.random() > 0.25}
        rest = {t for t in rest if rng.random() > 0.25}
        if not arc or not rest:
            return None
    a = sum(1 << t for t in arc)
    b = sum(1 << t for t in rest)
    return PartialSplit.from_masks(universe, a, b)


def rnd_circular_system(rng, n_lo=5, n_hi=8, k_lo=4, k_hi=7):
    """(system, cycle) with every member displayed by the cycle."""
    universe = mk_universe(rng.randint(n_lo, n_hi))
    cycle = rnd_cycle(rng, universe)
    wanted = rng.randint(k_lo, k_hi)
    splits = set()
    for _ in range(200):
        if len(splits) >= wanted:
            break
        s = rnd_arc_split(rng, universe, cycle)
        if s is not None:
            splits.add(s)
    return SplitSystem(universe, splits).reduce(), cycle


def rnd_tree_newick(rng, labels):
    """A random rooted Newick string over the given leaf labels."""
    frags = [str(l) for l in labels]
    rng.shuffle(frags)
    while len(frags) > 1:
        k = len(frags)
        take = min(k, 2 if rng.random() < 0.8 else 3)
        picked = [frags.pop(rng.randrange(len(frags))) for _ in range(take)]
        frags.append("(%s)" % ",".join(picked))
    return frags[0] + ";"


# ---------------------------------------------------------------------
# Hypothesis strategies.  A split is drawn by assigning each taxon to
# sideA, sideB or neither, discarding assignments that empty a side.
# ---------------------------------------------------------------------


def st_split(universe):
    n = len(universe)

    def build(assignment):
        a = b = 0
        for t, which in enumerate(assignment):
            if which == 1:
                a |= 1 << t
            elif which == 2:
                b |= 1 << t
        return (a, b)

    return (
        st.lists(st.integers(0, 2), min_size=n, max_size=n)
        .map(build)
        .filter(lambda p: p[0] and p[1])
        .map(lambda p: PartialSplit.from_masks(universe, p[0], p[1]))
    )


def st_system(universe, max_size=8):
    return st.frozensets(st_split(universe), max_size=max_size).map(
        lambda ss: SplitSystem(universe, ss)
    )


# ---------------------------------------------------------------------
# Independent oracles
# ---------------------------------------------------------------------


def _arc_positions_contiguous(positions, total):
    """Whether a set of positions is a contiguous arc on a cycle of the
    given circumference."""
    k = len(positions)
    if k in (0, total):
        return True
    marks = sorted(positions)
    gaps = 0
    for i, p in enumerate(marks):
        nxt = marks[(i + 1) % k]
        if (nxt - p) % total != 1:
            gaps += 1
    return gaps <= 1


def oracle_is_displayed(split, order):
    """Display test via arc contiguity, independent from the library's
    transition counting."""
    support = [t for t in order if (split.pair[0] | split.pair[1]) >> t & 1]
    pos_of = {t: i for i, t in enumerate(support)}
    a_positions = {pos_of[t] for t in support if split.pair[0] >> t & 1}
    return _arc_positions_contiguous(a_positions, len(support))


def brute_force_cycle(system):
    """First (lexicographically, starting at taxon 0) ordering that
    displays every split, by exhaustive enumeration; None otherwise."""
    n = len(system.universe)
    members = list(system)
    for tail in itertools.permutations(range(1, n)):
        order = (0,) + tail
        if all(oracle_is_displayed(s, order) for s in members):
            return order
    return None


def oracle_tree_splits(tree, include_trivial=True):
    """Edge-deletion splits via explicit component search."""
    pairs = set()
    support = tree.leaf_taxa().mask
    for u, v in tree.edges():
        seen = {u}
        stack = [u]
        while stack:
            x = stack.pop()
            for y in tree.adj[x]:
                if (x, y) in ((u, v), (v, u)) or y in seen:
                    continue
                seen.add(y)
                stack.append(y)
        a = 0
        for node, taxon in tree.leaf_taxon.items():
            if node in seen:
                a |= 1 << taxon
        b = support & ~a
        if not a or not b:
            continue
        if not include_trivial and 1 in (a.bit_count(), b.bit_count()):
            continue
        pairs.add((a, b) if (a & -a) < (b & -b) else (b, a))
    return pairs
