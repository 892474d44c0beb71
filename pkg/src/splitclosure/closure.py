"""Saturation of split systems under the amalgamation rules.

closure() repeatedly fires the first rule application that actually
changes the system (under the chosen candidate ordering), merging the
outputs back in and dropping splits that became redundant, until no
application changes anything.

In guarded mode a weak compatibility check runs on the input and after
every step; the first violation aborts the run with the special
"inconsistent" outcome carrying a witness instead of a system.  Guarded
runs of the triple rule reach the same closure under any candidate
ordering, which the random order policy exists to exercise.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .compat import WcWitness, wc_triple_witness, wc_violation, wc_witness
from .core import SplitSystem, eight_intersections, extends_pair
from .rules import (
    Orientation,
    RuleApplication,
    Y_TABLE,
    apply_m,
    apply_y,
    apply_z,
    m_condition,
    m_output_pairs,
    y_output_pairs,
    z_condition,
    z_output_pairs,
)


class ClosureStepLimitError(RuntimeError):
    """The run fired more rule applications than the configured cap."""


_RULES = ("M", "Y", "MY", "Z")
_DEFAULT_GUARD = {"M": False, "Y": True, "MY": True, "Z": False}


@dataclass(frozen=True)
class RuleSelector:
    """Which rules a closure run may fire, and whether it is guarded."""

    rule: str
    guarded: bool = False

    def __post_init__(self):
        if self.rule not in _RULES:
            raise ValueError("unknown rule %r; expected one of %s" % (self.rule, ", ".join(_RULES)))
        if self.rule == "Z" and self.guarded:
            raise ValueError(
                "the Z rule does not support guarded runs: its outputs "
                "do not extend its inputs, so the order independence "
                "that makes the guard meaningful is lost"
            )

    @classmethod
    def of(cls, name, guarded=None):
        rule = name.upper()
        if rule not in _RULES:
            raise ValueError("unknown rule %r; expected one of %s" % (name, ", ".join(_RULES)))
        if guarded is None:
            guarded = _DEFAULT_GUARD[rule]
        return cls(rule, guarded)

    @property
    def has_m(self):
        return "M" in self.rule and self.rule != "Z"

    @property
    def has_y(self):
        return "Y" in self.rule

    @property
    def has_z(self):
        return self.rule == "Z"


@dataclass(frozen=True)
class OrderPolicy:
    """Candidate ordering: deterministic canonical order or a seeded shuffle."""

    kind: str
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("canonical", "random"):
            raise ValueError("order policy kind must be 'canonical' or 'random'")

    @classmethod
    def canonical(cls):
        return cls("canonical")

    @classmethod
    def seeded(cls, seed):
        return cls("random", seed)


CANONICAL = OrderPolicy("canonical")


@dataclass(frozen=True)
class ClosureOutcome:
    """Result of a closure run.

    system is None exactly when a guarded run found a weak
    compatibility violation; witness then explains it.  steps counts
    fired applications; trace holds them when requested.
    """

    system: SplitSystem | None
    steps: int
    witness: WcWitness | None = None
    trace: tuple | None = None

    @property
    def is_omega(self):
        return self.system is None


def y_length_bound(system):
    """Upper bound on fired steps for pure triple-rule runs.

    Every firing strictly enlarges the total support of the system,
    which cannot exceed (number of splits) * (number of taxa).
    """
    n = len(system.universe)
    return len(system) * n - sum(len(s.support) for s in system)


class _Engine:
    """Candidate scanning state shared across the steps of one run.

    Memoization rests on the fact that the current system only ever
    grows in the extension preorder, so "this output is extended by
    some member" and "every orientation of these participants is
    trivial" stay true once observed.
    """

    def __init__(self, system, selector):
        self.selector = selector
        self.members = ()
        self.pairs = ()
        self.extended = set()
        self.exhausted = set()
        self.trivial_seen = set()
        self.rng = None
        self.refresh(system)

    def refresh(self, system):
        self.members = system.ordered()
        self.pairs = [s.pair for s in self.members]

    def is_extended(self, p):
        if p in self.extended:
            return True
        for q in self.pairs:
            if extends_pair(q, p):
                self.extended.add(p)
                return True
        return False

    # -- canonical order ------------------------------------------------

    def scan_canonical(self):
        sel = self.selector
        pairs = self.pairs
        n = len(pairs)
        if sel.has_z:
            for i in range(n):
                for j in range(n):
                    if i == j:
                        continue
                    key = ("Z", pairs[i], pairs[j])
                    if key in self.exhausted:
                        continue
                    app = self._try_z(i, j)
                    if app is not None:
                        return app
                    self.exhausted.add(key)
            return None
        for i in range(n):
            for j in range(i + 1, n):
                if sel.has_m:
                    key = ("M", pairs[i], pairs[j])
                    if key not in self.exhausted:
                        app = self._try_m(i, j)
                        if app is not None:
                            return app
                        self.exhausted.add(key)
                if sel.has_y:
                    for l in range(j + 1, n):
                        key = ("Y", pairs[i], pairs[j], pairs[l])
                        if key in self.exhausted:
                            continue
                        app = self._try_y(i, j, l)
                        if app is not None:
                            return app
                        self.exhausted.add(key)
        return None

    def _try_m(self, i, j):
        p1, p2 = self.pairs[i], self.pairs[j]
        for f2 in (0, 1):
            if not m_condition(p1, p2, 0, f2):
                continue
            d1, d2 = m_output_pairs(p1, p2, 0, f2)
            if self.is_extended(d1) and self.is_extended(d2):
                continue
            return apply_m(
                self.members[i], self.members[j], Orientation((0, 1), (0, f2))
            )
        return None

    def _try_y(self, i, j, l):
        triple = (self.pairs[i], self.pairs[j], self.pairs[l])
        inter = eight_intersections(*triple)
        for roles, flips, (t1, t2, t3, t4) in Y_TABLE:
            if not (inter[t1] and inter[t2] and inter[t3]) or inter[t4]:
                continue
            outs = y_output_pairs(triple, roles, flips)
            if all(self.is_extended(o) for o in outs):
                continue
            return apply_y(
                self.members[i],
                self.members[j],
                self.members[l],
                Orientation(roles, flips),
            )
        return None

    def _try_z(self, i, j):
        p1, p2 = self.pairs[i], self.pairs[j]
        for f1 in (0, 1):
            for f2 in (0, 1):
                if not z_condition(p1, p2, f1, f2):
                    continue
                outs = z_output_pairs(p1, p2, f1, f2)
                if all(self.is_extended(o) for o in outs):
                    continue
                return apply_z(
                    self.members[i], self.members[j], Orientation((0, 1), (f1, f2))
                )
        return None

    # -- seeded random order --------------------------------------------

    def scan_random(self):
        sel = self.selector
        pairs = self.pairs
        n = len(pairs)
        cands = []
        if sel.has_z:
            for i in range(n):
                for j in range(n):
                    if i == j:
                        continue
                    p1, p2 = pairs[i], pairs[j]
                    for f1 in (0, 1):
                        for f2 in (0, 1):
                            if z_condition(p1, p2, f1, f2):
                                cands.append(("Z", (i, j), (0, 1), (f1, f2)))
        else:
            for i in range(n):
                for j in range(i + 1, n):
                    if sel.has_m:
                        for f2 in (0, 1):
                            if m_condition(pairs[i], pairs[j], 0, f2):
                                cands.append(("M", (i, j), (0, 1), (0, f2)))
                    if sel.has_y:
                        for l in range(j + 1, n):
                            inter = eight_intersections(
                                pairs[i], pairs[j], pairs[l]
                            )
                            for roles, flips, (t1, t2, t3, t4) in Y_TABLE:
                                if (
                                    inter[t1]
                                    and inter[t2]
                                    and inter[t3]
                                    and not inter[t4]
                                ):
                                    cands.append(("Y", (i, j, l), roles, flips))
        self.rng.shuffle(cands)
        for rule, idxs, roles, flips in cands:
            key = (rule, tuple(pairs[i] for i in idxs), roles, flips)
            if key in self.trivial_seen:
                continue
            if rule == "M":
                outs = m_output_pairs(pairs[idxs[0]], pairs[idxs[1]], 0, flips[1])
            elif rule == "Y":
                outs = y_output_pairs(
                    tuple(pairs[i] for i in idxs), roles, flips
                )
            else:
                outs = z_output_pairs(
                    pairs[idxs[0]], pairs[idxs[1]], flips[0], flips[1]
                )
            if all(self.is_extended(o) for o in outs):
                self.trivial_seen.add(key)
                continue
            splits = tuple(self.members[i] for i in idxs)
            orientation = Orientation(roles, flips)
            if rule == "M":
                return apply_m(splits[0], splits[1], orientation)
            if rule == "Y":
                return apply_y(splits[0], splits[1], splits[2], orientation)
            return apply_z(splits[0], splits[1], orientation)
        return None


def _incremental_witness(system, fresh):
    """First violating triple touching a freshly added split, or None.

    Triples made only of surviving older members were checked on the
    previous round, so this is equivalent to a full check of the new
    system.
    """
    members = system.ordered()
    pairs = [s.pair for s in members]
    is_new = [s in fresh for s in members]
    for i, j, k in itertools.combinations(range(len(members)), 3):
        if not (is_new[i] or is_new[j] or is_new[k]):
            continue
        if wc_violation(pairs[i], pairs[j], pairs[k]) is not None:
            return wc_triple_witness(members[i], members[j], members[k])
    return None


def closure(
    system,
    selector,
    policy=CANONICAL,
    want_trace=False,
    auto_reduce=True,
    step_cap=1_000_000,
):
    """Saturate the system under the selected rules.

    Args:
        system: the starting splits; reduced first unless already
            irreducible (set auto_reduce=False to make reducibility an
            error instead).
        selector: RuleSelector naming the rules and the guard setting.
        policy: candidate ordering, CANONICAL or OrderPolicy.seeded(n).
        want_trace: record every fired application on the outcome.
        step_cap: abort with ClosureStepLimitError beyond this many
            fired applications.

    Returns:
        ClosureOutcome; its system is None exactly when the guard
        found a weak compatibility violation, in which case witness
        explains the violating triple.
    """
    if not system.is_irreducible:
        if not auto_reduce:
            raise ValueError(
                "closure expects an irreducible system; reduce() it first "
                "or pass auto_reduce=True"
            )
        system = system.reduce()

    trace = [] if want_trace else None

    def outcome(result, steps, witness=None):
        return ClosureOutcome(
            system=result,
            steps=steps,
            witness=witness,
            trace=tuple(trace) if want_trace else None,
        )

    if selector.guarded:
        witness = wc_witness(system)
        if witness is not None:
            return outcome(None, 0, witness)

    engine = _Engine(system, selector)
    if policy.kind == "random":
        engine.rng = random.Random(policy.seed)
    scan = engine.scan_random if policy.kind == "random" else engine.scan_canonical

    y_cap = y_length_bound(system) if selector.rule == "Y" else None
    current = system
    steps = 0
    while True:
        app = scan()
        if app is None:
            return outcome(current, steps)
        steps += 1
        if steps > step_cap:
            raise ClosureStepLimitError(
                "closure exceeded %d fired applications" % step_cap
            )
        assert y_cap is None or steps <= y_cap
        new_system = current.merged(app.outputs).reduce()
        assert new_system != current
        if want_trace:
            trace.append(app)
        if selector.guarded:
            fresh = new_system.splits - current.splits
            witness = _incremental_witness(new_system, fresh)
            if witness is not None:
                return outcome(None, steps, witness)
        current = new_system
        engine.refresh(current)


def is_closed(system, selector):
    """Whether every valid application of the selected rules is trivial.

    Raises:
        ValueError: if the system is not irreducible (closedness is
            only defined on irreducible systems).
    """
    if not system.is_irreducible:
        raise ValueError("closedness is defined on irreducible systems")
    return _Engine(system, selector).scan_canonical() is None


@dataclass(frozen=True)
class ClosureOperatorReport:
    """Operator laws checked on a concrete pair of systems.

    The inconsistent outcome acts as an absorbing top element: every
    system precedes it, it precedes only itself, and its closure is
    itself.
    """

    extensive: bool
    monotone: bool
    idempotent: bool
    closure_small: ClosureOutcome
    closure_large: ClosureOutcome
    reclosure: ClosureOutcome | None

    @property
    def all_hold(self):
        return self.extensive and self.monotone and self.idempotent


def closure_operator_check(sigma, sigma_prime, selector, policy=CANONICAL):
    """Check extensivity, monotonicity and idempotence on a concrete pair.

    sigma must precede sigma_prime (after reduction); the closures of
    both are computed, plus the closure of the first closure.
    """
    sigma = sigma.reduce()
    sigma_prime = sigma_prime.reduce()
    if not sigma.preceq(sigma_prime):
        raise ValueError("the first system must precede the second")

    small = closure(sigma, selector, policy)
    large = closure(sigma_prime, selector, policy)

    extensive = small.is_omega or sigma.preceq(small.system)

    if large.is_omega:
        monotone = True
    elif small.is_omega:
        monotone = False
    else:
        monotone = small.system.preceq(large.system)

    if small.is_omega:
        idempotent = True
        reclosure = None
    else:
        reclosure = closure(small.system, selector, policy)
        idempotent = (
            not reclosure.is_omega and reclosure.system == small.system
        )

    return ClosureOperatorReport(
        extensive=extensive,
        monotone=monotone,
        idempotent=idempotent,
        closure_small=small,
        closure_large=large,
        reclosure=reclosure,
    )
