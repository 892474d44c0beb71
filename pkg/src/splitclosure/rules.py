"""Amalgamation rules on partial splits.

Three rewrite rules combine overlapping partial splits into better
resolved ones.  Each rule needs an orientation: a choice, per
participating split, of which stored side plays the distinguished role
in the rule's precondition, plus (for the three-split rule) an
assignment of the participants to roles 1..3.

The pair rule (M) keeps its inputs and adds the two overlap splits

    (A1 & A2) | (B1 | B2)   and   (B1 & B2) | (A1 | A2)

whenever A1 & A2 and B1 & B2 are both nonempty.

The triple rule (Y) applies when A1&A2&A3, B1&B2&A3 and B1&A2&B3 are
nonempty while A1&B2&B3 is empty, and replaces the three inputs by

    B1 | (B2 & B3) vs A1,   A2 | (A1 & B3) vs B2,   A3 | (A1 & B2) vs B3,

each of which extends its input.

The one-sided pair rule (Z) applies when A1&A2, A2&B1 and B1&B2 are
nonempty while A1&B2 is empty, and yields

    (B1 | B2) | A1   and   B2 | (A1 | A2),

which need not extend the inputs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .core import (
    PartialSplit,
    canon_pair,
    eight_intersections,
    extends_pair,
)


class InvalidOrientationError(ValueError):
    """An orientation does not satisfy the rule's precondition."""


@dataclass(frozen=True)
class Orientation:
    """A role assignment and side choice for one rule application.

    roles[k] is the index, into the participant argument order, of the
    split playing role k+1.  flips[k] is 1 when that split's stored
    sideB plays the A side of its role.
    """

    roles: tuple[int, ...]
    flips: tuple[int, ...]

    def bits(self):
        return "".join(str(f) for f in self.flips)


@dataclass(frozen=True)
class RuleApplication:
    rule: str
    inputs: tuple[PartialSplit, ...]
    orientation: Orientation
    outputs: frozenset

    def inputs_in_role_order(self):
        return tuple(self.inputs[i] for i in self.orientation.roles)


# ---------------------------------------------------------------------
# Orientation tables
# ---------------------------------------------------------------------

# Precondition sign patterns for the triple rule, in role coordinates:
# the first three must be nonempty, the last empty.
_Y_PATTERNS = ((0, 0, 0), (1, 1, 0), (1, 0, 1), (0, 1, 1))


def _build_y_table():
    entries = []
    for roles in itertools.permutations((0, 1, 2)):
        for flips in itertools.product((0, 1), repeat=3):
            # Swapping roles 2 and 3 maps the precondition and the
            # output set to themselves, so keep one member per orbit.
            mirror = (
                (roles[0], roles[2], roles[1]),
                (flips[0], flips[2], flips[1]),
            )
            if (roles, flips) > mirror:
                continue
            idx = []
            for pattern in _Y_PATTERNS:
                bits = [0, 0, 0]
                for k in range(3):
                    bits[roles[k]] = flips[k] ^ pattern[k]
                idx.append(bits[0] * 4 + bits[1] * 2 + bits[2])
            entries.append((roles, flips, tuple(idx)))
    return tuple(entries)


Y_TABLE = _build_y_table()


# ---------------------------------------------------------------------
# Mask-level rule kernels, shared with the closure engine
# ---------------------------------------------------------------------


def m_condition(p1, p2, f1, f2):
    a1, b1 = (p1[1], p1[0]) if f1 else p1
    a2, b2 = (p2[1], p2[0]) if f2 else p2
    return bool(a1 & a2) and bool(b1 & b2)


def m_output_pairs(p1, p2, f1, f2):
    a1, b1 = (p1[1], p1[0]) if f1 else p1
    a2, b2 = (p2[1], p2[0]) if f2 else p2
    return (canon_pair(a1 & a2, b1 | b2), canon_pair(b1 & b2, a1 | a2))


def y_condition(pairs, roles, flips):
    table_idx = None
    for roles_t, flips_t, idx in Y_TABLE:
        if roles_t == roles and flips_t == flips:
            table_idx = idx
            break
    if table_idx is None:
        # The 2<->3 mirror of a table entry satisfies the same condition.
        mirror_roles = (roles[0], roles[2], roles[1])
        mirror_flips = (flips[0], flips[2], flips[1])
        for roles_t, flips_t, idx in Y_TABLE:
            if roles_t == mirror_roles and flips_t == mirror_flips:
                table_idx = idx
                break
    if table_idx is None:
        raise InvalidOrientationError("roles are not a permutation of 0..2")
    inter = eight_intersections(*pairs)
    t1, t2, t3, t4 = table_idx
    return bool(inter[t1]) and bool(inter[t2]) and bool(inter[t3]) and not inter[t4]


def y_output_pairs(pairs, roles, flips):
    sides = []
    for k in range(3):
        a, b = pairs[roles[k]]
        if flips[k]:
            a, b = b, a
        sides.append((a, b))
    (a1, b1), (a2, b2), (a3, b3) = sides
    return (
        canon_pair(b1 | (b2 & b3), a1),
        canon_pair(a2 | (a1 & b3), b2),
        canon_pair(a3 | (a1 & b2), b3),
    )


def z_condition(p1, p2, f1, f2):
    a1, b1 = (p1[1], p1[0]) if f1 else p1
    a2, b2 = (p2[1], p2[0]) if f2 else p2
    return (
        bool(a1 & a2)
        and bool(a2 & b1)
        and bool(b1 & b2)
        and not (a1 & b2)
    )


def z_output_pairs(p1, p2, f1, f2):
    a1, b1 = (p1[1], p1[0]) if f1 else p1
    a2, b2 = (p2[1], p2[0]) if f2 else p2
    return (canon_pair(b1 | b2, a1), canon_pair(b2, a1 | a2))


# ---------------------------------------------------------------------
# Public orientation enumeration and application
# ---------------------------------------------------------------------


def _check_participants(splits, rule):
    universe = splits[0].universe
    for s in splits[1:]:
        if s.universe != universe:
            raise ValueError("participants belong to different universes")
    if len(set(splits)) != len(splits):
        raise ValueError("the %s rule needs distinct splits" % rule)
    return universe


def _materialize(universe, pairs):
    return [PartialSplit.from_masks(universe, a, b) for a, b in pairs]


def m_orientations(s1, s2):
    """Valid pair-rule orientations, deduplicated.

    Flipping both sides at once maps the precondition and output set to
    themselves, so only orientations with flips[0] == 0 are reported;
    orientations producing an output set already seen are dropped.
    """
    _check_participants((s1, s2), "M")
    p1, p2 = s1.pair, s2.pair
    found = []
    seen = set()
    for f2 in (0, 1):
        if m_condition(p1, p2, 0, f2):
            outputs = frozenset(m_output_pairs(p1, p2, 0, f2))
            if outputs not in seen:
                seen.add(outputs)
                found.append(Orientation(roles=(0, 1), flips=(0, f2)))
    return found


def apply_m(s1, s2, orientation):
    """Apply the pair rule; the output set includes both inputs."""
    universe = _check_participants((s1, s2), "M")
    roles, flips = orientation.roles, orientation.flips
    if sorted(roles) != [0, 1] or len(flips) != 2:
        raise InvalidOrientationError("the M rule takes two splits")
    ordered = (s1, s2) if roles == (0, 1) else (s2, s1)
    p1, p2 = ordered[0].pair, ordered[1].pair
    if not m_condition(p1, p2, flips[0], flips[1]):
        raise InvalidOrientationError(
            "orientation does not satisfy the M precondition"
        )
    derived = _materialize(universe, m_output_pairs(p1, p2, flips[0], flips[1]))
    return RuleApplication(
        rule="M",
        inputs=(s1, s2),
        orientation=orientation,
        outputs=frozenset([s1, s2] + derived),
    )


def y_orientations(s1, s2, s3):
    """Valid triple-rule orientations in lexicographic (roles, flips) order.

    The 2<->3 role symmetry is quotiented out and orientations whose
    output set was already produced are dropped, leaving at most 24
    candidates per triple.
    """
    _check_participants((s1, s2, s3), "Y")
    pairs = (s1.pair, s2.pair, s3.pair)
    inter = eight_intersections(*pairs)
    found = []
    seen = set()
    for roles, flips, (t1, t2, t3, t4) in Y_TABLE:
        if inter[t1] and inter[t2] and inter[t3] and not inter[t4]:
            outputs = frozenset(y_output_pairs(pairs, roles, flips))
            if outputs not in seen:
                seen.add(outputs)
                found.append(Orientation(roles=roles, flips=flips))
    return found


def apply_y(s1, s2, s3, orientation):
    """Apply the triple rule; the three outputs extend the inputs rolewise."""
    universe = _check_participants((s1, s2, s3), "Y")
    roles, flips = orientation.roles, orientation.flips
    if sorted(roles) != [0, 1, 2] or len(flips) != 3:
        raise InvalidOrientationError("the Y rule takes three splits")
    pairs = (s1.pair, s2.pair, s3.pair)
    if not y_condition(pairs, roles, flips):
        raise InvalidOrientationError(
            "orientation does not satisfy the Y precondition"
        )
    outputs = _materialize(universe, y_output_pairs(pairs, roles, flips))
    return RuleApplication(
        rule="Y",
        inputs=(s1, s2, s3),
        orientation=orientation,
        outputs=frozenset(outputs),
    )


def z_orientations(s1, s2):
    """Valid one-sided pair-rule orientations, in lexicographic flip order.

    The precondition is not symmetric under flipping both sides, so all
    four side choices are distinct candidates; s1 plays role 1.
    """
    _check_participants((s1, s2), "Z")
    p1, p2 = s1.pair, s2.pair
    found = []
    seen = set()
    for f1 in (0, 1):
        for f2 in (0, 1):
            if z_condition(p1, p2, f1, f2):
                outputs = frozenset(z_output_pairs(p1, p2, f1, f2))
                if outputs not in seen:
                    seen.add(outputs)
                    found.append(Orientation(roles=(0, 1), flips=(f1, f2)))
    return found


def apply_z(s1, s2, orientation):
    """Apply the one-sided pair rule; the two outputs replace the inputs."""
    universe = _check_participants((s1, s2), "Z")
    roles, flips = orientation.roles, orientation.flips
    if roles != (0, 1) or len(flips) != 2:
        raise InvalidOrientationError(
            "the Z rule takes two splits in role order"
        )
    p1, p2 = s1.pair, s2.pair
    if not z_condition(p1, p2, flips[0], flips[1]):
        raise InvalidOrientationError(
            "orientation does not satisfy the Z precondition"
        )
    outputs = _materialize(universe, z_output_pairs(p1, p2, flips[0], flips[1]))
    return RuleApplication(
        rule="Z",
        inputs=(s1, s2),
        orientation=orientation,
        outputs=frozenset(outputs),
    )


def is_trivial_application(system, application):
    """Whether adding the application's outputs leaves the system unchanged.

    Formally: reduce(system + outputs) == system.  On an irreducible
    system this holds exactly when every output is extended by some
    member, which is what gets evaluated.

    Raises:
        ValueError: if the system is not irreducible or some input of
            the application is not a member.
    """
    if not system.is_irreducible:
        raise ValueError("triviality is defined on irreducible systems")
    for s in application.inputs:
        if s not in system:
            raise ValueError("application input %s is not in the system" % s)
    member_pairs = [s.pair for s in system.splits]
    for out in application.outputs:
        op = out.pair
        if not any(extends_pair(m, op) for m in member_pairs):
            return False
    return True
