"""Stability primitives: blocking pairs, deferred acceptance, rotations.

Everything in this module is parameterized by an :class:`~smbribe.core.Instance`
together with a :class:`~smbribe.core.PresenceMask`; absent agents are
invisible to every computation.  Deterministic tie-breaking is part of the
contract: blocking pairs come back sorted by declaration index, and the
proposal order of :func:`gale_shapley` is fixed (the result would be the
same either way, deferred acceptance is order-independent).
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    Instance,
    Matching,
    PresenceMask,
    Side,
    ValidationError,
    effective_prefs,
    make_instance,
    present_men,
    present_women,
)


def check_matching(inst: Instance, mask: PresenceMask, matching: Matching) -> None:
    """Raise :class:`ValidationError` unless the matching is valid.

    Valid means: every pair couples a declared, present man with a declared,
    present woman, the two find each other acceptable, and no agent appears
    in two pairs.
    """
    if len(matching.man_to_woman) != len(matching.pairs) or len(
        matching.woman_to_man
    ) != len(matching.pairs):
        raise ValidationError("an agent is matched more than once")
    for m, w in matching.pairs:
        if m not in inst.man_set:
            raise ValidationError(f"matched agent {m!r} is not a declared man")
        if w not in inst.woman_set:
            raise ValidationError(f"matched agent {w!r} is not a declared woman")
        if m not in mask.men:
            raise ValidationError(f"matched man {m!r} is absent")
        if w not in mask.women:
            raise ValidationError(f"matched woman {w!r} is absent")
        if w not in inst.rank_of[m]:
            raise ValidationError(
                f"matched pair ({m!r}, {w!r}) is not mutually acceptable"
            )


def blocking_pairs(
    inst: Instance, mask: PresenceMask, matching: Matching
) -> tuple[tuple[str, str], ...]:
    """All blocking pairs of the matching, sorted by declaration index.

    A present man and a present woman block when they find each other
    acceptable and each is either unmatched or strictly prefers the other to
    its partner.
    """
    check_matching(inst, mask, matching)
    rank = inst.rank_of
    found: list[tuple[int, int, str, str]] = []
    index = inst.decl_index
    for m in present_men(inst, mask):
        partner = matching.man_to_woman.get(m)
        for w in inst.prefs[m]:
            if w == partner:
                break
            if w not in mask.women:
                continue
            rival = matching.woman_to_man.get(w)
            if rival is None or rank[w][m] < rank[w][rival]:
                found.append((index[m], index[w], m, w))
    found.sort()
    return tuple((m, w) for _, _, m, w in found)


def is_stable(inst: Instance, mask: PresenceMask, matching: Matching) -> bool:
    """True when the matching is valid and admits no blocking pair."""
    return not blocking_pairs(inst, mask, matching)


def gale_shapley(
    inst: Instance, mask: PresenceMask, proposing: Side = Side.MAN
) -> Matching:
    """Deferred acceptance with the given side proposing.

    Returns the proposer-optimal stable matching of the present agents.
    Free proposers are processed from a stack seeded in reverse declaration
    order, so the first proposal comes from the lowest-index agent; the
    outcome does not depend on this order, it only pins the trace.
    """
    if proposing is Side.MAN:
        proposers = present_men(inst, mask)
        acceptor_present = mask.women
    else:
        proposers = present_women(inst, mask)
        acceptor_present = mask.men
    rank = inst.rank_of
    wish: dict[str, tuple[str, ...]] = {
        p: tuple(b for b in inst.prefs[p] if b in acceptor_present)
        for p in proposers
    }
    cursor = {p: 0 for p in proposers}
    engaged: dict[str, str] = {}
    stack = list(reversed(proposers))
    while stack:
        p = stack.pop()
        lst = wish[p]
        i = cursor[p]
        while i < len(lst):
            a = lst[i]
            i += 1
            holder = engaged.get(a)
            if holder is None:
                engaged[a] = p
                break
            if rank[a][p] < rank[a][holder]:
                engaged[a] = p
                stack.append(holder)
                break
        cursor[p] = i
    if proposing is Side.MAN:
        pairs = frozenset((p, a) for a, p in engaged.items())
    else:
        pairs = frozenset((a, p) for a, p in engaged.items())
    return Matching(pairs)


def is_unique_stable(
    inst: Instance, mask: PresenceMask, matching: Matching
) -> bool:
    """True when the matching is the only stable matching of the instance.

    Uses the lattice collapse criterion: a stable matching is unique exactly
    when the man-optimal and woman-optimal matchings coincide with it.
    """
    if not is_stable(inst, mask, matching):
        return False
    return (
        gale_shapley(inst, mask, Side.MAN) == matching
        and gale_shapley(inst, mask, Side.WOMAN) == matching
    )


@dataclass(frozen=True)
class SuccessorMap:
    """Rotation successors for every matched agent on one side.

    ``successor[a]`` is the first opposite-side agent strictly after ``a``'s
    partner in ``a``'s effective list who would rather have ``a`` (unmatched,
    or strictly prefers ``a`` to its own partner), or None when no such agent
    exists.
    """

    side: Side
    successor: dict[str, str | None]


def rotation_successors(
    inst: Instance, mask: PresenceMask, matching: Matching, side: Side = Side.MAN
) -> SuccessorMap:
    """Successor per matched agent on the given side, under a stable matching.

    The matching must be stable; the successor definition is in
    :class:`SuccessorMap`.
    """
    if not is_stable(inst, mask, matching):
        raise ValidationError("rotation successors require a stable matching")
    rank = inst.rank_of
    if side is Side.MAN:
        own = matching.man_to_woman
        other = matching.woman_to_man
        agents = present_men(inst, mask)
        other_present = mask.women
    else:
        own = matching.woman_to_man
        other = matching.man_to_woman
        agents = present_women(inst, mask)
        other_present = mask.men
    succ: dict[str, str | None] = {}
    for a in agents:
        partner = own.get(a)
        if partner is None:
            continue
        after = False
        succ[a] = None
        for b in inst.prefs[a]:
            if not after:
                after = b == partner
                continue
            if b not in other_present:
                continue
            rival = other.get(b)
            if rival is None or rank[b][a] < rank[b][rival]:
                succ[a] = b
                break
    return SuccessorMap(side=side, successor=succ)


def exposed_rotation(
    inst: Instance, mask: PresenceMask, matching: Matching, side: Side = Side.MAN
) -> tuple[tuple[str, str], ...] | None:
    """One exposed rotation of a stable matching on the given side, or None.

    A man-rotation is a cyclic sequence of matched pairs (m_0, w_0), ...,
    (m_{r-1}, w_{r-1}) where w_{i+1} (indices mod r) is the successor of
    m_i.  Moving every m_i to w_{i+1} yields the next stable matching down
    the man-lattice; the woman-optimal matching is the only stable matching
    with no exposed man-rotation.  Woman-rotations are symmetric.

    The search walks the successor graph from matched agents in declaration
    order, and the reported cycle starts at its lowest-index agent, so the
    result is deterministic.
    """
    succ = rotation_successors(inst, mask, matching, side).successor
    own = matching.man_to_woman if side is Side.MAN else matching.woman_to_man
    other = matching.woman_to_man if side is Side.MAN else matching.man_to_woman
    index = inst.decl_index
    step: dict[str, str] = {}
    for a, b in succ.items():
        if b is None:
            continue
        nxt = other.get(b)
        if nxt is not None:
            step[a] = nxt

    state: dict[str, int] = {}  # 1 = on current path, 2 = finished
    for start in sorted(succ, key=index.__getitem__):
        if state.get(start):
            continue
        path: list[str] = []
        a = start
        while True:
            mark = state.get(a)
            if mark == 2:
                break
            if mark == 1:
                cycle = path[path.index(a):]
                lowest = min(range(len(cycle)), key=lambda i: index[cycle[i]])
                cycle = cycle[lowest:] + cycle[:lowest]
                return tuple((x, own[x]) for x in cycle)
            state[a] = 1
            path.append(a)
            if a not in step:
                break
            a = step[a]
        for x in path:
            state[x] = 2
    return None


@dataclass(frozen=True)
class TargetPrune:
    """Result of pruning an instance around a target pair.

    ``rival_men`` are the men the target woman strictly prefers to the
    target man; ``rival_women`` mirror that on the other side.  The pruned
    instance drops the target pair's agents, truncates every rival's list to
    the partners that would keep it from blocking the target pair, and
    restores mutual acceptability.  ``matching`` is the man-proposing stable
    matching of the pruned instance, and the two unassigned tuples list the
    rivals it leaves single (the same set for every stable matching, so the
    choice of matching does not matter).
    """

    pruned_instance: Instance
    pruned_mask: PresenceMask
    rival_men: tuple[str, ...]
    rival_women: tuple[str, ...]
    matching: Matching
    unassigned_rival_men: tuple[str, ...]
    unassigned_rival_women: tuple[str, ...]


def prune_to_target(
    inst: Instance, mask: PresenceMask, man: str, woman: str
) -> TargetPrune:
    """Prune the instance around the target pair (man, woman).

    The target pair sits in a stable matching of the current instance if and
    only if every rival can be matched in the pruned instance, which happens
    exactly when no rival is unassigned there.  Both agents must be present
    and mutually acceptable.
    """
    if inst.side(man) is not Side.MAN:
        raise ValidationError(f"{man!r} is not a man")
    if inst.side(woman) is not Side.WOMAN:
        raise ValidationError(f"{woman!r} is not a woman")
    if man not in mask.men or woman not in mask.women:
        raise ValidationError("target agents must be present")
    rank = inst.rank_of
    if woman not in rank[man]:
        raise ValidationError(
            f"target pair ({man!r}, {woman!r}) is not mutually acceptable"
        )

    star_rank_w = rank[woman][man]
    star_rank_m = rank[man][woman]
    rival_men = tuple(
        m
        for m in present_men(inst, mask)
        if m != man and rank[woman].get(m, star_rank_w + 1) < star_rank_w
    )
    rival_women = tuple(
        w
        for w in present_women(inst, mask)
        if w != woman and rank[man].get(w, star_rank_m + 1) < star_rank_m
    )
    rival_man_set = set(rival_men)
    rival_woman_set = set(rival_women)

    kept_men = tuple(m for m in present_men(inst, mask) if m != man)
    kept_women = tuple(w for w in present_women(inst, mask) if w != woman)
    kept = set(kept_men) | set(kept_women)

    # Rivals keep only the partners they prefer to the target agent; being
    # matched inside that prefix is what stops them from blocking the pair.
    truncated: dict[str, list[str]] = {}
    for agent in kept_men + kept_women:
        if agent in rival_man_set:
            cutoff = woman
        elif agent in rival_woman_set:
            cutoff = man
        else:
            cutoff = None
        lst: list[str] = []
        for other in inst.prefs[agent]:
            if other == cutoff:
                break
            if other in kept:
                lst.append(other)
        truncated[agent] = lst

    kept_sets = {a: set(lst) for a, lst in truncated.items()}
    prefs = {
        a: [b for b in lst if a in kept_sets[b]] for a, lst in truncated.items()
    }
    pruned = make_instance(kept_men, kept_women, prefs)
    pruned_mask = PresenceMask.full(pruned)
    matched = gale_shapley(pruned, pruned_mask, Side.MAN)
    return TargetPrune(
        pruned_instance=pruned,
        pruned_mask=pruned_mask,
        rival_men=rival_men,
        rival_women=rival_women,
        matching=matched,
        unassigned_rival_men=tuple(
            m for m in rival_men if m not in matched.man_to_woman
        ),
        unassigned_rival_women=tuple(
            w for w in rival_women if w not in matched.woman_to_man
        ),
    )


def stable_pair(inst: Instance, mask: PresenceMask, man: str, woman: str) -> bool:
    """Whether the pair (man, woman) lies in some stable matching.

    Works on incomplete instances.  Returns False (rather than raising) when
    the two do not find each other acceptable; both must be present.
    """
    if inst.side(man) is not Side.MAN or inst.side(woman) is not Side.WOMAN:
        raise ValidationError("stable_pair expects a (man, woman) pair")
    if man not in mask.men or woman not in mask.women:
        raise ValidationError("target agents must be present")
    if woman not in inst.rank_of[man]:
        return False
    prune = prune_to_target(inst, mask, man, woman)
    return not prune.unassigned_rival_men and not prune.unassigned_rival_women
