"""Manipulation solvers: one operation per goal/action combination.

Four goals are supported.  Constructive-exists (make a chosen pair belong to
some stable matching), destructive-exists (make some stable matching avoid
the pair), exact-exists (make the restriction of a prescribed matching M* to
the present agents stable), and exact-unique (make that restriction the one
and only stable matching).  The manipulative actions are adjacent swaps in a
single preference list, whole-list reorders, acceptability deletions, agent
deletions, and agent additions.

Every solver takes a :class:`SolveRequest` and returns a
:class:`ManipulationResult`.  Feasible results are re-verified from scratch
before they are returned: the action list is applied to a fresh copy of the
instance and the goal is checked through :mod:`smbribe.engine`.  A failure of
that check is a bug in the solver, never a property of the input, so it
raises AssertionError instead of reporting infeasibility.

Budgets are thin wrappers: each solver computes the true optimum cost (or
searches up to the budget when only a bounded search is available) and
compares against the budget afterwards.  ``InfeasibleAlways`` is reserved for
goals that provably have no solution at any budget, which only happens for
addition-based solvers; every other action admits a finite-cost solution on
any valid input.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache

from . import engine
from .core import (
    AccDelete,
    Action,
    Add,
    CapExceededError,
    Delete,
    Instance,
    Matching,
    PresenceMask,
    Reorder,
    Side,
    Swap,
    UNBOUNDED,
    ValidationError,
    apply_actions,
    enumeration_cap,
    matching_from_pairs,
    serialize_actions,
)
from .graphkit import (
    BipartiteGraph,
    CostDigraph,
    INFINITE,
    bipartite_min_vertex_cover,
    min_anti_arborescence,
    min_cut,
    spanning_anti_arborescence,
)


class Goal(str, Enum):
    CONST_EX = "ConstEx"
    DEST_EX = "DestEx"
    EXACT_EX = "ExactEx"
    EXACT_UNI = "ExactUni"


class ActionKind(str, Enum):
    SWAP = "Swap"
    REORDER = "Reorder"
    ACC_DELETE = "AccDelete"
    DELETE = "Delete"
    ADD = "Add"


class Status(str, Enum):
    FEASIBLE = "Feasible"
    INFEASIBLE_WITHIN_BUDGET = "InfeasibleWithinBudget"
    INFEASIBLE_ALWAYS = "InfeasibleAlways"


class Quality(str, Enum):
    EXACT = "Exact"
    APPROX2 = "Approx2"
    EXACT_WITHIN_PARAMETER = "ExactWithinParameter"


@dataclass(frozen=True)
class SolveRequest:
    """A manipulation problem: reach ``goal`` using ``action`` within ``budget``.

    ``target`` is a ``(man, woman)`` pair for the constructive and
    destructive goals and a complete :class:`Matching` for the exact goals.
    For Add requests the matching must cover every declared agent, addable
    ones included; for all other actions it must cover exactly the original
    agents.  ``budget`` is a nonnegative integer, or ``UNBOUNDED``.
    ``target`` may be None only when the request feeds
    :func:`exact_partial`, which supplies its own completions.
    """

    instance: Instance
    goal: Goal
    action: ActionKind
    budget: int | float
    target: tuple[str, str] | Matching | None


@dataclass(frozen=True)
class ManipulationResult:
    """Outcome of a solver run.

    ``cost`` is the exact optimum whenever the solver knows it, which
    includes every Feasible result and the InfeasibleWithinBudget results of
    polynomial solvers; it is None when a budget-bounded search was
    exhausted without learning the true optimum.  ``actions`` is the
    cheapest action sequence found (empty unless Feasible), and the three
    witness fields describe the manipulated market and a matching that
    demonstrates the goal there.
    """

    status: Status
    cost: int | None
    actions: tuple[Action, ...]
    witness_instance: Instance | None
    witness_mask: PresenceMask | None
    witness_matching: Matching | None
    quality: Quality


# ---------------------------------------------------------------------------
# request plumbing


def _originals(inst: Instance) -> tuple[frozenset[str], frozenset[str]]:
    return (
        inst.man_set - frozenset(inst.addable_men),
        inst.woman_set - frozenset(inst.addable_women),
    )


def _check_request(req: SolveRequest, goal: Goal, actions: tuple[ActionKind, ...]) -> None:
    if not isinstance(req.instance, Instance):
        raise ValidationError("request instance must be an Instance")
    if req.goal is not goal:
        raise ValidationError(f"this solver handles goal {goal.value}, got {req.goal.value}")
    if req.action not in actions:
        allowed = ", ".join(a.value for a in actions)
        raise ValidationError(
            f"this solver handles action(s) {allowed}, got {req.action.value}"
        )
    if req.budget is not UNBOUNDED:
        if not isinstance(req.budget, int) or isinstance(req.budget, bool) or req.budget < 0:
            raise ValidationError("budget must be a nonnegative integer or UNBOUNDED")
    if goal in (Goal.CONST_EX, Goal.DEST_EX):
        _check_pair_target(req)
    else:
        _check_matching_target(req)


def _check_pair_target(req: SolveRequest) -> None:
    target = req.target
    if (
        not isinstance(target, tuple)
        or len(target) != 2
        or not all(isinstance(a, str) for a in target)
    ):
        raise ValidationError("target must be a (man, woman) pair for this goal")
    man, woman = target
    inst = req.instance
    if man not in inst.man_set:
        raise ValidationError(f"target man {man!r} is not a declared man")
    if woman not in inst.woman_set:
        raise ValidationError(f"target woman {woman!r} is not a declared woman")


def _check_matching_target(req: SolveRequest) -> None:
    target = req.target
    if not isinstance(target, Matching):
        raise ValidationError("target must be a Matching for this goal")
    inst = req.instance
    full = PresenceMask.full(inst)
    engine.check_matching(inst, full, target)
    matched = {a for pair in target.pairs for a in pair}
    if req.action is ActionKind.ADD:
        expected = inst.man_set | inst.woman_set
        label = "every declared agent (addable agents included)"
    else:
        orig_men, orig_women = _originals(inst)
        expected = orig_men | orig_women
        label = "exactly the original agents"
    if matched != expected:
        raise ValidationError(f"target matching must cover {label}")


def _require_finite_budget(req: SolveRequest) -> int:
    if req.budget is UNBOUNDED:
        raise ValidationError("this solver needs a finite budget")
    return req.budget


def _require_complete(inst: Instance) -> None:
    """Reject instances that are not complete two-sided markets.

    Complete means equal side sizes, no addable agents, and every agent
    ranking the entire opposite side.
    """
    if inst.addable_men or inst.addable_women:
        raise ValidationError("this solver requires an instance without addable agents")
    if len(inst.men) != len(inst.women):
        raise ValidationError("this solver requires equal side sizes")
    _require_full_lists(inst)


def _require_full_lists(inst: Instance) -> None:
    for m in inst.men:
        if len(inst.prefs[m]) != len(inst.women):
            raise ValidationError("this solver requires complete preference lists")
    for w in inst.women:
        if len(inst.prefs[w]) != len(inst.men):
            raise ValidationError("this solver requires complete preference lists")


def _within(cost: int, budget: int | float) -> bool:
    return budget is UNBOUNDED or cost <= budget


def _restrict(mstar: Matching, mask: PresenceMask) -> Matching:
    return matching_from_pairs(
        (m, w) for m, w in mstar.pairs if m in mask.men and w in mask.women
    )


def _verify_goal(
    req: SolveRequest, inst: Instance, mask: PresenceMask, matching: Matching
) -> bool:
    """Definitional goal check used to re-verify every Feasible result."""
    try:
        engine.check_matching(inst, mask, matching)
    except ValidationError:
        return False
    if req.goal is Goal.CONST_EX:
        return req.target in matching.pairs and engine.is_stable(inst, mask, matching)
    if req.goal is Goal.DEST_EX:
        return req.target not in matching.pairs and engine.is_stable(inst, mask, matching)
    if req.goal is Goal.EXACT_EX:
        return matching == _restrict(req.target, mask) and engine.is_stable(
            inst, mask, matching
        )
    return matching == _restrict(req.target, mask) and engine.is_unique_stable(
        inst, mask, matching
    )


def _const_ex_witness(inst: Instance, mask: PresenceMask, man: str, woman: str) -> Matching:
    """A stable matching containing (man, woman), which must be a stable pair."""
    prune = engine.prune_to_target(inst, mask, man, woman)
    if prune.unassigned_rival_men or prune.unassigned_rival_women:
        raise AssertionError("witness requested for a pair that is not stable")
    return matching_from_pairs(set(prune.matching.pairs) | {(man, woman)})


def _witness_matching(req: SolveRequest, inst: Instance, mask: PresenceMask) -> Matching:
    if req.goal is Goal.CONST_EX:
        man, woman = req.target
        return _const_ex_witness(inst, mask, man, woman)
    if req.goal is Goal.DEST_EX:
        for side in (Side.MAN, Side.WOMAN):
            candidate = engine.gale_shapley(inst, mask, side)
            if req.target not in candidate.pairs:
                return candidate
        raise AssertionError("destructive witness requested but pair is in both extremes")
    return _restrict(req.target, mask)


def _feasible(
    req: SolveRequest, cost: int, actions: tuple[Action, ...], quality: Quality
) -> ManipulationResult:
    inst2, mask2 = engine_apply(req.instance, actions)
    matching = _witness_matching(req, inst2, mask2)
    if not _verify_goal(req, inst2, mask2, matching):
        raise AssertionError("solver produced actions that fail goal re-verification")
    return ManipulationResult(
        status=Status.FEASIBLE,
        cost=cost,
        actions=actions,
        witness_instance=inst2,
        witness_mask=mask2,
        witness_matching=matching,
        quality=quality,
    )


def _infeasible(
    req: SolveRequest, always: bool, cost: int | None, quality: Quality
) -> ManipulationResult:
    return ManipulationResult(
        status=Status.INFEASIBLE_ALWAYS if always else Status.INFEASIBLE_WITHIN_BUDGET,
        cost=cost,
        actions=(),
        witness_instance=None,
        witness_mask=None,
        witness_matching=None,
        quality=quality,
    )


def _decide(
    req: SolveRequest, cost: int, actions: tuple[Action, ...], quality: Quality
) -> ManipulationResult:
    """Feasible when the known-exact cost fits the budget, else infeasible."""
    if _within(cost, req.budget):
        return _feasible(req, cost, actions, quality)
    return _infeasible(req, always=False, cost=cost, quality=quality)


def engine_apply(inst: Instance, actions: tuple[Action, ...]):
    return apply_actions(inst, PresenceMask.initial(inst), actions)


def _sorted_agents(inst: Instance, agents) -> list[str]:
    return sorted(agents, key=inst.decl_index.__getitem__)


# ---------------------------------------------------------------------------
# constructive-exists


def const_ex_delete(req: SolveRequest) -> ManipulationResult:
    """Fewest agent deletions making the target pair a stable pair.

    The rivals of the pair (agents either target strictly prefers to the
    other) are pruned to the sub-market where they must all find partners;
    whoever stays single there has to go, and nobody else does.
    """
    _check_request(req, Goal.CONST_EX, (ActionKind.DELETE,))
    _require_complete(req.instance)
    inst = req.instance
    man, woman = req.target
    mask = PresenceMask.initial(inst)
    prune = engine.prune_to_target(inst, mask, man, woman)
    doomed = _sorted_agents(
        inst, prune.unassigned_rival_men + prune.unassigned_rival_women
    )
    actions = tuple(Delete(agent=a) for a in doomed)
    return _decide(req, len(doomed), actions, Quality.EXACT)


def dest_ex_delete(req: SolveRequest) -> ManipulationResult:
    """Fewest agent deletions so that some stable matching avoids the pair.

    Cost is 0 when one of the two optimal stable matchings already avoids
    the pair (by lattice extremity the pair appears in every stable matching
    exactly when it appears in both).  Otherwise deleting the target man
    always works and nothing cheaper can, so the optimum is exactly 1.
    """
    _check_request(req, Goal.DEST_EX, (ActionKind.DELETE,))
    inst = req.instance
    mask = PresenceMask.initial(inst)
    man, woman = req.target
    if man not in mask.men or woman not in mask.women:
        raise ValidationError("target agents must be present originals")
    for side in (Side.MAN, Side.WOMAN):
        if req.target not in engine.gale_shapley(inst, mask, side).pairs:
            return _decide(req, 0, (), Quality.EXACT)
    return _decide(req, 1, (Delete(agent=man),), Quality.EXACT)


def const_ex_reorder_approx2(req: SolveRequest) -> ManipulationResult:
    """Reorder-based 2-approximation for the constructive goal.

    Reorders every rival that stays single in the pruned sub-market so that
    all of the single agents rank each other first; this resolves every way
    the singles could undermine the target pair, at a cost of at most twice
    the optimum.
    """
    _check_request(req, Goal.CONST_EX, (ActionKind.REORDER,))
    _require_complete(req.instance)
    inst = req.instance
    man, woman = req.target
    mask = PresenceMask.initial(inst)
    prune = engine.prune_to_target(inst, mask, man, woman)

    matched = {a for pair in prune.matching.pairs for a in pair}
    single_men = [m for m in prune.pruned_instance.men if m not in matched]
    single_women = [w for w in prune.pruned_instance.women if w not in matched]
    star_men = set(prune.unassigned_rival_men)
    star_women = set(prune.unassigned_rival_women)

    actions = []
    for a in _sorted_agents(inst, star_men | star_women):
        firsts = single_women if a in star_men else single_men
        firsts = _sorted_agents(inst, firsts)
        rest = [b for b in inst.prefs[a] if b not in set(firsts)]
        actions.append(Reorder(agent=a, order=tuple(firsts + rest)))
    cost = len(actions)
    return _decide(req, cost, tuple(actions), Quality.APPROX2)


def const_ex_reorder_xp(req: SolveRequest) -> ManipulationResult:
    """Exact reorder solver, exponential only in the budget.

    Tries every set of at most ``budget`` agents (the target pair itself may
    not be reordered) together with every choice of new top entry per chosen
    agent; moving one agent to the top of a list is the only part of a
    reorder that can matter for making the target a stable pair.
    """
    _check_request(req, Goal.CONST_EX, (ActionKind.REORDER,))
    budget = _require_finite_budget(req)
    _require_full_lists(req.instance)
    inst = req.instance
    man, woman = req.target
    mask = PresenceMask.initial(inst)
    if man not in mask.men or woman not in mask.women:
        raise ValidationError("target agents must be present originals")

    pool = [
        a
        for a in inst.men + inst.women
        if a not in (man, woman) and a in mask
    ]
    index = inst.decl_index
    for k in range(budget + 1):
        for chosen in itertools.combinations(pool, k):
            options = []
            for a in chosen:
                tops = [b for b in sorted(inst.prefs[a], key=index.__getitem__)
                        if b != inst.prefs[a][0]]
                options.append(tops)
            for assignment in itertools.product(*options):
                actions = []
                for a, top in zip(chosen, assignment):
                    rest = [b for b in inst.prefs[a] if b != top]
                    actions.append(Reorder(agent=a, order=(top, *rest)))
                inst2, mask2 = engine_apply(inst, tuple(actions))
                if engine.stable_pair(inst2, mask2, man, woman):
                    return _feasible(req, k, tuple(actions), Quality.EXACT)
    return _infeasible(req, always=False, cost=None, quality=Quality.EXACT)


class _Cap:
    """Counts enumeration states and raises once the configured cap is hit."""

    def __init__(self) -> None:
        self.limit = enumeration_cap()
        self.count = 0

    def tick(self, states: int = 1) -> None:
        self.count += states
        if self.count > self.limit:
            raise CapExceededError(
                f"enumeration exceeded the cap of {self.limit} states"
            )


@lru_cache(maxsize=None)
def _perms_by_inversions(length: int) -> dict[int, tuple[tuple[int, ...], ...]]:
    """All permutations of ``range(length)`` grouped by inversion count."""
    groups: dict[int, list[tuple[int, ...]]] = {}
    for perm in itertools.permutations(range(length)):
        inv = sum(
            1
            for i in range(length)
            for j in range(i + 1, length)
            if perm[i] > perm[j]
        )
        groups.setdefault(inv, []).append(perm)
    return {inv: tuple(perms) for inv, perms in sorted(groups.items())}


def _swaps_realizing(agent: str, length: int, perm: tuple[int, ...]) -> list[Swap]:
    """The minimal adjacent-swap sequence turning the identity into ``perm``.

    Works like insertion sort on the inverse: bring the element destined for
    each position into place from left to right.  The number of Swap actions
    equals the inversion count of ``perm``.
    """
    cur = list(range(length))
    out: list[Swap] = []
    for i in range(length):
        j = cur.index(perm[i])
        while j > i:
            cur[j - 1], cur[j] = cur[j], cur[j - 1]
            out.append(Swap(agent=agent, pos=j - 1))
            j -= 1
    return out


def _iter_swap_states(inst: Instance, total: int, cap: _Cap):
    """Yield (pref_table, actions, cost) for every swap plan of cost ``total``.

    A plan assigns each agent a permutation of its list; its cost is the
    summed inversion count, which equals the fewest adjacent swaps realizing
    it.  Deterministic order: agents are considered in declaration order and
    permutations in the fixed order of :func:`_perms_by_inversions`.
    """
    agents = inst.men + inst.women
    table = list(inst.pref_table)

    def rec(idx: int, remaining: int, actions: list[Swap]):
        if remaining == 0:
            cap.tick()
            yield tuple(table), tuple(actions), total
            return
        if idx == len(agents):
            return
        yield from rec(idx + 1, remaining, actions)
        agent = agents[idx]
        base = inst.pref_table[idx]
        length = len(base)
        groups = _perms_by_inversions(length)
        for inv in range(1, remaining + 1):
            for perm in groups.get(inv, ()):
                table[idx] = tuple(base[p] for p in perm)
                swaps = _swaps_realizing(agent, length, perm)
                yield from rec(idx + 1, remaining - inv, actions + swaps)
        table[idx] = base

    yield from rec(0, total, [])


def _iter_accdel_states(inst: Instance, size: int, skip: tuple[str, str] | None, cap: _Cap):
    """Yield (pref_table, actions) for every acceptability-deletion set of ``size``."""
    universe = [
        (m, w)
        for m in inst.men
        for w in inst.prefs[m]
        if (m, w) != skip
    ]
    pos = {a: i for i, a in enumerate(inst.men + inst.women)}
    for combo in itertools.combinations(universe, size):
        cap.tick()
        removed: dict[str, set[str]] = {}
        for m, w in combo:
            removed.setdefault(m, set()).add(w)
            removed.setdefault(w, set()).add(m)
        table = list(inst.pref_table)
        for agent, gone in removed.items():
            i = pos[agent]
            table[i] = tuple(b for b in table[i] if b not in gone)
        actions = tuple(AccDelete(man=m, woman=w) for m, w in combo)
        yield tuple(table), actions


def const_ex_bruteforce(req: SolveRequest) -> ManipulationResult:
    """Exhaustive constructive solver for swaps, acceptability deletions, adds.

    Enumerates canonical action sets in increasing cost order and tests the
    stable-pair property after each.  Swap plans are canonicalized to one
    permutation per agent (costed by inversions), acceptability deletions to
    pair subsets, and additions to agent subsets.  The enumeration counts
    against the configured state cap and raises rather than truncating.
    """
    _check_request(
        req, Goal.CONST_EX, (ActionKind.SWAP, ActionKind.ACC_DELETE, ActionKind.ADD)
    )
    inst = req.instance
    man, woman = req.target
    cap = _Cap()
    mask = PresenceMask.initial(inst)

    if req.action is ActionKind.ADD:
        return _bruteforce_add(req, _const_goal_checker(man, woman), cap, Quality.EXACT_WITHIN_PARAMETER)

    budget = _require_finite_budget(req)
    if man not in mask.men or woman not in mask.women:
        raise ValidationError("target agents must be present originals")
    if woman not in inst.rank_of[man]:
        return _infeasible(req, always=True, cost=None, quality=Quality.EXACT_WITHIN_PARAMETER)

    if req.action is ActionKind.SWAP:
        for k in range(budget + 1):
            for table, actions, cost in _iter_swap_states(inst, k, cap):
                inst2 = replace(inst, pref_table=table)
                if engine.stable_pair(inst2, mask, man, woman):
                    return _feasible(req, cost, actions, Quality.EXACT_WITHIN_PARAMETER)
        return _infeasible(req, always=False, cost=None, quality=Quality.EXACT_WITHIN_PARAMETER)

    for k in range(budget + 1):
        for table, actions in _iter_accdel_states(inst, k, (man, woman), cap):
            inst2 = replace(inst, pref_table=table)
            if woman in inst2.rank_of[man] and engine.stable_pair(inst2, mask, man, woman):
                return _feasible(req, k, actions, Quality.EXACT_WITHIN_PARAMETER)
    return _infeasible(req, always=False, cost=None, quality=Quality.EXACT_WITHIN_PARAMETER)


def _const_goal_checker(man: str, woman: str):
    def check(inst: Instance, mask: PresenceMask) -> bool:
        if man not in mask.men or woman not in mask.women:
            return False
        if woman not in inst.rank_of[man]:
            return False
        return engine.stable_pair(inst, mask, man, woman)

    return check


def _uni_goal_checker(mstar: Matching):
    def check(inst: Instance, mask: PresenceMask) -> bool:
        restricted = _restrict(mstar, mask)
        try:
            engine.check_matching(inst, mask, restricted)
        except ValidationError:
            return False
        return engine.is_unique_stable(inst, mask, restricted)

    return check


def _bruteforce_add(
    req: SolveRequest, goal_check, cap: _Cap, quality: Quality
) -> ManipulationResult:
    """Shared Add enumeration: all addable subsets, smallest first.

    Exhausts the full subset lattice regardless of budget so that a failure
    at every size is a proof of infeasibility at any budget.
    """
    inst = req.instance
    addables = _sorted_agents(inst, inst.addable_men + inst.addable_women)
    base = PresenceMask.initial(inst)
    for size in range(len(addables) + 1):
        for combo in itertools.combinations(addables, size):
            cap.tick()
            mask = base
            for a in combo:
                mask = mask.with_added(inst, a)
            if goal_check(inst, mask):
                actions = tuple(Add(agent=a) for a in combo)
                if _within(size, req.budget):
                    return _feasible(req, size, actions, quality)
                return _infeasible(req, always=False, cost=size, quality=quality)
    return _infeasible(req, always=True, cost=None, quality=quality)


# ---------------------------------------------------------------------------
# exact-exists


def exact_ex_accdel(req: SolveRequest) -> ManipulationResult:
    """Delete the acceptability of each blocking pair of M*; that is optimal.

    A blocking pair can only be disarmed by removing its own acceptability
    (removing other pairs never changes the relative order that makes it
    block), and removing anything else is wasted budget.
    """
    _check_request(req, Goal.EXACT_EX, (ActionKind.ACC_DELETE,))
    inst = req.instance
    mask = PresenceMask.initial(inst)
    blocks = engine.blocking_pairs(inst, mask, _restrict(req.target, mask))
    actions = tuple(AccDelete(man=m, woman=w) for m, w in blocks)
    return _decide(req, len(blocks), actions, Quality.EXACT)


def exact_ex_reorder(req: SolveRequest) -> ManipulationResult:
    """Minimum reorders making M* stable, via a vertex cover of its blocks.

    Reordering an agent to put its M*-partner on top removes that agent from
    every blocking pair at once and cannot create new ones, so the optimal
    reorder sets are exactly the vertex covers of the blocking-pair graph,
    and that graph is bipartite.
    """
    _check_request(req, Goal.EXACT_EX, (ActionKind.REORDER,))
    inst = req.instance
    mask = PresenceMask.initial(inst)
    mstar = _restrict(req.target, mask)
    blocks = engine.blocking_pairs(inst, mask, mstar)

    men = sorted({m for m, _ in blocks}, key=inst.decl_index.__getitem__)
    women = sorted({w for _, w in blocks}, key=inst.decl_index.__getitem__)
    mi = {m: i for i, m in enumerate(men)}
    wi = {w: i for i, w in enumerate(women)}
    graph = BipartiteGraph(
        left_count=len(men),
        right_count=len(women),
        edges=tuple((mi[m], wi[w]) for m, w in blocks),
    )
    cover_left, cover_right = bipartite_min_vertex_cover(graph)
    agents = [men[i] for i in cover_left] + [women[i] for i in cover_right]

    actions = []
    for a in _sorted_agents(inst, agents):
        partner = mstar.partner(a)
        rest = [b for b in inst.prefs[a] if b != partner]
        actions.append(Reorder(agent=a, order=(partner, *rest)))
    return _decide(req, len(actions), tuple(actions), Quality.EXACT)


@dataclass(frozen=True)
class SwapCutGraph:
    """The cut graph behind :func:`exact_ex_swap`, with readable labels.

    ``vertex_labels[i]`` names vertex ``i`` ("s", "t", or "u:<agent>:<k>"
    for the k-th blocking pair of an agent, most preferred partner first).
    ``arc_roles[j]`` describes arc ``j``: ("resolve", agent, d) for a
    finite arc whose cut sets the agent's upward-move count to d, or
    ("block", man, woman) for an infinite blocking-pair arc.
    """

    graph: CostDigraph
    vertex_labels: tuple[str, ...]
    arc_roles: tuple[tuple, ...]


def build_swap_cut_graph(
    inst: Instance, mask: PresenceMask, mstar: Matching
) -> SwapCutGraph:
    """Build the swap-resolution cut graph for a prescribed matching.

    Each agent in a blocking pair gets a chain of vertices, one per pair it
    is in, ordered by decreasing resolution cost (the number of upward moves
    of its partner needed to outrank that pair's other member).  Cutting the
    arc that carries cost d corresponds to moving the agent's partner up d
    places, which resolves every pair at that vertex and beyond.  Infinite
    arcs tie the two chains of each blocking pair together: one side has to
    pay.  A minimum s-t cut therefore spells out an optimal swap plan.
    """
    rank = inst.rank_of
    blocks = engine.blocking_pairs(inst, mask, mstar)

    def cost(agent: str, other: str) -> int:
        return rank[agent][mstar.partner(agent)] - rank[agent][other]

    per_agent: dict[str, list[str]] = {}
    for m, w in blocks:
        per_agent.setdefault(m, []).append(w)
        per_agent.setdefault(w, []).append(m)
    for agent, others in per_agent.items():
        others.sort(key=lambda b: rank[agent][b])

    labels = ["s", "t"]
    vid: dict[tuple[str, int], int] = {}
    for agent in _sorted_agents(inst, per_agent):
        for i in range(len(per_agent[agent])):
            vid[(agent, i)] = len(labels)
            labels.append(f"u:{agent}:{i + 1}")

    arcs: list[tuple[int, int, int | float]] = []
    roles: list[tuple] = []
    for agent in _sorted_agents(inst, per_agent):
        chain = per_agent[agent]
        if inst.side(agent) is Side.MAN:
            arcs.append((0, vid[(agent, 0)], cost(agent, chain[0])))
            roles.append(("resolve", agent, cost(agent, chain[0])))
            for i in range(len(chain) - 1):
                arcs.append((vid[(agent, i)], vid[(agent, i + 1)], cost(agent, chain[i + 1])))
                roles.append(("resolve", agent, cost(agent, chain[i + 1])))
        else:
            arcs.append((vid[(agent, 0)], 1, cost(agent, chain[0])))
            roles.append(("resolve", agent, cost(agent, chain[0])))
            for i in range(len(chain) - 1):
                arcs.append((vid[(agent, i + 1)], vid[(agent, i)], cost(agent, chain[i + 1])))
                roles.append(("resolve", agent, cost(agent, chain[i + 1])))
    for m, w in blocks:
        arcs.append((vid[(m, per_agent[m].index(w))], vid[(w, per_agent[w].index(m))], INFINITE))
        roles.append(("block", m, w))

    graph = CostDigraph(
        vertex_count=len(labels), arcs=tuple(arcs), source=0, sink=1
    )
    return SwapCutGraph(
        graph=graph, vertex_labels=tuple(labels), arc_roles=tuple(roles)
    )


def exact_ex_swap(req: SolveRequest) -> ManipulationResult:
    """Minimum adjacent swaps making M* stable, via a minimum cut.

    Only moving an agent's own M*-partner upward ever helps, so a solution
    is a vector of per-agent upward-move counts; the cut graph encodes the
    cheapest vector resolving every blocking pair.
    """
    _check_request(req, Goal.EXACT_EX, (ActionKind.SWAP,))
    inst = req.instance
    mask = PresenceMask.initial(inst)
    mstar = _restrict(req.target, mask)
    built = build_swap_cut_graph(inst, mask, mstar)
    if built.graph.vertex_count == 2:
        return _decide(req, 0, (), Quality.EXACT)

    cut = min_cut(built.graph)
    if cut.value is INFINITE:
        raise AssertionError("swap cut graph admits no finite cut")

    moves: dict[str, int] = {}
    for arc_id in cut.cut_arcs:
        role = built.arc_roles[arc_id]
        if role[0] != "resolve":
            raise AssertionError("blocking-pair arc crossed a minimum cut")
        _, agent, d = role
        if agent in moves:
            raise AssertionError("two cut arcs for one agent in a minimum cut")
        moves[agent] = d

    total = sum(moves.values())
    if total != cut.value:
        raise AssertionError("cut value does not match emitted swap counts")

    actions: list[Swap] = []
    for agent in _sorted_agents(inst, moves):
        d = moves[agent]
        q = inst.rank_of[agent][mstar.partner(agent)] - 1
        for step in range(1, d + 1):
            actions.append(Swap(agent=agent, pos=q - step))
    return _decide(req, total, tuple(actions), Quality.EXACT)


def exact_ex_add(req: SolveRequest) -> ManipulationResult:
    """Fewest additions so that M* restricted to the present agents is stable.

    Two closure runs, one per gender, each assuming the finished market has
    no lonely agent of the opposite kind: seed with the addables married (in
    M*) to original agents, then keep adding the M*-partner of any lonely
    agent that is part of a blocking pair.  The cheaper feasible run wins;
    if both runs end unstable there is no solution at any budget.
    """
    _check_request(req, Goal.EXACT_EX, (ActionKind.ADD,))
    inst = req.instance
    mstar: Matching = req.target

    woman_run = _add_closure(inst, mstar, seed_side=Side.WOMAN)
    man_run = _add_closure(inst, mstar, seed_side=Side.MAN)
    best: list[str] | None = None
    for run in (woman_run, man_run):
        if run is not None and (best is None or len(run) < len(best)):
            best = run
    if best is None:
        return _infeasible(req, always=True, cost=None, quality=Quality.EXACT)
    actions = tuple(Add(agent=a) for a in _sorted_agents(inst, best))
    return _decide(req, len(best), actions, Quality.EXACT)


def _add_closure(inst: Instance, mstar: Matching, seed_side: Side) -> list[str] | None:
    """One gendered closure run; returns the added agents or None.

    ``seed_side`` names the gender whose addable agents married to original
    agents are forced in up front; the loop then chases lonely agents of
    that same gender (their partners are the agents that get added).  The
    run assumes solutions leave no lonely agent of the opposite gender, so
    an agent of the seed gender that some opposite agent would abandon its
    partner for cannot stay lonely.  Each opposite agent's list is scanned
    once, when it becomes present, for the seed-gender agents it covets.
    """
    rank = inst.rank_of
    mask = PresenceMask.initial(inst)
    added: list[str] = []

    seed_addable = inst.addable_women if seed_side is Side.WOMAN else inst.addable_men
    for a in seed_addable:
        partner = mstar.partner(a)
        if partner is not None and partner in mask:
            mask = mask.with_added(inst, a)
            added.append(a)

    coveted: set[str] = set()

    def scan(agent: str) -> None:
        partner = mstar.partner(agent)
        for b in inst.prefs[agent]:
            if b == partner:
                break
            if rank[b].get(agent) is not None:
                coveted.add(b)

    opposite = inst.men if seed_side is Side.WOMAN else inst.women
    for a in opposite:
        if a in mask:
            scan(a)

    side_agents = inst.women if seed_side is Side.WOMAN else inst.men
    queue = [
        a
        for a in side_agents
        if a in mask and mstar.partner(a) not in mask and a in coveted
    ]
    while queue:
        a = queue.pop()
        partner = mstar.partner(a)
        if partner in mask:
            continue
        if partner is None:
            raise AssertionError("matching target left an agent unmatched")
        mask = mask.with_added(inst, partner)
        added.append(partner)
        before = set(coveted)
        scan(partner)
        for b in coveted - before:
            if b in mask and mstar.partner(b) not in mask:
                queue.append(b)

    restricted = _restrict(mstar, mask)
    try:
        engine.check_matching(inst, mask, restricted)
    except ValidationError:
        return None
    if engine.is_stable(inst, mask, restricted):
        return added
    return None


def exact_ex_delete_fpt(req: SolveRequest) -> ManipulationResult:
    """Branching search for the fewest agent deletions making M* stable.

    Some endpoint of the first blocking pair must go (deleting anyone else
    leaves the pair blocking), so branch on the two endpoints with iterative
    deepening on the number of deletions.
    """
    _check_request(req, Goal.EXACT_EX, (ActionKind.DELETE,))
    inst = req.instance
    mstar: Matching = req.target
    base = PresenceMask.initial(inst)
    max_depth = (
        len(base.men) + len(base.women) if req.budget is UNBOUNDED else req.budget
    )

    def search(mask: PresenceMask, depth_left: int) -> list[str] | None:
        blocks = engine.blocking_pairs(inst, mask, _restrict(mstar, mask))
        if not blocks:
            return []
        if depth_left == 0:
            return None
        m, w = blocks[0]
        for victim in (m, w):
            rest = search(mask.with_deleted(victim), depth_left - 1)
            if rest is not None:
                return [victim] + rest
        return None

    for k in range(max_depth + 1):
        found = search(base, k)
        if found is not None:
            if len(found) != k:
                raise AssertionError("deepening found a solution below its level")
            actions = tuple(Delete(agent=a) for a in found)
            return _feasible(req, len(found), actions, Quality.EXACT)
    return _infeasible(req, always=False, cost=None, quality=Quality.EXACT)


# ---------------------------------------------------------------------------
# exact-unique


def _successor_arcs(
    inst: Instance, mstar: Matching, side: Side
) -> tuple[CostDigraph, list[tuple[int, int, list[tuple[str, str]]]]]:
    """Successor-control graph for one side of a stable M*.

    One vertex per matched agent of ``side`` plus a sink.  Walking an
    agent's list below its partner, every opposite agent that prefers this
    agent to its own partner is a successor candidate; making a later
    candidate (or nobody) the successor requires deleting the acceptability
    of all earlier candidates.  Arcs carry those deletion lists; the arc to
    the sink deletes every candidate.  A spanning anti-arborescence into the
    sink is exactly a successor assignment without cycles, which is what
    rules out rotations on this side.
    """
    rank = inst.rank_of
    agents = inst.men if side is Side.MAN else inst.women
    own = mstar.man_to_woman if side is Side.MAN else mstar.woman_to_man
    other_own = mstar.woman_to_man if side is Side.MAN else mstar.man_to_woman
    vid = {a: i for i, a in enumerate(agents)}
    sink = len(agents)

    arcs: list[tuple[int, int, int | float]] = []
    deletions: list[tuple[int, int, list[tuple[str, str]]]] = []
    for a in agents:
        partner = own[a]
        lst = inst.prefs[a]
        start = lst.index(partner) + 1
        pending: list[tuple[str, str]] = []
        for b in lst[start:]:
            b_partner = other_own.get(b)
            if b_partner is None:
                continue
            r = rank[b].get(a)
            if r is None or r >= rank[b][b_partner]:
                continue
            arcs.append((vid[a], vid[b_partner], len(pending)))
            deletions.append((vid[a], vid[b_partner], list(pending)))
            pending.append((a, b) if side is Side.MAN else (b, a))
        arcs.append((vid[a], sink, len(pending)))
        deletions.append((vid[a], sink, list(pending)))
    graph = CostDigraph(vertex_count=sink + 1, arcs=tuple(arcs), sink=sink)
    return graph, deletions


def exact_uni_accdel(req: SolveRequest) -> ManipulationResult:
    """Fewest acceptability deletions making M* the unique stable matching.

    First every blocking pair of M* is deleted (forced).  What remains is to
    destroy all rotations: per side, choose each agent's post-deletion
    successor so the successor graph is acyclic, which is a minimum-weight
    spanning anti-arborescence over per-arc deletion counts.
    """
    _check_request(req, Goal.EXACT_UNI, (ActionKind.ACC_DELETE,))
    inst = req.instance
    mask = PresenceMask.initial(inst)
    mstar = _restrict(req.target, mask)

    block_actions = tuple(
        AccDelete(man=m, woman=w)
        for m, w in engine.blocking_pairs(inst, mask, mstar)
    )
    from .core import apply_actions

    inst1, _ = apply_actions(inst, mask, block_actions)

    all_deletions: set[tuple[str, str]] = set(
        (a.man, a.woman) for a in block_actions
    )
    total = len(block_actions)
    for side in (Side.MAN, Side.WOMAN):
        graph, deletion_lists = _successor_arcs(inst1, mstar, side)
        best = min_anti_arborescence(graph)
        if best is None:
            raise AssertionError("successor graph lost its sink arcs")
        total += best.weight
        for arc_id in best.arcs:
            tail, head, pairs = deletion_lists[arc_id]
            if len(pairs) != graph.arcs[arc_id][2]:
                raise AssertionError("arc weight does not match its deletion list")
            for pair in pairs:
                if pair in all_deletions:
                    raise AssertionError("deletion requested twice across sides")
                all_deletions.add(pair)

    actions = block_actions + tuple(
        AccDelete(man=m, woman=w)
        for m, w in sorted(
            all_deletions - {(a.man, a.woman) for a in block_actions},
            key=lambda p: (inst.decl_index[p[0]], inst.decl_index[p[1]]),
        )
    )
    if len(actions) != total:
        raise AssertionError("action count does not match computed cost")
    return _decide(req, total, actions, Quality.EXACT)


def exact_uni_reorder_xp(req: SolveRequest) -> ManipulationResult:
    """Exact reorder solver for uniqueness, exponential only in the budget.

    Guesses which agents to reorder and what each one's rotation successor
    becomes, rejects contradictory guesses, and checks that the remaining
    freedom suffices by looking for spanning anti-arborescences in the two
    successor-control graphs.  The reordered lists are then read off the
    arborescences.
    """
    _check_request(req, Goal.EXACT_UNI, (ActionKind.REORDER,))
    budget = _require_finite_budget(req)
    inst = req.instance
    mask = PresenceMask.initial(inst)
    mstar = _restrict(req.target, mask)

    present_men = [m for m in inst.men if m in mask.men]
    present_women = [w for w in inst.women if w in mask.women]
    blocks = engine.blocking_pairs(inst, mask, mstar)

    for k in range(budget + 1):
        for j in range(k + 1):
            for x_u in itertools.combinations(present_men, j):
                for x_w in itertools.combinations(present_women, k - j):
                    if any(m not in x_u and w not in x_w for m, w in blocks):
                        continue
                    actions = _uni_reorder_try(inst, mstar, x_u, x_w)
                    if actions is not None:
                        return _feasible(req, k, actions, Quality.EXACT)
    return _infeasible(req, always=False, cost=None, quality=Quality.EXACT)


def _uni_reorder_try(
    inst: Instance, mstar: Matching, x_u: tuple[str, ...], x_w: tuple[str, ...]
) -> tuple[Action, ...] | None:
    """Try every successor guess for one choice of reordered agents."""
    index = inst.decl_index
    chosen = list(x_u) + list(x_w)
    options = []
    for a in chosen:
        partner = mstar.partner(a)
        cands = [
            b
            for b in sorted(inst.prefs[a], key=index.__getitem__)
            if b != partner and mstar.partner(b) is not None
        ]
        options.append(cands + [None])
    for assignment in itertools.product(*options):
        succ = dict(zip(chosen, assignment))
        actions = _uni_reorder_check(inst, mstar, set(x_u), set(x_w), succ)
        if actions is not None:
            return actions
    return None


def _uni_reorder_check(
    inst: Instance,
    mstar: Matching,
    x_u: set[str],
    x_w: set[str],
    succ: dict[str, str | None],
) -> tuple[Action, ...] | None:
    """Filter one full guess and reconstruct the reorders if it is coherent."""
    rank = inst.rank_of
    in_x = x_u | x_w

    for a, t in succ.items():
        if t is None:
            continue
        t_rank_a = rank[t].get(a)
        if t_rank_a is None:
            return None
        if t not in in_x:
            t_partner = mstar.partner(t)
            if t_partner is None or t_rank_a >= rank[t][t_partner]:
                return None
    for m in x_u:
        if succ[m] is None:
            for w in inst.women:
                if w in x_w:
                    continue
                w_partner = mstar.partner(w)
                if w_partner is None:
                    continue
                r = rank[w].get(m)
                if r is not None and r < rank[w][w_partner]:
                    return None
    for w in x_w:
        if succ[w] is None:
            for m in inst.men:
                if m in x_u:
                    continue
                m_partner = mstar.partner(m)
                if m_partner is None:
                    continue
                r = rank[m].get(w)
                if r is not None and r < rank[m][m_partner]:
                    return None
    for m in x_u:
        t = succ[m]
        if t is not None and t in x_w and succ[t] == m:
            return None

    chosen_u = _side_control_arborescence(inst, mstar, x_u, x_w, succ, Side.MAN)
    if chosen_u is None:
        return None
    chosen_w = _side_control_arborescence(inst, mstar, x_w, x_u, succ, Side.WOMAN)
    if chosen_w is None:
        return None

    actions = []
    for a in sorted(x_u | x_w, key=inst.decl_index.__getitem__):
        if inst.side(a) is Side.MAN:
            firsts = chosen_w.get(a, ())
        else:
            firsts = chosen_u.get(a, ())
        partner = mstar.partner(a)
        placed = set(firsts) | {partner}
        s = succ[a]
        head = list(firsts) + [partner]
        if s is not None:
            head.append(s)
            placed.add(s)
        rest = [b for b in inst.prefs[a] if b not in placed]
        actions.append(Reorder(agent=a, order=tuple(head + rest)))
    return tuple(actions)


def _side_control_arborescence(
    inst: Instance,
    mstar: Matching,
    x_same: set[str],
    x_other: set[str],
    succ: dict[str, str | None],
    side: Side,
) -> dict[str, tuple[str, ...]] | None:
    """Anti-arborescence of one side's successor-control graph, or None.

    Vertices are the matched agents of ``side``.  Agents in ``x_same`` have
    their successor fixed by the guess; the rest keep their first unreordered
    candidate but may instead adopt any reordered opposite agent lying above
    it (and below their partner).  On success, returns for each reordered
    opposite agent b the agents of ``side`` whose chosen arc runs to b's
    partner, sorted by declaration index: exactly the agents b must rank
    above its own partner.
    """
    rank = inst.rank_of
    agents = inst.men if side is Side.MAN else inst.women
    own = mstar.man_to_woman if side is Side.MAN else mstar.woman_to_man
    other_own = mstar.woman_to_man if side is Side.MAN else mstar.man_to_woman
    vid = {a: i for i, a in enumerate(agents)}
    sink = len(agents)

    arcs: list[tuple[int, int, int | float]] = []
    tails: list[str] = []
    for a in agents:
        partner = own[a]
        if a in x_same:
            t = succ[a]
            head = sink if t is None else vid[other_own[t]]
            arcs.append((vid[a], head, 0))
            tails.append(a)
            continue
        lst = inst.prefs[a]
        start = lst.index(partner) + 1
        tilde = None
        for b in lst[start:]:
            if b in x_other:
                continue
            b_partner = other_own.get(b)
            if b_partner is None:
                continue
            r = rank[b].get(a)
            if r is not None and r < rank[b][b_partner]:
                tilde = b
                break
        if tilde is None:
            arcs.append((vid[a], sink, 0))
            tails.append(a)
            window = lst[start:]
        else:
            arcs.append((vid[a], vid[other_own[tilde]], 0))
            tails.append(a)
            window = lst[start:lst.index(tilde)]
        for b in window:
            if b not in x_other or succ.get(b) == a:
                continue
            if rank[b].get(a) is None:
                continue
            arcs.append((vid[a], vid[other_own[b]], 0))
            tails.append(a)

    graph = CostDigraph(vertex_count=sink + 1, arcs=tuple(arcs), sink=sink)
    chosen_ids = spanning_anti_arborescence(graph)
    if chosen_ids is None:
        return None

    firsts: dict[str, list[str]] = {}
    for arc_id in chosen_ids:
        _, head, _ = graph.arcs[arc_id]
        if head == sink:
            continue
        head_agent = agents[head]
        b = own[head_agent]
        if b in x_other:
            firsts.setdefault(b, []).append(tails[arc_id])
    return {
        b: tuple(sorted(lst, key=inst.decl_index.__getitem__))
        for b, lst in firsts.items()
    }


def exact_uni_bruteforce(req: SolveRequest) -> ManipulationResult:
    """Exhaustive uniqueness solver for swaps, agent deletions, and additions.

    Same canonical enumerations as the constructive brute force, but each
    state is tested with the full uniqueness check of the restricted M*.
    """
    _check_request(
        req, Goal.EXACT_UNI, (ActionKind.SWAP, ActionKind.DELETE, ActionKind.ADD)
    )
    inst = req.instance
    mstar: Matching = req.target
    cap = _Cap()
    goal_check = _uni_goal_checker(mstar)
    quality = Quality.EXACT_WITHIN_PARAMETER
    base = PresenceMask.initial(inst)

    if req.action is ActionKind.ADD:
        return _bruteforce_add(req, goal_check, cap, quality)

    budget = _require_finite_budget(req)
    if req.action is ActionKind.SWAP:
        for k in range(budget + 1):
            for table, actions, cost in _iter_swap_states(inst, k, cap):
                inst2 = replace(inst, pref_table=table)
                if goal_check(inst2, base):
                    return _feasible(req, cost, actions, quality)
        return _infeasible(req, always=False, cost=None, quality=quality)

    originals = _sorted_agents(inst, base.men | base.women)
    for k in range(budget + 1):
        for combo in itertools.combinations(originals, k):
            cap.tick()
            mask = base
            for a in combo:
                mask = mask.with_deleted(a)
            if goal_check(inst, mask):
                actions = tuple(Delete(agent=a) for a in combo)
                return _feasible(req, k, actions, quality)
    return _infeasible(req, always=False, cost=None, quality=quality)


# ---------------------------------------------------------------------------
# partial prescriptions


def exact_partial(req: SolveRequest, partial: Matching) -> ManipulationResult:
    """Exact-exists solving when only part of M* is prescribed.

    Enumerates every completion of the partial matching to a perfect
    matching (unmatched men in declaration order against permutations of
    the unmatched women) and keeps the cheapest exact-exists answer.  The
    number of completions is factorial in the number of unmatched pairs, so
    the state cap guards it.
    """
    _check_request_partial(req, partial)
    inst = req.instance
    mask = PresenceMask.initial(inst)
    engine.check_matching(inst, mask, partial)

    matched = {a for pair in partial.pairs for a in pair}
    free_men = [m for m in inst.men if m in mask.men and m not in matched]
    free_women = [w for w in inst.women if w in mask.women and w not in matched]
    if len(free_men) != len(free_women):
        raise ValidationError("partial matching leaves unequal numbers unmatched")
    if math.factorial(len(free_women)) > enumeration_cap():
        raise CapExceededError(
            f"{len(free_women)} unmatched pairs exceed the completion cap"
        )

    inner_op = {
        ActionKind.SWAP: exact_ex_swap,
        ActionKind.ACC_DELETE: exact_ex_accdel,
        ActionKind.REORDER: exact_ex_reorder,
    }[req.action]
    rank = inst.rank_of

    best: tuple[int, str, Matching, ManipulationResult] | None = None
    for perm in itertools.permutations(free_women):
        extra = list(zip(free_men, perm))
        if any(w not in rank[m] for m, w in extra):
            continue
        completion = matching_from_pairs(set(partial.pairs) | set(extra))
        inner = inner_op(
            SolveRequest(
                instance=inst,
                goal=Goal.EXACT_EX,
                action=req.action,
                budget=UNBOUNDED,
                target=completion,
            )
        )
        if inner.status is not Status.FEASIBLE:
            continue
        key = (inner.cost, serialize_actions(inner.actions), completion, inner)
        if best is None or key[:2] < best[:2]:
            best = key

    if best is None:
        return _infeasible(
            req, always=False, cost=None, quality=Quality.EXACT_WITHIN_PARAMETER
        )
    cost, _, completion, inner = best
    completed = SolveRequest(
        instance=inst,
        goal=Goal.EXACT_EX,
        action=req.action,
        budget=req.budget,
        target=completion,
    )
    if _within(cost, req.budget):
        return _feasible(completed, cost, inner.actions, Quality.EXACT_WITHIN_PARAMETER)
    return _infeasible(req, always=False, cost=cost, quality=Quality.EXACT_WITHIN_PARAMETER)


def _check_request_partial(req: SolveRequest, partial: Matching) -> None:
    if req.goal is not Goal.EXACT_EX:
        raise ValidationError("partial prescriptions support the exact-exists goal only")
    if req.action not in (ActionKind.SWAP, ActionKind.ACC_DELETE, ActionKind.REORDER):
        raise ValidationError(
            "partial prescriptions support Swap, AccDelete, and Reorder only"
        )
    if not isinstance(partial, Matching):
        raise ValidationError("partial must be a Matching")
    _require_complete(req.instance)
    if req.budget is not UNBOUNDED:
        if not isinstance(req.budget, int) or isinstance(req.budget, bool) or req.budget < 0:
            raise ValidationError("budget must be a nonnegative integer or UNBOUNDED")


# ---------------------------------------------------------------------------
# dispatch


def solve(req: SolveRequest, algo: str = "auto") -> ManipulationResult:
    """Route a request to the right solver.

    ``algo`` picks a specific algorithm family where several exist:
    ``approx2`` and ``xp`` for reorder cells, ``bruteforce`` for the
    enumeration cells, ``fpt`` for the exact-exists deletion solver.
    ``auto`` chooses the best exact algorithm available for the cell,
    falling back to the 2-approximation only for unbounded constructive
    reorder requests.
    """
    if algo == "approx2":
        return const_ex_reorder_approx2(req)
    if algo == "xp":
        if req.goal is Goal.CONST_EX:
            return const_ex_reorder_xp(req)
        if req.goal is Goal.EXACT_UNI:
            return exact_uni_reorder_xp(req)
        raise ValidationError("algo 'xp' applies to constructive or uniqueness reorders")
    if algo == "bruteforce":
        if req.goal is Goal.CONST_EX:
            return const_ex_bruteforce(req)
        if req.goal is Goal.EXACT_UNI:
            return exact_uni_bruteforce(req)
        raise ValidationError(
            "algo 'bruteforce' applies to constructive or uniqueness cells"
        )
    if algo == "fpt":
        return exact_ex_delete_fpt(req)
    if algo != "auto":
        raise ValidationError(f"unknown algo {algo!r}")

    table = {
        (Goal.CONST_EX, ActionKind.DELETE): const_ex_delete,
        (Goal.CONST_EX, ActionKind.SWAP): const_ex_bruteforce,
        (Goal.CONST_EX, ActionKind.ACC_DELETE): const_ex_bruteforce,
        (Goal.CONST_EX, ActionKind.ADD): const_ex_bruteforce,
        (Goal.DEST_EX, ActionKind.DELETE): dest_ex_delete,
        (Goal.EXACT_EX, ActionKind.SWAP): exact_ex_swap,
        (Goal.EXACT_EX, ActionKind.REORDER): exact_ex_reorder,
        (Goal.EXACT_EX, ActionKind.ACC_DELETE): exact_ex_accdel,
        (Goal.EXACT_EX, ActionKind.DELETE): exact_ex_delete_fpt,
        (Goal.EXACT_EX, ActionKind.ADD): exact_ex_add,
        (Goal.EXACT_UNI, ActionKind.ACC_DELETE): exact_uni_accdel,
        (Goal.EXACT_UNI, ActionKind.REORDER): exact_uni_reorder_xp,
        (Goal.EXACT_UNI, ActionKind.SWAP): exact_uni_bruteforce,
        (Goal.EXACT_UNI, ActionKind.DELETE): exact_uni_bruteforce,
        (Goal.EXACT_UNI, ActionKind.ADD): exact_uni_bruteforce,
    }
    if req.goal is Goal.CONST_EX and req.action is ActionKind.REORDER:
        if req.budget is UNBOUNDED:
            return const_ex_reorder_approx2(req)
        return const_ex_reorder_xp(req)
    op = table.get((req.goal, req.action))
    if op is None:
        raise ValidationError(
            f"no solver for goal {req.goal.value} with action {req.action.value}"
        )
    return op(req)
