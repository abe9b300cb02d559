"""Brute-force oracles, seeded instance generation, and reduction gadgets.

The solvers in :mod:`smbribe.solvers` earn trust by being checked against
something slower and simpler.  This module supplies that something:

* :func:`enumerate_stable` lists every stable matching of a small instance
  by exhaustive recursion with a definitional stability check at the leaves.
* :func:`oracle_min_manipulation` answers the same requests as
  :func:`smbribe.solvers.solve`, but by enumerating the entire action space
  and re-checking the goal from first principles.  It shares only the data
  types and the engine's definitional checks with the solvers; none of the
  solver search logic is reused.
* :func:`generate_instance` produces uniform random complete instances from
  a single integer seed, byte-reproducibly.
* The ``gadget_*`` factories build instances from classic hard problems
  (clique, independent set, hitting set) whose manipulation feasibility is
  known from the source instance, so solvers can be cross-examined on
  inputs with adversarial structure rather than only random ones.

Everything here is deterministic.  Enumerations are guarded by explicit
caps and raise :class:`~smbribe.core.CapExceededError` rather than silently
truncating; a truncated oracle would be worse than none.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

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
    make_instance,
    matching_from_pairs,
    present_men,
    present_women,
)
from . import engine
from .rng import SplitMix64
from .solvers import (
    ActionKind,
    Goal,
    ManipulationResult,
    Quality,
    SolveRequest,
    Status,
)

DEFAULT_ENUM_AGENTS = 16

__all__ = [
    "DEFAULT_ENUM_AGENTS",
    "GadgetOutput",
    "SetSystem",
    "SimpleGraph",
    "enumerate_stable",
    "gadget_clique_accdel_reorder",
    "gadget_clique_add",
    "gadget_dummy_block",
    "gadget_hs_add",
    "gadget_hs_reorder",
    "gadget_is_delete",
    "generate_instance",
    "has_clique",
    "has_hitting_set",
    "has_independent_set",
    "oracle_min_manipulation",
]


# ---------------------------------------------------------------------------
# source-problem containers


@dataclass(frozen=True)
class SimpleGraph:
    """An undirected graph on vertices ``0 .. vertex_count - 1``.

    Edges are stored as ordered pairs ``(a, b)`` with ``a < b``; self loops
    and duplicates are rejected.  All derived orders (edge list, neighbor
    list, incident-edge list) are ascending, which the gadget factories
    rely on for deterministic output.
    """

    vertex_count: int
    edges: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.vertex_count < 0:
            raise ValidationError("vertex_count must be nonnegative")
        for edge in self.edges:
            if len(edge) != 2:
                raise ValidationError(f"edge {edge!r} is not a pair")
            a, b = edge
            if a == b:
                raise ValidationError(f"self-loop at vertex {a}")
            if not (0 <= a < b < self.vertex_count):
                raise ValidationError(f"edge {edge!r} out of range or unordered")

    @classmethod
    def from_edges(
        cls, vertex_count: int, edges: Iterable[tuple[int, int]]
    ) -> "SimpleGraph":
        """Build a graph, normalizing each edge to ``(min, max)``."""
        normalized = frozenset(
            (min(a, b), max(a, b)) for a, b in edges
        )
        return cls(vertex_count, normalized)

    def edge_list(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.edges))

    def neighbors(self, v: int) -> tuple[int, ...]:
        out = [b if a == v else a for a, b in self.edges if v in (a, b)]
        return tuple(sorted(out))

    def incident_edges(self, v: int) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(e for e in self.edges if v in e))


@dataclass(frozen=True)
class SetSystem:
    """A hitting set input: a universe ``{1 .. universe_size}`` and families.

    Families keep their declaration order; elements are one-based so the
    generated agent names read naturally (``wZ_1`` is element 1).
    """

    universe_size: int
    families: tuple[frozenset[int], ...]

    def __post_init__(self):
        if self.universe_size < 0:
            raise ValidationError("universe_size must be nonnegative")
        for fam in self.families:
            if not fam:
                raise ValidationError("families must be nonempty")
            if not all(1 <= z <= self.universe_size for z in fam):
                raise ValidationError(
                    f"family {sorted(fam)!r} is not a subset of the universe"
                )


@dataclass(frozen=True)
class GadgetOutput:
    """A reduction's output: an instance plus the goal payload and budget.

    Exactly one of ``target_pair`` and ``target_matching`` is set, matching
    the goal kind the reduction was designed for.  The note names the source
    problem and parameters so failing tests are debuggable from the record
    alone.
    """

    instance: Instance
    budget: int | float
    note: str
    target_pair: tuple[str, str] | None = None
    target_matching: Matching | None = None

    def __post_init__(self):
        if (self.target_pair is None) == (self.target_matching is None):
            raise ValidationError(
                "exactly one of target_pair and target_matching must be set"
            )


def has_clique(g: SimpleGraph, k: int) -> bool:
    """Whether ``g`` contains ``k`` pairwise adjacent vertices."""
    if k <= 1:
        return k <= 0 or g.vertex_count >= 1
    for combo in itertools.combinations(range(g.vertex_count), k):
        if all((a, b) in g.edges for a, b in itertools.combinations(combo, 2)):
            return True
    return False


def has_independent_set(g: SimpleGraph, k: int) -> bool:
    """Whether ``g`` contains ``k`` pairwise non-adjacent vertices."""
    if k <= 0:
        return True
    for combo in itertools.combinations(range(g.vertex_count), k):
        if not any(
            (a, b) in g.edges for a, b in itertools.combinations(combo, 2)
        ):
            return True
    return False


def has_hitting_set(s: SetSystem, k: int) -> bool:
    """Whether some set of at most ``k`` elements meets every family."""
    universe = range(1, s.universe_size + 1)
    for size in range(0, min(k, s.universe_size) + 1):
        for combo in itertools.combinations(universe, size):
            chosen = set(combo)
            if all(chosen & fam for fam in s.families):
                return True
    return False


# ---------------------------------------------------------------------------
# exhaustive stable-matching enumeration


def enumerate_stable(
    inst: Instance, mask: PresenceMask, cap: int = DEFAULT_ENUM_AGENTS
) -> list[Matching]:
    """Every stable matching of the present sub-instance, exhaustively.

    Men are assigned in declaration order; each man tries every acceptable
    present woman and then staying single.  Partial assignments are pruned
    as soon as two already-decided agents form a blocking pair, which is
    sound because neither partner can change later.  Leaves are confirmed
    with the engine's definitional stability check, so the pruning is an
    optimization only.

    Raises :class:`CapExceededError` when more than ``cap`` agents are
    present.  Callers who knowingly need more pass a larger cap.
    """
    men = present_men(inst, mask)
    women = present_women(inst, mask)
    if len(men) + len(women) > cap:
        raise CapExceededError(
            f"{len(men) + len(women)} agents exceed the enumeration cap {cap}"
        )
    rank = inst.rank_of
    women_present = frozenset(women)
    choices = {
        m: tuple(w for w in inst.prefs[m] if w in women_present) for m in men
    }
    man_order = {m: i for i, m in enumerate(men)}
    suitors = {w: [] for w in women}
    for m in men:
        for w in choices[m]:
            suitors[w].append(m)
    undecided = {w: len(ms) for w, ms in suitors.items()}
    found: list[Matching] = []
    partner: dict[str, str] = {}

    def decided_block(step: int, new_man: str, new_woman: str | None) -> bool:
        # Prune on a blocking pair between two agents whose assignments
        # are both final: an assigned woman's partner never changes, and
        # a man is final once his recursion step has passed.
        if new_woman is not None:
            new_rank = rank[new_man][new_woman]
        for w in choices[new_man]:
            if new_woman is not None and rank[new_man][w] >= new_rank:
                break
            holder = partner.get(w)
            if holder is not None and rank[w][new_man] < rank[w][holder]:
                return True
        if new_woman is not None:
            for m in inst.prefs[new_woman]:
                if m == new_man:
                    break
                order = man_order.get(m)
                if order is None or order >= step:
                    continue
                own = partner.get(m)
                if own is None or rank[m][new_woman] < rank[m][own]:
                    return True
        return False

    def forever_single_block(step: int, chosen: str | None) -> bool:
        # A still-single woman whose every candidate has now decided can
        # never be matched, so a decided man who is single or prefers her
        # to his partner is a permanent blocking pair.
        man = men[step]
        for w in choices[man]:
            if w == chosen or undecided[w] or w in partner:
                continue
            for m in suitors[w]:
                order = man_order[m]
                if order > step:
                    continue
                if order == step:
                    if chosen is None or rank[man][w] < rank[man][chosen]:
                        return True
                    continue
                own = partner.get(m)
                if own is None or rank[m][w] < rank[m][own]:
                    return True
        return False

    def recurse(i: int) -> None:
        if i == len(men):
            matching = matching_from_pairs(
                (m, w) for m, w in partner.items() if m in man_order
            )
            if engine.is_stable(inst, mask, matching):
                found.append(matching)
            return
        m = men[i]
        for w in choices[m]:
            undecided[w] -= 1
        for w in choices[m]:
            if w in partner:
                continue
            if decided_block(i, m, w):
                continue
            if forever_single_block(i, w):
                continue
            partner[m] = w
            partner[w] = m
            recurse(i + 1)
            del partner[m], partner[w]
        if not decided_block(i, m, None) and not forever_single_block(i, None):
            recurse(i + 1)
        for w in choices[m]:
            undecided[w] += 1

    recurse(0)
    return found


# ---------------------------------------------------------------------------
# the manipulation oracle


def oracle_min_manipulation(
    req: SolveRequest,
    state_cap: int | None = None,
    agent_cap: int | None = None,
) -> ManipulationResult:
    """Exact optimum by exhausting the action space, cheapest states first.

    The action space is enumerated literally: every per-agent permutation
    combination for Swap (cost = total adjacent transpositions), every
    touched-agent set with every non-identity permutation for Reorder,
    every acceptable-pair subset for AccDelete, every original-agent subset
    for Delete, and every addable subset for Add.  Under the
    Constructive-Exists goal, Reorder plans never touch the two target
    agents' own lists; that pairing defines the problem the solvers answer
    (otherwise reordering both targets to rank each other first would
    always cost two).  Goals are re-checked definitionally on the
    manipulated instance, via full enumeration of stable matchings for the
    existence goals.

    ``state_cap`` bounds the number of enumerated manipulation states
    (default: :func:`smbribe.core.enumeration_cap`); ``agent_cap`` bounds
    the per-state stable-matching enumeration (default 16 agents).  Both
    overruns raise :class:`CapExceededError`.
    """
    if state_cap is None:
        state_cap = enumeration_cap()
    if agent_cap is None:
        agent_cap = DEFAULT_ENUM_AGENTS
    _oracle_validate(req)
    if req.action is ActionKind.ADD:
        return _oracle_add(req, state_cap, agent_cap)

    inst = req.instance
    if req.goal is Goal.CONST_EX:
        man, woman = req.target
        if inst.rank_of[man].get(woman) is None:
            # No list edit or removal ever creates acceptability, so the
            # pair can never enter any matching at all.
            return ManipulationResult(
                status=Status.INFEASIBLE_ALWAYS,
                cost=None,
                actions=(),
                witness_instance=None,
                witness_mask=None,
                witness_matching=None,
                quality=Quality.EXACT,
            )

    max_cost, count_states = _space_size(req)
    if count_states > state_cap:
        raise CapExceededError(
            f"oracle action space has {count_states} states, cap is {state_cap}"
        )
    budget = req.budget
    limit = max_cost if budget is UNBOUNDED else min(int(budget), max_cost)
    for k in range(0, limit + 1):
        for actions in _iter_action_states(req, k):
            inst2, mask2 = apply_actions(inst, PresenceMask.initial(inst), actions)
            witness = _goal_witness(req, inst2, mask2, agent_cap)
            if witness is not None:
                return ManipulationResult(
                    status=Status.FEASIBLE,
                    cost=k,
                    actions=actions,
                    witness_instance=inst2,
                    witness_mask=mask2,
                    witness_matching=witness,
                    quality=Quality.EXACT,
                )
    return ManipulationResult(
        status=Status.INFEASIBLE_WITHIN_BUDGET,
        cost=None,
        actions=(),
        witness_instance=None,
        witness_mask=None,
        witness_matching=None,
        quality=Quality.EXACT,
    )


def _oracle_validate(req: SolveRequest) -> None:
    inst = req.instance
    budget = req.budget
    if budget is not UNBOUNDED:
        if not isinstance(budget, int) or isinstance(budget, bool) or budget < 0:
            raise ValidationError("budget must be a nonnegative integer or UNBOUNDED")
    if req.goal in (Goal.CONST_EX, Goal.DEST_EX):
        target = req.target
        if (
            not isinstance(target, tuple)
            or len(target) != 2
            or not all(isinstance(a, str) for a in target)
        ):
            raise ValidationError("this goal takes a (man, woman) target pair")
        man, woman = target
        for agent, side in ((man, Side.MAN), (woman, Side.WOMAN)):
            if agent not in inst.decl_index:
                raise ValidationError(f"unknown agent {agent!r} in target pair")
            if inst.side(agent) is not side:
                raise ValidationError(
                    f"target pair must be (man, woman); {agent!r} is on the wrong side"
                )
    else:
        target = req.target
        if not isinstance(target, Matching):
            raise ValidationError("this goal takes a target Matching")
        engine.check_matching(inst, PresenceMask.full(inst), target)
        matched = {a for pair in target.pairs for a in pair}
        addable = set(inst.addable(Side.MAN)) | set(inst.addable(Side.WOMAN))
        declared = set(inst.men) | set(inst.women)
        if req.action is ActionKind.ADD:
            if matched != declared:
                raise ValidationError(
                    "an Add target matching must cover every declared agent"
                )
        else:
            originals = declared - addable
            if matched != originals:
                raise ValidationError(
                    "the target matching must cover exactly the original agents"
                )


def _mutable_agents(inst: Instance) -> tuple[str, ...]:
    """Present agents in declaration order; list edits on absent addable
    agents can never change any present agent's effective list, so the
    oracle's search skips them without losing optimal solutions."""
    mask = PresenceMask.initial(inst)
    return tuple(present_men(inst, mask)) + tuple(present_women(inst, mask))


def _acceptable_pairs(inst: Instance) -> tuple[tuple[str, str], ...]:
    # Validation guarantees mutual acceptability, so the men's stored
    # lists already enumerate every acceptable pair exactly once.
    return tuple((m, w) for m in inst.men for w in inst.prefs[m])


def _original_agents(inst: Instance) -> tuple[str, ...]:
    addable = set(inst.addable(Side.MAN)) | set(inst.addable(Side.WOMAN))
    return tuple(a for a in (*inst.men, *inst.women) if a not in addable)


def _inversions(perm: Sequence[int]) -> int:
    return sum(
        1
        for i in range(len(perm))
        for j in range(i + 1, len(perm))
        if perm[i] > perm[j]
    )


def _perm_pool(length: int) -> dict[int, list[tuple[int, ...]]]:
    """Permutations of ``range(length)`` grouped by inversion count."""
    pool: dict[int, list[tuple[int, ...]]] = {}
    for perm in itertools.permutations(range(length)):
        pool.setdefault(_inversions(perm), []).append(perm)
    return pool


def _bubble_swaps(agent: str, perm: Sequence[int]) -> tuple[Swap, ...]:
    """Adjacent transpositions realizing ``perm`` on the stored list.

    Insertion sort emits one Swap per inversion, mirroring the cost model.
    """
    order = list(perm)
    swaps: list[Swap] = []
    for i in range(1, len(order)):
        j = i
        while j > 0 and order[j - 1] > order[j]:
            order[j - 1], order[j] = order[j], order[j - 1]
            swaps.append(Swap(agent, j - 1))
            j -= 1
    swaps.reverse()
    return tuple(swaps)


def _space_size(req: SolveRequest) -> tuple[int, int]:
    """(maximum meaningful cost, total number of states up to that cost)."""
    inst = req.instance
    kind = req.action
    if kind is ActionKind.SWAP:
        agents = _mutable_agents(inst)
        budget = req.budget
        per_agent = []
        for agent in agents:
            length = len(inst.prefs[agent])
            pool = _perm_pool(length)
            per_agent.append({inv: len(perms) for inv, perms in pool.items()})
        max_cost = sum(max(counts) for counts in per_agent)
        if req.budget is not UNBOUNDED:
            max_cost = min(max_cost, int(req.budget))
        total = [1]
        for counts in per_agent:
            new = [0] * (max_cost + 1)
            for have, ways in enumerate(total):
                for inv, cnt in counts.items():
                    if have + inv <= max_cost:
                        new[have + inv] += ways * cnt
            total = new
        return max_cost, sum(total)
    if kind is ActionKind.REORDER:
        agents = _mutable_agents(inst)
        weights = [
            _factorial(len(inst.prefs[agent])) - 1 for agent in agents
        ]
        max_cost = sum(1 for wgt in weights if wgt > 0)
        if req.budget is not UNBOUNDED:
            max_cost = min(max_cost, int(req.budget))
        total = [1] + [0] * max_cost
        for wgt in weights:
            if wgt <= 0:
                continue
            for have in range(max_cost - 1, -1, -1):
                if total[have]:
                    total[have + 1] += total[have] * wgt
        return max_cost, sum(total)
    if kind is ActionKind.ACC_DELETE:
        pairs = _acceptable_pairs(inst)
        max_cost = len(pairs)
        if req.budget is not UNBOUNDED:
            max_cost = min(max_cost, int(req.budget))
        return max_cost, sum(_binomial(len(pairs), k) for k in range(max_cost + 1))
    if kind is ActionKind.DELETE:
        agents = _original_agents(inst)
        max_cost = len(agents)
        if req.budget is not UNBOUNDED:
            max_cost = min(max_cost, int(req.budget))
        return max_cost, sum(_binomial(len(agents), k) for k in range(max_cost + 1))
    raise ValidationError(f"unsupported action kind {kind}")


def _factorial(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def _binomial(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    out = 1
    for i in range(k):
        out = out * (n - i) // (i + 1)
    return out


def _iter_action_states(
    req: SolveRequest, cost: int
) -> Iterator[tuple[Action, ...]]:
    inst = req.instance
    kind = req.action
    if kind is ActionKind.SWAP:
        yield from _iter_swap_plans(inst, cost)
    elif kind is ActionKind.REORDER:
        yield from _iter_reorder_plans(inst, cost)
    elif kind is ActionKind.ACC_DELETE:
        for combo in itertools.combinations(_acceptable_pairs(inst), cost):
            yield tuple(AccDelete(m, w) for m, w in combo)
    elif kind is ActionKind.DELETE:
        for combo in itertools.combinations(_original_agents(inst), cost):
            yield tuple(Delete(a) for a in combo)
    else:  # pragma: no cover - guarded by _space_size
        raise ValidationError(f"unsupported action kind {kind}")


def _iter_swap_plans(inst: Instance, cost: int) -> Iterator[tuple[Action, ...]]:
    agents = _mutable_agents(inst)
    pools = [_perm_pool(len(inst.prefs[agent])) for agent in agents]

    def spread(i: int, remaining: int, acc: list[Swap]) -> Iterator[tuple[Action, ...]]:
        if i == len(agents):
            if remaining == 0:
                yield tuple(acc)
            return
        pool = pools[i]
        room_after = sum(max(p) for p in pools[i + 1 :]) if i + 1 < len(agents) else 0
        for inv in sorted(pool):
            if inv > remaining:
                break
            if remaining - inv > room_after:
                continue
            for perm in pool[inv]:
                if inv:
                    added = _bubble_swaps(agents[i], perm)
                    acc.extend(added)
                    yield from spread(i + 1, remaining - inv, acc)
                    del acc[len(acc) - len(added) :]
                else:
                    yield from spread(i + 1, remaining, acc)

    yield from spread(0, cost, [])


def _iter_reorder_plans(inst: Instance, cost: int) -> Iterator[tuple[Action, ...]]:
    agents = [a for a in _mutable_agents(inst) if len(inst.prefs[a]) > 1]
    for combo in itertools.combinations(agents, cost):
        per_agent_orders = []
        for agent in combo:
            stored = inst.prefs[agent]
            orders = [
                tuple(stored[i] for i in perm)
                for perm in itertools.permutations(range(len(stored)))
                if perm != tuple(range(len(stored)))
            ]
            per_agent_orders.append(orders)
        for orders in itertools.product(*per_agent_orders):
            yield tuple(
                Reorder(agent, order) for agent, order in zip(combo, orders)
            )


def _restrict_to_present(target: Matching, mask: PresenceMask) -> Matching:
    return matching_from_pairs(
        (m, w) for m, w in target.pairs if m in mask.men and w in mask.women
    )


def _goal_witness(
    req: SolveRequest, inst2: Instance, mask2: PresenceMask, agent_cap: int
) -> Matching | None:
    goal = req.goal
    if goal is Goal.CONST_EX:
        man, woman = req.target
        for matching in enumerate_stable(inst2, mask2, cap=agent_cap):
            if (man, woman) in matching:
                return matching
        return None
    if goal is Goal.DEST_EX:
        man, woman = req.target
        for matching in enumerate_stable(inst2, mask2, cap=agent_cap):
            if (man, woman) not in matching:
                return matching
        return None
    restriction = _restrict_to_present(req.target, mask2)
    try:
        engine.check_matching(inst2, mask2, restriction)
    except ValidationError:
        return None
    if goal is Goal.EXACT_EX:
        if engine.is_stable(inst2, mask2, restriction):
            return restriction
        return None
    if goal is Goal.EXACT_UNI:
        if engine.is_unique_stable(inst2, mask2, restriction):
            return restriction
        return None
    raise ValidationError(f"unsupported goal {goal}")


def _oracle_add(
    req: SolveRequest, state_cap: int, agent_cap: int
) -> ManipulationResult:
    inst = req.instance
    addables = tuple(inst.addable(Side.MAN)) + tuple(inst.addable(Side.WOMAN))
    if 2 ** len(addables) > state_cap:
        raise CapExceededError(
            f"oracle action space has {2 ** len(addables)} states, cap is {state_cap}"
        )
    for size in range(0, len(addables) + 1):
        for combo in itertools.combinations(addables, size):
            actions = tuple(Add(a) for a in combo)
            inst2, mask2 = apply_actions(inst, PresenceMask.initial(inst), actions)
            witness = _goal_witness(req, inst2, mask2, agent_cap)
            if witness is None:
                continue
            if req.budget is UNBOUNDED or size <= req.budget:
                return ManipulationResult(
                    status=Status.FEASIBLE,
                    cost=size,
                    actions=actions,
                    witness_instance=inst2,
                    witness_mask=mask2,
                    witness_matching=witness,
                    quality=Quality.EXACT,
                )
            return ManipulationResult(
                status=Status.INFEASIBLE_WITHIN_BUDGET,
                cost=size,
                actions=(),
                witness_instance=None,
                witness_mask=None,
                witness_matching=None,
                quality=Quality.EXACT,
            )
    return ManipulationResult(
        status=Status.INFEASIBLE_ALWAYS,
        cost=None,
        actions=(),
        witness_instance=None,
        witness_mask=None,
        witness_matching=None,
        quality=Quality.EXACT,
    )


# ---------------------------------------------------------------------------
# seeded random instances


def generate_instance(
    n: int, seed: int, addable_frac: float = 0.0
) -> Instance:
    """A uniform random complete instance, reproducible from the seed.

    Agents are named ``m1 .. mN`` and ``w1 .. wN``.  Every preference list
    is an independent uniform permutation of the full opposite side, drawn
    from a SplitMix64 stream in a frozen order: the men's lists ascending,
    then the women's lists ascending, then the addable sample for each
    side.  ``addable_frac`` marks ``floor(addable_frac * n)`` agents per
    side as addable, sampled without replacement from the same stream.
    """
    if n <= 0:
        raise ValidationError("n must be positive")
    if not 0.0 <= addable_frac <= 1.0:
        raise ValidationError("addable_frac must be within [0, 1]")
    men = [f"m{i}" for i in range(1, n + 1)]
    women = [f"w{i}" for i in range(1, n + 1)]
    rng = SplitMix64(seed)
    prefs: dict[str, tuple[str, ...]] = {}
    for m in men:
        lst = list(women)
        rng.shuffle(lst)
        prefs[m] = tuple(lst)
    for w in women:
        lst = list(men)
        rng.shuffle(lst)
        prefs[w] = tuple(lst)
    count = int(addable_frac * n)
    addable_men: tuple[str, ...] = ()
    addable_women: tuple[str, ...] = ()
    if count:
        index = {name: i for i, name in enumerate(men)}
        addable_men = tuple(sorted(rng.sample(men, count), key=index.__getitem__))
        index = {name: i for i, name in enumerate(women)}
        addable_women = tuple(sorted(rng.sample(women, count), key=index.__getitem__))
    return make_instance(men, women, prefs, addable_men, addable_women)


# ---------------------------------------------------------------------------
# reduction gadgets


def _edge_name(prefix: str, edge: tuple[int, int]) -> str:
    return f"{prefix}_{edge[0] + 1}_{edge[1] + 1}"


def gadget_clique_add(g: SimpleGraph, k: int) -> GadgetOutput:
    """Clique reduction for the constructive-exists goal under Add.

    The target pair (``mStar``, ``wStar``) can be made a stable pair by
    adding at most ``k + C(k, 2)`` agents exactly when the graph has a
    clique of ``k`` vertices: the additions must be the understudies of
    the clique's vertices and edges.  Penalizing women keep ``mStar`` busy
    unless every one of them is absorbed by an edge man, and the ``wTil``
    women absorb exactly ``k`` vertex men, which forces the counts.
    """
    if k < 2:
        raise ValidationError("k must be at least 2")
    n, edges = g.vertex_count, g.edge_list()
    q = k * (k - 1) // 2
    vertex_ids = range(1, n + 1)
    m_star, w_star = "mStar", "wStar"
    m_v = [f"mV_{i}" for i in vertex_ids]
    m_vp = [f"mVp_{i}" for i in vertex_ids]
    m_e = [_edge_name("mE", e) for e in edges]
    m_ep = [_edge_name("mEp", e) for e in edges]
    w_v = [f"wV_{i}" for i in vertex_ids]
    w_e = [_edge_name("wE", e) for e in edges]
    w_til = [f"wTil_{t}" for t in range(1, k + 1)]
    w_pen = [f"wPen_{i}" for i in range(1, q + 1)]
    fill_count = max(0, n + len(edges) - k - q)
    w_fill = [f"wFill_{i}" for i in range(1, fill_count + 1)]

    men = [m_star, *m_v, *m_vp, *m_e, *m_ep]
    women = [w_star, *w_v, *w_e, *w_til, *w_pen, *w_fill]
    prefs: dict[str, tuple[str, ...]] = {}

    edge_index = {e: idx for idx, e in enumerate(edges)}
    for v in range(n):
        incident = g.incident_edges(v)
        prefs[w_v[v]] = (
            m_vp[v],
            *(m_e[edge_index[e]] for e in incident),
            m_v[v],
        )
        prefs[m_vp[v]] = (w_v[v],)
        prefs[m_v[v]] = (w_v[v], *w_til, w_star)
    for idx, (a, b) in enumerate(edges):
        prefs[w_e[idx]] = (m_ep[idx], m_e[idx])
        prefs[m_e[idx]] = (w_e[idx], w_v[a], w_v[b], *w_pen)
        prefs[m_ep[idx]] = (w_e[idx],)
    for name in w_til:
        prefs[name] = tuple(m_v)
    for name in w_pen:
        prefs[name] = (*m_e, m_star)
    prefs[m_star] = (*w_pen, w_star)
    prefs[w_star] = (*m_v, m_star)
    for name in w_fill:
        prefs[name] = tuple(men)
    for man in men:
        prefs[man] = (*prefs[man], *w_fill)

    inst = make_instance(
        men, women, prefs, addable_men=(*m_vp, *m_ep), addable_women=()
    )
    note = (
        f"clique reduction (add): {n} vertices, {len(edges)} edges, "
        f"clique size {k}; the target pair becomes stable within budget "
        f"iff a {k}-clique exists"
    )
    return GadgetOutput(
        instance=inst,
        budget=k + q,
        note=note,
        target_pair=(m_star, w_star),
    )


def gadget_clique_accdel_reorder(g: SimpleGraph, k: int) -> GadgetOutput:
    """Clique reduction shared by the AccDelete and Reorder actions.

    One instance serves both actions: freeing a vertex gadget costs one
    acceptability deletion or one reorder, freeing an edge gadget likewise,
    and the budget ``C(k, 2) + k`` pays for exactly one clique's worth.
    Faithful for large ``k``; for ``k <= 3`` the special agents admit a
    cheaper direct manipulation, so ground truth at toy scale comes from
    the oracle rather than the construction.
    """
    if k < 2:
        raise ValidationError("k must be at least 2")
    n, edges = g.vertex_count, g.edge_list()
    q = k * (k - 1) // 2
    vertex_ids = range(1, n + 1)
    m_star, w_star = "mStar", "wStar"
    m_v = [f"mV_{i}" for i in vertex_ids]
    m_vp = [f"mVp_{i}" for i in vertex_ids]
    w_v = [f"wV_{i}" for i in vertex_ids]
    w_vp = [f"wVp_{i}" for i in vertex_ids]
    m_e = [_edge_name("mE", e) for e in edges]
    m_ep = [_edge_name("mEp", e) for e in edges]
    m_epp = [_edge_name("mEpp", e) for e in edges]
    w_e = [_edge_name("wE", e) for e in edges]
    w_ep = [_edge_name("wEp", e) for e in edges]
    w_epp = [_edge_name("wEpp", e) for e in edges]
    m_pen = [f"mPen_{i}" for i in range(1, q + 1)]
    w_pen = [f"wPen_{i}" for i in range(1, q + 1)]

    men = [m_star, *m_v, *m_vp, *m_e, *m_ep, *m_epp, *m_pen]
    women = [w_star, *w_v, *w_vp, *w_e, *w_ep, *w_epp, *w_pen]
    prefs: dict[str, tuple[str, ...]] = {}

    edge_index = {e: idx for idx, e in enumerate(edges)}
    for v in range(n):
        incident = g.incident_edges(v)
        prefs[w_v[v]] = (
            m_vp[v],
            *(m_e[edge_index[e]] for e in incident),
            m_v[v],
        )
        prefs[w_vp[v]] = (m_vp[v], m_v[v])
        prefs[m_v[v]] = (
            w_vp[v],
            *(w_e[edge_index[e]] for e in incident),
            w_v[v],
        )
        prefs[m_vp[v]] = (w_vp[v], w_v[v])
    for idx, (a, b) in enumerate(edges):
        prefs[m_e[idx]] = (w_ep[idx], w_v[a], w_v[b], *w_pen)
        prefs[w_e[idx]] = (m_ep[idx], m_v[a], m_v[b], *m_pen)
        prefs[m_ep[idx]] = (w_epp[idx], w_e[idx])
        prefs[w_ep[idx]] = (m_epp[idx], m_e[idx])
        prefs[m_epp[idx]] = (w_epp[idx], w_ep[idx])
        prefs[w_epp[idx]] = (m_epp[idx], m_ep[idx])
    for name in w_pen:
        prefs[name] = (*m_e, m_star)
    for name in m_pen:
        prefs[name] = (*w_e, w_star)
    prefs[m_star] = (*w_pen, w_star)
    prefs[w_star] = (*m_pen, m_star)

    inst = make_instance(men, women, prefs)
    note = (
        f"clique reduction (accdel/reorder): {n} vertices, {len(edges)} "
        f"edges, clique size {k}; budget pays for one clique's vertex and "
        f"edge gadgets; small k admits special-agent shortcuts"
    )
    return GadgetOutput(
        instance=inst,
        budget=q + k,
        note=note,
        target_pair=(m_star, w_star),
    )


def gadget_is_delete(g: SimpleGraph, k: int) -> GadgetOutput:
    """Independent set reduction for the exact goals under Delete.

    Adjacent vertex couples rank each other above their own partners, so
    the identity matching survives deletion of all but an independent
    set's couples.  Each vertex carries ``2 |V|`` dummy couples, more than
    the budget, which forces deletions to remove couples whole.
    """
    if not 0 <= k <= g.vertex_count:
        raise ValidationError("k must be between 0 and the vertex count")
    n = g.vertex_count
    dummy_count = 2 * n
    vertex_ids = range(1, n + 1)
    m_v = [f"mV_{i}" for i in vertex_ids]
    w_v = [f"wV_{i}" for i in vertex_ids]
    m_dum = {
        v: [f"mDum_{v + 1}_{i}" for i in range(1, dummy_count + 1)]
        for v in range(n)
    }
    w_dum = {
        v: [f"wDum_{v + 1}_{i}" for i in range(1, dummy_count + 1)]
        for v in range(n)
    }

    men = [*m_v, *(name for v in range(n) for name in m_dum[v])]
    women = [*w_v, *(name for v in range(n) for name in w_dum[v])]
    prefs: dict[str, tuple[str, ...]] = {}
    for v in range(n):
        neighbor_men = [m_v[u] for u in g.neighbors(v)]
        neighbor_women = [w_v[u] for u in g.neighbors(v)]
        prefs[m_v[v]] = (*neighbor_women, w_v[v], *w_dum[v])
        prefs[w_v[v]] = (*neighbor_men, m_v[v], *m_dum[v])
        for i in range(dummy_count):
            prefs[m_dum[v][i]] = (w_v[v], w_dum[v][i])
            prefs[w_dum[v][i]] = (m_v[v], m_dum[v][i])

    inst = make_instance(men, women, prefs)
    pairs = [(m_v[v], w_v[v]) for v in range(n)]
    pairs.extend(
        (m_dum[v][i], w_dum[v][i]) for v in range(n) for i in range(dummy_count)
    )
    note = (
        f"independent set reduction (delete): {n} vertices, "
        f"{len(g.edges)} edges, set size {k}; the identity matching stays "
        f"stable (indeed uniquely so) within budget iff an independent set "
        f"of size {k} exists"
    )
    return GadgetOutput(
        instance=inst,
        budget=2 * (n - k),
        note=note,
        target_matching=matching_from_pairs(pairs),
    )


def _hs_skeleton(
    s: SetSystem,
) -> tuple[list[str], list[str], dict[str, tuple[str, ...]], list[str], list[str]]:
    """Agents and the set-gadget preferences shared by both hitting-set maps."""
    element_ids = range(1, s.universe_size + 1)
    m_z = [f"mZ_{z}" for z in element_ids]
    w_z = [f"wZ_{z}" for z in element_ids]
    m_f1 = [f"mF1_{j}" for j in range(1, len(s.families) + 1)]
    m_f2 = [f"mF2_{j}" for j in range(1, len(s.families) + 1)]
    w_f1 = [f"wF1_{j}" for j in range(1, len(s.families) + 1)]
    w_f2 = [f"wF2_{j}" for j in range(1, len(s.families) + 1)]
    men = [*m_z, *(name for pair in zip(m_f1, m_f2) for name in pair)]
    women = [*w_z, *(name for pair in zip(w_f1, w_f2) for name in pair)]
    prefs: dict[str, tuple[str, ...]] = {}
    for j, fam in enumerate(s.families):
        members = sorted(fam)
        prefs[m_f1[j]] = (w_f1[j], *(w_z[z - 1] for z in members), w_f2[j])
        prefs[m_f2[j]] = (w_f2[j], w_f1[j])
        prefs[w_f1[j]] = (m_f2[j], m_f1[j])
        prefs[w_f2[j]] = (m_f1[j], m_f2[j])
    return men, women, prefs, m_z, w_z


def _hs_identity_pairs(s: SetSystem) -> list[tuple[str, str]]:
    pairs = [(f"mZ_{z}", f"wZ_{z}") for z in range(1, s.universe_size + 1)]
    for j in range(1, len(s.families) + 1):
        pairs.append((f"mF1_{j}", f"wF1_{j}"))
        pairs.append((f"mF2_{j}", f"wF2_{j}"))
    return pairs


def gadget_hs_reorder(s: SetSystem, k: int) -> GadgetOutput:
    """Hitting set reduction for the exact-unique goal under Reorder.

    Every set gadget hides a two-pair rotation that yields a second stable
    matching.  Reordering an element woman to rank her set men above her
    own partner kills the rotation in every set containing that element,
    so the man-optimal matching becomes unique exactly when the reordered
    elements form a hitting set of size at most ``k``.
    """
    if k < 0:
        raise ValidationError("k must be nonnegative")
    men, women, prefs, m_z, w_z = _hs_skeleton(s)
    for z in range(1, s.universe_size + 1):
        containing = [
            f"mF1_{j}"
            for j, fam in enumerate(s.families, start=1)
            if z in fam
        ]
        prefs[m_z[z - 1]] = (w_z[z - 1],)
        prefs[w_z[z - 1]] = (m_z[z - 1], *containing)
    inst = make_instance(men, women, prefs)
    note = (
        f"hitting set reduction (reorder): universe {s.universe_size}, "
        f"{len(s.families)} families, budget {k}; the man-optimal matching "
        f"becomes the unique stable matching iff a hitting set of size at "
        f"most {k} exists"
    )
    return GadgetOutput(
        instance=inst,
        budget=k,
        note=note,
        target_matching=matching_from_pairs(_hs_identity_pairs(s)),
    )


def gadget_hs_add(s: SetSystem, k: int) -> GadgetOutput:
    """Hitting set reduction for the exact-unique goal under Add.

    Element women arrive pre-reordered (set men above their own partner)
    but absent; adding one activates the rotation-killing preference for
    every set containing her element.  The target matching restricted to
    the present agents is uniquely stable exactly when the added women
    cover every family.
    """
    if k < 0:
        raise ValidationError("k must be nonnegative")
    men, women, prefs, m_z, w_z = _hs_skeleton(s)
    for z in range(1, s.universe_size + 1):
        containing = [
            f"mF1_{j}"
            for j, fam in enumerate(s.families, start=1)
            if z in fam
        ]
        prefs[m_z[z - 1]] = (w_z[z - 1],)
        prefs[w_z[z - 1]] = (*containing, m_z[z - 1])
    inst = make_instance(
        men, women, prefs, addable_men=(), addable_women=tuple(w_z)
    )
    note = (
        f"hitting set reduction (add): universe {s.universe_size}, "
        f"{len(s.families)} families, budget {k}; adding the women of a "
        f"hitting set makes the target matching uniquely stable"
    )
    return GadgetOutput(
        instance=inst,
        budget=k,
        note=note,
        target_matching=matching_from_pairs(_hs_identity_pairs(s)),
    )


def gadget_dummy_block(r: int) -> Instance:
    """A block of ``r`` couples that resists up to ``r - 1`` swaps.

    Each agent ranks the whole opposite side starting from their own
    partner and continuing cyclically.  Any swap plan cheaper than ``r``
    leaves every identity pair in every stable matching, which makes the
    block a building brick for instances that must keep a region inert
    under small manipulations.
    """
    if r < 1:
        raise ValidationError("r must be at least 1")
    men = [f"mDum_{i}" for i in range(1, r + 1)]
    women = [f"wDum_{i}" for i in range(1, r + 1)]
    prefs: dict[str, tuple[str, ...]] = {}
    for i in range(r):
        prefs[men[i]] = tuple(women[(i + t) % r] for t in range(r))
        prefs[women[i]] = tuple(men[(i + t) % r] for t in range(r))
    return make_instance(men, women, prefs)
