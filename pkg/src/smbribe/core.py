"""Instances, matchings, manipulation actions, and their file formats.

The package works on stable-marriage instances whose preference lists may be
incomplete.  All agents share one namespace of names; a man and a woman can
only be matched if each lists the other (acceptability is mutual), and each
agent ranks its acceptable partners strictly.  Instances are immutable:
manipulation actions produce a new instance, a new presence mask, or both.

Some agents may be declared as *addable*.  They carry full preference lists
but start out absent; an ``add`` action switches them on.  Presence is
tracked separately from the instance by :class:`PresenceMask`, so deleting an
agent keeps its stored list intact.

Three plain-text formats are defined here:

``.smi``
    instance files::

        smi 1
        men: m1 m2
        women: w1 w2
        addable-men:
        addable-women: w2
        pref m1: w1 w2
        pref m2: w2
        pref w1: m1
        pref w2: m2 m1

``.smm``
    matching files (``smm 1`` header, one ``pair <man> <woman>`` line per
    couple).

``.sma``
    action files: no header, one action per line (``swap``, ``reorder``,
    ``accdel``, ``del``, ``add``).

All formats allow blank lines and ``#`` comments, both full-line and
trailing.
"""

from __future__ import annotations

import hashlib
import math
import os
import re
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping, Sequence, Union

#: Names may use letters, digits, underscore, dot, and dash.
NAME_RE = re.compile(r"[A-Za-z0-9_.-]+\Z")

#: Budget value meaning "no limit on the number of actions".
UNBOUNDED = math.inf

#: Default ceiling on brute-force search states.
DEFAULT_ORACLE_CAP = 10_000_000

#: Environment variable overriding :data:`DEFAULT_ORACLE_CAP`.
ORACLE_CAP_ENV = "SMBRIBE_ORACLE_CAP"


class SmbribeError(Exception):
    """Base class for every error raised by this package."""


class ParseError(SmbribeError):
    """A text payload does not conform to one of the file formats."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class ValidationError(SmbribeError):
    """Well-formed input violates a semantic requirement."""


class ActionError(SmbribeError):
    """A manipulation action cannot be applied to the given state."""


class CapExceededError(SmbribeError):
    """An enumeration grew past its configured safety cap."""


class Side(str, Enum):
    """Which side of the market an agent belongs to."""

    MAN = "man"
    WOMAN = "woman"

    @property
    def opposite(self) -> "Side":
        return Side.WOMAN if self is Side.MAN else Side.MAN


def enumeration_cap(default: int = DEFAULT_ORACLE_CAP) -> int:
    """Return the configured state cap for exhaustive searches.

    Reads ``SMBRIBE_ORACLE_CAP`` from the environment; the variable must hold
    a positive integer when set.
    """
    raw = os.environ.get(ORACLE_CAP_ENV)
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValidationError(
            f"{ORACLE_CAP_ENV} must be a positive integer, got {raw!r}"
        ) from None
    if value <= 0:
        raise ValidationError(f"{ORACLE_CAP_ENV} must be positive, got {value}")
    return value


# ---------------------------------------------------------------------------
# Instances


@dataclass(frozen=True)
class Instance:
    """An immutable stable-marriage instance with optional addable agents.

    ``men`` and ``women`` hold the declared agents in declaration order, and
    ``pref_table`` holds one preference tuple per agent, aligned with
    ``men + women``.  Instances are hashable, so search code can deduplicate
    manipulated variants directly.

    Use :func:`make_instance` or :func:`instance_from_names` instead of the
    raw constructor; they validate names, mutual acceptability, and the
    addable subsets.
    """

    men: tuple[str, ...]
    women: tuple[str, ...]
    pref_table: tuple[tuple[str, ...], ...]
    addable_men: tuple[str, ...] = ()
    addable_women: tuple[str, ...] = ()

    @cached_property
    def prefs(self) -> dict[str, tuple[str, ...]]:
        """Preference list per agent name."""
        return dict(zip(self.men + self.women, self.pref_table))

    @cached_property
    def man_set(self) -> frozenset[str]:
        return frozenset(self.men)

    @cached_property
    def woman_set(self) -> frozenset[str]:
        return frozenset(self.women)

    @cached_property
    def rank_of(self) -> dict[str, dict[str, int]]:
        """``rank_of[a][b]`` is the 1-based position of ``b`` in ``a``'s list."""
        return {
            a: {b: i + 1 for i, b in enumerate(lst)}
            for a, lst in self.prefs.items()
        }

    @cached_property
    def decl_index(self) -> dict[str, int]:
        """Declaration position per agent, men first then women."""
        return {a: i for i, a in enumerate(self.men + self.women)}

    def side(self, agent: str) -> Side:
        if agent in self.man_set:
            return Side.MAN
        if agent in self.woman_set:
            return Side.WOMAN
        raise ValidationError(f"unknown agent {agent!r}")

    def agents(self, side: Side) -> tuple[str, ...]:
        return self.men if side is Side.MAN else self.women

    def addable(self, side: Side) -> tuple[str, ...]:
        return self.addable_men if side is Side.MAN else self.addable_women


def make_instance(
    men: Sequence[str],
    women: Sequence[str],
    prefs: Mapping[str, Sequence[str]],
    addable_men: Sequence[str] = (),
    addable_women: Sequence[str] = (),
) -> Instance:
    """Build a validated :class:`Instance`.

    Checks performed: name syntax, no duplicate or cross-listed agents,
    preference entries confined to declared agents of the opposite side with
    no repeats, mutual acceptability, and addable sets that are subsets of
    the declared agents.
    """
    men = tuple(men)
    women = tuple(women)
    for name in men + women:
        if not NAME_RE.match(name):
            raise ValidationError(f"invalid agent name {name!r}")
    if len(set(men)) != len(men):
        raise ValidationError("duplicate man declared")
    if len(set(women)) != len(women):
        raise ValidationError("duplicate woman declared")
    man_set, woman_set = set(men), set(women)
    overlap = man_set & woman_set
    if overlap:
        raise ValidationError(
            f"agent declared on both sides: {sorted(overlap)[0]!r}"
        )
    for name in prefs:
        if name not in man_set and name not in woman_set:
            raise ValidationError(f"preference list for unknown agent {name!r}")

    table = []
    for agent in men + women:
        lst = tuple(prefs.get(agent, ()))
        opposite = woman_set if agent in man_set else man_set
        seen: set[str] = set()
        for other in lst:
            if other not in opposite:
                raise ValidationError(
                    f"{agent!r} lists {other!r}, which is not a declared agent "
                    "of the opposite side"
                )
            if other in seen:
                raise ValidationError(f"{agent!r} lists {other!r} twice")
            seen.add(other)
        table.append(lst)

    inst = Instance(
        men=men,
        women=women,
        pref_table=tuple(table),
        addable_men=_validated_addables(addable_men, man_set, "addable man"),
        addable_women=_validated_addables(addable_women, woman_set, "addable woman"),
    )
    _check_mutual(inst)
    return inst


def _validated_addables(
    names: Sequence[str], declared: set[str], kind: str
) -> tuple[str, ...]:
    names = tuple(names)
    if len(set(names)) != len(names):
        raise ValidationError(f"duplicate {kind}")
    for name in names:
        if name not in declared:
            raise ValidationError(f"{kind} {name!r} is not a declared agent")
    return names


def _check_mutual(inst: Instance) -> None:
    for m in inst.men:
        for w in inst.prefs[m]:
            if m not in inst.rank_of[w]:
                raise ValidationError(
                    f"acceptability is not mutual: {m!r} lists {w!r} "
                    f"but not vice versa"
                )
    for w in inst.women:
        for m in inst.prefs[w]:
            if w not in inst.rank_of[m]:
                raise ValidationError(
                    f"acceptability is not mutual: {w!r} lists {m!r} "
                    f"but not vice versa"
                )


def instance_from_names(
    men: Mapping[str, Sequence[str]],
    women: Mapping[str, Sequence[str]],
    addable_men: Sequence[str] = (),
    addable_women: Sequence[str] = (),
) -> Instance:
    """Build an instance from two ordered name-to-list mappings."""
    prefs: dict[str, Sequence[str]] = {}
    prefs.update(men)
    prefs.update(women)
    return make_instance(
        tuple(men), tuple(women), prefs, addable_men, addable_women
    )


def rank(inst: Instance, agent: str, other: str) -> int | None:
    """1-based rank of ``other`` in ``agent``'s list, or None if absent.

    The most preferred partner has rank 1.  ``other`` must be a declared
    agent of the opposite side.
    """
    side = inst.side(agent)
    if inst.side(other) is side:
        raise ValidationError(
            f"{agent!r} and {other!r} are on the same side"
        )
    return inst.rank_of[agent].get(other)


# ---------------------------------------------------------------------------
# Presence masks


@dataclass(frozen=True)
class PresenceMask:
    """Which declared agents currently participate in the market."""

    men: frozenset[str]
    women: frozenset[str]

    @classmethod
    def initial(cls, inst: Instance) -> "PresenceMask":
        """Original agents present, addable agents absent."""
        return cls(
            men=inst.man_set - set(inst.addable_men),
            women=inst.woman_set - set(inst.addable_women),
        )

    @classmethod
    def full(cls, inst: Instance) -> "PresenceMask":
        """Every declared agent present, addables included."""
        return cls(men=inst.man_set, women=inst.woman_set)

    def __contains__(self, agent: str) -> bool:
        return agent in self.men or agent in self.women

    def with_deleted(self, agent: str) -> "PresenceMask":
        if agent in self.men:
            return PresenceMask(self.men - {agent}, self.women)
        return PresenceMask(self.men, self.women - {agent})

    def with_added(self, inst: Instance, agent: str) -> "PresenceMask":
        if inst.side(agent) is Side.MAN:
            return PresenceMask(self.men | {agent}, self.women)
        return PresenceMask(self.men, self.women | {agent})


def present_men(inst: Instance, mask: PresenceMask) -> tuple[str, ...]:
    """Present men in declaration order."""
    return tuple(m for m in inst.men if m in mask.men)


def present_women(inst: Instance, mask: PresenceMask) -> tuple[str, ...]:
    """Present women in declaration order."""
    return tuple(w for w in inst.women if w in mask.women)


def effective_prefs(inst: Instance, mask: PresenceMask, agent: str) -> tuple[str, ...]:
    """The agent's stored list restricted to present partners."""
    if inst.side(agent) is Side.MAN:
        present = mask.women
    else:
        present = mask.men
    return tuple(b for b in inst.prefs[agent] if b in present)


# ---------------------------------------------------------------------------
# Matchings


@dataclass(frozen=True)
class Matching:
    """A set of (man, woman) couples; each agent appears at most once."""

    pairs: frozenset[tuple[str, str]]

    @cached_property
    def man_to_woman(self) -> dict[str, str]:
        return {m: w for m, w in self.pairs}

    @cached_property
    def woman_to_man(self) -> dict[str, str]:
        return {w: m for m, w in self.pairs}

    def partner(self, agent: str) -> str | None:
        hit = self.man_to_woman.get(agent)
        if hit is not None:
            return hit
        return self.woman_to_man.get(agent)

    def sorted_pairs(self) -> tuple[tuple[str, str], ...]:
        return tuple(sorted(self.pairs))

    def __contains__(self, pair: tuple[str, str]) -> bool:
        return pair in self.pairs

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.sorted_pairs())


def matching_from_pairs(pairs: Iterable[tuple[str, str]]) -> Matching:
    """Build a :class:`Matching`, rejecting agents that appear twice."""
    seen: set[str] = set()
    frozen = frozenset(pairs)
    for m, w in frozen:
        if m in seen:
            raise ValidationError(f"agent {m!r} is matched more than once")
        if w in seen:
            raise ValidationError(f"agent {w!r} is matched more than once")
        seen.add(m)
        seen.add(w)
    return Matching(frozen)


EMPTY_MATCHING = Matching(frozenset())


# ---------------------------------------------------------------------------
# Actions


@dataclass(frozen=True)
class Swap:
    """Exchange positions ``pos`` and ``pos + 1`` of the agent's stored list."""

    agent: str
    pos: int


@dataclass(frozen=True)
class Reorder:
    """Replace the agent's stored list with a permutation of itself."""

    agent: str
    order: tuple[str, ...]


@dataclass(frozen=True)
class AccDelete:
    """Remove the man and the woman from each other's stored lists."""

    man: str
    woman: str


@dataclass(frozen=True)
class Delete:
    """Mark a present agent absent; its stored list is kept."""

    agent: str


@dataclass(frozen=True)
class Add:
    """Mark an absent addable agent present."""

    agent: str


Action = Union[Swap, Reorder, AccDelete, Delete, Add]


def apply_actions(
    inst: Instance, mask: PresenceMask, actions: Iterable[Action]
) -> tuple[Instance, PresenceMask]:
    """Apply a sequence of actions and return the resulting state.

    Actions are validated one by one against the evolving state; an invalid
    action raises :class:`ActionError` and nothing is returned.  Preference
    lists are thawed once and refrozen once, so long action sequences stay
    cheap.  List edits (swap, reorder, accdel) address the *stored* lists
    and are legal even while the touched agent is absent.
    """
    work: dict[str, list[str]] | None = None
    men_present = mask.men
    women_present = mask.women
    mask_dirty = False

    def thaw() -> dict[str, list[str]]:
        nonlocal work
        if work is None:
            work = {a: list(lst) for a, lst in inst.prefs.items()}
        return work

    for act in actions:
        if isinstance(act, Swap):
            lists = thaw()
            if act.agent not in lists:
                raise ActionError(f"swap: unknown agent {act.agent!r}")
            lst = lists[act.agent]
            if not 0 <= act.pos < len(lst) - 1:
                raise ActionError(
                    f"swap: position {act.pos} out of range for {act.agent!r} "
                    f"(list has {len(lst)} entries)"
                )
            lst[act.pos], lst[act.pos + 1] = lst[act.pos + 1], lst[act.pos]
        elif isinstance(act, Reorder):
            lists = thaw()
            if act.agent not in lists:
                raise ActionError(f"reorder: unknown agent {act.agent!r}")
            lst = lists[act.agent]
            if len(act.order) != len(lst) or set(act.order) != set(lst):
                raise ActionError(
                    f"reorder: new order for {act.agent!r} is not a "
                    "permutation of the current list"
                )
            lists[act.agent] = list(act.order)
        elif isinstance(act, AccDelete):
            lists = thaw()
            if act.man not in inst.man_set:
                raise ActionError(f"accdel: {act.man!r} is not a declared man")
            if act.woman not in inst.woman_set:
                raise ActionError(f"accdel: {act.woman!r} is not a declared woman")
            if act.woman not in lists[act.man]:
                raise ActionError(
                    f"accdel: {act.man!r} and {act.woman!r} do not find "
                    "each other acceptable"
                )
            lists[act.man].remove(act.woman)
            lists[act.woman].remove(act.man)
        elif isinstance(act, Delete):
            side = inst.side(act.agent)  # raises for unknown agents
            if side is Side.MAN:
                if act.agent not in men_present:
                    raise ActionError(f"del: {act.agent!r} is already absent")
                men_present = men_present - {act.agent}
            else:
                if act.agent not in women_present:
                    raise ActionError(f"del: {act.agent!r} is already absent")
                women_present = women_present - {act.agent}
            mask_dirty = True
        elif isinstance(act, Add):
            side = inst.side(act.agent)
            if act.agent not in inst.addable(side):
                raise ActionError(f"add: {act.agent!r} is not addable")
            if side is Side.MAN:
                if act.agent in men_present:
                    raise ActionError(f"add: {act.agent!r} is already present")
                men_present = men_present | {act.agent}
            else:
                if act.agent in women_present:
                    raise ActionError(f"add: {act.agent!r} is already present")
                women_present = women_present | {act.agent}
            mask_dirty = True
        else:
            raise ActionError(f"unknown action {act!r}")

    if work is not None:
        inst = Instance(
            men=inst.men,
            women=inst.women,
            pref_table=tuple(tuple(work[a]) for a in inst.men + inst.women),
            addable_men=inst.addable_men,
            addable_women=inst.addable_women,
        )
    if mask_dirty:
        mask = PresenceMask(frozenset(men_present), frozenset(women_present))
    return inst, mask


def apply_action(
    inst: Instance, mask: PresenceMask, action: Action
) -> tuple[Instance, PresenceMask]:
    """Apply a single action; see :func:`apply_actions`."""
    return apply_actions(inst, mask, (action,))


# ---------------------------------------------------------------------------
# Text formats


def _significant_lines(text: str):
    """Yield (line_no, tokens) with comments and blank lines removed."""
    for line_no, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        tokens = body.split()
        if tokens:
            yield line_no, tokens


def _pref_target(tokens: list[str], line_no: int, keyword: str) -> str:
    if len(tokens) < 2 or not tokens[1].endswith(":"):
        raise ParseError(f"expected '{keyword} <name>: ...'", line_no)
    name = tokens[1][:-1]
    if not NAME_RE.match(name):
        raise ParseError(f"invalid agent name {name!r}", line_no)
    return name


def parse_instance(text: str) -> Instance:
    """Parse ``.smi`` text into a validated :class:`Instance`."""
    lines = _significant_lines(text)
    try:
        line_no, tokens = next(lines)
    except StopIteration:
        raise ParseError("empty instance file, expected 'smi 1' header") from None
    if tokens != ["smi", "1"]:
        raise ParseError("expected header 'smi 1'", line_no)

    men: tuple[str, ...] | None = None
    women: tuple[str, ...] | None = None
    addable_men: tuple[str, ...] = ()
    addable_women: tuple[str, ...] = ()
    seen_addable = {"addable-men:": False, "addable-women:": False}
    prefs: dict[str, list[str]] = {}

    for line_no, tokens in lines:
        head = tokens[0]
        if head in ("men:", "women:"):
            if head == "men:" and men is not None:
                raise ParseError("duplicate men: line", line_no)
            if head == "women:" and women is not None:
                raise ParseError("duplicate women: line", line_no)
            names = tuple(tokens[1:])
            for name in names:
                if not NAME_RE.match(name):
                    raise ParseError(f"invalid agent name {name!r}", line_no)
            if head == "men:":
                men = names
            else:
                women = names
        elif head in ("addable-men:", "addable-women:"):
            if men is None or women is None:
                raise ParseError(
                    f"{head} must come after the men: and women: lines", line_no
                )
            if seen_addable[head]:
                raise ParseError(f"duplicate {head} line", line_no)
            seen_addable[head] = True
            if head == "addable-men:":
                addable_men = tuple(tokens[1:])
            else:
                addable_women = tuple(tokens[1:])
        elif head == "pref":
            if men is None or women is None:
                raise ParseError(
                    "pref lines must come after the men: and women: lines",
                    line_no,
                )
            name = _pref_target(tokens, line_no, "pref")
            if name not in men and name not in women:
                raise ParseError(f"preference list for unknown agent {name!r}", line_no)
            if name in prefs:
                raise ParseError(f"duplicate pref line for {name!r}", line_no)
            prefs[name] = tokens[2:]
        else:
            raise ParseError(f"unknown directive {head!r}", line_no)

    if men is None:
        raise ParseError("missing men: line")
    if women is None:
        raise ParseError("missing women: line")
    return make_instance(men, women, prefs, addable_men, addable_women)


def serialize_instance(inst: Instance) -> str:
    """Render an instance in canonical ``.smi`` form.

    Every agent gets a pref line (men first, then women, both in declaration
    order), and the two addable lines are always present.  The output parses
    back to an equal instance, and its SHA-256 is the instance digest.
    """
    def joined(keyword: str, names: Sequence[str]) -> str:
        return f"{keyword} {' '.join(names)}".rstrip()

    out = ["smi 1"]
    out.append(joined("men:", inst.men))
    out.append(joined("women:", inst.women))
    out.append(joined("addable-men:", inst.addable_men))
    out.append(joined("addable-women:", inst.addable_women))
    for agent in inst.men + inst.women:
        out.append(joined(f"pref {agent}:", inst.prefs[agent]))
    return "\n".join(out) + "\n"


def instance_digest(inst: Instance) -> str:
    """SHA-256 hex digest of the canonical serialization."""
    return hashlib.sha256(serialize_instance(inst).encode("utf-8")).hexdigest()


def parse_matching(text: str) -> Matching:
    """Parse ``.smm`` text into a :class:`Matching`."""
    lines = _significant_lines(text)
    try:
        line_no, tokens = next(lines)
    except StopIteration:
        raise ParseError("empty matching file, expected 'smm 1' header") from None
    if tokens != ["smm", "1"]:
        raise ParseError("expected header 'smm 1'", line_no)

    pairs: list[tuple[str, str]] = []
    used: set[str] = set()
    for line_no, tokens in lines:
        if tokens[0] != "pair" or len(tokens) != 3:
            raise ParseError("expected 'pair <man> <woman>'", line_no)
        m, w = tokens[1], tokens[2]
        for name in (m, w):
            if not NAME_RE.match(name):
                raise ParseError(f"invalid agent name {name!r}", line_no)
            if name in used:
                raise ParseError(f"agent {name!r} is matched more than once", line_no)
            used.add(name)
        pairs.append((m, w))
    return Matching(frozenset(pairs))


def serialize_matching(matching: Matching) -> str:
    """Render a matching in canonical ``.smm`` form (pairs sorted by man)."""
    out = ["smm 1"]
    for m, w in matching.sorted_pairs():
        out.append(f"pair {m} {w}")
    return "\n".join(out) + "\n"


def parse_actions(text: str) -> tuple[Action, ...]:
    """Parse ``.sma`` text into a tuple of actions (order preserved)."""
    actions: list[Action] = []
    for line_no, tokens in _significant_lines(text):
        head = tokens[0]
        if head == "swap":
            if len(tokens) != 3:
                raise ParseError("expected 'swap <agent> <pos>'", line_no)
            try:
                pos = int(tokens[2])
            except ValueError:
                raise ParseError(
                    f"swap position must be an integer, got {tokens[2]!r}", line_no
                ) from None
            if pos < 0:
                raise ParseError("swap position must be non-negative", line_no)
            actions.append(Swap(tokens[1], pos))
        elif head == "reorder":
            name = _pref_target(tokens, line_no, "reorder")
            actions.append(Reorder(name, tuple(tokens[2:])))
        elif head == "accdel":
            if len(tokens) != 3:
                raise ParseError("expected 'accdel <man> <woman>'", line_no)
            actions.append(AccDelete(tokens[1], tokens[2]))
        elif head == "del":
            if len(tokens) != 2:
                raise ParseError("expected 'del <agent>'", line_no)
            actions.append(Delete(tokens[1]))
        elif head == "add":
            if len(tokens) != 2:
                raise ParseError("expected 'add <agent>'", line_no)
            actions.append(Add(tokens[1]))
        else:
            raise ParseError(f"unknown action {head!r}", line_no)
    return tuple(actions)


def serialize_actions(actions: Sequence[Action]) -> str:
    """Render actions in ``.sma`` form, one per line, order preserved."""
    out = []
    for act in actions:
        if isinstance(act, Swap):
            out.append(f"swap {act.agent} {act.pos}")
        elif isinstance(act, Reorder):
            out.append(f"reorder {act.agent}: {' '.join(act.order)}".rstrip())
        elif isinstance(act, AccDelete):
            out.append(f"accdel {act.man} {act.woman}")
        elif isinstance(act, Delete):
            out.append(f"del {act.agent}")
        elif isinstance(act, Add):
            out.append(f"add {act.agent}")
        else:
            raise ValidationError(f"unknown action {act!r}")
    if not out:
        return ""
    return "\n".join(out) + "\n"
