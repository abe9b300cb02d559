"""Command-line front door for the solver library.

Every subcommand prints a single versioned result document: canonical JSON
with sorted keys, carrying the outcome fields plus a run manifest (command
echo, seed, instance digest, duration).  Output is deterministic for a fixed
seed and flag set, except for the manifest's ``duration_ms`` line.  The
``gen`` subcommand is the one exception to the JSON rule: it writes the raw
instance text to stdout, byte-identical across runs, and sends its manifest
to stderr.

Exit codes: 0 when the request is feasible or the checked property holds,
1 when a checked property fails, 3 when the goal is infeasible within the
given budget, 4 when the goal is infeasible under any budget, and 2 for
usage, validation, parsing, I/O, and cap errors.
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
import time
from dataclasses import dataclass
from typing import Callable, Sequence

from .core import (
    Instance,
    Matching,
    PresenceMask,
    SmbribeError,
    UNBOUNDED,
    instance_digest,
    matching_from_pairs,
    parse_instance,
    parse_matching,
    serialize_actions,
    serialize_instance,
    serialize_matching,
)
from .engine import blocking_pairs, is_unique_stable
from .rng import SplitMix64
from .solvers import (
    ActionKind,
    Goal,
    ManipulationResult,
    SolveRequest,
    Status,
    solve,
)
from .testkit import (
    SetSystem,
    SimpleGraph,
    enumerate_stable,
    gadget_clique_accdel_reorder,
    gadget_clique_add,
    gadget_dummy_block,
    gadget_hs_add,
    gadget_hs_reorder,
    gadget_is_delete,
    generate_instance,
    oracle_min_manipulation,
)

EXIT_OK = 0
EXIT_PROPERTY_FAILS = 1
EXIT_ERROR = 2
EXIT_INFEASIBLE_WITHIN_BUDGET = 3
EXIT_INFEASIBLE_ALWAYS = 4

_GOALS = {
    "const-ex": Goal.CONST_EX,
    "dest-ex": Goal.DEST_EX,
    "exact-ex": Goal.EXACT_EX,
    "exact-uni": Goal.EXACT_UNI,
}
_ACTIONS = {
    "swap": ActionKind.SWAP,
    "reorder": ActionKind.REORDER,
    "accdel": ActionKind.ACC_DELETE,
    "delete": ActionKind.DELETE,
    "add": ActionKind.ADD,
}
_PAIR_GOALS = (Goal.CONST_EX, Goal.DEST_EX)

# Cells the bench subcommand may run: auto dispatch must reach a solver that
# accepts an unbounded budget, so the hard enumeration cells are excluded.
_BENCH_CELLS = frozenset(
    [
        (Goal.CONST_EX, ActionKind.DELETE),
        (Goal.CONST_EX, ActionKind.REORDER),
        (Goal.DEST_EX, ActionKind.DELETE),
        (Goal.EXACT_EX, ActionKind.SWAP),
        (Goal.EXACT_EX, ActionKind.REORDER),
        (Goal.EXACT_EX, ActionKind.ACC_DELETE),
        (Goal.EXACT_EX, ActionKind.ADD),
        (Goal.EXACT_UNI, ActionKind.ACC_DELETE),
    ]
)


@dataclass(frozen=True)
class RunManifest:
    """Provenance record attached to every result document."""

    command: str
    argv: tuple[str, ...]
    seed: int | None
    instance_digest: str | None
    duration_ms: float

    def to_dict(self) -> dict:
        return {
            "argv": list(self.argv),
            "command": self.command,
            "duration_ms": self.duration_ms,
            "instance_digest": self.instance_digest,
            "seed": self.seed,
        }


class _UsageError(Exception):
    """Bad flag combinations detected after argparse accepts the syntax."""


def _render(document: dict) -> str:
    return json.dumps(document, sort_keys=True, indent=2)


def _emit(
    command: str,
    argv: Sequence[str],
    payload: dict,
    *,
    started: float,
    seed: int | None = None,
    digest: str | None = None,
    stream=None,
) -> None:
    manifest = RunManifest(
        command=command,
        argv=tuple(argv),
        seed=seed,
        instance_digest=digest,
        duration_ms=round((time.perf_counter() - started) * 1000.0, 3),
    )
    document = dict(payload)
    document["format"] = "result 1"
    document["manifest"] = manifest.to_dict()
    print(_render(document), file=stream or sys.stdout)


def _read_text(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load_instance(path: str) -> Instance:
    return parse_instance(_read_text(path))


def _parse_budget(text: str) -> int | float:
    if text.strip().lower() == "inf":
        return UNBOUNDED
    try:
        return int(text)
    except ValueError:
        raise _UsageError(
            f"budget must be a nonnegative integer or 'inf', got {text!r}"
        ) from None


def _parse_pair(text: str) -> tuple[str, str]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2 or not all(parts):
        raise _UsageError(f"expected a pair as '<man>,<woman>', got {text!r}")
    return (parts[0], parts[1])


def _parse_int_list(text: str, flag: str) -> list[int]:
    try:
        values = [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise _UsageError(f"{flag} expects comma-separated integers, got {text!r}")
    if not values:
        raise _UsageError(f"{flag} must name at least one value")
    return values


def _parse_edges(text: str) -> list[tuple[int, int]]:
    """Parse '1,2;1,3' with 1-based vertex numbers into 0-based edges."""
    edges: list[tuple[int, int]] = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        ends = _parse_int_list(chunk, "--edges")
        if len(ends) != 2:
            raise _UsageError(f"each edge needs exactly two endpoints, got {chunk!r}")
        if min(ends) < 1:
            raise _UsageError("vertex numbers in --edges are 1-based")
        edges.append((ends[0] - 1, ends[1] - 1))
    return edges


def _parse_sets(text: str) -> list[frozenset[int]]:
    families: list[frozenset[int]] = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        families.append(frozenset(_parse_int_list(chunk, "--sets")))
    if not families:
        raise _UsageError("--sets must name at least one set")
    return families


def _build_request(args: argparse.Namespace, inst: Instance) -> SolveRequest:
    goal = _GOALS[args.goal]
    action = _ACTIONS[args.action]
    if goal in _PAIR_GOALS:
        if args.pair is None:
            raise _UsageError(f"goal {args.goal} requires --pair")
        if args.matching is not None:
            raise _UsageError(f"goal {args.goal} takes --pair, not --matching")
        target: tuple[str, str] | Matching = _parse_pair(args.pair)
    else:
        if args.matching is None:
            raise _UsageError(f"goal {args.goal} requires --matching")
        if args.pair is not None:
            raise _UsageError(f"goal {args.goal} takes --matching, not --pair")
        target = parse_matching(_read_text(args.matching))
    return SolveRequest(
        instance=inst,
        goal=goal,
        action=action,
        budget=_parse_budget(args.budget),
        target=target,
    )


def _result_payload(result: ManipulationResult) -> dict:
    return {
        "actions": serialize_actions(result.actions) if result.actions else "",
        "cost": result.cost,
        "quality": result.quality.value,
        "status": result.status.value,
        "witness": (
            serialize_matching(result.witness_matching)
            if result.witness_matching is not None
            else None
        ),
    }


def _status_exit(result: ManipulationResult) -> int:
    if result.status is Status.FEASIBLE:
        return EXIT_OK
    if result.status is Status.INFEASIBLE_WITHIN_BUDGET:
        return EXIT_INFEASIBLE_WITHIN_BUDGET
    return EXIT_INFEASIBLE_ALWAYS


# ---------------------------------------------------------------------------
# subcommands


def _cmd_solve(args: argparse.Namespace, argv: Sequence[str], started: float) -> int:
    inst = _load_instance(args.instance)
    req = _build_request(args, inst)
    result = solve(req, args.algo)
    _emit(
        "solve",
        argv,
        _result_payload(result),
        started=started,
        digest=instance_digest(inst),
    )
    return _status_exit(result)


def _cmd_oracle(args: argparse.Namespace, argv: Sequence[str], started: float) -> int:
    inst = _load_instance(args.instance)
    req = _build_request(args, inst)
    result = oracle_min_manipulation(req)
    _emit(
        "oracle",
        argv,
        _result_payload(result),
        started=started,
        digest=instance_digest(inst),
    )
    return _status_exit(result)


def _check_mask(inst: Instance, matching: Matching) -> PresenceMask:
    """Initial mask plus whichever addable agents the matching uses."""
    mask = PresenceMask.initial(inst)
    addable = set(inst.addable_men) | set(inst.addable_women)
    used = [a for pair in matching.pairs for a in pair if a in addable]
    if used:
        mask = mask.with_added(inst, used)
    return mask


def _cmd_check(args: argparse.Namespace, argv: Sequence[str], started: float) -> int:
    inst = _load_instance(args.instance)
    matching = parse_matching(_read_text(args.matching))
    mask = _check_mask(inst, matching)
    blockers = blocking_pairs(inst, mask, matching)
    stable = not blockers
    unique: bool | None = None
    holds = stable
    if args.unique:
        unique = stable and is_unique_stable(inst, mask, matching)
        holds = bool(unique)
    payload = {
        "blocking_pairs": [list(pair) for pair in blockers],
        "stable": stable,
        "unique": unique,
    }
    _emit("check", argv, payload, started=started, digest=instance_digest(inst))
    return EXIT_OK if holds else EXIT_PROPERTY_FAILS


def _cmd_gen(args: argparse.Namespace, argv: Sequence[str], started: float) -> int:
    if args.n < 1:
        raise _UsageError("--n must be at least 1")
    if not 0.0 <= args.addable_frac <= 1.0:
        raise _UsageError("--addable-frac must lie in [0, 1]")
    inst = generate_instance(args.n, args.seed, args.addable_frac)
    text = serialize_instance(inst)
    sys.stdout.write(text)
    _emit(
        "gen",
        argv,
        {"agents": 2 * args.n},
        started=started,
        seed=args.seed,
        digest=instance_digest(inst),
        stream=sys.stderr,
    )
    return EXIT_OK


def _gadget_output(args: argparse.Namespace):
    name = args.name
    if name in ("clique-add", "clique-accdel", "is-delete"):
        if args.vertices is None or args.k is None:
            raise _UsageError(f"gadget {name} requires --vertices and --k")
        graph = SimpleGraph.from_edges(args.vertices, _parse_edges(args.edges or ""))
        if name == "clique-add":
            return gadget_clique_add(graph, args.k)
        if name == "clique-accdel":
            return gadget_clique_accdel_reorder(graph, args.k)
        return gadget_is_delete(graph, args.k)
    if name in ("hs-reorder", "hs-add"):
        if args.universe is None or args.sets is None or args.k is None:
            raise _UsageError(f"gadget {name} requires --universe, --sets, and --k")
        system = SetSystem(args.universe, tuple(_parse_sets(args.sets)))
        if name == "hs-reorder":
            return gadget_hs_reorder(system, args.k)
        return gadget_hs_add(system, args.k)
    # dummy-block
    if args.r is None:
        raise _UsageError("gadget dummy-block requires --r")
    return gadget_dummy_block(args.r)


def _cmd_gadget(args: argparse.Namespace, argv: Sequence[str], started: float) -> int:
    out = _gadget_output(args)
    if isinstance(out, Instance):
        r = args.r
        identity = matching_from_pairs(
            {(f"mDum_{i}", f"wDum_{i}") for i in range(1, r + 1)}
        )
        payload = {
            "budget": r - 1,
            "instance": serialize_instance(out),
            "note": (
                f"distractor block of {r} couples: every plan of at most "
                f"{r - 1} swaps keeps all identity pairs in every stable matching"
            ),
            "target_matching": serialize_matching(identity),
            "target_pair": None,
        }
        digest = instance_digest(out)
    else:
        payload = {
            "budget": "inf" if out.budget is UNBOUNDED else out.budget,
            "instance": serialize_instance(out.instance),
            "note": out.note,
            "target_matching": (
                serialize_matching(out.target_matching)
                if out.target_matching is not None
                else None
            ),
            "target_pair": list(out.target_pair) if out.target_pair else None,
        }
        digest = instance_digest(out.instance)
    _emit("gadget", argv, payload, started=started, digest=digest)
    return EXIT_OK


def _cmd_enum(args: argparse.Namespace, argv: Sequence[str], started: float) -> int:
    inst = _load_instance(args.instance)
    mask = PresenceMask.initial(inst)
    matchings = enumerate_stable(inst, mask)
    rendered = sorted(
        [list(pair) for pair in matching.sorted_pairs()] for matching in matchings
    )
    payload = {"count": len(rendered), "matchings": rendered}
    _emit("enum", argv, payload, started=started, digest=instance_digest(inst))
    return EXIT_OK


def _bench_target(
    goal: Goal, inst: Instance, n: int, rng: SplitMix64
) -> tuple[str, str] | Matching:
    """Draw the per-repetition target; the draw order is part of the contract."""
    if goal in _PAIR_GOALS:
        man = rng.randrange(n)
        woman = rng.randrange(n)
        return (f"m{man + 1}", f"w{woman + 1}")
    women = [f"w{i + 1}" for i in range(n)]
    rng.shuffle(women)
    return matching_from_pairs(
        {(f"m{i + 1}", women[i]) for i in range(n)}
    )


def _cmd_bench(args: argparse.Namespace, argv: Sequence[str], started: float) -> int:
    goal = _GOALS[args.goal]
    action = _ACTIONS[args.action]
    if (goal, action) not in _BENCH_CELLS:
        raise _UsageError(
            f"bench supports polynomial cells only; "
            f"goal {args.goal} with action {args.action} is not one"
        )
    if args.reps < 1:
        raise _UsageError("--reps must be at least 1")
    if not 0.0 <= args.addable_frac <= 1.0:
        raise _UsageError("--addable-frac must lie in [0, 1]")
    n_list = _parse_int_list(args.n_list, "--n-list")
    if min(n_list) < 1:
        raise _UsageError("--n-list entries must be at least 1")

    rng = SplitMix64(args.seed)
    cells = []
    for n in n_list:
        costs: list[int | None] = []
        for _ in range(args.reps):
            inst_seed = rng.next_u64()
            inst = generate_instance(n, inst_seed, args.addable_frac)
            target = _bench_target(goal, inst, n, rng)
            result = solve(
                SolveRequest(
                    instance=inst,
                    goal=goal,
                    action=action,
                    budget=UNBOUNDED,
                    target=target,
                )
            )
            costs.append(result.cost)
        known = [c for c in costs if c is not None]
        mean_cost = statistics.mean(known) if known else None
        median_cost = statistics.median(known) if known else None
        cells.append(
            {
                "costs": costs,
                "mean_cost": mean_cost,
                "mean_cost_over_n": mean_cost / n if mean_cost is not None else None,
                "median_cost": median_cost,
                "median_cost_over_n": (
                    median_cost / n if median_cost is not None else None
                ),
                "n": n,
                "solved": len(known),
            }
        )
    payload = {
        "action": args.action,
        "cells": cells,
        "goal": args.goal,
        "reps": args.reps,
    }
    _emit("bench", argv, payload, started=started, seed=args.seed)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_request_flags(sub: argparse.ArgumentParser, with_algo: bool) -> None:
    sub.add_argument("--goal", required=True, choices=sorted(_GOALS))
    sub.add_argument("--action", required=True, choices=sorted(_ACTIONS))
    sub.add_argument("--instance", required=True, metavar="FILE")
    sub.add_argument("--pair", metavar="MAN,WOMAN")
    sub.add_argument("--matching", metavar="FILE")
    sub.add_argument("--budget", default="inf", metavar="INT|inf")
    if with_algo:
        sub.add_argument(
            "--algo",
            default="auto",
            choices=["auto", "approx2", "xp", "bruteforce", "fpt"],
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smbribe",
        description="Solvers for preference manipulation in stable matching markets.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    solve_p = subs.add_parser("solve", help="run a solver on a manipulation request")
    _add_request_flags(solve_p, with_algo=True)

    oracle_p = subs.add_parser(
        "oracle", help="run the exhaustive reference oracle on a request"
    )
    _add_request_flags(oracle_p, with_algo=False)

    check_p = subs.add_parser("check", help="report blocking pairs and stability")
    check_p.add_argument("--instance", required=True, metavar="FILE")
    check_p.add_argument("--matching", required=True, metavar="FILE")
    check_p.add_argument("--unique", action="store_true")

    gen_p = subs.add_parser("gen", help="generate a random instance deterministically")
    gen_p.add_argument("--n", required=True, type=int)
    gen_p.add_argument("--seed", required=True, type=int)
    gen_p.add_argument("--addable-frac", type=float, default=0.0)

    gadget_p = subs.add_parser("gadget", help="build a reduction instance")
    gadget_p.add_argument(
        "name",
        choices=[
            "clique-add",
            "clique-accdel",
            "is-delete",
            "hs-reorder",
            "hs-add",
            "dummy-block",
        ],
    )
    gadget_p.add_argument("--vertices", type=int)
    gadget_p.add_argument("--edges", default="", metavar="A,B;C,D")
    gadget_p.add_argument("--universe", type=int)
    gadget_p.add_argument("--sets", metavar="1,2;2,3")
    gadget_p.add_argument("--k", type=int)
    gadget_p.add_argument("--r", type=int)

    enum_p = subs.add_parser("enum", help="enumerate all stable matchings")
    enum_p.add_argument("--instance", required=True, metavar="FILE")

    bench_p = subs.add_parser("bench", help="time solver cells on random instances")
    bench_p.add_argument("--goal", required=True, choices=sorted(_GOALS))
    bench_p.add_argument("--action", required=True, choices=sorted(_ACTIONS))
    bench_p.add_argument("--n-list", required=True, metavar="N1,N2,...")
    bench_p.add_argument("--reps", required=True, type=int)
    bench_p.add_argument("--seed", required=True, type=int)
    bench_p.add_argument("--addable-frac", type=float, default=0.0)

    return parser


_HANDLERS: dict[str, Callable[[argparse.Namespace, Sequence[str], float], int]] = {
    "solve": _cmd_solve,
    "oracle": _cmd_oracle,
    "check": _cmd_check,
    "gen": _cmd_gen,
    "gadget": _cmd_gadget,
    "enum": _cmd_enum,
    "bench": _cmd_bench,
}


def main(argv: Sequence[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    argv = list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    started = time.perf_counter()
    handler = _HANDLERS[args.command]
    try:
        return handler(args, argv, started)
    except (_UsageError, SmbribeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
