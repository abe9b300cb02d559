"""Solvers for bribery and control problems in stable marriage instances.

The package splits into six layers.  :mod:`smbribe.core` holds the data
model: instances, presence masks, matchings, manipulation actions, and the
text formats for all three.  :mod:`smbribe.engine` answers stability
questions (blocking pairs, deferred acceptance, uniqueness, rotations).
:mod:`smbribe.graphkit` supplies the graph optimization primitives the
solvers reduce to.  :mod:`smbribe.solvers` implements the manipulation
algorithms themselves, one per goal and action family.
:mod:`smbribe.testkit` provides the independent reference oracle, the
instance generator, and the reduction gadgets used to cross-check the
solvers.  :mod:`smbribe.cli` wraps everything in a command-line tool.
"""

from .core import (
    AccDelete,
    Action,
    ActionError,
    Add,
    CapExceededError,
    Delete,
    Instance,
    Matching,
    ParseError,
    PresenceMask,
    Reorder,
    Side,
    SmbribeError,
    Swap,
    UNBOUNDED,
    ValidationError,
    apply_action,
    apply_actions,
    enumeration_cap,
    instance_digest,
    make_instance,
    matching_from_pairs,
    parse_actions,
    parse_instance,
    parse_matching,
    serialize_actions,
    serialize_instance,
    serialize_matching,
)
from .engine import (
    blocking_pairs,
    check_matching,
    gale_shapley,
    is_stable,
    is_unique_stable,
    rotation_successors,
    stable_pair,
)
from .rng import SplitMix64
from .solvers import (
    ActionKind,
    Goal,
    ManipulationResult,
    Quality,
    SolveRequest,
    Status,
    exact_partial,
    solve,
)
from .testkit import (
    GadgetOutput,
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
    has_clique,
    has_hitting_set,
    has_independent_set,
    oracle_min_manipulation,
)

__version__ = "0.1.0"

__all__ = [
    "AccDelete",
    "Action",
    "ActionError",
    "ActionKind",
    "Add",
    "CapExceededError",
    "Delete",
    "GadgetOutput",
    "Goal",
    "Instance",
    "ManipulationResult",
    "Matching",
    "ParseError",
    "PresenceMask",
    "Quality",
    "Reorder",
    "SetSystem",
    "Side",
    "SimpleGraph",
    "SmbribeError",
    "SolveRequest",
    "SplitMix64",
    "Status",
    "Swap",
    "UNBOUNDED",
    "ValidationError",
    "apply_action",
    "apply_actions",
    "blocking_pairs",
    "check_matching",
    "enumerate_stable",
    "enumeration_cap",
    "exact_partial",
    "gadget_clique_accdel_reorder",
    "gadget_clique_add",
    "gadget_dummy_block",
    "gadget_hs_add",
    "gadget_hs_reorder",
    "gadget_is_delete",
    "gale_shapley",
    "generate_instance",
    "has_clique",
    "has_hitting_set",
    "has_independent_set",
    "instance_digest",
    "is_stable",
    "is_unique_stable",
    "make_instance",
    "matching_from_pairs",
    "oracle_min_manipulation",
    "parse_actions",
    "parse_instance",
    "parse_matching",
    "rotation_successors",
    "serialize_actions",
    "serialize_instance",
    "serialize_matching",
    "solve",
    "stable_pair",
    "__version__",
]
