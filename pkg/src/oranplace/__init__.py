"""Joint functional-split selection and DU/CU placement.

Simulator for a three-layer radio substrate, an exact brute-force solver
for tiny instances, and reinforcement-learning agents (masked multi-head
PPO with an optional graph-encoder front end, plus baselines) that learn
split selection and virtual DU/CU placement jointly.
"""

from .environment import ActionMask, Observation, PlacementEnv, StepResult, compute_mask
from .evaluator import (
    Allocation,
    CostBreakdown,
    FeasibilityReport,
    NetworkLoad,
    SlaViolations,
    check_connectivity,
    check_sla,
    compute_loads,
    reward,
    total_cost,
)
from .oracle import OracleResult, SearchSpaceTooLarge, enumerate_optimal, verify_reward_alignment
from .splits import DEFAULT_CATALOG, CostParams, SplitId, SplitSpec, make_catalog
from .substrate import (
    Link,
    LinkKind,
    NodeKind,
    SubstrateGraph,
    SubstrateNode,
    TopologyParseError,
    TopologySpec,
    generate_topology,
    parse_topology,
    path_exists,
    serialize_topology,
)
from .traffic import (
    DEFAULT_SLICE_PROFILES,
    Request,
    SessionConfig,
    SliceProfile,
    SliceType,
    advance_sessions,
    initial_requests,
    sample_request,
)

__version__ = "0.1.0"

__all__ = [
    "ActionMask",
    "Allocation",
    "CostBreakdown",
    "CostParams",
    "DEFAULT_CATALOG",
    "DEFAULT_SLICE_PROFILES",
    "FeasibilityReport",
    "Link",
    "LinkKind",
    "NetworkLoad",
    "NodeKind",
    "Observation",
    "OracleResult",
    "PlacementEnv",
    "Request",
    "SearchSpaceTooLarge",
    "SessionConfig",
    "SlaViolations",
    "SliceProfile",
    "SliceType",
    "SplitId",
    "SplitSpec",
    "StepResult",
    "SubstrateGraph",
    "SubstrateNode",
    "TopologyParseError",
    "TopologySpec",
    "check_connectivity",
    "check_sla",
    "compute_loads",
    "compute_mask",
    "enumerate_optimal",
    "generate_topology",
    "initial_requests",
    "make_catalog",
    "parse_topology",
    "path_exists",
    "reward",
    "sample_request",
    "serialize_topology",
    "advance_sessions",
    "total_cost",
    "verify_reward_alignment",
    "__version__",
]
