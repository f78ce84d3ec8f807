"""Requirement resolution and bundle assembly.

Candidate offers surviving the qualitative filters are joined into bundles
by hashing on the compatibility key (region by default), so join work is
proportional to input plus output size rather than the full Cartesian
product a nested-loop would scan.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .catalog import CONTINENTS, ProviderCatalog
from .errors import BadRequestError

CRITERION_NAMES = (
    "total_cost",
    "cost_per_workload",
    "relative_speed",
    "memory",
    "region_match",
    "popularity",
)

# Direction and kind a criterion takes unless a spec overrides it.
DEFAULT_CRITERIA = {
    "total_cost": ("minimize", "quantitative"),
    "cost_per_workload": ("minimize", "quantitative"),
    "relative_speed": ("maximize", "quantitative"),
    "memory": ("maximize", "quantitative"),
    "region_match": ("maximize", "qualitative"),
    "popularity": ("maximize", "quantitative"),
}

VAGUE_DIMENSIONS = ("storage", "compute", "traffic")
VAGUE_LEVELS = ("small", "medium", "large")

# Editable via the engine config; these are the shipped defaults.
DEFAULT_VAGUE_MAPPING = {
    "storage": {"small": 100.0, "medium": 1000.0, "large": 10000.0},  # GB
    "traffic": {"small": 100.0, "medium": 1000.0, "large": 10000.0},  # download GB
    "compute": {"small": 1, "medium": 4, "large": 16},  # VM count
}

JOIN_POLICIES = ("same-region", "same-provider", "none")


@dataclass(frozen=True)
class CriterionSpec:
    name: str
    direction: str = ""
    kind: str = ""

    def __post_init__(self):
        if self.name not in CRITERION_NAMES:
            raise BadRequestError(f"unknown criterion '{self.name}'", parameter="criteria")
        default_direction, default_kind = DEFAULT_CRITERIA[self.name]
        if not self.direction:
            object.__setattr__(self, "direction", default_direction)
        if not self.kind:
            object.__setattr__(self, "kind", default_kind)
        if self.direction not in ("minimize", "maximize"):
            raise BadRequestError(
                f"criterion direction must be minimize or maximize, got '{self.direction}'",
                parameter="criteria",
            )


@dataclass
class RequirementSpec:
    """User demand: quantities (exact or vague), filters, and criteria."""

    usage: "UsageVector"
    continents: frozenset[str] = frozenset()
    os_family: str | None = None
    min_cores: int = 1
    min_memory: float = 0.0
    vague_levels: dict[str, str] = field(default_factory=dict)
    currency: str = "USD"
    criteria: tuple[CriterionSpec, ...] = ()

    def __post_init__(self):
        unknown = self.continents - CONTINENTS
        if unknown:
            raise BadRequestError(
                f"unknown continent(s): {', '.join(sorted(unknown))}", parameter="continent"
            )
        for dim, level in self.vague_levels.items():
            if dim not in VAGUE_DIMENSIONS:
                raise BadRequestError(f"unknown vague dimension '{dim}'", parameter=dim)
            if level not in VAGUE_LEVELS:
                raise BadRequestError(
                    f"vague level for {dim} must be one of {', '.join(VAGUE_LEVELS)}",
                    parameter=dim,
                )
        names = [c.name for c in self.criteria]
        if len(names) != len(set(names)):
            raise BadRequestError("criteria names must be unique", parameter="criteria")


@dataclass(frozen=True)
class CandidateSets:
    """Filter survivors; the N, M, K sets the join combines."""

    compute_candidates: tuple[str, ...]
    storage_candidates: tuple[str, ...]
    transfer_candidates: tuple[str, ...]

    @property
    def sizes(self) -> tuple[int, int, int]:
        return (
            len(self.compute_candidates),
            len(self.storage_candidates),
            len(self.transfer_candidates),
        )

    def is_empty(self) -> bool:
        return 0 in self.sizes


@dataclass
class Bundle:
    """One compute + storage + transfer combination."""

    compute_id: str
    storage_id: str
    transfer_id: str
    region_ids: tuple[str, str, str] = ()
    criteria_values: dict[str, float] = field(default_factory=dict)

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.compute_id, self.storage_id, self.transfer_id)


def resolve_requirements(
    spec: RequirementSpec, mapping: dict | None = None
) -> RequirementSpec:
    """Fill unset usage quantities from vague levels.

    Exact values always win over a vague level for the same dimension. A
    dimension with neither is a bad request: the caller gave us nothing to
    size that component with.
    """
    mapping = mapping or DEFAULT_VAGUE_MAPPING
    usage = replace(spec.usage)

    def resolved(dimension: str, exact, parameter: str):
        if exact is not None:
            return exact
        level = spec.vague_levels.get(dimension)
        if level is None:
            raise BadRequestError(
                f"no exact value or vague level given for dimension '{dimension}'",
                parameter=parameter,
            )
        return mapping[dimension][level]

    usage.storage = float(resolved("storage", usage.storage, "storage"))
    usage.data_download = float(resolved("traffic", usage.data_download, "data_download_size"))
    usage.vm_count = int(resolved("compute", usage.vm_count, "vm_count"))
    if usage.data_upload is None:
        usage.data_upload = 0.0
    usage.validate()

    return replace(spec, usage=usage, vague_levels={})


def filter_candidates(snapshot: ProviderCatalog, spec: RequirementSpec) -> CandidateSets:
    """Select offers passing the qualitative filters of a resolved spec."""

    def region_ok(offer) -> bool:
        if not spec.continents:
            return True
        return snapshot.region(offer.region_id).continent in spec.continents

    compute = tuple(
        o.id
        for o in snapshot.compute_offers
        if region_ok(o)
        and o.cores >= spec.min_cores
        and o.memory >= spec.min_memory
        and (spec.os_family is None or o.os_family == spec.os_family)
    )
    storage = tuple(o.id for o in snapshot.storage_offers if region_ok(o))
    transfer = tuple(o.id for o in snapshot.transfer_offers if region_ok(o))
    return CandidateSets(compute, storage, transfer)


class JoinStats:
    """Counts hash probes so tests can assert join work stays linear."""

    def __init__(self):
        self.probes = 0
        self.inserts = 0

    @property
    def operations(self) -> int:
        return self.probes + self.inserts


def bundle_join(
    snapshot: ProviderCatalog,
    candidates: CandidateSets,
    policy: str = "same-region",
    stats: JoinStats | None = None,
) -> list[Bundle]:
    """Join candidate sets into compatible bundles via hash partitioning.

    Under ``same-region`` (default) all three offers must share one region;
    ``same-provider`` relaxes to one provider; ``none`` emits the full
    product. Output order is deterministic: candidate list order, compute
    outermost.
    """
    if policy not in JOIN_POLICIES:
        raise BadRequestError(f"unknown join policy '{policy}'", parameter="policy")
    stats = stats if stats is not None else JoinStats()

    def make_bundle(c_id: str, s_id: str, t_id: str) -> Bundle:
        return Bundle(
            compute_id=c_id,
            storage_id=s_id,
            transfer_id=t_id,
            region_ids=(
                snapshot.offer(c_id).region_id,
                snapshot.offer(s_id).region_id,
                snapshot.offer(t_id).region_id,
            ),
        )

    if policy == "none":
        return [
            make_bundle(c, s, t)
            for c in candidates.compute_candidates
            for s in candidates.storage_candidates
            for t in candidates.transfer_candidates
        ]

    if policy == "same-region":
        def key_of(offer_id: str) -> str:
            return snapshot.offer(offer_id).region_id
    else:  # same-provider
        def key_of(offer_id: str) -> str:
            return snapshot.region_of_offer(offer_id).provider_id

    storage_by_key: dict[str, list[str]] = {}
    for s_id in candidates.storage_candidates:
        storage_by_key.setdefault(key_of(s_id), []).append(s_id)
        stats.inserts += 1
    transfer_by_key: dict[str, list[str]] = {}
    for t_id in candidates.transfer_candidates:
        transfer_by_key.setdefault(key_of(t_id), []).append(t_id)
        stats.inserts += 1

    bundles = []
    for c_id in candidates.compute_candidates:
        key = key_of(c_id)
        stats.probes += 2
        storage_matches = storage_by_key.get(key, ())
        transfer_matches = transfer_by_key.get(key, ())
        for s_id in storage_matches:
            for t_id in transfer_matches:
                bundles.append(make_bundle(c_id, s_id, t_id))
    return bundles


def _objective_vector(bundle: Bundle, objectives) -> tuple[float, ...]:
    values = []
    for crit in objectives:
        value = bundle.criteria_values[crit.name]
        values.append(value if crit.direction == "minimize" else -value)
    return tuple(values)


def dominates(a: tuple[float, ...], b: tuple[float, ...]) -> bool:
    """Strict Pareto dominance on minimization vectors."""
    better_somewhere = False
    for x, y in zip(a, b):
        if x > y:
            return False
        if x < y:
            better_somewhere = True
    return better_somewhere


def prune_dominated(bundles: list[Bundle], objectives) -> list[Bundle]:
    """Drop bundles strictly dominated on the given objectives.

    Ties on every objective are all kept: weak-Pareto pruning preserves the
    complete set of non-dominated alternatives.
    """
    vectors = [_objective_vector(b, objectives) for b in bundles]
    survivors = []
    for i, b in enumerate(bundles):
        if not any(dominates(vectors[j], vectors[i]) for j in range(len(bundles)) if j != i):
            survivors.append(b)
    return survivors
