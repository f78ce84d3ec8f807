"""Decision support for selecting and costing bundles of cloud infrastructure services."""

from .catalog import (
    CatalogStore,
    ProviderCatalog,
    Violation,
    load_catalog,
    load_catalog_file,
    validate_catalog,
)
from .cost import CostBreakdown, UsageVector, bundle_cost, convert_currency, tiered_cost
from .errors import (
    BadRequestError,
    CatalogParseError,
    CatalogValidationError,
    CloudSelectError,
    InconsistentJudgmentsError,
    InvariantError,
)
from .estimate import (
    BatchWorkload,
    TrafficWorkload,
    estimate_batch_runtime,
    estimate_monthly_traffic,
    estimate_serial_years,
    required_parallelism,
)
from .ga import GAParams, ParetoFront, PenaltyConfig, brute_force_pareto, nsga2_run
from .history import HistoryStore, PopularityStats, SelectionRecord
from .matching import (
    Bundle,
    CandidateSets,
    CriterionSpec,
    RequirementSpec,
    bundle_join,
    filter_candidates,
    prune_dominated,
    resolve_requirements,
)
from .mcdm import CriterionWeights, PairwiseMatrix, ahp_weights, normalize_criteria, saw_score
from .recommend import (
    Recommendation,
    hybrid_recommend,
    pareto_search,
    rank_by_cost,
)

__version__ = "0.1.0"
