"""End-to-end recommendation pipelines over a catalog snapshot.

Three entry points: plain cost ranking (cheapest bundle first), a seeded
multi-objective Pareto search, and the hybrid recommender that derives
criterion weights from pairwise judgments once, then drives the genetic
search with that weighted score as its scalar fitness. Compatibility is a
constraint, not a hard precondition: genomes combining offers from
different regions are simply infeasible under the default policy, so the
search converges onto the same bundle set the hash join would emit.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .catalog import ProviderCatalog
from .cost import CostBreakdown, bundle_cost
from .errors import BadRequestError, InconsistentJudgmentsError, InvariantError
from .estimate import BatchWorkload, estimate_batch_runtime
from .ga import GAParams, ParetoFront, PenaltyConfig, nsga2_run
from .history import PopularityStats
from .matching import (
    Bundle,
    CandidateSets,
    CriterionSpec,
    RequirementSpec,
    bundle_join,
    filter_candidates,
    resolve_requirements,
)
from .mcdm import CriterionWeights, PairwiseMatrix, ahp_weights, normalize_criteria, saw_score

DEFAULT_CR_THRESHOLD = 0.10


@dataclass
class Recommendation:
    bundle: Bundle
    breakdown: CostBreakdown
    score: float | None = None
    violation: float = 0.0


@dataclass
class ParetoResult:
    front: ParetoFront
    recommendations: list[Recommendation]
    candidates: CandidateSets


class BundleScorer:
    """Computes cost breakdowns, criterion values, and constraint violations.

    One scorer is bound to a resolved requirement spec; breakdowns are cached
    per bundle so GA re-evaluations stay cheap.
    """

    def __init__(
        self,
        snapshot: ProviderCatalog,
        spec: RequirementSpec,
        popularity: PopularityStats | None = None,
        penalties: PenaltyConfig | None = None,
        policy: str = "same-region",
        popularity_recommended_weight: float = 0.1,
    ):
        if not spec.usage.is_fully_numeric():
            raise BadRequestError("spec must be resolved before scoring")
        self.snapshot = snapshot
        self.spec = spec
        self.popularity = popularity or PopularityStats()
        self.penalties = penalties or PenaltyConfig()
        self.policy = policy
        self.popularity_recommended_weight = popularity_recommended_weight
        self.criteria = spec.criteria or (CriterionSpec("total_cost"),)
        self._breakdowns: dict[tuple, CostBreakdown] = {}

    def breakdown(self, bundle: Bundle) -> CostBreakdown:
        cached = self._breakdowns.get(bundle.key)
        if cached is None:
            cached = bundle_cost(self.snapshot, bundle, self.spec.usage, self.spec.currency)
            self._breakdowns[bundle.key] = cached
        return cached

    def criterion_value(self, bundle: Bundle, name: str, breakdown: CostBreakdown) -> float:
        compute = self.snapshot.offer(bundle.compute_id)
        if name == "total_cost":
            return breakdown.total
        if name == "cost_per_workload":
            return breakdown.total / compute.relative_speed
        if name == "relative_speed":
            return compute.relative_speed
        if name == "memory":
            return compute.memory
        if name == "region_match":
            if not self.spec.continents:
                return 1.0
            continent = self.snapshot.region(compute.region_id).continent
            return 1.0 if continent in self.spec.continents else 0.0
        if name == "popularity":
            return sum(
                self.popularity.score(offer_id, self.popularity_recommended_weight)
                for offer_id in bundle.key
            )
        raise InvariantError(f"no value rule for criterion '{name}'")

    def apply(self, bundle: Bundle) -> CostBreakdown:
        """Fill the bundle's criteria values; returns its breakdown."""
        breakdown = self.breakdown(bundle)
        for crit in self.criteria:
            bundle.criteria_values[crit.name] = self.criterion_value(bundle, crit.name, breakdown)
        bundle.criteria_values.setdefault(
            "total_cost", self.criterion_value(bundle, "total_cost", breakdown)
        )
        return breakdown

    def compatibility_violation(self, bundle: Bundle) -> float:
        """Graded: one unit per extra distinct location, so partially
        co-located genomes dominate fully scattered ones during search."""
        if self.policy == "none":
            return 0.0
        if self.policy == "same-region":
            return float(len(set(bundle.region_ids)) - 1)
        providers = {
            self.snapshot.region(region_id).provider_id for region_id in bundle.region_ids
        }
        return float(len(providers) - 1)

    def violation(self, bundle: Bundle, breakdown: CostBreakdown) -> float:
        total = self.compatibility_violation(bundle)
        runtime_hours = None
        workload = self.penalties.workload
        if self.penalties.deadline_hours is not None and workload is not None:
            compute = self.snapshot.offer(bundle.compute_id)
            scaled = BatchWorkload(
                task_count=workload.task_count,
                per_task_time=workload.per_task_time,
                vm_count=self.spec.usage.vm_count or 1,
                threads_per_vm=compute.threads_per_core_or_vm,
            )
            runtime_hours = estimate_batch_runtime(scaled) / compute.relative_speed
        continent = self.snapshot.region_of_offer(bundle.compute_id).continent
        total += self.penalties.violation(
            total_cost=breakdown.total, runtime_hours=runtime_hours, continent=continent
        )
        return total


@dataclass
class _GenomeSpace:
    """Decodes index triples into scored bundles, memoizing everything."""

    candidates: CandidateSets
    scorer: BundleScorer
    bundles: dict[tuple, Bundle] = field(default_factory=dict)
    evaluations: dict[tuple, tuple[CostBreakdown, float]] = field(default_factory=dict)

    def decode(self, genome) -> Bundle:
        bundle = self.bundles.get(genome)
        if bundle is None:
            snapshot = self.scorer.snapshot
            c_id = self.candidates.compute_candidates[genome[0]]
            s_id = self.candidates.storage_candidates[genome[1]]
            t_id = self.candidates.transfer_candidates[genome[2]]
            bundle = Bundle(
                compute_id=c_id,
                storage_id=s_id,
                transfer_id=t_id,
                region_ids=(
                    snapshot.offer(c_id).region_id,
                    snapshot.offer(s_id).region_id,
                    snapshot.offer(t_id).region_id,
                ),
            )
            self.bundles[genome] = bundle
        return bundle

    def evaluate(self, genome) -> tuple[CostBreakdown, float]:
        cached = self.evaluations.get(genome)
        if cached is None:
            bundle = self.decode(genome)
            breakdown = self.scorer.apply(bundle)
            cached = (breakdown, self.scorer.violation(bundle, breakdown))
            self.evaluations[genome] = cached
        return cached

    def objective_vector(self, genome) -> tuple[tuple[float, ...], float]:
        breakdown, violation = self.evaluate(genome)
        bundle = self.bundles[genome]
        objectives = tuple(
            bundle.criteria_values[crit.name]
            if crit.direction == "minimize"
            else -bundle.criteria_values[crit.name]
            for crit in self.scorer.criteria
        )
        return objectives, violation


def enumerate_bundles(
    snapshot: ProviderCatalog,
    spec: RequirementSpec,
    policy: str = "same-region",
    vague_mapping: dict | None = None,
    popularity: PopularityStats | None = None,
    penalties: PenaltyConfig | None = None,
    popularity_recommended_weight: float = 0.1,
) -> tuple[RequirementSpec, CandidateSets, list[Recommendation]]:
    """Resolve, filter, join, and score every compatible bundle."""
    resolved = resolve_requirements(spec, vague_mapping)
    candidates = filter_candidates(snapshot, resolved)
    scorer = BundleScorer(
        snapshot,
        resolved,
        popularity=popularity,
        penalties=penalties,
        policy=policy,
        popularity_recommended_weight=popularity_recommended_weight,
    )
    recommendations = []
    for bundle in bundle_join(snapshot, candidates, policy=policy):
        breakdown = scorer.apply(bundle)
        recommendations.append(
            Recommendation(
                bundle=bundle,
                breakdown=breakdown,
                violation=scorer.violation(bundle, breakdown),
            )
        )
    return resolved, candidates, recommendations


def rank_by_cost(
    snapshot: ProviderCatalog,
    spec: RequirementSpec,
    policy: str = "same-region",
    vague_mapping: dict | None = None,
    limit: int | None = None,
) -> list[Recommendation]:
    """Cheapest-first ranking of all compatible bundles."""
    _, _, recommendations = enumerate_bundles(
        snapshot, spec, policy=policy, vague_mapping=vague_mapping
    )
    recommendations.sort(key=lambda r: (r.breakdown.total, r.bundle.key))
    return recommendations[:limit] if limit is not None else recommendations


def pareto_search(
    snapshot: ProviderCatalog,
    spec: RequirementSpec,
    penalties: PenaltyConfig | None = None,
    params: GAParams | None = None,
    policy: str = "same-region",
    vague_mapping: dict | None = None,
    popularity: PopularityStats | None = None,
    popularity_recommended_weight: float = 0.1,
) -> ParetoResult:
    """NSGA-II search for the Pareto front over the candidate space."""
    params = params or GAParams()
    resolved = resolve_requirements(spec, vague_mapping)
    candidates = filter_candidates(snapshot, resolved)
    if candidates.is_empty():
        raise BadRequestError("no candidate offers survive the filters")
    scorer = BundleScorer(
        snapshot,
        resolved,
        popularity=popularity,
        penalties=penalties,
        policy=policy,
        popularity_recommended_weight=popularity_recommended_weight,
    )
    space = _GenomeSpace(candidates, scorer)
    front = nsga2_run(candidates, space.objective_vector, params, penalties)
    recommendations = []
    for member in front.members:
        bundle = space.bundles[member.genome]
        breakdown, violation = space.evaluations[member.genome]
        recommendations.append(
            Recommendation(bundle=bundle, breakdown=breakdown, violation=violation)
        )
    recommendations.sort(key=lambda r: (r.breakdown.total, r.bundle.key))
    return ParetoResult(front=front, recommendations=recommendations, candidates=candidates)


def derive_weights(
    matrix: PairwiseMatrix,
    criteria: tuple[CriterionSpec, ...],
    cr_threshold: float = DEFAULT_CR_THRESHOLD,
) -> CriterionWeights:
    """AHP weights for the named criteria, rejecting inconsistent judgments."""
    names = [c.name for c in criteria]
    if matrix.n != len(names):
        raise InvariantError(
            f"pairwise matrix order {matrix.n} does not cover {len(names)} criteria"
        )
    weights = ahp_weights(matrix, names=names)
    if weights.consistency_ratio > cr_threshold:
        raise InconsistentJudgmentsError(weights.consistency_ratio, cr_threshold)
    return weights


def _saw_scores(
    entries: list[tuple[Bundle, CostBreakdown, float]],
    criteria: tuple[CriterionSpec, ...],
    weights: CriterionWeights,
) -> list[float]:
    columns = {
        crit.name: normalize_criteria(
            [bundle.criteria_values[crit.name] for bundle, _, _ in entries], crit.direction
        )
        for crit in criteria
    }
    return [
        saw_score({crit.name: columns[crit.name][i] for crit in criteria}, weights)
        for i in range(len(entries))
    ]


def hybrid_recommend(
    snapshot: ProviderCatalog,
    spec: RequirementSpec,
    matrix: PairwiseMatrix,
    params: GAParams | None = None,
    penalties: PenaltyConfig | None = None,
    policy: str = "same-region",
    vague_mapping: dict | None = None,
    popularity: PopularityStats | None = None,
    cr_threshold: float = DEFAULT_CR_THRESHOLD,
    limit: int | None = None,
    popularity_recommended_weight: float = 0.1,
) -> list[Recommendation]:
    """Weighted-score recommendation: judgments stated once, alternatives scored.

    The pairwise matrix compares the criteria, never the alternatives; each
    explored bundle is scored by simple additive weighting of its normalized
    criterion values, and the genetic search uses that score as its scalar
    fitness under constrained domination. Returns the distinct feasible
    bundles seen by the search, best score first, ties broken by total cost
    then offer ids.
    """
    params = params or GAParams()
    criteria = spec.criteria or (CriterionSpec("total_cost"),)
    weights = derive_weights(matrix, criteria, cr_threshold)

    resolved = resolve_requirements(spec, vague_mapping)
    candidates = filter_candidates(snapshot, resolved)
    if candidates.is_empty():
        return []
    scorer = BundleScorer(
        snapshot,
        resolved,
        popularity=popularity,
        penalties=penalties,
        policy=policy,
        popularity_recommended_weight=popularity_recommended_weight,
    )
    space = _GenomeSpace(candidates, scorer)
    sizes = candidates.sizes
    rng = random.Random(params.seed)

    def entry(genome) -> tuple[tuple, float]:
        """(genome, violation); evaluation memoized in the space."""
        _, violation = space.evaluate(genome)
        return genome, violation

    def scores_for(genomes: list[tuple]) -> list[float]:
        rows = [(space.bundles[g], *space.evaluations[g]) for g in genomes]
        return _saw_scores(rows, criteria, weights)

    def sort_key(genome, violation, score):
        total = space.evaluations[genome][0].total
        return (violation, -score, total, genome)

    population = [entry(tuple(rng.randrange(s) for s in sizes)) for _ in range(params.population_size)]

    for _ in range(params.generations):
        genomes = [g for g, _ in population]
        scores = scores_for(genomes)

        def tournament() -> tuple:
            best = rng.randrange(len(population))
            for _ in range(params.tournament_size - 1):
                challenger = rng.randrange(len(population))
                g_b, v_b = population[best]
                g_c, v_c = population[challenger]
                if (v_c, -scores[challenger]) < (v_b, -scores[best]):
                    best = challenger
            return population[best][0]

        offspring = []
        while len(offspring) < params.population_size:
            g1, g2 = tournament(), tournament()
            if rng.random() < params.crossover_rate:
                c1, c2 = [], []
                for g in range(3):
                    if rng.random() < 0.5:
                        c1.append(g1[g])
                        c2.append(g2[g])
                    else:
                        c1.append(g2[g])
                        c2.append(g1[g])
                g1, g2 = tuple(c1), tuple(c2)
            for child in (g1, g2):
                mutated = tuple(
                    rng.randrange(sizes[i]) if rng.random() < params.mutation_rate else child[i]
                    for i in range(3)
                )
                offspring.append(entry(mutated))
                if len(offspring) == params.population_size:
                    break

        seen = set()
        combined = []
        for genome, violation in population + offspring:
            if genome not in seen:
                seen.add(genome)
                combined.append((genome, violation))
        combined_scores = scores_for([g for g, _ in combined])
        order = sorted(
            range(len(combined)),
            key=lambda i: sort_key(combined[i][0], combined[i][1], combined_scores[i]),
        )
        population = [combined[i] for i in order[: params.population_size]]

    feasible = [
        genome for genome, (_, violation) in space.evaluations.items() if violation == 0.0
    ]
    if not feasible:
        return []
    final_scores = scores_for(feasible)
    ranked = sorted(
        range(len(feasible)),
        key=lambda i: (
            -final_scores[i],
            space.evaluations[feasible[i]][0].total,
            space.bundles[feasible[i]].key,
        ),
    )
    results = []
    for i in ranked:
        genome = feasible[i]
        breakdown, violation = space.evaluations[genome]
        results.append(
            Recommendation(
                bundle=space.bundles[genome],
                breakdown=breakdown,
                score=final_scores[i],
                violation=violation,
            )
        )
    return results[:limit] if limit is not None else results
