"""Elitist multi-objective search over bundle index space.

Genomes are (compute, storage, transfer) index triples into the candidate
sets, so every individual decodes to a real bundle. Constraints are handled
by constrained domination: feasible beats infeasible, smaller violation
beats larger, and only feasible pairs are compared on objectives. All
randomness flows from the single seed in :class:`GAParams`; evaluation is
pure, so runs are reproducible.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable

from .errors import BadRequestError, InvariantError
from .matching import Bundle, CandidateSets

CROWDING_SENTINEL = math.inf

BRUTE_FORCE_LIMIT = 1_000_000

Genome = tuple[int, int, int]


@dataclass(frozen=True)
class GAParams:
    population_size: int = 40
    generations: int = 100
    crossover_rate: float = 0.9
    mutation_rate: float = 0.3
    tournament_size: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.population_size < 2:
            raise InvariantError("population_size must be >= 2")
        for name in ("crossover_rate", "mutation_rate"):
            rate = getattr(self, name)
            if not 0.0 <= rate <= 1.0:
                raise InvariantError(f"{name} must be in [0, 1]")
        if self.tournament_size < 1:
            raise InvariantError("tournament_size must be >= 1")
        if self.generations < 0:
            raise InvariantError("generations must be >= 0")


@dataclass(frozen=True)
class PenaltyConfig:
    """Constraint limits plus the scale dividing each raw excess.

    Scales normalize heterogeneous units (money, hours) into comparable
    violation magnitudes; a violation of 0 means feasible.
    """

    budget_cap: float | None = None
    budget_scale: float = 1.0
    deadline_hours: float | None = None
    deadline_scale: float = 1.0
    required_continents: frozenset[str] = frozenset()
    continent_scale: float = 1.0
    workload: object | None = None  # BatchWorkload driving the deadline runtime

    def __post_init__(self):
        for name in ("budget_scale", "deadline_scale", "continent_scale"):
            if getattr(self, name) <= 0:
                raise InvariantError(f"{name} must be > 0")

    def is_empty(self) -> bool:
        return (
            self.budget_cap is None
            and self.deadline_hours is None
            and not self.required_continents
        )

    def violation(
        self,
        total_cost: float | None = None,
        runtime_hours: float | None = None,
        continent: str | None = None,
    ) -> float:
        v = 0.0
        if self.budget_cap is not None and total_cost is not None:
            v += max(0.0, total_cost - self.budget_cap) / self.budget_scale
        if self.deadline_hours is not None and runtime_hours is not None:
            v += max(0.0, runtime_hours - self.deadline_hours) / self.deadline_scale
        if self.required_continents and continent is not None:
            if continent not in self.required_continents:
                v += 1.0 / self.continent_scale
        return v


@dataclass
class Individual:
    genome: Genome
    objectives: tuple[float, ...] = ()
    violation: float = 0.0
    rank: int = -1
    crowding: float = 0.0

    @property
    def feasible(self) -> bool:
        return self.violation == 0.0


@dataclass
class ParetoFront:
    members: list[Individual]
    generation: int
    seed: int


# evaluate(genome) -> (minimization objectives, total constraint violation)
EvaluateFn = Callable[[Genome], tuple[tuple[float, ...], float]]


def constrained_dominates(a: Individual, b: Individual) -> bool:
    """Feasibility first, then violation magnitude, then Pareto dominance."""
    if a.feasible and not b.feasible:
        return True
    if not a.feasible and b.feasible:
        return False
    if not a.feasible and not b.feasible:
        return a.violation < b.violation
    better_somewhere = False
    for x, y in zip(a.objectives, b.objectives):
        if x > y:
            return False
        if x < y:
            better_somewhere = True
    return better_somewhere


def non_dominated_sort(population: list[Individual]) -> list[list[Individual]]:
    """Partition into fronts by constrained domination, assigning ranks."""
    n = len(population)
    dominated_by: list[list[int]] = [[] for _ in range(n)]
    domination_count = [0] * n
    for i in range(n):
        a = population[i]
        for j in range(i + 1, n):
            b = population[j]
            if constrained_dominates(a, b):
                dominated_by[i].append(j)
                domination_count[j] += 1
            elif constrained_dominates(b, a):
                dominated_by[j].append(i)
                domination_count[i] += 1

    fronts: list[list[Individual]] = []
    current = [i for i in range(n) if domination_count[i] == 0]
    rank = 0
    while current:
        for i in current:
            population[i].rank = rank
        fronts.append([population[i] for i in current])
        nxt = []
        for i in current:
            for j in dominated_by[i]:
                domination_count[j] -= 1
                if domination_count[j] == 0:
                    nxt.append(j)
        current = nxt
        rank += 1
    return fronts


def crowding_distance(front: list[Individual]) -> list[float]:
    """Per-front diversity measure; boundary members get the sentinel maximum.

    Interior members accumulate, per objective, the normalized gap between
    their sorted neighbors; a constant objective contributes nothing.
    """
    size = len(front)
    distances = [0.0] * size
    if size == 0:
        return distances
    if size <= 2:
        distances = [CROWDING_SENTINEL] * size
    else:
        n_objectives = len(front[0].objectives)
        for m in range(n_objectives):
            order = sorted(range(size), key=lambda i: front[i].objectives[m])
            lo = front[order[0]].objectives[m]
            hi = front[order[-1]].objectives[m]
            distances[order[0]] = CROWDING_SENTINEL
            distances[order[-1]] = CROWDING_SENTINEL
            if hi == lo:
                continue
            for pos in range(1, size - 1):
                i = order[pos]
                if distances[i] == CROWDING_SENTINEL:
                    continue
                gap = front[order[pos + 1]].objectives[m] - front[order[pos - 1]].objectives[m]
                distances[i] += gap / (hi - lo)
    for i, d in enumerate(distances):
        front[i].crowding = d
    return distances


def _environmental_selection(pool: list[Individual], size: int) -> list[Individual]:
    """Elitist truncation: fill by fronts, split the last front by crowding.

    Duplicate genomes are collapsed first; re-evaluating copies of a
    deterministic fitness teaches the search nothing, and keeping the
    standing population distinct is what lets a small index space be swept.
    """
    seen: set[Genome] = set()
    distinct = []
    for individual in pool:
        if individual.genome not in seen:
            seen.add(individual.genome)
            distinct.append(individual)
    fronts = non_dominated_sort(distinct)
    selected: list[Individual] = []
    for front in fronts:
        crowding_distance(front)
        if len(selected) + len(front) <= size:
            selected.extend(front)
        else:
            remaining = size - len(selected)
            order = sorted(range(len(front)), key=lambda i: -front[i].crowding)
            selected.extend(front[i] for i in order[:remaining])
            break
        if len(selected) == size:
            break
    return selected


def nsga2_run(
    candidates: CandidateSets,
    evaluate: EvaluateFn,
    params: GAParams,
    penalties: PenaltyConfig | None = None,
) -> ParetoFront:
    """Seeded NSGA-II search returning the non-dominated front it discovered.

    ``evaluate`` maps a genome to its minimization objectives and constraint
    violation (already reflecting ``penalties``; the config is accepted here
    so callers can assert it matches the evaluator they built). Every
    distinct genome is evaluated once and remembered, and a running archive
    keeps the non-dominated set of everything evaluated, so no returned
    member is dominated by anything the search ever saw. A final
    single-gene neighborhood sweep polishes the front to a local fixpoint.
    """
    sizes = candidates.sizes
    if 0 in sizes:
        raise BadRequestError("cannot optimize over an empty candidate set")
    rng = random.Random(params.seed)
    memo: dict[Genome, tuple[tuple[float, ...], float]] = {}
    front_archive: list[Individual] = []

    def archive_add(candidate: Individual) -> None:
        nonlocal front_archive
        for member in front_archive:
            if constrained_dominates(member, candidate):
                return
        front_archive = [
            m for m in front_archive if not constrained_dominates(candidate, m)
        ]
        front_archive.append(candidate)

    def make(genome: Genome) -> Individual:
        cached = memo.get(genome)
        if cached is None:
            cached = evaluate(genome)
            memo[genome] = cached
            archive_add(Individual(genome=genome, objectives=cached[0], violation=cached[1]))
        objectives, violation = cached
        return Individual(genome=genome, objectives=objectives, violation=violation)

    def random_genome() -> Genome:
        return tuple(rng.randrange(s) for s in sizes)

    def mutate(genome: Genome) -> Genome:
        return tuple(
            rng.randrange(sizes[g]) if rng.random() < params.mutation_rate else genome[g]
            for g in range(3)
        )

    def crossover(g1: Genome, g2: Genome) -> tuple[Genome, Genome]:
        c1, c2 = [], []
        for g in range(3):
            if rng.random() < 0.5:
                c1.append(g1[g])
                c2.append(g2[g])
            else:
                c1.append(g2[g])
                c2.append(g1[g])
        return tuple(c1), tuple(c2)

    def tournament(pop: list[Individual]) -> Individual:
        k = min(params.tournament_size, len(pop))
        best = pop[rng.randrange(len(pop))]
        for _ in range(k - 1):
            challenger = pop[rng.randrange(len(pop))]
            if (challenger.rank, -challenger.crowding) < (best.rank, -best.crowding):
                best = challenger
        return best

    population = [make(random_genome()) for _ in range(params.population_size)]
    for front in non_dominated_sort(population):
        crowding_distance(front)

    for _ in range(params.generations):
        offspring: list[Individual] = []
        while len(offspring) < params.population_size:
            p1, p2 = tournament(population), tournament(population)
            if rng.random() < params.crossover_rate:
                g1, g2 = crossover(p1.genome, p2.genome)
            else:
                g1, g2 = p1.genome, p2.genome
            offspring.append(make(mutate(g1)))
            if len(offspring) < params.population_size:
                offspring.append(make(mutate(g2)))
        population = _environmental_selection(population + offspring, params.population_size)

    # polish: evaluate every single-gene neighbor of the front until it
    # stops changing, so each member is optimal within mutation distance one
    while True:
        before = {member.genome for member in front_archive}
        for genome in sorted(before):
            for gene in range(3):
                for value in range(sizes[gene]):
                    if value != genome[gene]:
                        make(genome[:gene] + (value,) + genome[gene + 1 :])
        if {member.genome for member in front_archive} == before:
            break

    members = sorted(front_archive, key=lambda m: m.genome)
    return ParetoFront(members=members, generation=params.generations, seed=params.seed)


def brute_force_pareto(bundles: list[Bundle], objectives) -> list[Bundle]:
    """Exact non-dominated subset by exhaustive pairwise comparison.

    A verification oracle, not a production path: refuses above
    ``BRUTE_FORCE_LIMIT`` alternatives.
    """
    if len(bundles) > BRUTE_FORCE_LIMIT:
        raise BadRequestError(
            f"brute-force enumeration refused for {len(bundles)} bundles "
            f"(limit {BRUTE_FORCE_LIMIT})"
        )
    signs = [1.0 if crit.direction == "minimize" else -1.0 for crit in objectives]
    names = [crit.name for crit in objectives]
    vectors = [
        tuple(sign * bundle.criteria_values[name] for sign, name in zip(signs, names))
        for bundle in bundles
    ]

    survivors = []
    for i, bundle in enumerate(bundles):
        vi = vectors[i]
        dominated = False
        for j, vj in enumerate(vectors):
            if j == i:
                continue
            not_worse_anywhere = all(x <= y for x, y in zip(vj, vi))
            strictly_better_somewhere = any(x < y for x, y in zip(vj, vi))
            if not_worse_anywhere and strictly_better_somewhere:
                dominated = True
                break
        if not dominated:
            survivors.append(bundle)
    return survivors
