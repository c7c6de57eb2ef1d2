"""Genetic algorithm over elliptic-curve parameter genomes."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from typing import Optional

from .ecmath import (
    DEFAULT_GENERATOR_BUDGET,
    GeneratorTimeout,
    NoGeneratorPoint,
    find_generator_point,
    generate_curve,
    get_prime_for_p,
)
from .fitness import ProbeConfig
from .population import Candidate, GenerationStats, evaluate_population

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GaConfig:
    pop_size: int = 500
    cxpb: float = 0.5
    mutpb: float = 0.2
    ngen: int = 40
    multiparent_cxpb: float = 0.1
    elitism_rate: float = 0.1
    indpb: float = 0.2
    tournament_size: int = 3
    bits: int = 256
    seed: int = 0
    workers: int = 1
    generator_budget: float = DEFAULT_GENERATOR_BUDGET

    def __post_init__(self):
        for name in ("cxpb", "mutpb", "multiparent_cxpb", "elitism_rate", "indpb"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.pop_size < 1:
            raise ValueError("pop_size must be >= 1")
        if self.elite_count >= self.pop_size:
            raise ValueError("elitism leaves no room for offspring")
        if self.ngen < 0 or self.tournament_size < 1:
            raise ValueError("ngen must be >= 0 and tournament_size >= 1")

    @property
    def elite_count(self) -> int:
        return round(self.pop_size * self.elitism_rate)


def init_population(cfg: GaConfig, rng: random.Random) -> list[Candidate]:
    return [Candidate.from_params(generate_curve(cfg.bits, rng, time_budget=cfg.generator_budget))
            for _ in range(cfg.pop_size)]


def custom_mutation(individual: Candidate, indpb: float, mutation_rate: float, rng: random.Random,
                    bits: int = 256, generator_budget: Optional[float] = DEFAULT_GENERATOR_BUDGET
                    ) -> Candidate:
    """Mutate ``individual`` in place and return it.

    Gene 2 (p) is replaced by a fresh prime, the generator gene is recomputed
    from the current (a, b, p), and every other gene takes a rounded Gaussian
    step (stdev 10 when ``mutation_rate`` > 0.5, else 2) floored at zero.
    """
    degree = 10 if mutation_rate > 0.5 else 2
    if rng.random() >= mutation_rate:
        return individual
    genome = individual.genome
    changed = False
    for i in range(len(genome)):
        if rng.random() >= indpb:
            continue
        if i == 2:
            genome[i] = get_prime_for_p(bits, rng)
        elif isinstance(genome[i], tuple):
            a, b, p = genome[0], genome[1], genome[2]
            try:
                point = find_generator_point(a, b, p, time_budget=generator_budget)
            except (NoGeneratorPoint, GeneratorTimeout):
                continue
            genome[i] = (point.x, point.y)
        else:
            genome[i] = max(0, genome[i] + round(rng.gauss(0.0, degree)))
        changed = True
    if changed:
        individual.invalidate()
    return individual


def _cut_points(rng: random.Random, size: int = 6) -> tuple[int, int]:
    c1, c2 = sorted(rng.sample(range(1, size), 2))
    return c1, c2


def two_point_crossover(parent1: Candidate, parent2: Candidate, rng: random.Random,
                        cuts: Optional[tuple[int, int]] = None) -> tuple[Candidate, Candidate]:
    c1, c2 = cuts or _cut_points(rng, len(parent1.genome))
    g1, g2 = parent1.genome, parent2.genome
    g1[c1:c2], g2[c1:c2] = g2[c1:c2], g1[c1:c2]
    parent1.invalidate()
    parent2.invalidate()
    return parent1, parent2


def three_parent_crossover(p1: Candidate, p2: Candidate, p3: Candidate, rng: random.Random,
                           cuts: Optional[tuple[int, int]] = None
                           ) -> tuple[Candidate, Candidate, Candidate]:
    """Cyclic segment rotation: child k takes its middle segment from parent
    k+1 and its tail from parent k+2."""
    c1, c2 = cuts or _cut_points(rng, len(p1.genome))
    parents = [list(p.genome) for p in (p1, p2, p3)]
    for k, child in enumerate((p1, p2, p3)):
        child.genome = (parents[k][:c1] + parents[(k + 1) % 3][c1:c2]
                        + parents[(k + 2) % 3][c2:])
        child.invalidate()
    return p1, p2, p3


def tournament_select(population: list[Candidate], k: int, tournsize: int,
                      rng: random.Random) -> list[Candidate]:
    chosen = []
    for _ in range(k):
        contenders = [rng.choice(population) for _ in range(tournsize)]
        chosen.append(max(contenders, key=lambda c: c.fitness))
    return chosen


def _best(population: list[Candidate]) -> Candidate:
    return max(population, key=lambda c: c.fitness)


def run_ga(cfg: GaConfig, probe: ProbeConfig, rng: random.Random
           ) -> tuple[Candidate, list[GenerationStats]]:
    """Evolve a population and return the best-ever candidate plus per-generation stats.

    History entry 0 describes the initial population; entry g the population
    after generation g.
    """
    base_seed = rng.getrandbits(64)
    pop = init_population(cfg, rng)
    evaluate_population(pop, probe, base_seed, 0, cfg.workers)
    history = [GenerationStats.from_population(0, pop)]
    best = _best(pop).clone()
    n_elite = cfg.elite_count

    for g in range(cfg.ngen):
        logger.info("Starting generation %d", g + 1)
        ranked = sorted(pop, key=lambda c: c.fitness, reverse=True)
        elites = [c.clone() for c in ranked[:n_elite]]
        offspring = [c.clone() for c in tournament_select(pop, len(pop), cfg.tournament_size, rng)]

        for i in range(0, len(offspring) - 2, 3):
            if rng.random() < cfg.multiparent_cxpb:
                three_parent_crossover(offspring[i], offspring[i + 1], offspring[i + 2], rng)
        for child1, child2 in zip(offspring[::2], offspring[1::2]):
            if rng.random() < cfg.cxpb:
                two_point_crossover(child1, child2, rng)
        for mutant in offspring:
            custom_mutation(mutant, cfg.indpb, cfg.mutpb, rng, cfg.bits, cfg.generator_budget)

        evaluate_population(offspring, probe, base_seed, g + 1, cfg.workers)
        merged = offspring + elites
        assert len(merged) == cfg.pop_size + n_elite
        # Stable sort keeps the offspring-before-elite order among ties.
        pop = sorted(merged, key=lambda c: c.fitness, reverse=True)[:cfg.pop_size]
        history.append(GenerationStats.from_population(g + 1, pop))
        if _best(pop).fitness > best.fitness:
            best = _best(pop).clone()
        logger.info("gen %d max=%.6g avg=%.6g", g + 1, history[-1].max, history[-1].avg)
    return best, history
