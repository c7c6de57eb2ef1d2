"""Particle swarm over elliptic-curve parameter genomes.

Velocities are floats, so positions of 256-bit genes pass through float
rounding on every move, exactly like the arithmetic they model.
"""

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
from .population import G_INDEX, Candidate, GenerationStats, evaluate_population

logger = logging.getLogger(__name__)

MAX_REPAIR_ATTEMPTS = 100


@dataclass(frozen=True)
class PsoConfig:
    swarm_size: int = 500
    max_iterations: int = 40
    c1: float = 1.0
    c2: float = 2.5
    w_max: float = 0.9
    w_min: float = 0.4
    stall_limit: int = 20
    bits: int = 256
    seed: int = 0
    workers: int = 1
    generator_budget: float = DEFAULT_GENERATOR_BUDGET

    def __post_init__(self):
        if not self.w_max > self.w_min:
            raise ValueError("w_max must exceed w_min")
        if self.stall_limit < 1 or self.swarm_size < 1 or self.max_iterations < 1:
            raise ValueError("swarm_size, max_iterations and stall_limit must be >= 1")


@dataclass
class ParticleState:
    position: Candidate
    velocity: list
    best_position: Candidate
    best_fitness: float = 0.0


def zero_velocity() -> list:
    return [0.0, 0.0, 0.0, (0.0, 0.0), 0.0, 0.0]


def inertia_weight(iteration: int, max_iterations: int, w_max: float = 0.9,
                   w_min: float = 0.4) -> float:
    return w_max - (w_max - w_min) * iteration / max_iterations


def update_velocity(particle: list, velocity: list, best_particle: list, global_best: list,
                    iteration: int, max_iterations: int, cfg: PsoConfig,
                    rng: random.Random) -> list:
    """One velocity update per genome slot.

    The generator slot is updated component-wise on (x, y) and keeps its sign;
    every other slot is passed through ``abs``.
    """
    w = inertia_weight(iteration, max_iterations, cfg.w_max, cfg.w_min)
    new_velocity = []
    for i, v in enumerate(velocity):
        r1, r2 = rng.random(), rng.random()
        if i == G_INDEX:
            new_v = tuple(
                w * vi + cfg.c1 * r1 * (bi - xi) + cfg.c2 * r2 * (gi - xi)
                for vi, xi, bi, gi in zip(v, particle[i], best_particle[i], global_best[i])
            )
        else:
            x = particle[i]
            new_v = abs(w * v + cfg.c1 * r1 * (best_particle[i] - x)
                        + cfg.c2 * r2 * (global_best[i] - x))
        new_velocity.append(new_v)
    return new_velocity


def update_position(particle: list, velocity: list, rng: random.Random, bits: int = 256,
                    generator_budget: Optional[float] = DEFAULT_GENERATOR_BUDGET) -> list:
    """Move, then repair: fresh prime for p and a generator for the new curve."""
    new_particle = []
    for i, (x, v) in enumerate(zip(particle, velocity)):
        if i == G_INDEX:
            new_particle.append(tuple(abs(int(round(xi + vi))) for xi, vi in zip(x[:2], v[:2])))
        else:
            new_particle.append(abs(int(round(x + v))))
    a, b = new_particle[0], new_particle[1]
    for _ in range(MAX_REPAIR_ATTEMPTS):
        p = get_prime_for_p(bits, rng)
        try:
            point = find_generator_point(a, b, p, time_budget=generator_budget)
        except (NoGeneratorPoint, GeneratorTimeout):
            continue
        new_particle[2] = p
        new_particle[G_INDEX] = (point.x, point.y)
        return new_particle
    raise RuntimeError(f"no generator point after {MAX_REPAIR_ATTEMPTS} fresh primes")


def init_swarm(cfg: PsoConfig, rng: random.Random) -> list[Candidate]:
    return [Candidate.from_params(generate_curve(cfg.bits, rng, time_budget=cfg.generator_budget))
            for _ in range(cfg.swarm_size)]


def run_pso(cfg: PsoConfig, probe: ProbeConfig, rng: random.Random,
            initial: Optional[list[Candidate]] = None) -> tuple[Candidate, list[GenerationStats]]:
    """Run the swarm; history entry 0 is the initial swarm, entry k iteration k.

    Each history entry's ``best`` is the global best so far, while the
    min/max/avg/std describe the current positions only.

    ``initial`` replaces the randomly generated starting positions.
    """
    base_seed = rng.getrandbits(64)
    positions = [c.clone() for c in initial] if initial is not None else init_swarm(cfg, rng)
    evaluate_population(positions, probe, base_seed, 0, cfg.workers)
    swarm = [ParticleState(c, zero_velocity(), c.clone(), c.fitness) for c in positions]
    gbest = max(positions, key=lambda c: c.fitness).clone()
    history = [GenerationStats.from_population(0, positions, gbest)]
    stall = 0

    for it in range(cfg.max_iterations):
        moved = []
        for state in swarm:
            state.velocity = update_velocity(state.position.genome, state.velocity,
                                             state.best_position.genome, gbest.genome,
                                             it, cfg.max_iterations, cfg, rng)
            genome = update_position(state.position.genome, state.velocity, rng, cfg.bits,
                                     cfg.generator_budget)
            state.position = Candidate(genome)
            moved.append(state.position)
        evaluate_population(moved, probe, base_seed, it + 1, cfg.workers)

        improved = False
        for state in swarm:
            if state.position.fitness > state.best_fitness:
                state.best_position = state.position.clone()
                state.best_fitness = state.position.fitness
            if state.position.fitness > gbest.fitness:
                gbest = state.position.clone()
                improved = True
        history.append(GenerationStats.from_population(it + 1, moved, gbest))
        stall = 0 if improved else stall + 1
        logger.info("iteration %d gbest=%.6g stall=%d", it + 1, gbest.fitness, stall)
        if stall >= cfg.stall_limit:
            logger.info("no improvement for %d iterations, stopping", stall)
            break
    return gbest, history
