"""
Genetic algorithm against particle swarm
========================================

Small runs of both optimizers on 64-bit curves, with the fitness history
summarised as numpy arrays.
"""

import random
import time

import numpy as np

from eccforge import GaConfig, ProbeConfig, PsoConfig, run_ga, run_pso

probe = ProbeConfig(deterministic_timing=True)

t0 = time.perf_counter()
ga_best, ga_hist = run_ga(GaConfig(pop_size=20, ngen=10, bits=64, generator_budget=None),
                          probe, random.Random(1))
ga_time = time.perf_counter() - t0

t0 = time.perf_counter()
pso_best, pso_hist = run_pso(PsoConfig(swarm_size=20, max_iterations=10, bits=64,
                                       generator_budget=None),
                             probe, random.Random(1))
pso_time = time.perf_counter() - t0

#
ga_max = np.array([h.max for h in ga_hist])
pso_best_curve = np.array([h.best.fitness for h in pso_hist])
print("GA max per generation ", np.round(ga_max, 3))
print("PSO gbest per iteration", np.round(pso_best_curve, 3))

#
ga_valid = np.array([h.valid_fraction for h in ga_hist])
pso_valid = np.array([h.valid_fraction for h in pso_hist])
print("GA valid fraction ", ga_valid)
print("PSO valid fraction", pso_valid)

print(f"GA  best {ga_best.fitness:.6f} in {ga_time:.2f}s  genome {ga_best.genome}")
print(f"PSO best {pso_best.fitness:.6f} in {pso_time:.2f}s  genome {pso_best.genome}")
