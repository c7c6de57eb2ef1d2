import random

import pytest
from sympy import isprime

from eccforge.ecmath import generate_curve, is_on_curve
from eccforge.fitness import ProbeConfig
from eccforge.population import Candidate
from eccforge.pso import PsoConfig, inertia_weight, run_pso, update_position, update_velocity, zero_velocity

PROBE = ProbeConfig(deterministic_timing=True)


class FixedRandom(random.Random):
    def random(self):
        return 1.0


def test_config_defaults():
    cfg = PsoConfig()
    assert (cfg.swarm_size, cfg.max_iterations, cfg.c1, cfg.c2, cfg.w_max, cfg.w_min) == (500, 40, 1.0, 2.5, 0.9, 0.4)


def test_inertia_weight():
    assert inertia_weight(0, 40) == 0.9
    assert inertia_weight(40, 40) == pytest.approx(0.4)
    assert inertia_weight(20, 40) == pytest.approx(0.65)


def test_velocity_examples():
    cfg = PsoConfig()
    x = [5, 6, 7, (8, 9), 10, 1]
    out = update_velocity(x, zero_velocity(), x, x, 0, 40, cfg, random.Random(0))
    assert out == [0.0, 0.0, 0.0, (0.0, 0.0), 0.0, 0.0]
    v = [-3.0, 0.0, 0.0, (0.0, 0.0), 0.0, 0.0]
    out = update_velocity(x, v, x, x, 0, 40, cfg, random.Random(0))
    assert out[0] == pytest.approx(2.7)
    particle = [0, 0, 0, (0, 0), 0, 0]
    pbest = [0, 0, 0, (0, 0), 1, 0]
    gbest = [0, 0, 0, (0, 0), 2, 0]
    out = update_velocity(particle, zero_velocity(), pbest, gbest, 0, 40, cfg, FixedRandom())
    assert out[4] == pytest.approx(6.0)


def test_generator_velocity_keeps_sign():
    cfg = PsoConfig()
    out = update_velocity([0, 0, 0, (10, 10), 0, 0], zero_velocity(), [0, 0, 0, (0, 0), 0, 0],
                          [0, 0, 0, (0, 0), 0, 0], 0, 40, cfg, FixedRandom())
    assert out[3] == pytest.approx((-35.0, -35.0))


def test_position_update_repairs():
    x = [11, 22, 65521, (1, 2), 65520, 1]
    new = update_position(x, zero_velocity(), random.Random(3), bits=16)
    assert (new[0], new[1], new[4], new[5]) == (11, 22, 65520, 1)
    assert isprime(new[2]) and new[2].bit_length() == 16
    assert is_on_curve(Candidate(new).to_params().G, 11, 22, new[2])
    moved = update_position(x, [0.0, 0.0, 0.0, (0.0, 0.0), 0.0, -3.0], random.Random(3), bits=16)
    assert moved[5] == 2


def test_max_iterations_one():
    _, history = run_pso(PsoConfig(swarm_size=5, max_iterations=1, bits=16), PROBE, random.Random(0))
    assert len(history) <= 2


def test_deterministic():
    cfg = PsoConfig(swarm_size=8, max_iterations=5, bits=16)
    a = run_pso(cfg, PROBE, random.Random(2))
    b = run_pso(cfg, PROBE, random.Random(2))
    assert a[0].genome == b[0].genome
    assert [(s.min, s.max, s.avg, s.std, s.best.fitness) for s in a[1]] == \
           [(s.min, s.max, s.avg, s.std, s.best.fitness) for s in b[1]]


def test_gbest_monotone():
    for seed in range(5):
        best, history = run_pso(PsoConfig(swarm_size=10, max_iterations=10, bits=16), PROBE, random.Random(seed))
        g = [s.best.fitness for s in history]
        assert all(y >= x for x, y in zip(g, g[1:]))
        assert best.fitness == g[-1]


def test_early_stop_with_frozen_gbest():
    huge = Candidate.from_params(generate_curve(256, random.Random(1)))
    others = [Candidate.from_params(generate_curve(16, random.Random(s))) for s in range(4)]
    cfg = PsoConfig(swarm_size=5, max_iterations=40, stall_limit=6, bits=16)
    best, history = run_pso(cfg, PROBE, random.Random(0), initial=[huge] + others)
    assert best.genome == huge.genome
    assert len(history) == 1 + cfg.stall_limit


def test_256_bit_velocity_uses_float_arithmetic():
    # Huge genes pass through float rounding, so positions land on multiples of 2^k.
    x = [2 ** 255 + 12345, 0, 0, (0, 0), 0, 1]
    v = [1.0, 0.0, 0.0, (0.0, 0.0), 0.0, 0.0]
    new = update_position(x, v, random.Random(0), bits=16)
    assert new[0] == int(float(2 ** 255))
