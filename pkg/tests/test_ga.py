import random
from collections import Counter

import pytest
from sympy import isprime

from eccforge.ecmath import is_on_curve
from eccforge.fitness import ProbeConfig, validate_curve
from eccforge.ga import (
    GaConfig,
    custom_mutation,
    init_population,
    run_ga,
    three_parent_crossover,
    tournament_select,
    two_point_crossover,
)
from eccforge.population import Candidate, GenerationStats, write_history_csv

PROBE = ProbeConfig(deterministic_timing=True)
SMALL = dict(pop_size=20, ngen=10, bits=16)


def sentinel(tag):
    return Candidate([f"a{tag}", f"b{tag}", f"p{tag}", (f"gx{tag}", f"gy{tag}"), f"n{tag}", f"h{tag}"])


def test_config_defaults():
    cfg = GaConfig()
    assert (cfg.pop_size, cfg.cxpb, cfg.mutpb, cfg.ngen, cfg.multiparent_cxpb, cfg.elitism_rate) == \
        (500, 0.5, 0.2, 40, 0.1, 0.1)
    assert cfg.elite_count == 50
    with pytest.raises(ValueError):
        GaConfig(cxpb=1.5)
    with pytest.raises(ValueError):
        GaConfig(pop_size=0)


def test_init_population():
    pop = init_population(GaConfig(pop_size=1, bits=16), random.Random(3))
    assert len(pop) == 1
    params = pop[0].to_params()
    assert isprime(params.p) and params.n == params.p - 1 and params.h == 1
    assert is_on_curve(params.G, params.a, params.b, params.p)
    ok, reason = validate_curve(params)
    assert ok or reason in ("The curve is anomalous!", "The curve is supersingular!")
    again = init_population(GaConfig(pop_size=1, bits=16), random.Random(3))
    assert again[0].genome == pop[0].genome


def test_two_point_crossover_example():
    c1, c2 = two_point_crossover(sentinel(1), sentinel(2), random.Random(0), cuts=(1, 3))
    assert c1.genome == ["a1", "b2", "p2", ("gx1", "gy1"), "n1", "h1"]
    assert c2.genome == ["a2", "b1", "p1", ("gx2", "gy2"), "n2", "h2"]


def test_two_point_crossover_identical_parents():
    a, b = sentinel(1), sentinel(1)
    two_point_crossover(a, b, random.Random(1))
    assert a.genome == sentinel(1).genome == b.genome


def test_three_parent_crossover_example():
    kids = three_parent_crossover(sentinel(1), sentinel(2), sentinel(3), random.Random(0), cuts=(2, 4))
    assert kids[0].genome == ["a1", "b1", "p2", ("gx2", "gy2"), "n3", "h3"]
    assert kids[1].genome == ["a2", "b2", "p3", ("gx3", "gy3"), "n1", "h1"]
    assert kids[2].genome == ["a3", "b3", "p1", ("gx1", "gy1"), "n2", "h2"]


def test_three_parent_crossover_preserves_genes_per_position():
    rng = random.Random(5)
    for _ in range(50):
        parents = [sentinel(i) for i in range(3)]
        before = [Counter(str(p.genome[i]) for p in parents) for i in range(6)]
        three_parent_crossover(*parents, rng)
        after = [Counter(str(p.genome[i]) for p in parents) for i in range(6)]
        assert before == after


def test_three_parent_crossover_identical():
    kids = three_parent_crossover(sentinel(7), sentinel(7), sentinel(7), random.Random(2))
    assert all(k.genome == sentinel(7).genome for k in kids)


def test_mutation_gates():
    base = init_population(GaConfig(pop_size=1, bits=16), random.Random(1))[0]
    base.fitness = 1.0
    for rate, indpb in ((0.0, 1.0), (1.0, 0.0)):
        ind = base.clone()
        custom_mutation(ind, indpb, rate, random.Random(4), bits=16)
        assert ind.genome == base.genome and ind.fitness == 1.0


def test_mutation_full_sweep():
    for seed in range(10):
        ind = init_population(GaConfig(pop_size=1, bits=16), random.Random(seed))[0]
        custom_mutation(ind, 1.0, 1.0, random.Random(seed), bits=16)
        a, b, p, G, n, h = ind.genome
        assert isprime(p) and p.bit_length() == 16
        assert is_on_curve(ind.to_params().G, a, b, p)
        assert ind.fitness is None
        assert all(g >= 0 for g in (a, b, n, h))


def test_tournament_picks_best_of_sample():
    pop = [Candidate([i] * 6, fitness=float(i)) for i in range(10)]
    picks = tournament_select(pop, 200, 10, random.Random(0))
    assert max(c.fitness for c in picks) == 9.0
    assert sum(c.fitness for c in picks) / 200 > 6.0


def test_ngen_zero():
    best, history = run_ga(GaConfig(pop_size=6, ngen=0, bits=16), PROBE, random.Random(0))
    assert len(history) == 1
    assert best.fitness == history[0].max


def test_run_is_deterministic():
    cfg = GaConfig(pop_size=10, ngen=4, bits=16)
    b1, h1 = run_ga(cfg, PROBE, random.Random(9))
    b2, h2 = run_ga(cfg, PROBE, random.Random(9))
    assert b1.genome == b2.genome and b1.fitness == b2.fitness
    assert [(s.min, s.max, s.avg, s.std) for s in h1] == [(s.min, s.max, s.avg, s.std) for s in h2]


def test_elitism_keeps_best_nondecreasing():
    for seed in range(5):
        best, history = run_ga(GaConfig(**SMALL), PROBE, random.Random(seed))
        maxima = [s.max for s in history]
        assert all(b >= a for a, b in zip(maxima, maxima[1:]))
        assert best.fitness == maxima[-1]
        assert len(history) == SMALL["ngen"] + 1


def test_parallel_evaluation_matches_serial():
    serial = run_ga(GaConfig(pop_size=8, ngen=2, bits=16), PROBE, random.Random(4))
    parallel = run_ga(GaConfig(pop_size=8, ngen=2, bits=16, workers=2), PROBE, random.Random(4))
    assert serial[0].genome == parallel[0].genome
    assert [s.avg for s in serial[1]] == [s.avg for s in parallel[1]]


def test_history_csv(tmp_path):
    pop = [Candidate([1] * 6, fitness=f) for f in (1.0, 2.0, 4.0)]
    history = [GenerationStats.from_population(0, pop)]
    path = tmp_path / "h.csv"
    write_history_csv(history, path)
    data = path.read_bytes()
    assert b"\r" not in data
    assert data.decode().splitlines() == ["generation,min,max,avg,std",
                                          "0,1.0,4.0,2.3333333333333335,1.247219128924647"]
