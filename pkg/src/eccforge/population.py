"""Genome container, parallel evaluation and per-generation statistics."""

from __future__ import annotations

import copy
import csv
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .ecmath import CurveParams, ECPoint
from .fitness import FitnessReport, ProbeConfig, evaluate

GENOME_LENGTH = 6
G_INDEX = 3


@dataclass
class Candidate:
    """One parameter set laid out as ``[a, b, p, (Gx, Gy), n, h]``.

    ``fitness`` is ``None`` while the cached score is stale.
    """

    genome: list
    fitness: Optional[float] = None
    report: Optional[FitnessReport] = field(default=None, repr=False)

    @classmethod
    def from_params(cls, params: CurveParams) -> "Candidate":
        return cls([params.a, params.b, params.p, (params.G.x, params.G.y), params.n, params.h])

    def to_params(self) -> CurveParams:
        a, b, p, G, n, h = self.genome
        if isinstance(G, tuple) and len(G) == 2:
            G = ECPoint(*G)
        if p > 0:
            a, b = a % p, b % p
        return CurveParams(a, b, p, G, n, h)

    def clone(self) -> "Candidate":
        return copy.deepcopy(self)

    def invalidate(self) -> None:
        self.fitness = None
        self.report = None


@dataclass(frozen=True)
class GenerationStats:
    index: int
    min: float
    max: float
    avg: float
    std: float
    best: Candidate
    valid_fraction: float = 1.0

    @classmethod
    def from_population(cls, index: int, population: list[Candidate],
                        best: Optional[Candidate] = None) -> "GenerationStats":
        fits = np.array([c.fitness for c in population], dtype=float)
        best = best or max(population, key=lambda c: c.fitness)
        return cls(index, float(fits.min()), float(fits.max()), float(fits.mean()),
                   float(fits.std()), best.clone(), float((fits > 0).mean()))


def _evaluate_one(args):
    params, cfg, seed = args
    return evaluate(params, cfg, random.Random(seed))


def evaluate_population(candidates: list[Candidate], cfg: ProbeConfig, base_seed: int,
                        tag: int, workers: int = 1) -> int:
    """Score every candidate whose fitness is stale; returns how many were scored.

    Each candidate gets its own PRNG seeded from (base_seed, tag, index), so
    results do not depend on how work is split across processes.
    """
    todo = [(i, c) for i, c in enumerate(candidates) if c.fitness is None]
    jobs = [(c.to_params(), cfg, f"{base_seed}:{tag}:{i}") for i, c in todo]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_evaluate_one, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        reports = [_evaluate_one(job) for job in jobs]
    for (_, cand), report in zip(todo, reports):
        cand.report = report
        cand.fitness = report.fitness
    return len(todo)


def write_history_csv(history: list[GenerationStats], path, index_name: str = "generation") -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([index_name, "min", "max", "avg", "std"])
        for row in history:
            writer.writerow([row.index, repr(row.min), repr(row.max), repr(row.avg), repr(row.std)])


def write_history_dat(history: list[GenerationStats], path) -> None:
    """Whitespace-separated copy of the history for gnuplot."""
    lines = ["# index min max avg std"]
    lines += [f"{r.index} {r.min!r} {r.max!r} {r.avg!r} {r.std!r}" for r in history]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
