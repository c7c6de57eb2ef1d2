"""Curve validation and the weighted security fitness shared by GA and PSO."""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from typing import Optional, Sequence

from .ecmath import (
    BRUTEFORCE_LIMIT,
    CurveParams,
    ECPoint,
    ec_addition,
    ec_scalar_multiplication,
    hasse_interval,
    is_on_curve,
    is_probable_prime,
    is_singular,
)

# Rejection messages, in the order validate_curve checks them.
REASON_COFACTOR = "The cofactor h is less than 1, which makes it invalid."
REASON_PRIME = "The prime p can't be zero or composite."
REASON_MALFORMED_G = "Invalid generator point provided."
REASON_OFF_CURVE = "The point G is not on the curve!"
REASON_SUBGROUP = "No generator point found!"
REASON_COFACTOR_MISMATCH = "The cofactor does not match the expected cofactor!"
REASON_SINGULAR = "The curve is singular!"
REASON_ANOMALOUS = "The curve is anomalous!"
REASON_SUPERSINGULAR = "The curve is supersingular!"

HASSE_LOWER_MODES = ("expected", "hasse")


class DegenerateBounds(ZeroDivisionError):
    pass


@dataclass(frozen=True)
class ProbeConfig:
    """Settings for the rho resistance probe and the timing score.

    ``deterministic_timing`` replaces the probe's wall-clock time with
    ``iterations / max_iterations * max_time`` so fitness is reproducible.
    ``random_starts`` begins each trial at a random multiple of G instead of
    G itself (with the default every trial replays the same walk).
    ``hasse_lower`` picks the lower bound of the Hasse score: ``"expected"``
    (bound = expected order) or ``"hasse"`` (bound = expected - 2*isqrt(p)).
    """

    trials: int = 20
    max_iterations: int = 100
    distinguished_bits: int = 10
    max_time: float = 10.0
    min_time: float = 0.1
    deterministic_timing: bool = False
    random_starts: bool = False
    hasse_lower: str = "expected"

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")
        if not self.max_time > self.min_time:
            raise ValueError("max_time must exceed min_time")
        if self.hasse_lower not in HASSE_LOWER_MODES:
            raise ValueError(f"hasse_lower must be one of {HASSE_LOWER_MODES}")


@dataclass(frozen=True)
class ProbeResult:
    found: Optional[tuple[int, ECPoint]]
    iterations: int
    elapsed: float


@dataclass(frozen=True)
class FitnessReport:
    valid: bool
    rejection_reason: Optional[str] = None
    hasse_score: float = 0.0
    execution_score: float = 0.0
    attack_resistance_score: int = 0
    fitness: float = 0.0
    probe_elapsed: float = 0.0


def is_anomalous(p: int, n: int) -> bool:
    return p == n


def is_supersingular(p: int, n: int) -> bool:
    if p in (2, 3) or not is_probable_prime(p, random.Random(p)):
        return False
    return (p + 1 - n) % p == 0


def _cofactor_consistent(p: int, n: int, h: int) -> bool:
    if p <= BRUTEFORCE_LIMIT:
        lo, hi = hasse_interval(p)
        return lo <= h * n <= hi
    return h == 1


def _split_generator(G) -> Optional[tuple[int, int]]:
    if isinstance(G, ECPoint):
        if G.is_infinity:
            return None
        G = (G.x, G.y)
    if not isinstance(G, Sequence) or len(G) != 2:
        return None
    x, y = G
    if not all(isinstance(v, int) and not isinstance(v, bool) for v in (x, y)):
        return None
    return x, y


def validate_curve(params: CurveParams) -> tuple[bool, Optional[str]]:
    """Return (ok, reason) where reason names the first failing check."""
    a, b, p, n, h = params.a, params.b, params.p, params.n, params.h
    if h < 1:
        return False, REASON_COFACTOR
    if p == 0 or p < 5 or not is_probable_prime(p, random.Random(p)):
        return False, REASON_PRIME
    coords = _split_generator(params.G)
    if coords is None:
        return False, REASON_MALFORMED_G
    G = ECPoint(*coords)
    if not (0 <= G.x < p and 0 <= G.y < p) or not is_on_curve(G, a, b, p):
        return False, REASON_OFF_CURVE
    if n < 1:
        return False, REASON_SUBGROUP
    if not _cofactor_consistent(p, n, h):
        return False, REASON_COFACTOR_MISMATCH
    if is_singular(a, b, p):
        return False, REASON_SINGULAR
    if is_anomalous(p, n):
        return False, REASON_ANOMALOUS
    if is_supersingular(p, n):
        return False, REASON_SUPERSINGULAR
    return True, None


def expected_order(p: int) -> int:
    return p + 1 - 2 * math.isqrt(p)


def hasse_score(p: int, n: int, lower: str = "expected") -> float:
    s = math.isqrt(p)
    expected = p + 1 - 2 * s
    upper = expected + 2 * s
    lower_bound = expected if lower == "expected" else expected - 2 * s
    if upper == lower_bound:
        raise DegenerateBounds(f"Hasse bounds collapse for p={p}")
    # Exact integer numerator and denominator; a single rounding at the end.
    return max(0.0, (upper - abs(n - expected)) / (upper - lower_bound))


def is_distinguished(P: ECPoint, bits: int) -> bool:
    if P.is_infinity:
        return False
    return P.x & ((1 << bits) - 1) == 0


def _walk_step(Q: ECPoint, scalar: int, G: ECPoint, curve: CurveParams, order: int):
    if Q.is_infinity:
        return G, 1 % order
    case = Q.x % 3
    if case == 0:
        return ec_addition(Q, G, curve), (scalar + 1) % order
    Q = ec_scalar_multiplication(Q, 2, curve)
    scalar = 2 * scalar % order
    if case == 2:
        Q = ec_addition(Q, G, curve)
        scalar = (scalar + 1) % order
    return Q, scalar


def _cycle_has_distinguished(Q: ECPoint, scalar: int, G: ECPoint, curve: CurveParams,
                             order: int, bits: int) -> bool:
    """Walk once around the cycle through Q and report whether it holds a distinguished point."""
    point, s = _walk_step(Q, scalar, G, curve, order)
    while True:
        if is_distinguished(point, bits):
            return True
        if point == Q:
            return False
        point, s = _walk_step(point, s, G, curve, order)


def rho_probe(G: ECPoint, a: int, b: int, p: int, order: int, cfg: ProbeConfig,
              rng: random.Random) -> ProbeResult:
    """Distinguished-point rho walk used as a resistance signal.

    Returns the first (scalar, point) whose x has ``cfg.distinguished_bits``
    trailing zero bits, or ``found=None`` when every trial runs out of
    iterations.
    """
    curve = CurveParams(a, b, p, G, order, 1)
    t = cfg.distinguished_bits
    start = time.monotonic()
    consumed = 0
    for _ in range(cfg.trials):
        if cfg.random_starts and order > 2:
            k = rng.randrange(1, order)
            tortoise, ts = ec_scalar_multiplication(G, k, curve), k
        else:
            tortoise, ts = G, 1 % order
        hare, hs = tortoise, ts
        power_of_two = 1
        iterations = 0
        while iterations < cfg.max_iterations:
            for _ in range(power_of_two):
                tortoise, ts = _walk_step(tortoise, ts, G, curve, order)
                if is_distinguished(tortoise, t):
                    return ProbeResult((ts, tortoise), consumed + iterations + 1,
                                       time.monotonic() - start)
            for _ in range(2):
                hare, hs = _walk_step(hare, hs, G, curve, order)
                if is_distinguished(hare, t):
                    return ProbeResult((hs, hare), consumed + iterations + 1,
                                       time.monotonic() - start)
            iterations += 1
            if tortoise == hare:
                # Both walkers now circle forever. A cycle without a distinguished
                # point can never succeed, and doubling the epoch would only make
                # the futile loop exponentially long, so charge the whole budget.
                if not _cycle_has_distinguished(tortoise, ts, G, curve, order, t):
                    iterations = cfg.max_iterations
                    break
                power_of_two *= 2
                hare, hs = tortoise, ts
        consumed += iterations
        if not cfg.random_starts and cfg.deterministic_timing:
            # Fixed starts replay the same walk, so the remaining trials would
            # fail identically. Only wall-clock timing needs them actually run.
            consumed = cfg.trials * cfg.max_iterations
            break
    return ProbeResult(None, consumed, time.monotonic() - start)


def execution_score(elapsed: float, cfg: ProbeConfig) -> float:
    return max(0.0, min(1.0, (elapsed - cfg.min_time) / (cfg.max_time - cfg.min_time)))


def probe_time(result: ProbeResult, cfg: ProbeConfig) -> float:
    if not cfg.deterministic_timing:
        return result.elapsed
    if cfg.max_iterations == 0:
        return 0.0
    return result.iterations / cfg.max_iterations * cfg.max_time


def compose_fitness(n: int, hasse: float, execution: float, resistance: int) -> float:
    log_n = math.log(n)
    return 0.4 * log_n + 0.2 * hasse * log_n + 0.2 * execution + 0.2 * resistance


def evaluate(candidate: CurveParams, cfg: ProbeConfig, rng: random.Random,
             probe=None) -> FitnessReport:
    """Score a parameter set; invalid sets score exactly 0.

    ``probe`` replaces :func:`rho_probe` (same signature); tests use it to
    force a probe outcome.
    """
    ok, reason = validate_curve(candidate)
    if not ok:
        return FitnessReport(valid=False, rejection_reason=reason)
    p, n = candidate.p, candidate.n
    hasse = hasse_score(p, n, cfg.hasse_lower)
    # The probe walks modulo the Hasse-expected order, not the declared n.
    result = (probe or rho_probe)(candidate.G, candidate.a, candidate.b, p,
                                  expected_order(p), cfg, rng)
    elapsed = probe_time(result, cfg)
    execution = execution_score(elapsed, cfg)
    resistance = 1 if result.found is None else 0
    return FitnessReport(
        valid=True,
        hasse_score=hasse,
        execution_score=execution,
        attack_resistance_score=resistance,
        fitness=compose_fitness(n, hasse, execution, resistance),
        probe_elapsed=elapsed,
    )

