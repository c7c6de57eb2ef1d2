"""Pollard's rho against Entity B's public key.

Each walker tracks point = u*G + v*Q. Floyd's tortoise (one step per loop)
and hare (two steps) collide at some point with different coefficient pairs,
giving d = (u_t - u_h) / (v_h - v_t) mod n.
"""

from __future__ import annotations

import logging
import multiprocessing
import random
import threading
import time
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .ecmath import (
    CurveParams,
    ECPoint,
    NonInvertible,
    ec_addition,
    ec_scalar_multiplication,
    mod_inverse,
)

logger = logging.getLogger(__name__)

DEFAULT_STEP_BUDGET = 10 ** 6


@dataclass(frozen=True)
class WalkerState:
    point: ECPoint
    u: int
    v: int


def _combine(u: int, v: int, G: ECPoint, Q: ECPoint, params: CurveParams) -> ECPoint:
    return ec_addition(ec_scalar_multiplication(G, u, params),
                       ec_scalar_multiplication(Q, v, params), params)


def random_state(G: ECPoint, Q: ECPoint, params: CurveParams, rng: random.Random) -> WalkerState:
    n = params.n
    while True:
        u, v = rng.randrange(n), rng.randrange(n)
        point = _combine(u, v, G, Q, params)
        if not point.is_infinity:
            return WalkerState(point, u, v)


def rho_step(state: WalkerState, G: ECPoint, Q: ECPoint, params: CurveParams,
             rng: random.Random) -> WalkerState:
    """Three-way partition on x mod 3: add Q, double, add G."""
    point, u, v, n = state.point, state.u, state.v, params.n
    if point.is_infinity:
        return random_state(G, Q, params, rng)
    case = point.x % 3
    if case == 0:
        nxt = WalkerState(ec_addition(point, Q, params), u, (v + 1) % n)
    elif case == 1:
        nxt = WalkerState(ec_addition(point, point, params), 2 * u % n, 2 * v % n)
    else:
        nxt = WalkerState(ec_addition(point, G, params), (u + 1) % n, v)
    if nxt.point.is_infinity:
        return random_state(G, Q, params, rng)
    return nxt


@dataclass
class WalkResult:
    key: Optional[int]
    loops: int
    restarts: int = 0


def pollards_rho_attack(G: ECPoint, Q: ECPoint, params: CurveParams, init_value: int,
                        step_budget: int = DEFAULT_STEP_BUDGET, shared_stop=None,
                        rng: Optional[random.Random] = None) -> Optional[int]:
    return rho_walk(G, Q, params, init_value, step_budget, shared_stop, rng).key


def rho_walk(G: ECPoint, Q: ECPoint, params: CurveParams, init_value: int,
             step_budget: int = DEFAULT_STEP_BUDGET, shared_stop=None,
             rng: Optional[random.Random] = None) -> WalkResult:
    """Floyd cycle detection for at most min(step_budget, 2n + 1) loops.

    Collisions whose v coefficients agree, or whose key fails the d*G == Q
    check, restart the walk from a fresh random state.
    """
    rng = rng or random.Random(init_value)
    n = params.n
    start = ec_scalar_multiplication(G, init_value % n, params)
    tortoise = WalkerState(start, init_value % n, 0)
    if start.is_infinity:
        tortoise = random_state(G, Q, params, rng)
    hare = tortoise
    restarts = 0
    limit = min(step_budget, 2 * n + 1)
    for loop in range(1, limit + 1):
        tortoise = rho_step(tortoise, G, Q, params, rng)
        hare = rho_step(rho_step(hare, G, Q, params, rng), G, Q, params, rng)
        if tortoise.point == hare.point:
            dv = (hare.v - tortoise.v) % n
            key = None
            if dv:
                try:
                    key = (tortoise.u - hare.u) * mod_inverse(dv, n) % n
                except NonInvertible:
                    key = None
            if key is not None and ec_scalar_multiplication(G, key, params) == Q:
                return WalkResult(key, loop, restarts)
            restarts += 1
            tortoise = hare = random_state(G, Q, params, rng)
        if shared_stop is not None and shared_stop.is_set():
            return WalkResult(None, loop, restarts)
    return WalkResult(None, limit, restarts)


@dataclass
class AttackReport:
    key: Optional[int]
    verified: bool
    wall_time: float
    loops_per_worker: list = field(default_factory=list)
    workers: int = 1

    def render(self) -> str:
        lines = [f"workers: {self.workers}",
                 f"loops per worker: {', '.join(map(str, self.loops_per_worker))}",
                 f"wall time: {self.wall_time:.3f}s"]
        if self.key is not None:
            lines.insert(0, f"private key recovered: {self.key}")
        else:
            lines.insert(0, "no key recovered: step budget exhausted")
        return "\n".join(lines)


def _worker(args):
    G, Q, params, init_value, step_budget, stop, seed = args
    result = rho_walk(G, Q, params, init_value, step_budget, stop, random.Random(seed))
    if result.key is not None:
        stop.set()
    return result


def attack_key(G: ECPoint, Q: ECPoint, params: CurveParams, workers: int = 1,
               step_budget: int = DEFAULT_STEP_BUDGET, rng: Optional[random.Random] = None,
               use_processes: bool = True) -> AttackReport:
    """Run ``workers`` independent walks that share a stop flag; first verified key wins."""
    rng = rng or random.Random()
    n = params.n
    start = time.monotonic()
    jobs_seed = [(rng.randrange(1, n), rng.getrandbits(64)) for _ in range(workers)]
    if workers == 1 or not use_processes:
        stop = threading.Event()
        jobs = [(G, Q, params, init, step_budget, stop, seed) for init, seed in jobs_seed]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_worker, jobs))
    else:
        with multiprocessing.Manager() as manager:
            stop = manager.Event()
            jobs = [(G, Q, params, init, step_budget, stop, seed) for init, seed in jobs_seed]
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_worker, jobs))
    key = next((r.key for r in results if r.key is not None), None)
    verified = key is not None and ec_scalar_multiplication(G, key, params) == Q
    return AttackReport(key if verified else None, verified, time.monotonic() - start,
                        [r.loops for r in results], workers)


def attack_entity_b(server: str, workers: int = 1, step_budget: int = DEFAULT_STEP_BUDGET,
                    rng: Optional[random.Random] = None, use_processes: bool = True) -> AttackReport:
    """Fetch the curve and public key from Entity B, then attack the key.

    Network errors propagate before any walker starts.
    """
    from .simnet.client import fetch_params, fetch_public_key

    params = fetch_params(server, retries=1)
    Q = fetch_public_key(server, retries=1)
    return attack_key(params.G, Q, params, workers, step_budget, rng, use_processes)
