"""Modular arithmetic and affine short-Weierstrass curve arithmetic.

Everything here works on plain Python integers. Randomness is always passed
in as a ``random.Random`` handle so that curve generation is reproducible.
"""

from __future__ import annotations

import logging
import math
import random
import time
from dataclasses import dataclass
from typing import Optional

import gmpy2
import numpy as np

logger = logging.getLogger(__name__)

DEFAULT_SCAN_LIMIT = 100_000
DEFAULT_GENERATOR_BUDGET = 5.0
MILLER_RABIN_ROUNDS = 40
BRUTEFORCE_LIMIT = 1 << 20

_SMALL_PRIMES = [q for q in range(3, 1000) if all(q % d for d in range(2, math.isqrt(q) + 1))]


class NonInvertible(ArithmeticError):
    pass


class NotAResidue(ValueError):
    pass


class NoGeneratorPoint(Exception):
    pass


class GeneratorTimeout(TimeoutError):
    pass


class TooLarge(ValueError):
    pass


@dataclass(frozen=True)
class ECPoint:
    """Affine point; ``ECPoint.infinity()`` is the group identity."""

    x: Optional[int] = None
    y: Optional[int] = None
    is_infinity: bool = False

    @classmethod
    def infinity(cls) -> "ECPoint":
        return cls(None, None, True)

    def __eq__(self, other):
        if not isinstance(other, ECPoint):
            return NotImplemented
        if self.is_infinity or other.is_infinity:
            return self.is_infinity and other.is_infinity
        return self.x == other.x and self.y == other.y

    def __hash__(self):
        return hash(None) if self.is_infinity else hash((self.x, self.y))

    def __repr__(self):
        return "ECPoint(inf)" if self.is_infinity else f"ECPoint({self.x}, {self.y})"


INFINITY = ECPoint.infinity()


@dataclass(frozen=True)
class CurveParams:
    """Domain parameters (a, b, p, G, n, h) of y^2 = x^3 + a x + b over F_p."""

    a: int
    b: int
    p: int
    G: ECPoint
    n: int
    h: int

    def as_dict(self) -> dict:
        return {"p": self.p, "a": self.a, "b": self.b, "Gx": self.G.x, "Gy": self.G.y,
                "n": self.n, "h": self.h}


def mod_inverse(v: int, p: int) -> int:
    """Return u with u*v = 1 (mod p)."""
    v %= p
    if v == 0:
        raise NonInvertible(f"0 has no inverse modulo {p}")
    try:
        return int(gmpy2.invert(v, p))
    except ZeroDivisionError as exc:
        raise NonInvertible(f"{v} is not invertible modulo {p}") from exc


def legendre_symbol(a: int, p: int) -> int:
    ls = pow(a, (p - 1) // 2, p)
    return -1 if ls == p - 1 else ls


def tonelli_shanks(n: int, p: int) -> int:
    """Square root of a quadratic residue ``n`` modulo an odd prime ``p``.

    The root returned is the one the classical procedure lands on when the
    auxiliary non-residue is the smallest one; it is not canonicalised.
    """
    if legendre_symbol(n, p) != 1:
        raise NotAResidue(f"{n} is not a quadratic residue modulo {p}")
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    if s == 1:
        return pow(n, (p + 1) // 4, p)
    z = 2
    while legendre_symbol(z, p) != -1:
        z += 1
    m = s
    c = pow(z, q, p)
    t = pow(n, q, p)
    r = pow(n, (q + 1) // 2, p)
    while t != 1:
        i, t_i = 0, t
        while t_i != 1:
            t_i = t_i * t_i % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        r = r * b % p
        t = t * b * b % p
        c = b * b % p
        m = i
    return r


def is_on_curve(P: ECPoint, a: int, b: int, p: int) -> bool:
    if P.is_infinity:
        return True
    if P.x is None or P.y is None:
        return False
    return (P.y * P.y - P.x * P.x * P.x - a * P.x - b) % p == 0


def ec_addition(P: ECPoint, Q: ECPoint, curve: CurveParams) -> ECPoint:
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    p = curve.p
    if P.x % p == Q.x % p:
        if (P.y + Q.y) % p == 0:
            return INFINITY
        m = (3 * P.x * P.x + curve.a) * mod_inverse(2 * P.y, p) % p
    else:
        m = (Q.y - P.y) * mod_inverse(Q.x - P.x, p) % p
    x = (m * m - P.x - Q.x) % p
    y = (m * (P.x - x) - P.y) % p
    return ECPoint(x, y)


def ec_double(P: ECPoint, curve: CurveParams) -> ECPoint:
    return ec_addition(P, P, curve)


def ec_negate(P: ECPoint, curve: CurveParams) -> ECPoint:
    if P.is_infinity:
        return P
    return ECPoint(P.x, (-P.y) % curve.p)


def ec_scalar_multiplication(P: ECPoint, s: int, curve: CurveParams) -> ECPoint:
    """Double-and-add, least significant bit first."""
    if s < 0:
        raise ValueError("scalar must be non-negative")
    result = INFINITY
    addend = P
    while s:
        if s & 1:
            result = ec_addition(result, addend, curve)
        s >>= 1
        if s:
            addend = ec_addition(addend, addend, curve)
    return result


def _curve(a: int, b: int, p: int) -> CurveParams:
    # Lightweight carrier for the arithmetic helpers; G, n, h are unused there.
    return CurveParams(a, b, p, INFINITY, 1, 1)


def is_probable_prime(m: int, rng: random.Random, rounds: int = MILLER_RABIN_ROUNDS) -> bool:
    if m < 2:
        return False
    if m in (2, 3):
        return True
    if m % 2 == 0:
        return False
    for q in _SMALL_PRIMES:
        if m == q:
            return True
        if m % q == 0:
            return False
    d, r = m - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for _ in range(rounds):
        w = rng.randrange(2, m - 1)
        x = pow(w, d, m)
        if x == 1 or x == m - 1:
            continue
        for _ in range(r - 1):
            x = x * x % m
            if x == m - 1:
                break
        else:
            return False
    return True


def get_prime_for_p(bits: int, rng: random.Random) -> int:
    """Random prime with exactly ``bits`` significant bits."""
    if bits < 4:
        raise ValueError("bits must be at least 4")
    top = 1 << (bits - 1)
    while True:
        candidate = rng.getrandbits(bits) | top | 1
        if is_probable_prime(candidate, rng):
            return candidate


def find_generator_point(a: int, b: int, p: int, *, scan_limit: int = DEFAULT_SCAN_LIMIT,
                         time_budget: Optional[float] = DEFAULT_GENERATOR_BUDGET) -> ECPoint:
    """First affine point (x, y) with the smallest x whose rhs is a nonzero square.

    Raises NoGeneratorPoint once ``scan_limit`` x values have been tried and
    GeneratorTimeout when ``time_budget`` seconds have elapsed.
    """
    deadline = None if time_budget is None else time.monotonic() + time_budget
    for x in range(min(p, scan_limit)):
        rhs = (x * x * x + a * x + b) % p
        if legendre_symbol(rhs, p) == 1:
            return ECPoint(x, tonelli_shanks(rhs, p))
        if deadline is not None and x % 256 == 255 and time.monotonic() > deadline:
            raise GeneratorTimeout(f"generator search exceeded {time_budget}s")
    raise NoGeneratorPoint(f"no point found within {min(p, scan_limit)} x values")


def is_singular(a: int, b: int, p: int) -> bool:
    return (4 * a ** 3 + 27 * b ** 2) % p == 0


def generate_curve(bits: int, rng: random.Random, *, scan_limit: int = DEFAULT_SCAN_LIMIT,
                   time_budget: Optional[float] = DEFAULT_GENERATOR_BUDGET) -> CurveParams:
    """Random nonsingular curve with a point on it, declared n = p - 1 and h = 1."""
    while True:
        p = get_prime_for_p(bits, rng)
        while True:
            a = rng.randint(0, p - 1)
            b = rng.randint(0, p - 1)
            if not is_singular(a, b, p):
                break
        try:
            G = find_generator_point(a, b, p, scan_limit=scan_limit, time_budget=time_budget)
        except (NoGeneratorPoint, GeneratorTimeout):
            logger.debug("generator search failed for p=%d, regenerating", p)
            continue
        return CurveParams(a, b, p, G, p - 1, 1)


def count_points_bruteforce(a: int, b: int, p: int) -> int:
    """#E(F_p) including the point at infinity, by direct enumeration."""
    if p > BRUTEFORCE_LIMIT:
        raise TooLarge(f"p={p} exceeds the brute-force limit {BRUTEFORCE_LIMIT}")
    xs = np.arange(p, dtype=np.int64)
    roots_per_value = np.bincount(xs * xs % p, minlength=p)
    rhs = (xs * xs % p * xs + a % p * xs + b % p) % p
    return 1 + int(roots_per_value[rhs].sum())


def hasse_interval(p: int) -> tuple[int, int]:
    """Integer interval guaranteed to contain every group order over F_p."""
    s = math.isqrt(p)
    return p + 1 - 2 * s - 1, p + 1 + 2 * s + 1
