"""
Point arithmetic on a small curve
=================================

y^2 = x^3 + 2x + 2 over F_17 has 19 points, so every point other than
infinity generates the whole group.
"""

import numpy as np

from eccforge.ecmath import (CurveParams, ECPoint, INFINITY, count_points_bruteforce,
                             ec_addition, ec_scalar_multiplication, tonelli_shanks)

a, b, p = 2, 2, 17
G = ECPoint(5, 1)
curve = CurveParams(a, b, p, G, 19, 1)

# all the multiples of G, until we come back to infinity
multiples = [ec_scalar_multiplication(G, k, curve) for k in range(1, 20)]
for k, P in enumerate(multiples, 1):
    print(f"{k:2d}G = {'O' if P.is_infinity else (P.x, P.y)}")

# addition agrees with scalar multiplication
assert ec_addition(multiples[2], multiples[4], curve) == multiples[7]
assert multiples[-1] == INFINITY

# count the points by hand with numpy: x^3 + ax + b must be a square (or zero)
xs = np.arange(p)
rhs = (xs ** 3 + a * xs + b) % p
squares = np.zeros(p, dtype=bool)
squares[(xs * xs) % p] = True
total = 1 + int(np.sum(np.where(rhs == 0, 1, 2 * squares[rhs])))
print("points counted with numpy:", total, "brute force:", count_points_bruteforce(a, b, p))

# square roots modulo p recover the y coordinates
for x in xs[squares[rhs] & (rhs > 0)][:4]:
    y = tonelli_shanks(int(rhs[x]), p)
    print(f"x={x}: y={y} or {p - y}")
