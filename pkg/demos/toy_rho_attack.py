"""
Pollard's rho on curves of growing size
=======================================

The attack is instant on toy groups and hopeless at 256 bits: the step
budget runs out long before a collision.
"""

import random

import numpy as np

from eccforge.ecmath import CurveParams, ECPoint, ec_scalar_multiplication
from eccforge.rho_attack import attack_key
from eccforge.simnet import load_params

toy = CurveParams(1, 34, 4099, ECPoint(1, 6), 4049, 1)
rng = random.Random(5)

times = []
for secret in rng.sample(range(1, toy.n), 10):
    Q = ec_scalar_multiplication(toy.G, secret, toy)
    report = attack_key(toy.G, Q, toy, rng=rng)
    assert report.key == secret
    times.append(report.wall_time)
print(f"10 keys on a 4049-element group, mean {np.mean(times) * 1e3:.1f} ms")

# two workers sharing a stop flag
Q = ec_scalar_multiplication(toy.G, 1234, toy)
print(attack_key(toy.G, Q, toy, workers=2, rng=rng).render())

# secp256k1 with a small budget
secp = load_params("secp256k1")
Q = ec_scalar_multiplication(secp.G, rng.randrange(1, secp.n), secp)
print(attack_key(secp.G, Q, secp, step_budget=5000, rng=rng).render())
