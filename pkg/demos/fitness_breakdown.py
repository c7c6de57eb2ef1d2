"""
Where a curve's fitness comes from
==================================

The score mixes the size of the group order, how close that order sits to
the centre of the Hasse interval, how long a rho probe runs and whether the
probe failed to find anything.
"""

import random

from eccforge import ProbeConfig, evaluate
from eccforge.ecmath import CurveParams, ECPoint, generate_curve
from eccforge.simnet import load_params

probe = ProbeConfig(deterministic_timing=True)

# a toy curve: the probe lands on a distinguished point at once
toy = CurveParams(2, 2, 17, ECPoint(5, 1), 19, 1)
print("toy", evaluate(toy, probe, random.Random(0)))

# a standard curve
secp = load_params("secp256k1")
print("secp256k1", evaluate(secp, probe, random.Random(0)))

# the same curve scored with the wider lower bound
wide = ProbeConfig(deterministic_timing=True, hasse_lower="hasse")
print("secp256k1 (wide bound)", evaluate(secp, wide, random.Random(0)).fitness)

# randomly generated 256-bit candidates
rng = random.Random(7)
for _ in range(3):
    params = generate_curve(256, rng, time_budget=None)
    report = evaluate(params, probe, rng)
    print(f"a={params.a:.3e} b={params.b:.3e} valid={report.valid} fitness={report.fitness:.6g}")

# broken parameter sets score zero, and say why
print(evaluate(CurveParams(0, 0, 17, ECPoint(0, 0), 17, 1), probe, rng).rejection_reason)
print(evaluate(CurveParams(2, 2, 15, ECPoint(5, 1), 19, 1), probe, rng).rejection_reason)
