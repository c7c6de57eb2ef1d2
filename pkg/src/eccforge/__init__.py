"""Evolve elliptic curve parameters with GA and PSO, then exercise them in an
encrypted order-exchange simulation."""

from .ecmath import CurveParams, ECPoint, INFINITY
from .fitness import FitnessReport, ProbeConfig, evaluate, validate_curve
from .ga import GaConfig, run_ga
from .pso import PsoConfig, run_pso

__all__ = [
    "CurveParams", "ECPoint", "INFINITY",
    "FitnessReport", "ProbeConfig", "evaluate", "validate_curve",
    "GaConfig", "run_ga", "PsoConfig", "run_pso",
]
__version__ = "0.1.0"
