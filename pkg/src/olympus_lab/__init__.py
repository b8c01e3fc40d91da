"""Fitness-landscape laboratory for the radius-3 cellular-automaton majority task.

Submodules
----------
ca          rule tables, lattice states, bit-sliced simulation, standard performance
rules       symmetries, rule catalogs, schemata, the Olympus subspace, distances
sampling    neutrality test, density of states, Metropolis-Hastings, FDC, fitness cloud, NSC
neutral     neutral walks, neutral degree, innovation, evolvability horizon
timeseries  random walks, acf/pacf, correlation length, ARMA fitting, Ljung-Box
evolver     Olympus-restricted genetic algorithms
cli         the ``olympus-lab`` command
"""
__version__ = "0.1.0"

from .ca import (FitnessEstimate, IcSample, LatticeState, Outcome, RuleTable, classify,
                 cumulative_update, evaluate, standard_performance, step)
from .errors import DegenerateVariance, DomainError, InsufficientData, NonConvergence
from .rules import (BLOK, BLOK_PRIME, CENTROID_PRIME, OLYMPUS, SCHEMA_S, MembershipError, Schema,
                    centroid, embed, hamming, project, s01, schema_of, srl, symmetry_orbit)

__all__ = [
    "FitnessEstimate", "IcSample", "LatticeState", "Outcome", "RuleTable", "classify",
    "cumulative_update", "evaluate", "standard_performance", "step",
    "DegenerateVariance", "DomainError", "InsufficientData", "NonConvergence",
    "BLOK", "BLOK_PRIME", "CENTROID_PRIME", "OLYMPUS", "SCHEMA_S", "MembershipError", "Schema",
    "centroid", "embed", "hamming", "project", "s01", "schema_of", "srl", "symmetry_orbit",
]
