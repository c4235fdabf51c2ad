"""
Coherent and incoherent three-level quantum heat engines.

Steady states, full counting statistics of power and heat, and classical and
quantum thermodynamic uncertainty diagnostics, each with a numerical route
and a closed-form oracle.
"""

from .engine import (CountingField, EngineKind, EngineParams, InvalidParameters, NotAnEngine, liouvillian,
                     occupations, rates)
from .steady import DegenerateSteadyState, Observables, observables, steady_closed, steady_numeric
from .fcs import CountedObservable, CumulantReport, NumericalInstability, ZeroMean, cumulants, cumulants_closed
from .bounds import FanoReport, TURReport, ctur, drazin, fano, qtur_bound, qtur_bound_closed, tur_report

__version__ = "0.1.0"
