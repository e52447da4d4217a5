"""Waves in media with distributed-order fractional constitutive laws.

Modules: ``measures`` (order measures), ``symbol`` (the symbols Phi and Psi),
``thermo`` (thermodynamic restriction, moduli, classification), ``analysis``
(material constants, smoothness), ``kernel`` (fundamental solution, step
response, Cauchy problem, weak velocities) and ``cli``.
"""

from __future__ import annotations

from .analysis import MaterialConstants, SmoothnessReport, constants, limit_rho, limit_tau, smoothness
from .errors import (ClassicalModelBranch, ConvergenceFailure, DivisionByZero, DofwaveError, ExceptionalModel,
                     IndeterminateRatio, MeasureError, NotAdmissible, OutsideCone, TruncationFailure)
from .kernel import (CauchyData, KernelGrid, Model, cauchy_solve, kernel, kernel_bromwich, kernel_grid,
                     kernel_hankel, kernel_hankel_classical, step_response_S, velocity_centroid,
                     weak_velocity_probe)
from .measures import Atom, Exponential, Measure, Power, Table, measure_from_json
from .symbol import PolarComplex, SymbolPair, phi_eval, psi_eval
from .thermo import check_restriction, classify, moduli

__version__ = "0.1.0"

__all__ = [
    "Atom", "Exponential", "Power", "Table", "Measure", "measure_from_json",
    "PolarComplex", "SymbolPair", "phi_eval", "psi_eval",
    "check_restriction", "classify", "moduli",
    "MaterialConstants", "SmoothnessReport", "constants", "limit_tau", "limit_rho", "smoothness",
    "Model", "CauchyData", "KernelGrid", "kernel", "kernel_hankel", "kernel_hankel_classical", "kernel_bromwich",
    "kernel_grid", "step_response_S", "cauchy_solve", "weak_velocity_probe", "velocity_centroid",
    "DofwaveError", "MeasureError", "DivisionByZero", "IndeterminateRatio", "ConvergenceFailure", "NotAdmissible",
    "OutsideCone", "ClassicalModelBranch", "ExceptionalModel", "TruncationFailure",
]
