"""freeconv: numerics for free (square) and rectangular free convolution.

The package computes boundary values of Cauchy-type transforms through
subordination fixed points, recovers densities, atoms and support holes by
Stieltjes inversion, and cross-checks everything against a random-matrix
Monte Carlo oracle.
"""

from .errors import (BranchCutError, ConvergenceError, DomainError,
                     FreeconvError, PoleError, SpecError, SpecSemanticError,
                     SpecSyntaxError)
from .inversion import DensityCurve
from .measures import (Arcsine, AtomicMeasure, CauchyLaw, DiracMass,
                       FreePoisson, GridDensityMeasure, MarchenkoPastur,
                       Measure, RectIDLaw, RectStable, Semicircle,
                       SquareIDLaw, SymmetricBernoulli,
                       TransformDefinedMeasure, as_square_id,
                       cauchy_transform, psi_transform, push_forward_square,
                       reciprocal_cauchy, symmetric_sqrt, wasserstein1)
from .specparse import parse_measure_spec

__all__ = [
    "FreeconvError", "DomainError", "BranchCutError", "PoleError",
    "ConvergenceError", "SpecError", "SpecSyntaxError", "SpecSemanticError",
    "DensityCurve",
    "Measure", "AtomicMeasure", "DiracMass", "GridDensityMeasure",
    "Semicircle", "CauchyLaw", "SymmetricBernoulli", "FreePoisson",
    "Arcsine", "MarchenkoPastur", "RectStable", "SquareIDLaw", "RectIDLaw",
    "TransformDefinedMeasure",
    "cauchy_transform", "reciprocal_cauchy", "psi_transform",
    "push_forward_square", "symmetric_sqrt", "as_square_id", "wasserstein1",
    "parse_measure_spec",
]

__version__ = "0.1.0"
