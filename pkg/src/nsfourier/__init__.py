"""Expansions of periodic functions over dilated non-sinusoidal generators."""

from .convert import GeneratorBasis, NonSinSpectrum, expand_general, expand_spectrum, reconstruct_sin
from .errors import (
    NSFourierError,
    NumericError,
    ParseError,
    ParityError,
    PreconditionError,
)
from .ortho import gram_schmidt, project, to_nonorthogonal
from .piecewise import PiecewiseFunction
from .quasisin import Kernel, make, smooth
from .spectrum import SinSpectrum, compute_spectrum

__all__ = [
    "GeneratorBasis",
    "Kernel",
    "NSFourierError",
    "NonSinSpectrum",
    "NumericError",
    "ParityError",
    "ParseError",
    "PiecewiseFunction",
    "PreconditionError",
    "SinSpectrum",
    "compute_spectrum",
    "expand_general",
    "expand_spectrum",
    "gram_schmidt",
    "make",
    "project",
    "reconstruct_sin",
    "smooth",
    "to_nonorthogonal",
]
