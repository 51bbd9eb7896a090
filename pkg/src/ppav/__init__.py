"""Polarized abelian varieties from metrics and symplectic forms, their Siegel
periods and theta functions, and the characteristic-class and Hodge-theoretic
constructions that feed them."""
from .errors import NumericalError, ValidationError
from .forms import (
    ComplexStructureOp,
    MetricForm,
    SkewForm,
    hermitian_form,
    induced_metric,
    is_coherent,
    tame,
)
from .lattice import IntegralSkewForm, PolarizedAbelianVariety, RationalSkewForm, build_ppav
from .siegel import SiegelPoint, pair_to_siegel, siegel_to_structure
from .theta import BACKEND as THETA_BACKEND
from .theta import Characteristic, theta_eval

__version__ = "0.1.0"
