"""driftlab: eigenvalues of the drifting Laplacian on model metric measure
spaces, and numerical verification of universal gap inequalities."""

from .model_space import (
    Domain,
    GeometrySpec,
    WeightFunction,
    drift_quantities,
    eval_potential,
    schrodinger_potential,
    weighted_mean_of_f,
)
from .discretize import (
    GeneralizedPair,
    Grid,
    SparseSymmetricOperator,
    assemble_schrodinger,
    assemble_weighted,
    stencil_consistency_order,
)
from .eigensolve import (
    SolverConfig,
    Spectrum,
    refine_and_extrapolate,
    smallest_k,
    smallest_k_generalized,
)
from .oracles import (
    box_spectrum,
    interval_spectrum,
    ou_spectrum,
    product_spectrum,
    sphere_spectrum,
    torus_spectrum,
)
from . import bounds, harness
from .errors import ConvergenceError, DriftLabError, UnderResolvedError

__version__ = "0.1.0"
