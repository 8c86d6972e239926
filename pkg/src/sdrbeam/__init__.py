"""Robust adaptive beamforming through globally optimal steering-vector estimation.

The estimator solves ``min a^H R^-1 a`` subject to ``||a||^2 = M`` and an
out-of-sector energy bound ``a^H C~ a <= Delta0`` exactly, through a
one-dimensional dual search with certified primal recovery.
"""

from .array_model import ArrayGeometry, beampattern, power_db, steering
from .beamform import METHODS, BeamWeights, MethodSettings, build_weights
from .errors import (BoundaryFeasibleError, DomainError, ExtractionError, InconsistencyError,
                     InfeasibleError, SingularCovarianceError)
from .evaluation import SinrCurve, Sweep, optimal_sinr, output_sinr, run_monte_carlo
from .sector import AngularSector, Feasibility, SectorModel
from .sim import (CoherentScattering, Exact, Interferer, PhaseDistortion, Scenario,
                  sample_covariance)
from .svest import (RelaxedSolution, SvEstimate, estimate_steering, rank_one_extract,
                    relaxed_to_feasible_point)

__version__ = "0.1.0"

__all__ = [
    "ArrayGeometry", "steering", "beampattern", "power_db",
    "AngularSector", "Feasibility", "SectorModel",
    "Scenario", "Interferer", "Exact", "PhaseDistortion", "CoherentScattering", "sample_covariance",
    "estimate_steering", "SvEstimate", "RelaxedSolution", "rank_one_extract", "relaxed_to_feasible_point",
    "METHODS", "BeamWeights", "MethodSettings", "build_weights",
    "Sweep", "SinrCurve", "run_monte_carlo", "output_sinr", "optimal_sinr",
    "DomainError", "InfeasibleError", "BoundaryFeasibleError", "SingularCovarianceError",
    "ExtractionError", "InconsistencyError",
]
