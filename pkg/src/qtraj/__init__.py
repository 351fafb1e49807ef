"""Open quantum system simulator: one Lindblad model, four ways to evolve it.

Deterministic master-equation integration (RK4 plus an exact
matrix-exponential oracle) and three stochastic pure-state unravelings
(quantum state diffusion / heterodyne, homodyne, quantum jumps), with
pathwise re-representation comparisons, ensemble reductions, stroboscopic
Poincare sections, a JSON-config CLI, and a FastAPI service.
"""

from .errors import (
    QtrajError,
    DimensionError,
    InvariantError,
    IntegrationError,
    GridError,
)
from .statespace import (
    StateVector,
    OperatorMatrix,
    DensityMatrix,
    expectation,
    projector,
    trace_distance,
    matrix_exp,
)
from .model import (
    LindbladModel,
    RepresentationTransform,
    DrivePeriod,
    apply_transform,
    qubit_decay_model,
    driven_duffing_model,
    duffing_period,
)
from .master import (
    MasterEvolutionConfig,
    DensitySeries,
    lindblad_rhs,
    rk4_evolve,
    liouvillian_matrix,
    exact_evolve,
)
from .unravel import (
    NoisePath,
    TrajectoryConfig,
    TrajectoryRecord,
    PathwiseComparison,
    split,
    make_noise,
    transform_noise,
    qsd_step,
    homodyne_step,
    jump_trajectory,
    run_trajectory,
    run_ensemble,
    run_ensemble_mean,
    compare_pathwise,
)
from .analysis import (
    PoincareSection,
    expectation_series,
    ensemble_mean_projector,
    poincare_sample,
    fock_quadratures,
)
from .config import (
    ConfigError,
    RunConfig,
    observable_matrix,
    parse_config,
    render_config,
)

__version__ = "0.1.0"

__all__ = [
    "QtrajError",
    "DimensionError",
    "InvariantError",
    "IntegrationError",
    "GridError",
    "StateVector",
    "OperatorMatrix",
    "DensityMatrix",
    "expectation",
    "projector",
    "trace_distance",
    "matrix_exp",
    "LindbladModel",
    "RepresentationTransform",
    "DrivePeriod",
    "apply_transform",
    "qubit_decay_model",
    "driven_duffing_model",
    "duffing_period",
    "MasterEvolutionConfig",
    "DensitySeries",
    "lindblad_rhs",
    "rk4_evolve",
    "liouvillian_matrix",
    "exact_evolve",
    "NoisePath",
    "TrajectoryConfig",
    "TrajectoryRecord",
    "PathwiseComparison",
    "split",
    "make_noise",
    "transform_noise",
    "qsd_step",
    "homodyne_step",
    "jump_trajectory",
    "run_trajectory",
    "run_ensemble",
    "run_ensemble_mean",
    "compare_pathwise",
    "PoincareSection",
    "expectation_series",
    "ensemble_mean_projector",
    "poincare_sample",
    "fock_quadratures",
    "ConfigError",
    "RunConfig",
    "observable_matrix",
    "parse_config",
    "render_config",
    "__version__",
]
