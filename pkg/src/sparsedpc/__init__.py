"""Quantitative differential phase contrast reconstruction.

Transfer functions are built from the optical geometry (:mod:`.optics`),
measurements simulated through the linear forward model (:mod:`.forward`),
and phase recovered by Tikhonov, total variation, or the two sparse-prior
solvers in :mod:`.solvers`. :mod:`.sensor` sets the penalty weights from the
data and :mod:`.metrics` scores the result.
"""

from .errors import (
    ConfigurationError,
    DegenerateOpticsError,
    DivergenceError,
    DivisionDegenerateError,
    ManifestError,
    SingularDeconvolutionError,
    SymmetryViolationError,
)
from .forward import (
    NoiseSpec,
    RawImagePair,
    add_noise,
    add_stack_noise,
    compose_dpc,
    simulate_dpc,
    simulate_raw_pair,
    simulate_stack,
)
from .metrics import LsnrResult, SparsityReport, l0_count, lsnr, sparsity_stats
from .operators import DpcStack
from .optics import (
    OpticalConfig,
    compute_ptf,
    dpc_transfer_functions,
    kernel_from_ptf,
    make_frequency_grid,
    make_pupil,
    make_source_pair,
    single_side_transfer_functions,
)
from .phantoms import PhantomSpec, generate_phantom
from .sensor import NoiseEstimate, auto_params, estimate_noise
from .solvers import (
    HqsConfig,
    RldConfig,
    TikhonovConfig,
    TvConfig,
    hqs_reconstruct,
    rld_reconstruct,
    tikhonov_reconstruct,
    tv_reconstruct,
)

__version__ = "0.1.0"
