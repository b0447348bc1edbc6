"""Variable-density sampling along short paths, with a reconstruction harness.

The package turns a target density on the unit hypercube into a continuous
sampling trajectory: draw points from an exponent-corrected density, link
them with a short open path, traverse it at constant speed, and resample.
A compressed-sensing experiment compares the resulting Fourier-domain
masks against independent drawing.
"""
from . import errors
from .calibration import (
    DEFAULT_BETA_2D,
    BetaEstimate,
    choose_n,
    density_length_factor,
    estimate_beta,
    expected_length,
    read_estimate,
    write_estimate,
)
from .density import (
    DensityGrid,
    cell_mass,
    coarsen,
    from_values,
    inverse_adjusted_density,
    normalize,
    radial_polynomial_density,
    read_density,
    tsp_adjusted_density,
    uniform,
    write_density,
)
from .experiment import (
    SCHEMES,
    ExperimentConfig,
    ExperimentRow,
    iid_mask_for_budget,
    read_report,
    run_experiment,
    run_pipeline,
    tsp_mask_for_budget,
    write_report,
)
from .recon import (
    Image,
    PHANTOM_ELLIPSES,
    ReconConfig,
    ReconResult,
    SamplingMask,
    ellipse_phantom,
    mask_from_points,
    measure,
    read_mask,
    read_pgm,
    read_raw,
    reconstruct,
    shepp_logan,
    snr_db,
    write_mask,
    write_pgm,
    write_raw,
)
from .sampler import (
    PointSet,
    derive_seed,
    draw_points,
    empirical_cell_histogram,
    read_points,
    write_points,
)
from .trajectory import (
    EmpiricalDistribution,
    Trajectory,
    empirical_distribution,
    parameterize,
    point_distribution,
    read_empirical,
    read_trajectory,
    resample,
    tv_distance,
    write_empirical,
    write_trajectory,
)
from .tsp import (
    EXACT_LIMIT,
    HeuristicConfig,
    Tour,
    path_length,
    read_tour,
    solve_exact,
    solve_heuristic,
    write_tour,
)
from .wavelets import default_levels, forward2d, inverse2d

__version__ = "0.1.0"
