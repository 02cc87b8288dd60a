from .grid import make_uniform_grid, grid_function, sup_norm, l2_norm, mixed_norm_2inf, evaluate_at
from .kernels import KERNELS, kernel_eval, kernel_matrix, kde_joint, kernel_numerator
from .operators import (
    operator_from_kernel,
    operator_norm_2inf,
    tikhonov_solve,
    tikhonov_solve_dual,
    resolvent_apply,
    resolvent_sup_bound,
)
from .estimators import (
    truncate_npiv,
    npiv_fit,
    npiv_process_rows,
    npiv_residuals,
    funreg_fit,
    deconv_fit,
    normal_equation_gap,
)
from .inference import (
    estimate_covariance,
    gaussian_quantile,
    rademacher_average,
    symmetrized_supremum,
    envelope_estimate,
    gaussian_half_width,
    concentration_half_width,
    build_band,
    dkw_half_width,
    dkw_band,
    covers,
)
from .simulation import (
    true_phi,
    dgp_covariance,
    simulate_npiv_dgp,
    true_deconv_density,
    simulate_deconv_dgp,
    run_coverage,
)
from .data_io import (
    load_npiv_csv,
    load_funreg_csv,
    load_deconv_csv,
    load_sample_csv,
    load_noise_table,
    parse_noise_spec,
    write_band_csv,
    write_ecdf_csv,
    write_report_json,
    write_curve_csv,
)

__all__ = [
    "make_uniform_grid",
    "grid_function",
    "sup_norm",
    "l2_norm",
    "mixed_norm_2inf",
    "evaluate_at",
    "KERNELS",
    "kernel_eval",
    "kernel_matrix",
    "kde_joint",
    "kernel_numerator",
    "operator_from_kernel",
    "operator_norm_2inf",
    "tikhonov_solve",
    "tikhonov_solve_dual",
    "resolvent_apply",
    "resolvent_sup_bound",
    "truncate_npiv",
    "npiv_fit",
    "npiv_process_rows",
    "npiv_residuals",
    "funreg_fit",
    "deconv_fit",
    "normal_equation_gap",
    "estimate_covariance",
    "gaussian_quantile",
    "rademacher_average",
    "symmetrized_supremum",
    "envelope_estimate",
    "gaussian_half_width",
    "concentration_half_width",
    "build_band",
    "dkw_half_width",
    "dkw_band",
    "covers",
    "true_phi",
    "dgp_covariance",
    "simulate_npiv_dgp",
    "true_deconv_density",
    "simulate_deconv_dgp",
    "run_coverage",
    "load_npiv_csv",
    "load_funreg_csv",
    "load_deconv_csv",
    "load_sample_csv",
    "load_noise_table",
    "parse_noise_spec",
    "write_band_csv",
    "write_ecdf_csv",
    "write_report_json",
    "write_curve_csv",
]
