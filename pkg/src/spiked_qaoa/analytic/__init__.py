"""Closed-form finite-n expectations, limiting laws and depth-p coefficients."""

from .coeffs import CoeffTables, coeff_engine, enhancement_factor
from .finite_n import (
    MgfResult,
    MgfSeriesTerm,
    mgf_second_moment,
    p1_biased_expected_overlap,
    p1_expected_mgf,
    p1_expected_mgf_series,
    p1_expected_sq_overlap_general_q,
    p1_q2_expected_sq_overlap,
    second_moment_terms,
    truncation_bound,
)
from .laws import (
    ArctanGaussianLaw,
    QuadratureResult,
    QuadratureWarning,
    RoundedGaussianLaw,
    SineGaussianLaw,
    gaussian_expectation,
    law_histogram,
    law_moment,
    law_moment_result,
    pi_asymptotic_law,
    pi_biased_limit,
    qaoa_biased_limit,
    rounded_pi_law,
    sample_law,
    sine_gaussian_law,
    sine_gaussian_law_p1,
)
from .scaling import epsilon_p, rho_ell, scaled_snr

__all__ = [
    "ArctanGaussianLaw",
    "CoeffTables",
    "MgfResult",
    "MgfSeriesTerm",
    "QuadratureResult",
    "QuadratureWarning",
    "RoundedGaussianLaw",
    "SineGaussianLaw",
    "coeff_engine",
    "enhancement_factor",
    "epsilon_p",
    "gaussian_expectation",
    "law_histogram",
    "law_moment",
    "law_moment_result",
    "mgf_second_moment",
    "p1_biased_expected_overlap",
    "p1_expected_mgf",
    "p1_expected_mgf_series",
    "p1_expected_sq_overlap_general_q",
    "p1_q2_expected_sq_overlap",
    "pi_asymptotic_law",
    "pi_biased_limit",
    "qaoa_biased_limit",
    "rho_ell",
    "rounded_pi_law",
    "sample_law",
    "scaled_snr",
    "second_moment_terms",
    "sine_gaussian_law",
    "sine_gaussian_law_p1",
    "truncation_bound",
]
