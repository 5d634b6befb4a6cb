"""Hyperbolic normal stochastic-volatility model toolkit.

Exact Monte-Carlo simulation, closed-form Johnson-S_U pricing and risk
measures, the Hagan normal-SABR volatility approximation, moment-matching
parameter estimation and volatility-smile calibration.
"""

from ._nsvh import (  # noqa: F401
    CalibrationResult,
    InfeasibleError,
    MomentSummary,
    NoSolutionError,
    NsvhParams,
    bachelier_price,
    calibrate_smile,
    central_moments,
    cond_moment2,
    cond_moment4,
    empirical_var_es,
    es_closed,
    fit_normal_sabr,
    fit_su,
    hagan_normal_vol,
    heat_kernel_h3,
    implied_normal_vol,
    norm_cdf,
    norm_pdf,
    norm_quantile,
    phi_radius,
    price_option_mc,
    probability_plot_scores,
    sample_moments,
    simulate_paths,
    smile_curve,
    stable_exp_ratio,
    su_cdf,
    su_option_price,
    su_pdf,
    su_quantile,
    su_sample,
    terminal_samples,
    uncond_moments_x,
    var_closed,
    var_es_mc,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
