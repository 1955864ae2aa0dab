"""Bayesian prognostic covariate adjustment for two-arm randomized trials.

Thin wrapper over the C++ core: closed-form posteriors, frequentist
comparator analyses, prior elicitation from historical data, asymptotic
operating characteristics, and a seeded Monte Carlo harness.
"""

from ._core import (  # noqa: F401
    RandomStream,
    TrialData,
    Posterior,
    __version__,
    asymptotic_rejection_rate,
    bayes_analysis,
    bayes_beta2_analysis,
    chisq_quantile,
    compute_posterior,
    compute_posterior_beta2,
    decide,
    estimate_rejection_rate,
    generate_trial,
    load_trial_csv,
    normal_cdf,
    normal_quantile,
    prog_adjust_analysis,
    prog_adjust_power,
    run_sweep_csv,
    run_sweep_json,
    single_arm_analysis,
    single_arm_power,
    student_t_cdf,
    student_t_quantile,
    subject_level_lambda,
    study_level_lambda,
    summarize,
    unadjusted_analysis,
    variance_factor,
    zero_limit_rate,
)
