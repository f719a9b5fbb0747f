"""Bayesian inference for two-period sequential treatments with latent
principal strata: simulation, Gibbs-sampled posteriors under three
assignment-mechanism specifications, and sensitivity analysis."""

__version__ = "0.1.0"

from .data import Dataset, Unit
from .estimator import SequentialTreatmentSampler, as_dataset
from .model import (
    assign_prob_lsi,
    assign_prob_si,
    ate_from_params,
    ates,
    expected_outcome,
    log_likelihood,
    outcome_mean,
    per_unit_log_likelihood,
    si_grouped_log_likelihood,
    strata_probs,
)
from .params import ParameterVector, SpecKind, parameter_names
from .posterior import (
    DensityGrid,
    SummaryRow,
    density_grid,
    diagnostics,
    effective_sample_size,
    functional_draws,
    rhat,
    summarize,
    summary_table,
)
from .sampler import (
    Chain,
    McmcConfig,
    PriorConfig,
    SamplerError,
    augment_stratum,
    run_chains,
    run_gibbs,
    truncated_normal,
    update_outcome_block,
    update_probit_block,
)
from .sensitivity import IpwResult, equality_gaps, ipw_msm_estimate, sensitivity_report
from .simulate import ScenarioConfig, generate, load_scenario, reference_scenario, true_ates
from .strata import (
    ALL_SEQUENCES,
    ALL_STRATA,
    ATE_CONTRASTS,
    ATE_NAMES,
    PrincipalStratum,
    TreatmentSequence,
    latent_pair,
)

__all__ = [
    "ALL_SEQUENCES",
    "ALL_STRATA",
    "ATE_CONTRASTS",
    "ATE_NAMES",
    "Chain",
    "Dataset",
    "DensityGrid",
    "IpwResult",
    "McmcConfig",
    "ParameterVector",
    "PriorConfig",
    "PrincipalStratum",
    "SamplerError",
    "ScenarioConfig",
    "SequentialTreatmentSampler",
    "SpecKind",
    "SummaryRow",
    "TreatmentSequence",
    "Unit",
    "as_dataset",
    "assign_prob_lsi",
    "assign_prob_si",
    "ate_from_params",
    "ates",
    "augment_stratum",
    "density_grid",
    "diagnostics",
    "effective_sample_size",
    "equality_gaps",
    "expected_outcome",
    "functional_draws",
    "generate",
    "ipw_msm_estimate",
    "latent_pair",
    "load_scenario",
    "log_likelihood",
    "outcome_mean",
    "parameter_names",
    "per_unit_log_likelihood",
    "reference_scenario",
    "rhat",
    "run_chains",
    "run_gibbs",
    "sensitivity_report",
    "si_grouped_log_likelihood",
    "strata_probs",
    "summarize",
    "summary_table",
    "true_ates",
    "truncated_normal",
    "update_outcome_block",
    "update_probit_block",
]
