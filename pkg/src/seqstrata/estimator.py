"""Scikit-learn style front end for the Gibbs samplers.

The estimator wraps one posterior fit behind the familiar
``__init__(hyperparams) / fit(X) / attributes with trailing underscore``
protocol, so it composes with ``sklearn`` tooling (``get_params``,
``set_params``, ``clone``) and can sit at the end of a pipeline.  ``X`` may
be a :class:`~seqstrata.data.Dataset`, a data frame with the dataset
columns, or a plain (n, 4) array of ``(w1, y1_obs, w2, y2_obs)`` rows.
"""

from __future__ import annotations

import numpy as np
import pandas as pd
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .data import Dataset
from .posterior import available_functionals, functional_draws, summary_table
from .sampler import Chain, McmcConfig, PriorConfig, run_gibbs


def as_dataset(X) -> Dataset:
    """Coerce supported inputs to a Dataset (validating as it goes)."""
    if isinstance(X, Dataset):
        return X
    if isinstance(X, pd.DataFrame):
        df = X
        if "id" not in df.columns:
            df = df.assign(id=np.arange(len(df)))
        return Dataset.from_frame(df)
    arr = np.asarray(X)
    if arr.ndim != 2 or arr.shape[1] != 4:
        raise ValueError(
            "X must be a Dataset, a data frame with dataset columns, or an "
            f"(n, 4) array of (w1, y1_obs, w2, y2_obs); got shape {arr.shape}"
        )
    return Dataset(w1=arr[:, 0], y1_obs=arr[:, 1], w2=arr[:, 2], y2_obs=arr[:, 3])


class SequentialTreatmentSampler(BaseEstimator):
    """Bayesian posterior sampler for two-period treatment-sequence effects.

    Parameters
    ----------
    spec : {"lsi", "si1", "si2"}, default="lsi"
        Likelihood specification: latent-stratum assignment, observed-outcome
        assignment with stratum-level outcome models, or fully observed-data
        models.
    burn_in : int, default=1000
        Discarded warm-up sweeps.
    kept : int, default=9000
        Post-warm-up sweeps; every ``thin``-th is stored.
    thin : int, default=1
    seed : int, default=0
        Chain seed; identical inputs give bit-identical chains.
    coef_mean, coef_var : float
        Normal prior on every probit/regression coefficient.
    sigma2_df, sigma2_scale : float
        Scaled-inverse-chi-square prior on each outcome variance.

    Attributes
    ----------
    chain_ : Chain
        Stored posterior draws.
    n_units_ : int
        Number of fitted units.
    """

    def __init__(
        self,
        spec: str = "lsi",
        burn_in: int = 1000,
        kept: int = 9000,
        thin: int = 1,
        seed: int = 0,
        coef_mean: float = 0.0,
        coef_var: float = 100.0,
        sigma2_df: float = 2.0,
        sigma2_scale: float = 1.0,
    ):
        self.spec = spec
        self.burn_in = burn_in
        self.kept = kept
        self.thin = thin
        self.seed = seed
        self.coef_mean = coef_mean
        self.coef_var = coef_var
        self.sigma2_df = sigma2_df
        self.sigma2_scale = sigma2_scale

    def fit(self, X, y=None):
        data = as_dataset(X)
        priors = PriorConfig(
            coef_mean=self.coef_mean,
            coef_var=self.coef_var,
            sigma2_df=self.sigma2_df,
            sigma2_scale=self.sigma2_scale,
        )
        mcmc = McmcConfig(burn_in=self.burn_in, kept=self.kept, thin=self.thin, seed=self.seed)
        self.chain_: Chain = run_gibbs(data, self.spec, priors, mcmc)
        self.n_units_ = len(data)
        return self

    def _fitted_chain(self) -> Chain:
        if not hasattr(self, "chain_"):
            raise NotFittedError("this sampler has not been fitted; call fit(X) first")
        return self.chain_

    def functional_draws(self, name: str) -> np.ndarray:
        """Posterior draws of a named estimand (see ``available_functionals``)."""
        return functional_draws(self._fitted_chain(), name)

    def available_functionals(self) -> tuple[str, ...]:
        return available_functionals(self._fitted_chain().spec)

    def summary(self, functionals=None) -> pd.DataFrame:
        """Posterior summary table of the six contrasts (or any functionals)."""
        return summary_table(self._fitted_chain(), functionals)
