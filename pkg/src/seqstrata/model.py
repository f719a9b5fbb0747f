"""Pure evaluation of the probability model.

Everything here is a deterministic function of the parameters and the data:
stratum probabilities, second-period assignment probabilities, final-outcome
means and densities, average-effect functionals, and the observed-data
log likelihood under each specification.  All probability arithmetic that
feeds likelihoods runs in log space (``log_ndtr`` for probit terms,
``logaddexp`` for the two-component mixtures), so terms never underflow to
``-inf`` while both components are representable.

Likelihoods include every factor that depends on the parameters: per unit,
the density of ``(Y1_obs, W2, Y2_obs)`` given ``W1``.  The first-period
assignment factor is parameter-free (first-period assignment is
randomized) and is dropped in all three specifications alike, so values are
directly comparable across specifications.
"""

from __future__ import annotations

import numpy as np
from scipy.special import log_ndtr, ndtr

from .data import Dataset
from .params import ParameterVector, SpecKind
from .strata import (
    ALL_SEQUENCES,
    ATE_CONTRASTS,
    PrincipalStratum,
    TreatmentSequence,
    latent_pair,
)

_LOG_2PI = float(np.log(2.0 * np.pi))

# Row g of this matrix is the regression design (1, Y1(0), Y1(1), product)
# evaluated at stratum g; used by both the assignment and outcome models.
STRATUM_DESIGN = np.array(
    [
        [1.0, 0.0, 0.0, 0.0],  # 00
        [1.0, 0.0, 1.0, 0.0],  # 01
        [1.0, 1.0, 0.0, 0.0],  # 10
        [1.0, 1.0, 1.0, 1.0],  # 11
    ]
)

# _PAIR[w1, y1] = the two stratum codes compatible with observing y1 under w1.
_PAIR = np.empty((2, 2, 2), dtype=np.int8)
for _w1 in (0, 1):
    for _y1 in (0, 1):
        _PAIR[_w1, _y1] = [int(g) for g in latent_pair(_w1, _y1)]


def strata_probs(alpha) -> np.ndarray:
    """Stratum probabilities (pi_00, pi_01, pi_10, pi_11) from the nested probits.

    The cascade peels strata off in the order 11, 00, 10, with 01 taking the
    remaining mass:

        pi_11 = 1 - Phi(a11)
        pi_00 = Phi(a11) (1 - Phi(a00))
        pi_10 = Phi(a11) Phi(a00) (1 - Phi(a10))
        pi_01 = Phi(a11) Phi(a00) Phi(a10)
    """
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (3,) or not np.all(np.isfinite(alpha)):
        raise ValueError(f"alpha must be 3 finite reals, got {alpha!r}")
    p11, p00, p10 = ndtr(alpha)
    return np.array([p11 * (1.0 - p00), p11 * p00 * p10, p11 * p00 * (1.0 - p10), 1.0 - p11])


def log_strata_probs(alpha) -> np.ndarray:
    """Logs of :func:`strata_probs`, computed directly in log space."""
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (3,) or not np.all(np.isfinite(alpha)):
        raise ValueError(f"alpha must be 3 finite reals, got {alpha!r}")
    l11, l00, l10 = log_ndtr(alpha)
    c11, c00, c10 = log_ndtr(-alpha)
    return np.array([l11 + c00, l11 + l00 + l10, l11 + l00 + c10, c11])


def assignment_eta(gamma) -> np.ndarray:
    """Linear predictors of the second-period assignment probit, shape (2, 4):
    ``eta[w1, g]``."""
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (2, 4) or not np.all(np.isfinite(gamma)):
        raise ValueError(f"gamma must be a finite (2, 4) array, got {gamma!r}")
    return gamma @ STRATUM_DESIGN.T


def assign_prob_lsi(gamma, w1: int, g: PrincipalStratum | int) -> float:
    """P(W2 = 1 | W1 = w1, stratum g) under the latent-stratum assignment model."""
    if w1 not in (0, 1):
        raise ValueError(f"w1 must be binary, got {w1}")
    g = PrincipalStratum(g)
    return float(ndtr(assignment_eta(gamma)[w1, g]))


def assign_prob_si(gamma, w1: int, y1: int) -> float:
    """P(W2 = 1 | W1 = w1, Y1_obs = y1) when assignment sees observed outcomes only.

    Uses the intercept and the arm's own observed-outcome slope; agrees with
    :func:`assign_prob_lsi` at either compatible stratum once the
    unobservable-outcome coefficients are zero.
    """
    if w1 not in (0, 1) or y1 not in (0, 1):
        raise ValueError(f"w1 and y1 must be binary, got ({w1}, {y1})")
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (2, 4) or not np.all(np.isfinite(gamma)):
        raise ValueError(f"gamma must be a finite (2, 4) array, got {gamma!r}")
    return float(ndtr(gamma[w1, 0] + gamma[w1, 1 + w1] * y1))


def outcome_mean_table(beta) -> np.ndarray:
    """Final-outcome means for every (sequence, stratum), shape (4, 4)."""
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (4, 4) or not np.all(np.isfinite(beta)):
        raise ValueError(f"beta must be a finite (4, 4) array, got {beta!r}")
    return beta @ STRATUM_DESIGN.T


def outcome_mean(beta, seq: TreatmentSequence | int, g: PrincipalStratum | int) -> float:
    """Mean of Y2 under treatment sequence ``seq`` for a unit in stratum ``g``."""
    return float(outcome_mean_table(beta)[TreatmentSequence(seq), PrincipalStratum(g)])


def expected_outcome(theta: ParameterVector, seq: TreatmentSequence | int, spec: SpecKind | str) -> float:
    """Population mean of the potential outcome Y2(seq) implied by ``theta``."""
    spec = SpecKind.parse(spec)
    theta.validate(spec)
    seq = TreatmentSequence(seq)
    if spec.uses_strata:
        pi = strata_probs(theta.alpha)
        return float(pi @ outcome_mean_table(theta.beta)[seq])
    # Mixture over the observed intermediate outcome: P(Y1(w1)=1) = Phi(alpha[w1]).
    p1 = float(ndtr(theta.alpha[seq.w1]))
    slope = theta.beta[seq, 1 + seq.w1]
    return float(theta.beta[seq, 0] + p1 * slope)


def ate_from_params(theta: ParameterVector, pair, spec: SpecKind | str) -> float:
    """Average effect of the first sequence in ``pair`` relative to the second."""
    a, b = (TreatmentSequence(s) for s in pair)
    if a == b:
        raise ValueError("the two treatment sequences of a contrast must differ")
    return expected_outcome(theta, a, spec) - expected_outcome(theta, b, spec)


def ates(theta: ParameterVector, spec: SpecKind | str = SpecKind.LSI) -> dict[str, float]:
    """All six reported contrasts, keyed by their table labels."""
    means = {s: expected_outcome(theta, s, spec) for s in ALL_SEQUENCES}
    return {name: means[a] - means[b] for name, a, b in ATE_CONTRASTS}


def normal_logpdf(y, mean, sigma2):
    """Log density of Normal(mean, sigma2) at y (elementwise)."""
    return -0.5 * (_LOG_2PI + np.log(sigma2) + (y - mean) ** 2 / sigma2)


# ---------------------------------------------------------------------------
# Vectorized functionals over whole draw matrices (rows = flattened theta).


def strata_probs_from_draws(alpha_draws) -> np.ndarray:
    """Stratum probabilities for each row of an (m, 3) alpha matrix."""
    a = np.atleast_2d(np.asarray(alpha_draws, dtype=float))
    p11, p00, p10 = ndtr(a[:, 0]), ndtr(a[:, 1]), ndtr(a[:, 2])
    return np.column_stack(
        [p11 * (1.0 - p00), p11 * p00 * p10, p11 * p00 * (1.0 - p10), 1.0 - p11]
    )


def assign_probs_from_draws(gamma_draws) -> np.ndarray:
    """Assignment probabilities h[w1, g] for each draw, shape (m, 2, 4).

    ``gamma_draws`` holds the flattened (2, 4) coefficient rows.
    """
    g = np.asarray(gamma_draws, dtype=float).reshape(-1, 2, 4)
    return ndtr(g @ STRATUM_DESIGN.T)


def expected_outcomes_from_draws(draws, spec: SpecKind | str) -> np.ndarray:
    """E[Y2(seq)] per draw for all four sequences, shape (m, 4).

    ``draws`` is an (m, 31) matrix of flattened parameter vectors in
    storage order (alpha, gamma, beta, sigma2).
    """
    spec = SpecKind.parse(spec)
    d = np.atleast_2d(np.asarray(draws, dtype=float))
    beta = d[:, 11:27].reshape(-1, 4, 4)
    if spec.uses_strata:
        pi = strata_probs_from_draws(d[:, :3])
        weights = np.column_stack(
            [np.ones(len(d)), pi[:, 2] + pi[:, 3], pi[:, 1] + pi[:, 3], pi[:, 3]]
        )
        return np.einsum("msk,mk->ms", beta, weights)
    p1 = ndtr(d[:, :2])  # P(Y1(w1)=1) per arm
    out = np.empty((len(d), 4))
    for s in ALL_SEQUENCES:
        out[:, s] = beta[:, s, 0] + p1[:, s.w1] * beta[:, s, 1 + s.w1]
    return out


def ates_from_draws(draws, spec: SpecKind | str) -> np.ndarray:
    """The six contrasts per draw, shape (m, 6), columns in table order."""
    ey = expected_outcomes_from_draws(draws, spec)
    return np.column_stack([ey[:, a] - ey[:, b] for _, a, b in ATE_CONTRASTS])


def log_assignment_terms(gamma) -> np.ndarray:
    """log P(W2 = w2 | w1, g) as an array indexed [w1, w2, g]."""
    eta = assignment_eta(gamma)
    out = np.empty((2, 2, 4))
    out[:, 1, :] = log_ndtr(eta)
    out[:, 0, :] = log_ndtr(-eta)
    return out


def per_unit_log_likelihood(theta: ParameterVector, data: Dataset, spec: SpecKind | str) -> np.ndarray:
    """Per-unit log density of (Y1_obs, W2, Y2_obs) given W1.

    Under ``LSI`` and ``SI1`` each unit contributes a two-component mixture
    over its admissible strata; under ``SI2`` the term factorizes over
    observed quantities only.  Zero-probability observations produce ``-inf``
    (never NaN).
    """
    spec = SpecKind.parse(spec)
    theta.validate(spec)
    if len(data) == 0:
        raise ValueError("dataset must contain at least one unit")
    seq = data.sequence_index()
    sig2 = theta.sigma2[seq]

    if spec is SpecKind.SI2:
        lh = _log_si_h(theta.gamma, data.w1, data.y1_obs, data.w2)
        la = log_ndtr(theta.alpha[data.w1])
        lac = log_ndtr(-theta.alpha[data.w1])
        lpy1 = np.where(data.y1_obs == 1, la, lac)
        mu = theta.beta[seq, 0] + theta.beta[seq, 1 + data.w1] * data.y1_obs
        return lh + lpy1 + normal_logpdf(data.y2_obs, mu, sig2)

    means = outcome_mean_table(theta.beta)
    lpi = log_strata_probs(theta.alpha)
    ga = _PAIR[data.w1, data.y1_obs, 0]
    gb = _PAIR[data.w1, data.y1_obs, 1]
    lfa = normal_logpdf(data.y2_obs, means[seq, ga], sig2)
    lfb = normal_logpdf(data.y2_obs, means[seq, gb], sig2)
    if spec is SpecKind.LSI:
        lh = log_assignment_terms(theta.gamma)
        return np.logaddexp(
            lpi[ga] + lh[data.w1, data.w2, ga] + lfa,
            lpi[gb] + lh[data.w1, data.w2, gb] + lfb,
        )
    # SI1: the assignment factor is common to both strata of the pair.
    lh = _log_si_h(theta.gamma, data.w1, data.y1_obs, data.w2)
    return lh + np.logaddexp(lpi[ga] + lfa, lpi[gb] + lfb)


def _log_si_h(gamma, w1, y1, w2) -> np.ndarray:
    eta = gamma[w1, 0] + gamma[w1, 1 + w1] * y1
    return np.where(w2 == 1, log_ndtr(eta), log_ndtr(-eta))


def log_likelihood(theta: ParameterVector, data: Dataset, spec: SpecKind | str) -> float:
    """Observed-data log likelihood (see :func:`per_unit_log_likelihood`)."""
    return float(np.sum(per_unit_log_likelihood(theta, data, spec)))


def si_grouped_log_likelihood(theta: ParameterVector, data: Dataset) -> float:
    """The SI likelihood evaluated on its marginalized form.

    Groups each mixture bracket into the marginal probability of the observed
    intermediate outcome times the conditional outcome density given it, i.e.
    the factorization that conditions on observed quantities only.  For any
    admissible SI parameter vector this equals ``log_likelihood(..., SI1)``
    up to floating-point reordering.
    """
    theta.validate(SpecKind.SI1)
    if len(data) == 0:
        raise ValueError("dataset must contain at least one unit")
    seq = data.sequence_index()
    means = outcome_mean_table(theta.beta)
    sig2 = theta.sigma2[seq]
    lpi = log_strata_probs(theta.alpha)
    ga = _PAIR[data.w1, data.y1_obs, 0]
    gb = _PAIR[data.w1, data.y1_obs, 1]
    # Marginal P(Y1_obs = y1 | w1) and outcome density given (w1, y1).
    lpy1 = np.logaddexp(lpi[ga], lpi[gb])
    lfa = normal_logpdf(data.y2_obs, means[seq, ga], sig2)
    lfb = normal_logpdf(data.y2_obs, means[seq, gb], sig2)
    lf_y1 = np.logaddexp(lpi[ga] + lfa, lpi[gb] + lfb) - lpy1
    lh = _log_si_h(theta.gamma, data.w1, data.y1_obs, data.w2)
    return float(np.sum(lh + lpy1 + lf_y1))
