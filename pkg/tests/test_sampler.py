"""Sampler primitives and Gibbs runs.

Truncated-normal moments are checked against scipy.stats.truncnorm, which
is an independent implementation of the same distribution.
"""

from __future__ import annotations

import numpy as np
import pytest
from scipy import stats
from scipy.special import ndtr

from seqstrata import (
    Chain,
    Dataset,
    McmcConfig,
    ParameterVector,
    PriorConfig,
    PrincipalStratum,
    SamplerError,
    augment_stratum,
    latent_pair,
    run_chains,
    run_gibbs,
    truncated_normal,
    update_outcome_block,
    update_probit_block,
)
from seqstrata.data import Unit
from seqstrata.sampler import derive_chain_seeds, stratum_log_weights
from seqstrata.simulate import generate, reference_scenario


def rng_(seed=0):
    return np.random.default_rng(seed)


EMPTY = Dataset(w1=[], y1_obs=[], w2=[], y2_obs=[])


# ---------------------------------------------------------------------------
# truncated normal


def test_truncated_normal_untruncated_moments():
    n = 100_000
    x = truncated_normal(0.0, 1.0, rng=rng_(1), size=n)
    assert abs(x.mean()) < 4.0 / np.sqrt(n)
    assert x.std(ddof=1) == pytest.approx(1.0, abs=0.02)


def test_truncated_normal_half_normal_mean():
    n = 100_000
    x = truncated_normal(0.0, 1.0, lower=0.0, rng=rng_(2), size=n)
    target = np.sqrt(2.0 / np.pi)
    se = np.sqrt(1.0 - target**2) / np.sqrt(n)
    assert abs(x.mean() - target) < 4 * se
    assert np.all(x > 0.0)


def test_truncated_normal_two_sided_support():
    x = truncated_normal(5.0, 2.0, lower=4.0, upper=6.0, rng=rng_(3), size=20_000)
    assert np.all((x > 4.0) & (x < 6.0))
    m, v = stats.truncnorm.stats((4 - 5) / 2, (6 - 5) / 2, loc=5, scale=2, moments="mv")
    assert x.mean() == pytest.approx(float(m), abs=4 * np.sqrt(float(v) / x.size))


@pytest.mark.parametrize("a", [6.5, 8.0, 12.0])
def test_truncated_normal_deep_tail(a):
    # beyond the inverse-CDF range: tail rejection must stay exact
    n = 50_000
    x = truncated_normal(0.0, 1.0, lower=a, rng=rng_(4), size=n)
    assert np.all(x > a) and np.all(np.isfinite(x))
    m, v = stats.truncnorm.stats(a, np.inf, moments="mv")
    assert x.mean() == pytest.approx(float(m), abs=4 * np.sqrt(float(v) / n))


def test_truncated_normal_mirrored_tail():
    x = truncated_normal(0.0, 1.0, upper=-9.0, rng=rng_(5), size=20_000)
    assert np.all(x < -9.0) and np.all(np.isfinite(x))


def test_truncated_normal_tiny_tail_window():
    x = truncated_normal(0.0, 1.0, lower=7.0, upper=7.05, rng=rng_(6), size=2_000)
    assert np.all((x > 7.0) & (x < 7.05))


def test_truncated_normal_scalar_and_broadcast():
    v = truncated_normal(1.0, 1.0, lower=0.0, rng=rng_(7))
    assert isinstance(v, float) and v > 0
    lows = np.array([-np.inf, 0.0, 2.0])
    x = truncated_normal(np.zeros(3), 1.0, lower=lows, rng=rng_(8))
    assert x.shape == (3,) and np.all(x[1:] > lows[1:])


def test_truncated_normal_validates():
    with pytest.raises(ValueError, match="lower < upper"):
        truncated_normal(0.0, 1.0, lower=1.0, upper=1.0, rng=rng_())
    with pytest.raises(ValueError, match="sd"):
        truncated_normal(0.0, 0.0, rng=rng_())
    with pytest.raises(ValueError, match="Generator"):
        truncated_normal(0.0, 1.0)


def test_truncated_normal_deterministic():
    a = truncated_normal(0.0, 1.0, lower=-1, upper=3, rng=rng_(42), size=100)
    b = truncated_normal(0.0, 1.0, lower=-1, upper=3, rng=rng_(42), size=100)
    np.testing.assert_array_equal(a, b)


# ---------------------------------------------------------------------------
# probit block


def test_probit_block_prior_recovery_when_empty():
    rng = rng_(9)
    draws = np.array(
        [update_probit_block(np.empty(0), np.empty((0, 1)), PriorConfig(), np.zeros(1), rng)[0] for _ in range(4000)]
    )
    assert abs(draws.mean()) < 4 * 10 / np.sqrt(4000)
    assert draws.std(ddof=1) == pytest.approx(10.0, rel=0.1)


def test_probit_block_degenerate_all_ones():
    n = 10_000
    r = np.ones(n, dtype=np.int8)
    design = np.ones((n, 1))
    coef = np.zeros(1)
    rng = rng_(10)
    for _ in range(60):
        coef = update_probit_block(r, design, PriorConfig(), coef, rng)
    assert ndtr(coef[0]) > 0.99


def test_probit_block_recovers_known_intercept():
    rng = rng_(11)
    true_alpha = 0.7
    n = 10_000
    r = (rng.random(n) < ndtr(true_alpha)).astype(np.int8)
    design = np.ones((n, 1))
    coef = np.zeros(1)
    kept = []
    for it in range(600):
        coef = update_probit_block(r, design, PriorConfig(), coef, rng)
        if it >= 100:
            kept.append(coef[0])
    kept = np.asarray(kept)
    assert abs(kept.mean() - true_alpha) < 4 * kept.std(ddof=1)


# ---------------------------------------------------------------------------
# outcome block


def test_outcome_block_prior_recovery_when_empty():
    prior = PriorConfig()
    betas, sig2s = [], []
    rng = rng_(12)
    for _ in range(4000):
        b, s2 = update_outcome_block(np.empty(0), np.empty((0, 2)), prior, 1.0, rng)
        betas.append(b)
        sig2s.append(s2)
    betas = np.array(betas)
    assert abs(betas.mean()) < 4 * 10 / np.sqrt(2 * 4000)
    # prior variance median: df*scale / chi2_median(df)
    target_median = prior.sigma2_df * prior.sigma2_scale / stats.chi2.ppf(0.5, prior.sigma2_df)
    assert np.median(sig2s) == pytest.approx(target_median, rel=0.1)


def test_outcome_block_recovers_known_parameters():
    rng = rng_(13)
    n = 5000
    design = np.column_stack([np.ones(n), rng.integers(0, 2, n)])
    true_beta = np.array([2.0, -1.5])
    true_sig2 = 0.8
    y = design @ true_beta + rng.standard_normal(n) * np.sqrt(true_sig2)
    beta, sig2 = np.zeros(2), 1.0
    kept_b, kept_s = [], []
    for it in range(500):
        beta, sig2 = update_outcome_block(y, design, PriorConfig(), sig2, rng)
        if it >= 100:
            kept_b.append(beta.copy())
            kept_s.append(sig2)
    kept_b = np.array(kept_b)
    for j in range(2):
        assert abs(kept_b[:, j].mean() - true_beta[j]) < 4 * kept_b[:, j].std(ddof=1)
    kept_s = np.asarray(kept_s)
    assert abs(np.mean(kept_s) - true_sig2) < 4 * np.std(kept_s, ddof=1)


def test_outcome_block_no_data_directions_stay_at_prior():
    # single stratum present: only the intercept moves off the prior
    rng = rng_(14)
    n = 2000
    design = np.column_stack([np.ones(n), np.zeros(n)])  # second column never observed
    y = 3.0 + rng.standard_normal(n)
    kept = []
    beta, sig2 = np.zeros(2), 1.0
    for it in range(800):
        beta, sig2 = update_outcome_block(y, design, PriorConfig(), sig2, rng)
        if it >= 100:
            kept.append(beta.copy())
    kept = np.array(kept)
    assert kept[:, 0].std(ddof=1) < 0.1  # data-informed
    assert kept[:, 1].std(ddof=1) == pytest.approx(10.0, rel=0.15)  # prior sd


# ---------------------------------------------------------------------------
# stratum augmentation


def _unit(w1, y1, w2, y2):
    return Unit(id=0, w1=w1, y1_obs=y1, w2=w2, y2_obs=y2)


def test_augment_stratum_equal_weights():
    theta = ParameterVector.zeros()
    alpha = np.array([0.0, 0.0, 0.0])
    # equalize pi within the pair for O(0,0,.): pi00 = pi01 requires
    # 1 - Phi(a00) = Phi(a00) Phi(a10); with a10 = large, a00 = 0 works.
    theta = theta.replace(alpha=np.array([0.0, 0.0, 8.0]))
    unit = _unit(0, 0, 0, 0.0)
    lw, pair = stratum_log_weights(unit, theta, "lsi")
    assert lw[0] == pytest.approx(lw[1], abs=1e-9)
    rng = rng_(15)
    picks = np.array([int(augment_stratum(unit, theta, "lsi", rng)) for _ in range(10_000)])
    frac = (picks == int(pair[1])).mean()
    assert abs(frac - 0.5) < 4 * 0.5 / np.sqrt(10_000)


def test_augment_stratum_support():
    rng = rng_(16)
    theta = ParameterVector.zeros()
    for w1 in (0, 1):
        for y1 in (0, 1):
            unit = _unit(w1, y1, 1, 0.3)
            pair = latent_pair(w1, y1)
            for _ in range(50):
                assert augment_stratum(unit, theta, "lsi", rng) in pair


def test_augment_stratum_log_weights_match_direct_arithmetic():
    rng = rng_(17)
    from seqstrata.model import assignment_eta, outcome_mean_table, strata_probs

    for _ in range(50):
        theta = ParameterVector(
            rng.normal(size=3), rng.normal(size=(2, 4)), rng.normal(size=(4, 4)), rng.uniform(0.5, 3, 4)
        )
        unit = _unit(1, 1, 1, rng.normal())
        lw, pair = stratum_log_weights(unit, theta, "lsi")
        pi = strata_probs(theta.alpha)
        h = ndtr(assignment_eta(theta.gamma))
        means = outcome_mean_table(theta.beta)
        direct = []
        for g in pair:
            dens = stats.norm.pdf(unit.y2_obs, means[3, int(g)], np.sqrt(theta.sigma2[3]))
            direct.append(pi[int(g)] * h[1, int(g)] * dens)
        ratio_direct = direct[1] / (direct[0] + direct[1])
        ratio_log = 1.0 / (1.0 + np.exp(lw[0] - lw[1]))
        assert ratio_log == pytest.approx(ratio_direct, abs=1e-12)


def test_augment_stratum_strong_assignment_asymmetry():
    # pattern from the case-study table: h ~ 0.76 vs 0.0004 for the two
    # strata of O(1,1,1); with comparable pi and densities the first
    # stratum dominates in proportion to the full products.
    theta = ParameterVector.zeros()
    gamma = np.zeros((2, 4))
    gamma[1] = [-3.35, 0.0, 4.065, -4.065]  # h(1,01)=Phi(0.715)~0.7627, h(1,11)=Phi(-3.35)~4e-4
    theta = theta.replace(gamma=gamma)
    unit = _unit(1, 1, 1, 0.0)
    lw, pair = stratum_log_weights(unit, theta, "lsi")
    assert pair == latent_pair(1, 1)
    p01 = 1.0 / (1.0 + np.exp(lw[1] - lw[0]))
    h01, h11 = ndtr(0.715), ndtr(-3.35)
    pi = __import__("seqstrata").strata_probs(theta.alpha)
    expected = (pi[1] * h01) / (pi[1] * h01 + pi[3] * h11)
    assert p01 == pytest.approx(expected, rel=1e-9)
    rng = rng_(18)
    picks = [augment_stratum(unit, theta, "lsi", rng) for _ in range(2000)]
    assert np.mean([g is PrincipalStratum.S01 for g in picks]) > 0.9


def test_augment_stratum_si2_rejected():
    with pytest.raises(ValueError, match="si2"):
        stratum_log_weights(_unit(0, 0, 0, 0.0), ParameterVector.zeros(), "si2")


def test_augment_stratum_degenerate_weights_error():
    theta = ParameterVector.zeros()
    with np.errstate(over="ignore"):
        with pytest.raises(SamplerError, match="degenerate"):
            augment_stratum(_unit(0, 0, 0, 1e200), theta, "lsi", rng_(19))


# ---------------------------------------------------------------------------
# full Gibbs runs


def _tiny_data(n=120, seed=0):
    cfg = reference_scenario("lsi")
    cfg = type(cfg)(theta_true=cfg.theta_true, spec=cfg.spec, n=n, p_w1=cfg.p_w1, seed=seed)
    return generate(cfg)


def test_run_gibbs_deterministic():
    data = _tiny_data()
    mcmc = McmcConfig(burn_in=20, kept=30, seed=123)
    a = run_gibbs(data, "lsi", mcmc=mcmc, pilot_sweeps=5)
    b = run_gibbs(data, "lsi", mcmc=mcmc, pilot_sweeps=5)
    np.testing.assert_array_equal(a.draws, b.draws)
    np.testing.assert_array_equal(a.aug_strata_final, b.aug_strata_final)


def test_run_gibbs_thinning_and_length():
    data = _tiny_data()
    ch = run_gibbs(data, "si2", mcmc=McmcConfig(burn_in=5, kept=30, thin=3, seed=1))
    assert len(ch) == 10
    with pytest.raises(ValueError, match="divisible"):
        McmcConfig(kept=10, thin=3)


def test_run_gibbs_si1_draws_satisfy_constraints():
    data = _tiny_data()
    ch = run_gibbs(data, "si1", mcmc=McmcConfig(burn_in=10, kept=20, seed=2), pilot_sweeps=3)
    for i in range(len(ch)):
        ch.theta(i).validate("si1")


def test_run_gibbs_si2_draws_satisfy_constraints():
    data = _tiny_data()
    ch = run_gibbs(data, "si2", mcmc=McmcConfig(burn_in=10, kept=20, seed=3))
    for i in range(len(ch)):
        ch.theta(i).validate("si2")


def test_run_gibbs_augmented_strata_respect_pairs():
    data = _tiny_data()
    ch = run_gibbs(data, "lsi", mcmc=McmcConfig(burn_in=10, kept=10, seed=4), pilot_sweeps=3)
    for i in range(len(data)):
        pair = latent_pair(int(data.w1[i]), int(data.y1_obs[i]))
        assert PrincipalStratum(int(ch.aug_strata_final[i])) in pair


def test_run_gibbs_no_nan_anywhere():
    data = _tiny_data()
    for spec in ("lsi", "si1", "si2"):
        ch = run_gibbs(data, spec, mcmc=McmcConfig(burn_in=10, kept=50, seed=5), pilot_sweeps=3)
        assert np.all(np.isfinite(ch.draws))


def test_run_gibbs_empty_data_prior_recovery():
    # zero observations: every stored draw is a prior draw
    prior = PriorConfig()
    ch = run_gibbs(EMPTY, "lsi", priors=prior, mcmc=McmcConfig(burn_in=0, kept=10_000, seed=6))
    gamma = ch.column("gamma_0_y11")
    # coefficient marginals: Normal(0, 100); check three quantiles within
    # 4 standard errors of the order statistic
    for p in (0.1, 0.5, 0.9):
        target = stats.norm.ppf(p, scale=10.0)
        se = np.sqrt(p * (1 - p) / len(gamma)) / stats.norm.pdf(target, scale=10.0)
        assert abs(np.quantile(gamma, p) - target) < 4 * se
    sig2 = ch.column("sigma2_11")
    for p in (0.25, 0.5, 0.75):
        target = prior.sigma2_df * prior.sigma2_scale / stats.chi2.ppf(1 - p, prior.sigma2_df)
        dens = stats.chi2.pdf(prior.sigma2_df * prior.sigma2_scale / target, prior.sigma2_df)
        se = np.sqrt(p * (1 - p) / len(sig2)) / (dens * prior.sigma2_df * prior.sigma2_scale / target**2)
        assert abs(np.quantile(sig2, p) - target) < 4 * se


def test_run_gibbs_abort_reports_block_and_iteration():
    # corrupt data path: huge outcome makes stratum weights vanish
    data = _tiny_data()
    data.y2_obs[0] = 1e200
    with np.errstate(over="ignore", invalid="ignore"):
        with pytest.raises(SamplerError, match="iteration"):
            run_gibbs(data, "lsi", mcmc=McmcConfig(burn_in=2, kept=2, seed=7), pilot_sweeps=0)


def test_run_chains_seed_derivation_and_independence():
    seeds = derive_chain_seeds(99, 4)
    assert len(set(seeds)) == 4
    assert seeds == derive_chain_seeds(99, 4)
    data = _tiny_data(n=60)
    chains = run_chains(data, "si2", mcmc=McmcConfig(burn_in=2, kept=4, seed=99), n_chains=2, parallel=False)
    assert len(chains) == 2
    assert not np.array_equal(chains[0].draws, chains[1].draws)


def test_chain_csv_roundtrip(tmp_path):
    data = _tiny_data(n=80)
    ch = run_gibbs(data, "si1", mcmc=McmcConfig(burn_in=5, kept=8, seed=8), pilot_sweeps=2)
    path = tmp_path / "chain.csv"
    ch.to_csv(path)
    assert (tmp_path / "chain.meta.json").exists()
    back = Chain.read_csv(path)
    assert back.spec == ch.spec
    np.testing.assert_allclose(back.draws, ch.draws, rtol=1e-12)
    assert back.meta["mcmc"]["seed"] == 8


def test_chain_read_requires_meta(tmp_path):
    path = tmp_path / "orphan.csv"
    path.write_text("alpha_11\n0.0\n")
    with pytest.raises(ValueError, match="metadata"):
        Chain.read_csv(path)
