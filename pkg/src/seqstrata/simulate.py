"""Synthetic two-period studies with known ground truth.

The generator always works at the stratum level: it draws each unit's
principal stratum, the randomized first treatment, the second treatment from
the stratum-conditional probit, and all four final-outcome potentials.  A
sequentially-ignorable scenario is just a parameter vector whose assignment
coefficients on unobservable intermediate outcomes are zero.

Randomness comes from a counter-based bit generator (Philox) keyed by the
scenario seed, with all variates drawn in a fixed per-unit layout, so output
is bit-for-bit reproducible and independent of iteration order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np
from scipy.special import ndtr

from .data import Dataset
from .model import assignment_eta, ates, outcome_mean_table, strata_probs
from .params import ParameterVector, SpecKind
from .validation import check_allowed_keys, check_positive_int, check_probability

REFERENCE_SCENARIOS = {"lsi": "lsi_scenario.json", "si": "si_scenario.json"}

_SCENARIO_SCHEMA = "seqstrata-scenario/1"
_COEF_KEYS = ("intercept", "y10", "y11", "y10y11")


@dataclass(frozen=True)
class ScenarioConfig:
    """True parameters and sampling plan for one simulated study."""

    theta_true: ParameterVector
    spec: SpecKind
    n: int
    p_w1: float = 0.5
    seed: int = 0

    def __post_init__(self):
        spec = SpecKind.parse(self.spec)
        if spec is SpecKind.SI2:
            raise ValueError("the generator works at the stratum level; use spec lsi or si1")
        object.__setattr__(self, "spec", spec)
        self.theta_true.validate(spec)
        check_positive_int(self.n, "n")
        check_probability(self.p_w1, "p_w1")
        object.__setattr__(self, "seed", int(self.seed))


def generate(cfg: ScenarioConfig) -> Dataset:
    """Draw one dataset under ``cfg``; bit-for-bit reproducible given the seed."""
    n = cfg.n
    theta = cfg.theta_true
    rng = np.random.Generator(np.random.Philox(cfg.seed))

    # Fixed draw layout: stratum, w1, w2, then the four outcome potentials.
    pi = strata_probs(theta.alpha)
    stratum = rng.choice(4, size=n, p=pi / pi.sum()).astype(np.int8)
    w1 = (rng.random(n) < cfg.p_w1).astype(np.int8)
    h = ndtr(assignment_eta(theta.gamma))
    w2 = (rng.random(n) < h[w1, stratum]).astype(np.int8)
    z = rng.standard_normal((n, 4))
    potential = outcome_mean_table(theta.beta).T[stratum] + z * np.sqrt(theta.sigma2)

    y1_obs = np.where(w1 == 1, stratum & 1, (stratum >> 1) & 1).astype(np.int8)
    y2_obs = potential[np.arange(n), 2 * w1 + w2]
    return Dataset(
        w1=w1,
        y1_obs=y1_obs,
        w2=w2,
        y2_obs=y2_obs,
        stratum=stratum,
        potential_y2=potential,
        meta={"seed": cfg.seed, "spec": cfg.spec.value, "n": n, "p_w1": cfg.p_w1},
    )


def true_ates(theta_true: ParameterVector) -> dict[str, float]:
    """The six true average effects implied by a stratum-level parameter vector."""
    return ates(theta_true, SpecKind.LSI)


def _parse_coef_row(block: dict, where: str) -> list[float]:
    check_allowed_keys(block, _COEF_KEYS, where)
    try:
        return [float(block[k]) for k in _COEF_KEYS]
    except KeyError as err:
        raise ValueError(f"{where} is missing field {err.args[0]!r}") from None


def theta_from_dict(spec_theta: dict, where: str = "theta") -> ParameterVector:
    check_allowed_keys(spec_theta, ("alpha", "gamma", "beta", "sigma2"), where)
    try:
        alpha_block = spec_theta["alpha"]
        gamma_block = spec_theta["gamma"]
        beta_block = spec_theta["beta"]
        sigma2_block = spec_theta["sigma2"]
    except KeyError as err:
        raise ValueError(f"{where} is missing field {err.args[0]!r}") from None
    try:
        check_allowed_keys(alpha_block, ("a11", "a00", "a10"), f"{where}.alpha")
        alpha = [float(alpha_block[k]) for k in ("a11", "a00", "a10")]
        check_allowed_keys(gamma_block, ("0", "1"), f"{where}.gamma")
        gamma = [_parse_coef_row(gamma_block[k], f"{where}.gamma.{k}") for k in ("0", "1")]
        check_allowed_keys(beta_block, ("00", "01", "10", "11"), f"{where}.beta")
        beta = [_parse_coef_row(beta_block[k], f"{where}.beta.{k}") for k in ("00", "01", "10", "11")]
        check_allowed_keys(sigma2_block, ("00", "01", "10", "11"), f"{where}.sigma2")
        sigma2 = [float(sigma2_block[k]) for k in ("00", "01", "10", "11")]
    except KeyError as err:
        raise ValueError(f"{where} is missing field {err.args[0]!r}") from None
    return ParameterVector(alpha, gamma, beta, sigma2)


def theta_to_dict(theta: ParameterVector) -> dict:
    labels = ("00", "01", "10", "11")
    return {
        "alpha": dict(zip(("a11", "a00", "a10"), map(float, theta.alpha))),
        "gamma": {str(w1): dict(zip(_COEF_KEYS, map(float, theta.gamma[w1]))) for w1 in (0, 1)},
        "beta": {lab: dict(zip(_COEF_KEYS, map(float, theta.beta[i]))) for i, lab in enumerate(labels)},
        "sigma2": {lab: float(theta.sigma2[i]) for i, lab in enumerate(labels)},
    }


def scenario_from_dict(raw: dict, where: str = "scenario config") -> ScenarioConfig:
    check_allowed_keys(raw, ("schema", "description", "spec", "n", "p_w1", "seed", "theta"), where)
    schema = raw.get("schema")
    if schema != _SCENARIO_SCHEMA:
        raise ValueError(f"{where}: schema must be {_SCENARIO_SCHEMA!r}, got {schema!r}")
    for key in ("spec", "n", "seed", "theta"):
        if key not in raw:
            raise ValueError(f"{where} is missing field {key!r}")
    return ScenarioConfig(
        theta_true=theta_from_dict(raw["theta"]),
        spec=SpecKind.parse(raw["spec"]),
        n=int(raw["n"]),
        p_w1=float(raw.get("p_w1", 0.5)),
        seed=int(raw["seed"]),
    )


def load_scenario(path) -> ScenarioConfig:
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as err:
            raise ValueError(f"malformed config {path}: line {err.lineno} column {err.colno}: {err.msg}") from None
    return scenario_from_dict(raw, where=str(path))


def scenario_to_dict(cfg: ScenarioConfig, description: str | None = None) -> dict:
    out = {"schema": _SCENARIO_SCHEMA}
    if description:
        out["description"] = description
    out.update(
        {
            "spec": cfg.spec.value,
            "n": cfg.n,
            "p_w1": cfg.p_w1,
            "seed": cfg.seed,
            "theta": theta_to_dict(cfg.theta_true),
        }
    )
    return out


def reference_scenario(kind: str = "lsi") -> ScenarioConfig:
    """One of the two shipped scenarios: "lsi" or "si"."""
    try:
        fname = REFERENCE_SCENARIOS[kind.lower()]
    except KeyError:
        raise ValueError(f"unknown reference scenario {kind!r}; expected 'lsi' or 'si'") from None
    raw = json.loads(resources.files("seqstrata.configs").joinpath(fname).read_text())
    return scenario_from_dict(raw, where=f"reference scenario {kind!r}")
