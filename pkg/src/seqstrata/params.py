"""Model parameters and the three likelihood specifications.

The full parameter vector bundles 31 scalars:

* ``alpha`` (3): thresholds of the nested probits that generate stratum
  membership.  Under the ``SI2`` specification the stratum model is replaced
  by two marginal probits for the observed intermediate outcome, and the
  first two slots hold their intercepts (one per first-period arm); the
  third slot is unused and pinned at zero.
* ``gamma`` (2 x 4): second-period assignment probit coefficients, one row
  per first-period arm, columns (intercept, Y1(0) slope, Y1(1) slope,
  interaction).  Under ``SI1``/``SI2`` the four coefficients that would load
  on unobservable intermediate outcomes are constrained to zero, leaving an
  intercept and the observed-outcome slope per arm.
* ``beta`` (4 x 4): final-outcome regression coefficients, one row per
  treatment sequence, same column layout as ``gamma``.  Under ``SI2`` only
  the intercept and the observed-outcome slope are free per row.
* ``sigma2`` (4): final-outcome variances, one per treatment sequence,
  shared across strata.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .strata import ALL_SEQUENCES

# gamma/beta slots constrained to zero whenever assignment (or the outcome
# model, for SI2) may depend on observed intermediate outcomes only:
# (w1, column) pairs.  Column 1 loads on Y1(0), column 2 on Y1(1), column 3
# on their product; arm w1 observes Y1(w1) and nothing else.
SI_CONSTRAINED_GAMMA_SLOTS = ((1, 1), (0, 2), (0, 3), (1, 3))


class SpecKind(str, Enum):
    """Which factorization of the observed-data likelihood is assumed.

    ``LSI``
        Second-period assignment may depend on the latent stratum; each
        observed cell is a two-component mixture of stratum models.
    ``SI1``
        Assignment depends on the observed intermediate outcome only, but
        stratum-level outcome models are retained (mixture remains).
    ``SI2``
        Everything is conditioned on observed quantities; no mixture.
    """

    LSI = "lsi"
    SI1 = "si1"
    SI2 = "si2"

    @classmethod
    def parse(cls, value: "SpecKind | str") -> "SpecKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            valid = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown spec {value!r}; expected one of: {valid}") from None

    @property
    def uses_strata(self) -> bool:
        """Whether the likelihood mixes over latent strata."""
        return self is not SpecKind.SI2


_GAMMA_COLS = ("", "_y10", "_y11", "_y10y11")
_SEQ_LABELS = tuple(s.label for s in ALL_SEQUENCES)


def parameter_names(spec: SpecKind | str = SpecKind.LSI) -> list[str]:
    """Flat column names for the 31 parameter slots, in storage order."""
    spec = SpecKind.parse(spec)
    if spec is SpecKind.SI2:
        names = ["alpha_w0", "alpha_w1", "alpha_unused"]
    else:
        names = ["alpha_11", "alpha_00", "alpha_10"]
    for w1 in (0, 1):
        names += [f"gamma_{w1}{c}" for c in _GAMMA_COLS]
    for lab in _SEQ_LABELS:
        names += [f"beta_{lab}{c}" for c in _GAMMA_COLS]
    names += [f"sigma2_{lab}" for lab in _SEQ_LABELS]
    return names


@dataclass(frozen=True)
class ParameterVector:
    """Immutable container for the 31 model parameters.

    Arrays are copied on construction and flagged read-only, so instances
    are safe to share between threads and across chain draws.
    """

    alpha: np.ndarray
    gamma: np.ndarray
    beta: np.ndarray
    sigma2: np.ndarray

    def __post_init__(self):
        for name, shape in (("alpha", (3,)), ("gamma", (2, 4)), ("beta", (4, 4)), ("sigma2", (4,))):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != shape:
                raise ValueError(f"{name} must have shape {shape}, got {arr.shape}")
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @classmethod
    def zeros(cls, sigma2: float = 1.0) -> "ParameterVector":
        return cls(np.zeros(3), np.zeros((2, 4)), np.zeros((4, 4)), np.full(4, float(sigma2)))

    def replace(self, **changes) -> "ParameterVector":
        return replace(self, **changes)

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.alpha, self.gamma.ravel(), self.beta.ravel(), self.sigma2])

    @classmethod
    def from_vector(cls, vec: np.ndarray) -> "ParameterVector":
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (31,):
            raise ValueError(f"parameter vector must have 31 entries, got shape {vec.shape}")
        return cls(vec[:3], vec[3:11].reshape(2, 4), vec[11:27].reshape(4, 4), vec[27:])

    def validate(self, spec: SpecKind | str) -> None:
        """Raise ValueError if this vector is not admissible under ``spec``."""
        spec = SpecKind.parse(spec)
        for name in ("alpha", "gamma", "beta"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"non-finite values in {name}")
        if not np.all(np.isfinite(self.sigma2)) or np.any(self.sigma2 <= 0):
            raise ValueError(f"sigma2 must be strictly positive and finite, got {self.sigma2}")
        if spec is SpecKind.LSI:
            return
        bad = [(w1, c) for w1, c in SI_CONSTRAINED_GAMMA_SLOTS if self.gamma[w1, c] != 0.0]
        if bad:
            raise ValueError(
                f"spec {spec.value} requires the assignment coefficients on "
                f"unobservable intermediate outcomes to be exactly zero; nonzero at {bad}"
            )
        if spec is SpecKind.SI2:
            if self.alpha[2] != 0.0:
                raise ValueError("spec si2 uses only the first two alpha slots; the third must be 0")
            for seq in ALL_SEQUENCES:
                unused = (2, 3) if seq.w1 == 0 else (1, 3)
                if any(self.beta[seq, c] != 0.0 for c in unused):
                    raise ValueError(
                        f"spec si2 allows only an intercept and the observed-outcome slope in "
                        f"beta row {seq.label}; columns {unused} must be 0"
                    )

    def is_valid(self, spec: SpecKind | str) -> bool:
        try:
            self.validate(spec)
        except ValueError:
            return False
        return True
