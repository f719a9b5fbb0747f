"""Assessing sequential ignorability from a latent-stratum fit.

If assignment truly depends only on observed history, the second-period
assignment probability must be identical for the two strata that share an
observed intermediate outcome, in both arms.  The four draw-wise gaps
between those paired probabilities are therefore direct sensitivity
parameters: posteriors concentrated away from zero are evidence against
sequential ignorability.

A frequentist cross-check is included: the saturated inverse-probability-
weighted estimator of the four sequence means, which is consistent exactly
when sequential ignorability holds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from .data import Dataset
from .model import assign_probs_from_draws
from .params import SpecKind
from .posterior import summarize
from .sampler import Chain
from .strata import ATE_CONTRASTS, ATE_NAMES, PrincipalStratum
from .validation import check_positive_int

# The four pairings that must coincide under sequential ignorability:
# (w1, stratum a, stratum b); the gap is h(w1, a) - h(w1, b).
EQUALITY_PAIRINGS = (
    (0, PrincipalStratum.S00, PrincipalStratum.S01),
    (0, PrincipalStratum.S10, PrincipalStratum.S11),
    (1, PrincipalStratum.S00, PrincipalStratum.S10),
    (1, PrincipalStratum.S01, PrincipalStratum.S11),
)


def pairing_label(pairing) -> str:
    w1, a, b = pairing
    return f"w1={w1}:{a.label}-{b.label}"


def equality_gaps(chain: Chain) -> dict[str, np.ndarray]:
    """Draw-wise assignment-probability gaps for the four stratum pairings.

    Requires a latent-stratum chain: only under that specification do the
    paired probabilities differ at all (they coincide identically once the
    coefficients on unobservable outcomes are zero).
    """
    if chain.spec is not SpecKind.LSI:
        raise ValueError(
            f"equality gaps are defined for spec 'lsi' chains, got {chain.spec.value!r}"
        )
    h = assign_probs_from_draws(chain.draws[:, 3:11])
    return {
        pairing_label(p): h[:, p[0], int(p[1])] - h[:, p[0], int(p[2])]
        for p in EQUALITY_PAIRINGS
    }


def sensitivity_report(chain: Chain, level: float = 0.95) -> pd.DataFrame:
    """Summary of each gap plus whether its credible interval excludes zero.

    ``level`` sets the equal-tailed credible interval used for the
    excludes-zero call (0.95 unless overridden).
    """
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    tail = (1.0 - level) / 2.0
    rows = []
    for (w1, a, b), (label, gaps) in zip(EQUALITY_PAIRINGS, equality_gaps(chain).items()):
        s = summarize(gaps, name=label)
        lo, hi = np.quantile(gaps, [tail, 1.0 - tail])
        rows.append(
            {
                "pairing": label,
                "w1": w1,
                "stratum_a": a.label,
                "stratum_b": b.label,
                "mean": s.mean,
                "sd": s.sd,
                "q025": float(lo),
                "q975": float(hi),
                "excludes_zero": bool(lo > 0.0 or hi < 0.0),
            }
        )
    return pd.DataFrame(rows)


@dataclass(frozen=True)
class IpwResult:
    """Point estimates, bootstrap standard errors, and any contrasts left
    undefined by empty cells (with the offending cells named)."""

    estimates: dict[str, float]
    std_errors: dict[str, float]
    undefined: dict[str, list[str]]
    n_bootstrap: int
    seed: int

    def to_frame(self) -> pd.DataFrame:
        rows = [
            {
                "name": k,
                "estimate": self.estimates[k],
                "se": self.std_errors.get(k, float("nan")),
                "undefined_cells": ";".join(self.undefined.get(k, [])),
            }
            for k in ATE_NAMES
        ]
        return pd.DataFrame(rows)


def _sequence_means_ipw(w1, y1, w2, y2) -> np.ndarray:
    """Weighted mean of the final outcome per sequence, with saturated
    empirical weights 1/p(w1) * 1/p(w2 | w1, y1); NaN where a needed cell
    is empty.

    With weights constant within (w1, y1, w2) cells, the weighted mean
    reduces to standardizing the cell means over the observed distribution
    of y1 given w1.
    """
    out = np.full(4, np.nan)
    for s in range(4):
        sw1, sw2 = s >> 1, s & 1
        num = den = 0.0
        ok = True
        for v1 in (0, 1):
            arm = (w1 == sw1) & (y1 == v1)
            n_arm = arm.sum()
            if n_arm == 0:
                continue
            cell = arm & (w2 == sw2)
            if cell.sum() == 0:
                ok = False
                break
            # weight per unit in this cell: n_arm / n_cell (p(w1) cancels)
            num += n_arm * y2[cell].mean()
            den += n_arm
        out[s] = num / den if ok and den > 0 else np.nan
    return out


def ipw_msm_estimate(data: Dataset, n_bootstrap: int = 500, seed: int = 0) -> IpwResult:
    """Saturated inverse-probability-weighted estimates of the six contrasts.

    Standard errors come from a nonparametric bootstrap over units
    (``n_bootstrap`` replicates, seeded).  Replicates that empty a cell are
    dropped from the affected contrast's bootstrap distribution.
    """
    check_positive_int(n_bootstrap, "n_bootstrap")
    if len(data) == 0:
        raise ValueError("dataset must contain at least one unit")
    w1, y1, w2, y2 = data.w1, data.y1_obs, data.w2, data.y2_obs

    means = _sequence_means_ipw(w1, y1, w2, y2)
    estimates, undefined = {}, {}
    for name, a, b in ATE_CONTRASTS:
        est = means[a] - means[b]
        estimates[name] = float(est)
        if np.isnan(est):
            missing = []
            for s in (a, b):
                if np.isnan(means[s]):
                    for v1 in (0, 1):
                        if ((w1 == s.w1) & (y1 == v1)).sum() > 0 and (
                            (w1 == s.w1) & (y1 == v1) & (w2 == s.w2)
                        ).sum() == 0:
                            missing.append(f"O({s.w1},{v1},{s.w2})")
            undefined[name] = missing

    rng = np.random.default_rng(seed)
    n = len(data)
    boot = np.empty((n_bootstrap, 6))
    for r in range(n_bootstrap):
        idx = rng.integers(0, n, size=n)
        m = _sequence_means_ipw(w1[idx], y1[idx], w2[idx], y2[idx])
        boot[r] = [m[a] - m[b] for _, a, b in ATE_CONTRASTS]
    ses = {}
    for j, name in enumerate(ATE_NAMES):
        col = boot[:, j]
        col = col[np.isfinite(col)]
        ses[name] = float(col.std(ddof=1)) if col.size >= 2 else float("nan")
    return IpwResult(
        estimates=estimates, std_errors=ses, undefined=undefined, n_bootstrap=n_bootstrap, seed=seed
    )
