"""Turn chains into reported quantities.

Functionals are evaluated draw by draw over a chain (vectorized across the
stored parameter matrix) and then reduced to the table layout used
throughout: mean, sd, 2.5% and 97.5% bounds, plus quartiles.  Quantiles use
linear interpolation of order statistics (numpy's default, "type 7"), fixed
here so tables are bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from .model import assign_probs_from_draws, ates_from_draws, strata_probs_from_draws
from .params import SpecKind
from .sampler import Chain
from .strata import ALL_STRATA, ATE_NAMES, PrincipalStratum

SUMMARY_COLUMNS = ["name", "mean", "sd", "q025", "q25", "median", "q75", "q975"]

#: Functional names: the six contrasts, stratum probabilities "pi_00".."pi_11",
#: and assignment probabilities "h_{w1}_{stratum}", e.g. "h_1_01".
PI_NAMES = tuple(f"pi_{g.label}" for g in ALL_STRATA)
H_NAMES = tuple(f"h_{w1}_{g.label}" for w1 in (0, 1) for g in ALL_STRATA)


@dataclass(frozen=True)
class SummaryRow:
    """One line of a posterior summary table."""

    name: str
    mean: float
    sd: float
    q025: float
    q25: float
    median: float
    q75: float
    q975: float

    def as_dict(self) -> dict:
        return {c: getattr(self, c) for c in SUMMARY_COLUMNS}


@dataclass(frozen=True)
class DensityGrid:
    """Kernel density estimate on a fixed grid, or a point-mass marker."""

    x: np.ndarray | None
    density: np.ndarray | None
    point_mass: float | None = None

    @property
    def is_point_mass(self) -> bool:
        return self.point_mass is not None


def functional_draws(chain: Chain, functional: str) -> np.ndarray:
    """Evaluate a named estimand at every stored draw.

    Available names: the six contrast labels (all specifications), the four
    stratum probabilities ``pi_*`` and the eight assignment probabilities
    ``h_*`` (specifications that model strata only; under ``si2`` they are
    undefined and raise, the dashed-out entries of the summary tables).
    """
    if functional in ATE_NAMES:
        return ates_from_draws(chain.draws, chain.spec)[:, ATE_NAMES.index(functional)]
    if functional in PI_NAMES or functional in H_NAMES:
        if not chain.spec.uses_strata:
            raise ValueError(
                f"functional {functional!r} is stratum-level and undefined for a "
                f"spec 'si2' chain (the dashed-out entries of the summary tables)"
            )
        if functional in PI_NAMES:
            return strata_probs_from_draws(chain.draws[:, :3])[:, PI_NAMES.index(functional)]
        w1, glabel = functional.split("_")[1:]
        h = assign_probs_from_draws(chain.draws[:, 3:11])
        return h[:, int(w1), int(PrincipalStratum.from_label(glabel))]
    raise ValueError(f"unknown functional {functional!r}")


def available_functionals(spec: SpecKind | str) -> tuple[str, ...]:
    spec = SpecKind.parse(spec)
    if spec.uses_strata:
        return ATE_NAMES + PI_NAMES + H_NAMES
    return ATE_NAMES


def summarize(draws, name: str = "") -> SummaryRow:
    """Reduce a sequence of draws to the reported summary statistics."""
    draws = np.asarray(draws, dtype=float)
    if draws.ndim != 1 or draws.size < 2:
        raise ValueError("summarize needs a one-dimensional sequence of at least 2 draws")
    q = np.quantile(draws, [0.025, 0.25, 0.5, 0.75, 0.975])
    return SummaryRow(
        name=name,
        mean=float(draws.mean()),
        sd=float(draws.std(ddof=1)),
        q025=float(q[0]),
        q25=float(q[1]),
        median=float(q[2]),
        q75=float(q[3]),
        q975=float(q[4]),
    )


def summary_table(chain: Chain, functionals=None) -> pd.DataFrame:
    """SummaryRow per functional, as a data frame in table order."""
    if functionals is None:
        functionals = ATE_NAMES
    rows = [summarize(functional_draws(chain, f), name=f).as_dict() for f in functionals]
    return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)


def comparison_table(chains: dict[str, Chain], functionals=None) -> pd.DataFrame:
    """Side-by-side summary for several chains (one stat block per label)."""
    if not chains:
        raise ValueError("no chains given")
    if functionals is None:
        functionals = ATE_NAMES
    out = pd.DataFrame({"name": list(functionals)})
    for label, chain in chains.items():
        tab = summary_table(chain, functionals)
        for col in ("mean", "sd", "q025", "q975"):
            out[f"{label}_{col}"] = tab[col].to_numpy()
    return out


def density_grid(draws, n_points: int = 256) -> DensityGrid:
    """Gaussian-kernel density of the draws on a regular grid.

    Uses Silverman's bandwidth.  Zero-variance draws cannot carry a density
    and come back flagged as a point mass.  Presentational only: nothing
    downstream depends on the smoothing choices.
    """
    draws = np.asarray(draws, dtype=float)
    if draws.ndim != 1 or draws.size < 30:
        raise ValueError("density_grid needs at least 30 draws")
    if int(n_points) < 2:
        raise ValueError("n_points must be at least 2")
    sd = draws.std(ddof=1)
    if sd == 0.0:
        return DensityGrid(x=None, density=None, point_mass=float(draws[0]))
    n = draws.size
    iqr = np.subtract(*np.quantile(draws, [0.75, 0.25]))
    scale = min(sd, iqr / 1.34) if iqr > 0 else sd
    bw = 0.9 * scale * n ** (-0.2)
    x = np.linspace(draws.min() - 4 * bw, draws.max() + 4 * bw, int(n_points))
    z = (x[:, None] - draws[None, :]) / bw
    dens = np.exp(-0.5 * z * z).sum(axis=1) / (n * bw * np.sqrt(2 * np.pi))
    return DensityGrid(x=x, density=dens)


# ---------------------------------------------------------------------------
# Convergence diagnostics


def _autocovariance(x: np.ndarray) -> np.ndarray:
    n = x.size
    xc = x - x.mean()
    m = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(xc, m)
    acov = np.fft.irfft(f * np.conj(f), m)[:n].real
    return acov / n


def effective_sample_size(x) -> float:
    """ESS of one sequence via Geyer's initial positive/monotone estimate."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 4:
        raise ValueError("need a one-dimensional sequence of at least 4 draws")
    n = x.size
    acov = _autocovariance(x)
    if acov[0] == 0:
        return float(n)
    rho = acov / acov[0]
    # Sum consecutive-pair autocorrelations while they stay positive, then
    # enforce monotone decay.
    pair_sums = []
    t = 1
    while t + 1 < n:
        s = rho[t] + rho[t + 1]
        if s < 0:
            break
        pair_sums.append(s)
        t += 2
    running = np.inf
    total = 0.0
    for s in pair_sums:
        running = min(running, s)
        total += running
    tau = 1.0 + 2.0 * total
    return float(n / max(tau, 1.0 / n))


def rhat(chains_draws) -> float:
    """Potential scale reduction across chains.

    Given two or more sequences, compares between-chain to within-chain
    variance exactly as provided; given a single sequence, splits it in half
    first (split-R-hat).  Values below 1 carry no signal and are floored at
    1, so duplicated chains give exactly 1.
    """
    seqs = [np.asarray(c, dtype=float) for c in chains_draws]
    if len(seqs) == 1:
        x = seqs[0]
        half = x.size // 2
        if half < 2:
            raise ValueError("a single chain must have at least 4 draws to split")
        seqs = [x[:half], x[half : 2 * half]]
    if any(s.ndim != 1 for s in seqs) or len({s.size for s in seqs}) != 1:
        raise ValueError("chains must be one-dimensional and equally long")
    n = seqs[0].size
    if n < 2:
        raise ValueError("chains must have at least 2 draws")
    means = np.array([s.mean() for s in seqs])
    within = float(np.mean([s.var(ddof=1) for s in seqs]))
    between = n * means.var(ddof=1)
    if within == 0.0:
        return 1.0 if between == 0.0 else float("inf")
    pooled = (n - 1) / n * within + between / n
    return float(max(np.sqrt(pooled / within), 1.0))


def diagnostics(chains: Chain | list[Chain], parameters: list[str] | None = None) -> pd.DataFrame:
    """Per-parameter ESS, R-hat and trace summaries for one or more chains.

    R-hat needs at least two chains to compare; with a single chain it is
    computed on the chain's two halves.
    """
    if isinstance(chains, Chain):
        chains = [chains]
    if not chains:
        raise ValueError("no chains given")
    first = chains[0]
    if any(c.spec is not first.spec for c in chains):
        raise ValueError("all chains must share a spec")
    names = parameters if parameters is not None else first.param_names
    rows = []
    for name in names:
        cols = [c.column(name) for c in chains]
        pooled = np.concatenate(cols)
        rows.append(
            {
                "name": name,
                "mean": float(pooled.mean()),
                "sd": float(pooled.std(ddof=1)),
                "ess": float(sum(effective_sample_size(x) for x in cols)),
                "rhat": rhat(cols),
            }
        )
    return pd.DataFrame(rows, columns=["name", "mean", "sd", "ess", "rhat"])
