"""Observed and simulated study records.

A dataset is column-oriented: four observed columns per unit plus, for
simulated data, the true stratum and the four final-outcome potentials.
The CSV layout is ``id,w1,y1_obs,w2,y2_obs`` with the optional truth block
``g_true,y2_00,y2_10,y2_01,y2_11`` appended (suffixes are ``w1 w2``; the
``g_true`` column carries the stratum code 2*Y1(0)+Y1(1), i.e. 0, 1, 10 and
11 read as the binary pair).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .strata import PrincipalStratum, TreatmentSequence
from .validation import as_binary_array, as_float_array

OBSERVED_COLUMNS = ["id", "w1", "y1_obs", "w2", "y2_obs"]
# Truth columns follow the usual sequence enumeration: neither period,
# first only, second only, both.
TRUTH_COLUMNS = ["g_true", "y2_00", "y2_10", "y2_01", "y2_11"]
_TRUTH_SEQ_ORDER = [TreatmentSequence.W00, TreatmentSequence.W10, TreatmentSequence.W01, TreatmentSequence.W11]


@dataclass(frozen=True)
class Unit:
    """One study record; latent fields are populated only in simulated data."""

    id: int
    w1: int
    y1_obs: int
    w2: int
    y2_obs: float
    stratum: PrincipalStratum | None = None
    potential_y2: tuple[float, float, float, float] | None = None

    @property
    def sequence(self) -> TreatmentSequence:
        return TreatmentSequence.from_assignments(self.w1, self.w2)


@dataclass
class Dataset:
    """Column arrays for ``n`` units, with optional simulation truth."""

    w1: np.ndarray
    y1_obs: np.ndarray
    w2: np.ndarray
    y2_obs: np.ndarray
    ids: np.ndarray | None = None
    stratum: np.ndarray | None = None
    potential_y2: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.w1 = as_binary_array(self.w1, "w1")
        n = self.w1.shape[0]
        self.y1_obs = as_binary_array(self.y1_obs, "y1_obs", n=n)
        self.w2 = as_binary_array(self.w2, "w2", n=n)
        self.y2_obs = as_float_array(self.y2_obs, "y2_obs", n=n)
        if self.ids is None:
            self.ids = np.arange(n, dtype=np.int64)
        else:
            self.ids = np.asarray(self.ids, dtype=np.int64)
            if self.ids.shape != (n,):
                raise ValueError(f"ids must have shape ({n},)")
        if (self.stratum is None) != (self.potential_y2 is None):
            raise ValueError("stratum and potential_y2 must be provided together")
        if self.stratum is not None:
            self.stratum = np.asarray(self.stratum, dtype=np.int8)
            if self.stratum.shape != (n,) or self.stratum.min(initial=0) < 0 or self.stratum.max(initial=0) > 3:
                raise ValueError("stratum must be n codes in 0..3")
            self.potential_y2 = np.asarray(self.potential_y2, dtype=float)
            if self.potential_y2.shape != (n, 4):
                raise ValueError(f"potential_y2 must have shape ({n}, 4)")
            self._check_truth_consistency()

    def _check_truth_consistency(self):
        # Observed fields must be deterministic functions of the latent ones.
        y1_true = np.where(self.w1 == 1, self.stratum & 1, (self.stratum >> 1) & 1)
        if not np.array_equal(self.y1_obs, y1_true):
            raise ValueError("y1_obs inconsistent with the stored stratum under w1")
        seq = self.sequence_index()
        if not np.array_equal(self.y2_obs, self.potential_y2[np.arange(len(self)), seq]):
            raise ValueError("y2_obs inconsistent with the stored potential outcomes")

    def __len__(self) -> int:
        return int(self.w1.shape[0])

    @property
    def has_truth(self) -> bool:
        return self.stratum is not None

    def sequence_index(self) -> np.ndarray:
        """Per-unit treatment sequence code 2*w1 + w2."""
        return (2 * self.w1 + self.w2).astype(np.int8)

    def unit(self, i: int) -> Unit:
        g = PrincipalStratum(int(self.stratum[i])) if self.has_truth else None
        pot = tuple(self.potential_y2[i]) if self.has_truth else None
        return Unit(
            id=int(self.ids[i]),
            w1=int(self.w1[i]),
            y1_obs=int(self.y1_obs[i]),
            w2=int(self.w2[i]),
            y2_obs=float(self.y2_obs[i]),
            stratum=g,
            potential_y2=pot,
        )

    def cell_counts(self) -> pd.Series:
        """Counts of the eight observed groups O(w1, y1, w2)."""
        idx = pd.MultiIndex.from_product([(0, 1)] * 3, names=["w1", "y1_obs", "w2"])
        counts = pd.Series(0, index=idx, dtype=int)
        df = pd.DataFrame({"w1": self.w1, "y1_obs": self.y1_obs, "w2": self.w2})
        got = df.value_counts(["w1", "y1_obs", "w2"])
        counts.loc[got.index] = got
        return counts

    def to_frame(self, with_truth: bool = False) -> pd.DataFrame:
        df = pd.DataFrame(
            {
                "id": self.ids,
                "w1": self.w1,
                "y1_obs": self.y1_obs,
                "w2": self.w2,
                "y2_obs": self.y2_obs,
            }
        )
        if with_truth:
            if not self.has_truth:
                raise ValueError("dataset carries no simulation truth")
            df["g_true"] = self.stratum
            for col, seq in zip(TRUTH_COLUMNS[1:], _TRUTH_SEQ_ORDER):
                df[col] = self.potential_y2[:, seq]
        return df

    def to_csv(self, path, with_truth: bool = False) -> None:
        self.to_frame(with_truth=with_truth).to_csv(path, index=False)

    @classmethod
    def from_frame(cls, df: pd.DataFrame, meta: dict | None = None) -> "Dataset":
        missing = [c for c in OBSERVED_COLUMNS if c not in df.columns]
        if missing:
            raise ValueError(f"dataset is missing columns: {missing}")
        stratum = potential = None
        if set(TRUTH_COLUMNS) <= set(df.columns):
            stratum = np.array([int(str(v), 2) if isinstance(v, str) else int(v) for v in df["g_true"]])
            stratum = np.where(stratum > 3, stratum // 10 * 2 + stratum % 10, stratum)  # accept "10"/"11" literals
            potential = np.empty((len(df), 4))
            for col, seq in zip(TRUTH_COLUMNS[1:], _TRUTH_SEQ_ORDER):
                potential[:, seq] = df[col].to_numpy(dtype=float)
        return cls(
            w1=df["w1"].to_numpy(),
            y1_obs=df["y1_obs"].to_numpy(),
            w2=df["w2"].to_numpy(),
            y2_obs=df["y2_obs"].to_numpy(),
            ids=df["id"].to_numpy(),
            stratum=stratum,
            potential_y2=potential,
            meta=dict(meta or {}),
        )

    @classmethod
    def read_csv(cls, path) -> "Dataset":
        return cls.from_frame(pd.read_csv(path))
