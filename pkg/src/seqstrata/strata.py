"""Principal strata, treatment sequences, and the observed-group bookkeeping.

A unit's principal stratum is the pair of its two intermediate potential
outcomes ``(Y1(0), Y1(1))``.  Strata are encoded as the integers 0..3 with
``code = 2 * Y1(0) + Y1(1)``, so the decimal value reads as the binary pair:
0 -> "00", 1 -> "01", 2 -> "10", 3 -> "11".  Treatment sequences ``(w1, w2)``
use the same trick: ``seq_index = 2 * w1 + w2``.
"""

from __future__ import annotations

from enum import IntEnum


class PrincipalStratum(IntEnum):
    """Latent class defined by the joint intermediate potential outcomes."""

    S00 = 0
    S01 = 1
    S10 = 2
    S11 = 3

    @property
    def y1_if_control(self) -> int:
        """Intermediate outcome the unit shows when w1 = 0."""
        return (self.value >> 1) & 1

    @property
    def y1_if_treated(self) -> int:
        """Intermediate outcome the unit shows when w1 = 1."""
        return self.value & 1

    def y1_under(self, w1: int) -> int:
        """Intermediate outcome revealed by first-period assignment ``w1``."""
        return self.y1_if_treated if w1 else self.y1_if_control

    @property
    def label(self) -> str:
        """Two-digit label, e.g. "01" for (Y1(0)=0, Y1(1)=1)."""
        return format(self.value, "02b")

    @classmethod
    def from_label(cls, label: str) -> "PrincipalStratum":
        try:
            return cls(int(label, 2))
        except ValueError:
            raise ValueError(f"not a principal stratum label: {label!r}") from None


# Fixed enumeration order used for all length-4 stratum arrays.
ALL_STRATA = (
    PrincipalStratum.S00,
    PrincipalStratum.S01,
    PrincipalStratum.S10,
    PrincipalStratum.S11,
)

# Strata with Y1(0) = 1 and with Y1(1) = 1, as index masks.
Y10_POSITIVE = (PrincipalStratum.S10, PrincipalStratum.S11)
Y11_POSITIVE = (PrincipalStratum.S01, PrincipalStratum.S11)


class TreatmentSequence(IntEnum):
    """One of the four two-period assignment sequences (w1, w2)."""

    W00 = 0
    W01 = 1
    W10 = 2
    W11 = 3

    @property
    def w1(self) -> int:
        return (self.value >> 1) & 1

    @property
    def w2(self) -> int:
        return self.value & 1

    @property
    def label(self) -> str:
        return format(self.value, "02b")

    @classmethod
    def from_assignments(cls, w1: int, w2: int) -> "TreatmentSequence":
        if w1 not in (0, 1) or w2 not in (0, 1):
            raise ValueError(f"assignments must be binary, got ({w1}, {w2})")
        return cls(2 * w1 + w2)


ALL_SEQUENCES = (
    TreatmentSequence.W00,
    TreatmentSequence.W01,
    TreatmentSequence.W10,
    TreatmentSequence.W11,
)

# The six average-effect contrasts reported throughout, in table order.
# Each entry is (label, minuend sequence, subtrahend sequence).
ATE_CONTRASTS = (
    ("ATE_11.00", TreatmentSequence.W11, TreatmentSequence.W00),
    ("ATE_11.01", TreatmentSequence.W11, TreatmentSequence.W01),
    ("ATE_11.10", TreatmentSequence.W11, TreatmentSequence.W10),
    ("ATE_10.00", TreatmentSequence.W10, TreatmentSequence.W00),
    ("ATE_01.10", TreatmentSequence.W01, TreatmentSequence.W10),
    ("ATE_01.00", TreatmentSequence.W01, TreatmentSequence.W00),
)

ATE_NAMES = tuple(name for name, _, _ in ATE_CONTRASTS)


def latent_pair(w1: int, y1: int) -> tuple[PrincipalStratum, PrincipalStratum]:
    """The two strata compatible with observing intermediate outcome ``y1``
    after first-period assignment ``w1``.

    Observing (w1, y1) pins down one coordinate of the stratum pair and
    leaves the other free, so every observed group mixes exactly two strata:

    ========  ==========================
    (w1, y1)  admissible strata
    ========  ==========================
    (0, 0)    S00, S01
    (0, 1)    S10, S11
    (1, 0)    S00, S10
    (1, 1)    S01, S11
    ========  ==========================
    """
    if w1 not in (0, 1) or y1 not in (0, 1):
        raise ValueError(f"w1 and y1 must be binary, got ({w1}, {y1})")
    return tuple(g for g in ALL_STRATA if g.y1_under(w1) == y1)  # type: ignore[return-value]
