"""Structured verdicts shared by every check in the package.

A Certificate never throws away evidence: refutations carry the witness
that produced them, and sampled limit checks carry a note stating the
resolution at which "no violation found" was established.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

PASS = "pass"
REFUTED = "refuted"
INCONCLUSIVE = "inconclusive"
HYPOTHESIS_FAILURE = "hypothesis-failure"

VERDICTS = (PASS, REFUTED, INCONCLUSIVE, HYPOTHESIS_FAILURE)


@dataclass
class Certificate:
    """Outcome of a single check.

    verdict is one of PASS / REFUTED / INCONCLUSIVE / HYPOTHESIS_FAILURE.
    ``witness`` holds the points/indices/values behind a refutation,
    ``details`` holds measured quantities (gap tables, margins, ...),
    ``note`` carries a confidence statement for refutation-only checks.
    """

    check: str
    verdict: str
    witness: dict[str, Any] | None = None
    details: dict[str, Any] = field(default_factory=dict)
    note: str = ""
    subchecks: list["Certificate"] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")

    @property
    def passed(self) -> bool:
        """True for pass and for inconclusive (no violation found)."""
        return self.verdict in (PASS, INCONCLUSIVE)

    @property
    def refuted(self) -> bool:
        return self.verdict == REFUTED

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"check": self.check, "verdict": self.verdict}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.details:
            out["details"] = self.details
        if self.note:
            out["note"] = self.note
        if self.subchecks:
            out["subchecks"] = [c.to_dict() for c in self.subchecks]
        return out


def combine(check: str, subchecks: list[Certificate], note: str = "") -> Certificate:
    """Parent certificate: refuted if any child is, else pass."""
    refuted = [c for c in subchecks if c.refuted]
    verdict = REFUTED if refuted else PASS
    witness = refuted[0].witness if refuted else None
    return Certificate(check, verdict, witness=witness, note=note, subchecks=subchecks)
