"""Tri-state verdicts for precision-bounded checks.

Truncated algebra cannot certify universally quantified statements beyond
its caps, so every checker returns pass / fail / undetermined rather than a
bare boolean.  ``undetermined`` is a first-class outcome, never coerced.
"""

from __future__ import annotations

from dataclasses import dataclass, field

PASS = "pass"
FAIL = "fail"
UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class Verdict:
    status: str
    precision: object = None  # pi-adic precision the verdict holds at
    witness: object = None  # counterexample data for fail verdicts
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status == PASS

    @property
    def failed(self) -> bool:
        return self.status == FAIL

    @property
    def undetermined(self) -> bool:
        return self.status == UNDETERMINED

    def __str__(self):
        bits = [self.status]
        if self.precision is not None:
            bits.append(f"precision={self.precision}")
        if self.detail:
            bits.append(self.detail)
        return " ".join(bits)


def passed(precision=None, detail="") -> Verdict:
    return Verdict(PASS, precision=precision, detail=detail)


def failed(witness=None, precision=None, detail="") -> Verdict:
    return Verdict(FAIL, precision=precision, witness=witness, detail=detail)


def undetermined(precision=None, detail="") -> Verdict:
    return Verdict(UNDETERMINED, precision=precision, detail=detail)


def combine(verdicts) -> Verdict:
    """Conjunction: fail dominates, then undetermined, else pass."""
    verdicts = list(verdicts)
    for v in verdicts:
        if v.failed:
            return v
    for v in verdicts:
        if v.undetermined:
            return v
    precs = [v.precision for v in verdicts if v.precision is not None]
    return Verdict(PASS, precision=min(precs) if precs else None)
