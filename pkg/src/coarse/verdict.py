"""Verdicts and witnesses returned by every semi-decision in the package."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any

GLOBAL = "global"


class Status(str, enum.Enum):
    VERIFIED = "verified"
    REFUTED = "refuted_up_to"
    CONSISTENT = "consistent_up_to"
    NO_WITNESS = "no_witness_within_budget"

    @property
    def exit_code(self) -> int:
        return {Status.VERIFIED: 0, Status.CONSISTENT: 0,
                Status.REFUTED: 1, Status.NO_WITNESS: 2}[self]


class MalformedWitness(ValueError):
    """A supplied witness is structurally invalid (e.g. overlapping pieces)."""

    def __init__(self, message, element=None):
        super().__init__(message)
        self.element = element


@dataclass(frozen=True)
class BoundingWitness:
    """A ⊆ F·B checked on ball(verified_radius), or globally when theorem-backed."""

    F: tuple
    verified_radius: int | str

    @property
    def is_global(self) -> bool:
        return self.verified_radius == GLOBAL


@dataclass
class Verdict:
    status: Status
    radius: int | None = None
    scope: str = "window"
    witness: Any = None
    counterexample: Any = None
    budget: dict = field(default_factory=dict)
    detail: str = ""
    padded_radius: int | None = None

    @property
    def ok(self) -> bool:
        return self.status is Status.VERIFIED

    @property
    def is_global(self) -> bool:
        return self.scope == GLOBAL

    def to_json(self, group) -> dict:
        out: dict = {"status": self.status.value, "scope": self.scope,
                     "radii": {"window": self.radius}}
        if self.padded_radius is not None:
            out["radii"]["padded"] = self.padded_radius
        if self.witness is not None:
            out["witness"] = encode(group, self.witness)
        if self.counterexample is not None:
            out["counterexample"] = encode(group, self.counterexample)
        if self.budget:
            out["budget"] = dict(self.budget)
        if self.detail:
            out["detail"] = self.detail
        return out


def verified(radius, witness=None, scope="window", **kw) -> Verdict:
    return Verdict(Status.VERIFIED, radius, scope, witness, **kw)


def refuted(radius, counterexample, witness=None, **kw) -> Verdict:
    return Verdict(Status.REFUTED, radius, "window", witness, counterexample, **kw)


def no_witness(radius, budget, **kw) -> Verdict:
    return Verdict(Status.NO_WITNESS, radius, "window", budget=budget, **kw)


def consistent(radius, witness=None, **kw) -> Verdict:
    return Verdict(Status.CONSISTENT, radius, "window", witness, **kw)


def encode(group, obj):
    """Recursively render elements in canonical syntax for JSON output."""
    if isinstance(obj, BoundingWitness):
        return {"F": [group.format(f) for f in obj.F],
                "verified_radius": obj.verified_radius}
    if isinstance(obj, dict):
        return {k: encode(group, v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)) and not group.is_element(obj):
        return [encode(group, v) for v in obj]
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    if group.is_element(obj):
        return group.format(obj)
    if hasattr(obj, "to_json"):
        return obj.to_json(group)
    return repr(obj)
