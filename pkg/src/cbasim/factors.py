"""Cost and benefit factors, scenarios, and their validation."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

from .distributions import DistributionSpec, Point

__all__ = [
    "FactorKind",
    "CostCategory",
    "BenefitCategory",
    "Timing",
    "Tangibility",
    "GrowthModel",
    "Factor",
    "Scenario",
    "Violation",
    "validate_factor",
    "validate_scenario",
    "expected_value",
]


class FactorKind(str, Enum):
    COST = "cost"
    BENEFIT = "benefit"


class CostCategory(str, Enum):
    COMPANY = "company"
    TECHNOLOGY = "technology"
    EMPLOYEE = "employee"


class BenefitCategory(str, Enum):
    DESIGN = "design"
    CONSTRUCTION = "construction"


class Timing(str, Enum):
    INITIAL = "initial"  # once, at period 0
    ONGOING = "ongoing"  # every period 1..H


class Tangibility(str, Enum):
    TANGIBLE = "tangible"
    INTANGIBLE = "intangible"


Category = Union[CostCategory, BenefitCategory]

DEFAULT_GROWTH = 0.05


@dataclass(frozen=True)
class GrowthModel:
    """Compound annual growth applied to ongoing factors after their first year."""

    annual_rate: float = DEFAULT_GROWTH


@dataclass(frozen=True)
class Factor:
    """One cost or benefit line item.

    ``value`` is the base amount: the period-0 amount for an initial factor,
    the year-1 amount for an ongoing one.

    Two optional fields carry data as it was tabulated rather than modeled:

    ``components``
        ``(label, amount)`` pairs whose sum is the point value, e.g. the
        prices of individual hardware items.
    ``profile``
        Realized amounts for periods 1..H of an ongoing factor.  When set it
        replaces the growth model: the factor's series is the profile scaled
        by ``base / profile[0]``.

    ``group`` ties together entries that are the same line item split by
    timing (software bought once and then licensed yearly, say).
    """

    id: str
    name: str
    kind: FactorKind
    category: Category
    timing: Timing
    value: DistributionSpec
    growth: GrowthModel = field(default_factory=GrowthModel)
    tangibility: Optional[Tangibility] = None
    note: Optional[str] = None
    group: Optional[str] = None
    components: Optional[tuple[tuple[str, float], ...]] = None
    profile: Optional[tuple[float, ...]] = None

    @property
    def sign(self) -> int:
        return 1 if self.kind is FactorKind.BENEFIT else -1


@dataclass(frozen=True)
class Scenario:
    name: str
    factors: tuple[Factor, ...]
    horizon_years: int = 5
    discount_rate: float = 0.05
    currency: str = "USD"
    metadata: dict = field(default_factory=dict)

    @property
    def costs(self) -> tuple[Factor, ...]:
        return tuple(f for f in self.factors if f.kind is FactorKind.COST)

    @property
    def benefits(self) -> tuple[Factor, ...]:
        return tuple(f for f in self.factors if f.kind is FactorKind.BENEFIT)

    def factor(self, factor_id: str) -> Factor:
        for f in self.factors:
            if f.id == factor_id:
                return f
        raise KeyError(factor_id)


@dataclass(frozen=True)
class Violation:
    subject: str
    message: str

    def __str__(self) -> str:
        return f"{self.subject}: {self.message}"


_SLUG = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_.-]*$")

_CATEGORY_FOR = {FactorKind.COST: CostCategory, FactorKind.BENEFIT: BenefitCategory}


def expected_value(value: DistributionSpec) -> float:
    """Analytic mean of a value distribution."""
    return value.mean


def validate_factor(f: Factor) -> list[Violation]:
    """Every invariant ``f`` breaks, as data.  An empty list means valid."""
    subject = f.id or "<factor>"
    out: list[Violation] = []

    def bad(msg: str) -> None:
        out.append(Violation(subject, msg))

    if not isinstance(f.id, str) or not _SLUG.match(f.id):
        bad(f"id {f.id!r} is not a slug (letters, digits, '_', '-', '.')")
    if not isinstance(f.kind, FactorKind):
        bad(f"unknown kind {f.kind!r}")
    elif not isinstance(f.category, _CATEGORY_FOR[f.kind]):
        bad(f"category/kind mismatch: {f.kind.value} factor with category {getattr(f.category, 'value', f.category)!r}")
    if not isinstance(f.timing, Timing):
        bad(f"unknown timing {f.timing!r}")

    if f.kind is FactorKind.BENEFIT and f.tangibility is None:
        bad("benefit factors need a tangibility")
    if f.kind is FactorKind.COST and f.tangibility is not None:
        bad("tangibility applies to benefit factors only")
    if f.tangibility is Tangibility.INTANGIBLE and not (f.note and f.note.strip()):
        bad("intangible benefits need a note re-expressing them in measurable terms")

    rate = f.growth.annual_rate
    if not math.isfinite(rate) or rate <= -1:
        bad(f"growth rate <= -1 (got {rate})")

    mean = f.value.mean
    if not math.isfinite(mean) or mean < 0:
        bad(f"value mean must be >= 0 (got {mean})")

    if f.components is not None:
        total = math.fsum(amount for _, amount in f.components)
        if not isinstance(f.value, Point) or f.value.value != total:
            bad(f"components sum to {total:g} but value is {f.value}")
    if f.profile is not None:
        if f.timing is not Timing.ONGOING:
            bad("a period profile only applies to ongoing factors")
        if not f.profile or not all(math.isfinite(a) and a >= 0 for a in f.profile):
            bad("profile amounts must be finite and >= 0")
        elif f.profile[0] <= 0:
            bad("profile must start with a positive amount")
    return out


def validate_scenario(s: Scenario) -> list[Violation]:
    """Per-factor violations plus scenario-level checks."""
    out: list[Violation] = []
    subject = s.name or "<scenario>"
    h = s.horizon_years
    if isinstance(h, bool) or not isinstance(h, int) or h < 1:
        out.append(Violation(subject, f"horizon must be >= 1 (got {h!r})"))
    if not math.isfinite(s.discount_rate) or s.discount_rate <= -1:
        out.append(Violation(subject, f"discount rate must be > -1 (got {s.discount_rate})"))
    if not s.factors:
        out.append(Violation(subject, "scenario has no factors"))

    seen: set[str] = set()
    for f in s.factors:
        if f.id in seen:
            out.append(Violation(f.id, f"duplicate id {f.id!r}"))
        seen.add(f.id)
        out.extend(validate_factor(f))
        if f.profile is not None and isinstance(h, int) and len(f.profile) != h:
            out.append(Violation(f.id, f"profile has {len(f.profile)} amounts, horizon is {h}"))
    return out
