"""Reading and writing scenario documents (YAML, see ``data/scenario.schema.json``)."""

from __future__ import annotations

import json
import math
from importlib import resources
from pathlib import Path
from typing import Union

import jsonschema
import yaml

from .distributions import Point
from .expr import ExpressionError, format_value_expr, parse_value_expr
from .factors import (
    DEFAULT_GROWTH,
    BenefitCategory,
    CostCategory,
    Factor,
    FactorKind,
    GrowthModel,
    Scenario,
    Tangibility,
    Timing,
    Violation,
    validate_scenario,
)
from .simulation import SimulationConfig

__all__ = [
    "ScenarioError",
    "ScenarioParseError",
    "ScenarioValidationError",
    "SHIPPED_SCENARIOS",
    "shipped_path",
    "resolve_path",
    "load_scenario",
    "parse_scenario",
    "scenario_to_document",
    "dump_scenario",
    "save_scenario",
]

SHIPPED_SCENARIOS = ("paper_point", "paper_stochastic", "paper_aggregate")


class ScenarioError(Exception):
    """Base class for scenario document problems."""


class ScenarioParseError(ScenarioError):
    """The document is not well-formed or does not follow the schema."""


class ScenarioValidationError(ScenarioError):
    """The document parsed but describes an invalid scenario."""

    def __init__(self, violations: list[Violation]) -> None:
        self.violations = violations
        super().__init__("invalid scenario:\n" + "\n".join(f"  - {v}" for v in violations))


def _schema() -> dict:
    return json.loads(resources.files("cbasim").joinpath("data/scenario.schema.json").read_text())


def shipped_path(name: str) -> Path:
    if name not in SHIPPED_SCENARIOS:
        raise KeyError(f"no shipped scenario {name!r}; available: {', '.join(SHIPPED_SCENARIOS)}")
    return Path(str(resources.files("cbasim").joinpath(f"data/{name}.yaml")))


def resolve_path(path_or_name: Union[str, Path]) -> Path:
    """A file path, or the name of a shipped scenario when no such file exists."""
    p = Path(path_or_name)
    if not p.exists() and str(path_or_name) in SHIPPED_SCENARIOS:
        return shipped_path(str(path_or_name))
    return p


def _category(kind: FactorKind, raw: str):
    enum = CostCategory if kind is FactorKind.COST else BenefitCategory
    try:
        return enum(raw)
    except ValueError:
        # Keep the mismatch so validation reports it against the factor id.
        other = BenefitCategory if enum is CostCategory else CostCategory
        return other(raw)


def _factor(doc: dict, where: str) -> Factor:
    kind = FactorKind(doc["kind"])
    timing = Timing(doc["timing"])
    components = None
    if "components" in doc:
        components = tuple((str(k), float(v)) for k, v in doc["components"].items())
        value = Point(math.fsum(v for _, v in components))
    else:
        try:
            value = parse_value_expr(doc["value"])
        except ExpressionError as exc:
            raise ScenarioParseError(f"{where} ({doc['id']}): {exc}") from exc
    default_growth = DEFAULT_GROWTH if timing is Timing.ONGOING else 0.0
    return Factor(
        id=doc["id"],
        name=doc["name"],
        kind=kind,
        category=_category(kind, doc["category"]),
        timing=timing,
        value=value,
        growth=GrowthModel(float(doc.get("growth", default_growth))),
        tangibility=Tangibility(doc["tangibility"]) if "tangibility" in doc else None,
        note=doc.get("note"),
        group=doc.get("group"),
        components=components,
        profile=tuple(float(a) for a in doc["amounts"]) if "amounts" in doc else None,
    )


def parse_scenario(doc: dict, source: str = "<document>") -> tuple[Scenario, SimulationConfig]:
    """Build and validate a scenario from an already-decoded document."""
    try:
        jsonschema.validate(doc, _schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ScenarioParseError(f"{source}: {where}: {exc.message}") from exc

    factors = tuple(_factor(f, f"{source}: factors/{i}") for i, f in enumerate(doc["factors"]))
    scenario = Scenario(
        name=doc["name"],
        factors=factors,
        horizon_years=doc.get("horizon_years", 5),
        discount_rate=float(doc.get("discount_rate", 0.05)),
        currency=doc.get("currency", "USD"),
        metadata=dict(doc.get("metadata", {})),
    )
    violations = validate_scenario(scenario)
    if violations:
        raise ScenarioValidationError(violations)

    sim = dict(doc.get("simulation", {}))
    if "seed" in sim:
        sim["master_seed"] = sim.pop("seed")
    try:
        cfg = SimulationConfig(**sim)
    except ValueError as exc:
        raise ScenarioValidationError([Violation("simulation", str(exc))]) from exc
    return scenario, cfg


def load_scenario(path: Union[str, Path]) -> tuple[Scenario, SimulationConfig]:
    """Read a scenario document, apply defaults and validate it.

    ``path`` may also be the name of a shipped scenario (``paper_point``,
    ``paper_stochastic``, ``paper_aggregate``).  Raises ``OSError`` for I/O
    problems, :class:`ScenarioParseError` for malformed documents and
    :class:`ScenarioValidationError` for invalid content.
    """
    p = resolve_path(path)
    text = p.read_text(encoding="utf-8")
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioParseError(f"{p}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ScenarioParseError(f"{p}: expected a mapping at the top level")
    return parse_scenario(doc, str(p))


def _factor_doc(f: Factor) -> dict:
    d: dict = {"id": f.id, "name": f.name, "kind": f.kind.value, "category": f.category.value, "timing": f.timing.value}
    if f.tangibility is not None:
        d["tangibility"] = f.tangibility.value
    if f.components is not None:
        d["components"] = {label: amount for label, amount in f.components}
    else:
        d["value"] = format_value_expr(f.value)
    d["growth"] = f.growth.annual_rate
    if f.profile is not None:
        d["amounts"] = list(f.profile)
    if f.group is not None:
        d["group"] = f.group
    if f.note is not None:
        d["note"] = f.note
    return d


def scenario_to_document(s: Scenario, cfg: SimulationConfig | None = None) -> dict:
    doc: dict = {
        "name": s.name,
        "currency": s.currency,
        "horizon_years": s.horizon_years,
        "discount_rate": s.discount_rate,
    }
    if s.metadata:
        doc["metadata"] = dict(s.metadata)
    if cfg is not None:
        doc["simulation"] = {
            "tolerance": cfg.tolerance,
            "confidence": cfg.confidence,
            "batch_size": cfg.batch_size,
            "min_iterations": cfg.min_iterations,
            "max_iterations": cfg.max_iterations,
            "seed": cfg.master_seed,
            "output_metric": cfg.output_metric,
        }
    doc["factors"] = [_factor_doc(f) for f in s.factors]
    return doc


def dump_scenario(s: Scenario, cfg: SimulationConfig | None = None) -> str:
    """Scenario as YAML text that :func:`load_scenario` reads back unchanged."""
    return yaml.safe_dump(scenario_to_document(s, cfg), sort_keys=False, allow_unicode=True, width=100)


def save_scenario(s: Scenario, path: Union[str, Path], cfg: SimulationConfig | None = None) -> Path:
    p = Path(path)
    p.write_text(dump_scenario(s, cfg), encoding="utf-8")
    return p
