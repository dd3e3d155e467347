"""Scenario document parsing, validation, and serialization.

Scenario files are JSON (UTF-8) with an explicit schema_version. A document
holds exactly one scenario kind:

* ``population``: explicit action labels, utility types, and a named map of
  choice models,
* ``hotelling``: store and person locations on a line, expanded to a
  quadratic-loss population,
* ``treatment``: binary-treatment cells with outcome probabilities, outcome
  utilities, and optional subjective-belief models,

plus optional ``sweep`` (q grid) and ``mc`` (Monte Carlo sample count and
seed defaults) sections.

Parsing is strict: unknown fields, wrong types, unresolved labels, and
violated invariants all raise ScenarioError naming the path of the offending
field (e.g. ``population.types[2].weight``); syntax errors carry the line and
column reported by the JSON parser. parse -> serialize -> parse is an
identity on documents.
"""

import json
from dataclasses import dataclass
from importlib import resources
from typing import Any, Optional

import numpy as np

from .models import (
    AlphaRational,
    ChoiceModel,
    DefaultNudge,
    ErrorSpec,
    GumbelIID,
    IndependentTable,
    Logit,
    NormalIID,
    RandomUtilityMC,
    RationalMax,
    UniformBoundedIID,
)
from .scenario import ActionSet, HotellingScenario, Population, UtilityType
from .treatment import (
    BeliefModel,
    BetaBelief,
    CovariateCell,
    EmpiricalBelief,
    MixtureBelief,
    OutcomeUtilities,
    PointMassBelief,
    TreatmentScenario,
    UniformBelief,
    XCell,
)

SCHEMA_VERSION = 1

_SCENARIO_KINDS = ("population", "hotelling", "treatment")


class ScenarioError(Exception):
    """Syntax, schema, or invariant violation in a scenario document."""


@dataclass(frozen=True)
class SweepConfig:
    """Rationality-scale grid bounds for sweep-style commands."""

    q_min: float = 0.0
    q_max: float = 10.0
    q_step: float = 0.05

    def __post_init__(self):
        q_min, q_max = float(self.q_min), float(self.q_max)
        q_step = float(self.q_step)
        if not all(np.isfinite(v) for v in (q_min, q_max, q_step)):
            raise ValueError("sweep bounds must be finite")
        if q_min < 0.0:
            raise ValueError("q_min must be >= 0")
        if q_max < q_min:
            raise ValueError("q_max must be >= q_min")
        if q_step <= 0.0:
            raise ValueError("q_step must be > 0")
        object.__setattr__(self, "q_min", q_min)
        object.__setattr__(self, "q_max", q_max)
        object.__setattr__(self, "q_step", q_step)


@dataclass(frozen=True)
class MCConfig:
    """Default sample count and seed for Monte Carlo choice models."""

    samples: int = 100_000
    seed: int = 0

    def __post_init__(self):
        samples = int(self.samples)
        if samples < 1:
            raise ValueError("samples must be >= 1")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "seed", int(self.seed))


@dataclass(frozen=True)
class PopulationSection:
    """Explicit population plus its named choice models."""

    population: Population
    models: dict[str, ChoiceModel]


@dataclass(frozen=True)
class ScenarioDocument:
    """Validated scenario file contents; exactly one scenario kind is set."""

    schema_version: int
    population: Optional[PopulationSection] = None
    hotelling: Optional[HotellingScenario] = None
    treatment: Optional[TreatmentScenario] = None
    sweep: Optional[SweepConfig] = None
    mc: Optional[MCConfig] = None

    def __post_init__(self):
        present = [
            kind for kind in _SCENARIO_KINDS if getattr(self, kind) is not None
        ]
        if len(present) != 1:
            raise ValueError(
                "exactly one of population, hotelling, treatment must be set"
            )

    @property
    def kind(self) -> str:
        for kind in _SCENARIO_KINDS:
            if getattr(self, kind) is not None:
                return kind
        raise AssertionError("unreachable: validated at construction")


# --- strict field access helpers ---


def _require_object(value: Any, path: str) -> dict:
    if not isinstance(value, dict):
        raise ScenarioError(f"{path}: expected an object")
    return value


def _check_keys(obj: dict, allowed: set, path: str) -> None:
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ScenarioError(f"{path}: unknown field {unknown[0]!r}")


def _get(obj: dict, key: str, path: str) -> Any:
    if key not in obj:
        raise ScenarioError(f"{path}: missing required field {key!r}")
    return obj[key]


def _as_number(value: Any, path: str) -> float:
    # bool is an int subclass; reject it explicitly.
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{path}: expected a number")
    try:
        value = float(value)
    except OverflowError:
        raise ScenarioError(f"{path}: number must be finite") from None
    if not np.isfinite(value):
        raise ScenarioError(f"{path}: number must be finite")
    return value


def _as_int(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(f"{path}: expected an integer")
    return value


def _as_str(value: Any, path: str) -> str:
    if not isinstance(value, str):
        raise ScenarioError(f"{path}: expected a string")
    return value


def _as_list(value: Any, path: str) -> list:
    if not isinstance(value, list):
        raise ScenarioError(f"{path}: expected an array")
    return value


def _as_number_list(value: Any, path: str) -> list[float]:
    return [
        _as_number(v, f"{path}[{i}]") for i, v in enumerate(_as_list(value, path))
    ]


def _build(path: str, ctor, *args, **kwargs):
    # Domain validators raise ValueError; re-raise with the document path.
    try:
        return ctor(*args, **kwargs)
    except ValueError as exc:
        raise ScenarioError(f"{path}: {exc}") from None


# --- section parsers ---


def _parse_sweep(value: Any, path: str) -> SweepConfig:
    obj = _require_object(value, path)
    _check_keys(obj, {"q_min", "q_max", "q_step"}, path)
    defaults = SweepConfig()
    kwargs = {}
    for key, fallback in (
        ("q_min", defaults.q_min),
        ("q_max", defaults.q_max),
        ("q_step", defaults.q_step),
    ):
        kwargs[key] = (
            _as_number(obj[key], f"{path}.{key}") if key in obj else fallback
        )
    return _build(path, SweepConfig, **kwargs)


def _parse_mc(value: Any, path: str) -> MCConfig:
    obj = _require_object(value, path)
    _check_keys(obj, {"samples", "seed"}, path)
    defaults = MCConfig()
    samples = (
        _as_int(obj["samples"], f"{path}.samples")
        if "samples" in obj
        else defaults.samples
    )
    seed = _as_int(obj["seed"], f"{path}.seed") if "seed" in obj else defaults.seed
    return _build(path, MCConfig, samples=samples, seed=seed)


def _parse_error_spec(value: Any, path: str) -> ErrorSpec:
    obj = _require_object(value, path)
    kind = _as_str(_get(obj, "kind", path), f"{path}.kind")
    if kind == "gumbel":
        _check_keys(obj, {"kind", "scale"}, path)
        scale = (
            _as_number(obj["scale"], f"{path}.scale") if "scale" in obj else 1.0
        )
        return _build(path, GumbelIID, scale=scale)
    if kind == "uniform_bounded":
        _check_keys(obj, {"kind", "delta"}, path)
        return _build(
            path, UniformBoundedIID, delta=_as_number(_get(obj, "delta", path), f"{path}.delta")
        )
    if kind == "normal":
        _check_keys(obj, {"kind", "sigma"}, path)
        return _build(
            path, NormalIID, sigma=_as_number(_get(obj, "sigma", path), f"{path}.sigma")
        )
    raise ScenarioError(f"{path}.kind: unknown error distribution {kind!r}")


def _parse_model(
    value: Any, path: str, actions: ActionSet, mc: MCConfig
) -> ChoiceModel:
    obj = _require_object(value, path)
    kind = _as_str(_get(obj, "kind", path), f"{path}.kind")
    if kind == "rational_max":
        _check_keys(obj, {"kind"}, path)
        return RationalMax()
    if kind == "independent_table":
        _check_keys(obj, {"kind", "probs"}, path)
        probs = _as_number_list(_get(obj, "probs", path), f"{path}.probs")
        return _build(f"{path}.probs", IndependentTable, np.array(probs))
    if kind == "alpha_rational":
        _check_keys(obj, {"kind", "alpha", "background"}, path)
        alpha = _as_number(_get(obj, "alpha", path), f"{path}.alpha")
        background = _as_number_list(
            _get(obj, "background", path), f"{path}.background"
        )
        return _build(path, AlphaRational, alpha=alpha, background=np.array(background))
    if kind == "logit":
        _check_keys(obj, {"kind", "q"}, path)
        return _build(path, Logit, q=_as_number(_get(obj, "q", path), f"{path}.q"))
    if kind == "random_utility_mc":
        _check_keys(obj, {"kind", "error", "samples", "seed"}, path)
        error = _parse_error_spec(_get(obj, "error", path), f"{path}.error")
        samples = (
            _as_int(obj["samples"], f"{path}.samples")
            if "samples" in obj
            else mc.samples
        )
        seed = _as_int(obj["seed"], f"{path}.seed") if "seed" in obj else mc.seed
        return _build(path, RandomUtilityMC, error=error, samples=samples, seed=seed)
    if kind == "default_nudge":
        _check_keys(obj, {"kind", "default_action", "gamma", "base"}, path)
        label = _as_str(
            _get(obj, "default_action", path), f"{path}.default_action"
        )
        default_action = _build(f"{path}.default_action", actions.index_of, label)
        gamma = _as_number(_get(obj, "gamma", path), f"{path}.gamma")
        base = _parse_model(_get(obj, "base", path), f"{path}.base", actions, mc)
        return _build(
            path, DefaultNudge, default_action=default_action, gamma=gamma, base=base
        )
    raise ScenarioError(f"{path}.kind: unknown model kind {kind!r}")


def _parse_population(value: Any, path: str, mc: MCConfig) -> PopulationSection:
    obj = _require_object(value, path)
    _check_keys(obj, {"actions", "types", "models"}, path)

    labels_raw = _as_list(_get(obj, "actions", path), f"{path}.actions")
    labels = tuple(
        _as_str(lab, f"{path}.actions[{i}]") for i, lab in enumerate(labels_raw)
    )
    actions = _build(f"{path}.actions", ActionSet, labels)

    types_raw = _as_list(_get(obj, "types", path), f"{path}.types")
    types = []
    for i, item in enumerate(types_raw):
        tpath = f"{path}.types[{i}]"
        tobj = _require_object(item, tpath)
        _check_keys(tobj, {"utilities", "weight"}, tpath)
        utilities = _as_number_list(
            _get(tobj, "utilities", tpath), f"{tpath}.utilities"
        )
        weight = _as_number(_get(tobj, "weight", tpath), f"{tpath}.weight")
        types.append(
            _build(tpath, UtilityType, utilities=np.array(utilities), weight=weight)
        )
    population = _build(f"{path}.types", Population, actions=actions, types=tuple(types))

    models: dict[str, ChoiceModel] = {}
    if "models" in obj:
        models_obj = _require_object(obj["models"], f"{path}.models")
        for name, spec in models_obj.items():
            models[name] = _parse_model(spec, f"{path}.models.{name}", actions, mc)
    return PopulationSection(population=population, models=models)


def _parse_hotelling(value: Any, path: str) -> HotellingScenario:
    obj = _require_object(value, path)
    _check_keys(obj, {"store_locations", "person_locations", "person_weights"}, path)
    stores = _as_number_list(
        _get(obj, "store_locations", path), f"{path}.store_locations"
    )
    persons = _as_number_list(
        _get(obj, "person_locations", path), f"{path}.person_locations"
    )
    weights = None
    if "person_weights" in obj:
        weights = np.array(
            _as_number_list(obj["person_weights"], f"{path}.person_weights")
        )
    return _build(
        path,
        HotellingScenario,
        store_locations=np.array(stores),
        person_locations=np.array(persons),
        person_weights=weights,
    )


def _parse_belief(value: Any, path: str) -> BeliefModel:
    obj = _require_object(value, path)
    kind = _as_str(_get(obj, "kind", path), f"{path}.kind")
    if kind == "point_mass":
        _check_keys(obj, {"kind", "pi"}, path)
        return _build(path, PointMassBelief, pi=_as_number(_get(obj, "pi", path), f"{path}.pi"))
    if kind == "uniform":
        _check_keys(obj, {"kind", "lo", "hi"}, path)
        return _build(
            path,
            UniformBelief,
            lo=_as_number(_get(obj, "lo", path), f"{path}.lo"),
            hi=_as_number(_get(obj, "hi", path), f"{path}.hi"),
        )
    if kind == "beta":
        _check_keys(obj, {"kind", "a", "b"}, path)
        return _build(
            path,
            BetaBelief,
            a=_as_number(_get(obj, "a", path), f"{path}.a"),
            b=_as_number(_get(obj, "b", path), f"{path}.b"),
        )
    if kind == "mixture":
        _check_keys(obj, {"kind", "components", "weights"}, path)
        comps_raw = _as_list(_get(obj, "components", path), f"{path}.components")
        components = tuple(
            _parse_belief(item, f"{path}.components[{i}]")
            for i, item in enumerate(comps_raw)
        )
        weights = tuple(
            _as_number_list(_get(obj, "weights", path), f"{path}.weights")
        )
        return _build(path, MixtureBelief, components=components, weights=weights)
    if kind == "empirical":
        _check_keys(obj, {"kind", "samples"}, path)
        samples = _as_number_list(_get(obj, "samples", path), f"{path}.samples")
        return _build(path, EmpiricalBelief, samples=np.array(samples))
    raise ScenarioError(f"{path}.kind: unknown belief kind {kind!r}")


def _parse_treatment(value: Any, path: str) -> TreatmentScenario:
    obj = _require_object(value, path)
    _check_keys(obj, {"x_cells"}, path)
    cells_raw = _as_list(_get(obj, "x_cells", path), f"{path}.x_cells")
    x_cells = []
    for i, item in enumerate(cells_raw):
        xpath = f"{path}.x_cells[{i}]"
        xobj = _require_object(item, xpath)
        _check_keys(xobj, {"label", "weight", "utilities", "z_cells"}, xpath)
        label = _as_str(_get(xobj, "label", xpath), f"{xpath}.label")
        weight = _as_number(_get(xobj, "weight", xpath), f"{xpath}.weight")

        upath = f"{xpath}.utilities"
        uobj = _require_object(_get(xobj, "utilities", xpath), upath)
        _check_keys(uobj, {"u0_a", "u1_a", "u0_b", "u1_b"}, upath)
        utilities = _build(
            upath,
            OutcomeUtilities.from_components,
            u0_a=_as_number(_get(uobj, "u0_a", upath), f"{upath}.u0_a"),
            u1_a=_as_number(_get(uobj, "u1_a", upath), f"{upath}.u1_a"),
            u0_b=_as_number(_get(uobj, "u0_b", upath), f"{upath}.u0_b"),
            u1_b=_as_number(_get(uobj, "u1_b", upath), f"{upath}.u1_b"),
        )

        z_raw = _as_list(_get(xobj, "z_cells", xpath), f"{xpath}.z_cells")
        z_cells = []
        for j, zitem in enumerate(z_raw):
            zpath = f"{xpath}.z_cells[{j}]"
            zobj = _require_object(zitem, zpath)
            _check_keys(zobj, {"label", "p_z_given_x", "p_xz", "belief"}, zpath)
            belief = None
            if "belief" in zobj:
                belief = _parse_belief(zobj["belief"], f"{zpath}.belief")
            z_cells.append(
                _build(
                    zpath,
                    CovariateCell,
                    z_label=_as_str(_get(zobj, "label", zpath), f"{zpath}.label"),
                    p_z_given_x=_as_number(
                        _get(zobj, "p_z_given_x", zpath), f"{zpath}.p_z_given_x"
                    ),
                    p_xz=_as_number(_get(zobj, "p_xz", zpath), f"{zpath}.p_xz"),
                    belief=belief,
                )
            )
        x_cells.append(
            _build(
                xpath,
                XCell,
                x_label=label,
                weight=weight,
                utilities=utilities,
                z_cells=tuple(z_cells),
            )
        )
    return _build(f"{path}.x_cells", TreatmentScenario, x_cells=tuple(x_cells))


# --- entry points ---


def parse_scenario_text(text: str, source: str = "<scenario>") -> ScenarioDocument:
    """Parse and validate a scenario document from a JSON string."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(
            f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    obj = _require_object(raw, "document")
    _check_keys(
        obj,
        {"schema_version", "population", "hotelling", "treatment", "sweep", "mc"},
        "document",
    )
    version = _as_int(_get(obj, "schema_version", "document"), "schema_version")
    if version != SCHEMA_VERSION:
        raise ScenarioError(
            f"schema_version: unsupported version {version} (expected {SCHEMA_VERSION})"
        )
    present = [kind for kind in _SCENARIO_KINDS if kind in obj]
    if len(present) != 1:
        raise ScenarioError(
            "document: exactly one of 'population', 'hotelling', 'treatment' "
            f"must be present, got {present!r}"
        )

    sweep = _parse_sweep(obj["sweep"], "sweep") if "sweep" in obj else None
    mc = _parse_mc(obj["mc"], "mc") if "mc" in obj else None
    mc_defaults = mc if mc is not None else MCConfig()

    population = hotelling = treatment = None
    if "population" in obj:
        population = _parse_population(obj["population"], "population", mc_defaults)
    elif "hotelling" in obj:
        hotelling = _parse_hotelling(obj["hotelling"], "hotelling")
    else:
        treatment = _parse_treatment(obj["treatment"], "treatment")

    return ScenarioDocument(
        schema_version=version,
        population=population,
        hotelling=hotelling,
        treatment=treatment,
        sweep=sweep,
        mc=mc,
    )


def parse_scenario(path) -> ScenarioDocument:
    """Parse and validate the scenario file at `path`."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioError(f"{path}: cannot read scenario file: {exc}") from None
    return parse_scenario_text(text, source=str(path))


def bundled_scenario_text(name: str = "hotelling.scn") -> str:
    """Raw text of a scenario file shipped inside the package."""
    return (
        resources.files("choicewelfare").joinpath("data").joinpath(name)
    ).read_text(encoding="utf-8")


def load_bundled_scenario(name: str = "hotelling.scn") -> ScenarioDocument:
    """Parse a scenario file shipped inside the package."""
    return parse_scenario_text(bundled_scenario_text(name), source=name)


# --- serialization ---


def _floats(values) -> list[float]:
    return [float(v) for v in values]


def _error_to_json(spec: ErrorSpec) -> dict:
    if isinstance(spec, GumbelIID):
        return {"kind": "gumbel", "scale": spec.scale}
    if isinstance(spec, UniformBoundedIID):
        return {"kind": "uniform_bounded", "delta": spec.delta}
    if isinstance(spec, NormalIID):
        return {"kind": "normal", "sigma": spec.sigma}
    raise ValueError(f"unknown error spec {spec!r}")


def _model_to_json(model: ChoiceModel, actions: ActionSet) -> dict:
    if isinstance(model, RationalMax):
        return {"kind": "rational_max"}
    if isinstance(model, IndependentTable):
        return {"kind": "independent_table", "probs": _floats(model.probs)}
    if isinstance(model, AlphaRational):
        return {
            "kind": "alpha_rational",
            "alpha": model.alpha,
            "background": _floats(model.background),
        }
    if isinstance(model, Logit):
        return {"kind": "logit", "q": model.q}
    if isinstance(model, RandomUtilityMC):
        return {
            "kind": "random_utility_mc",
            "error": _error_to_json(model.error),
            "samples": model.samples,
            "seed": model.seed,
        }
    if isinstance(model, DefaultNudge):
        return {
            "kind": "default_nudge",
            "default_action": actions.labels[model.default_action],
            "gamma": model.gamma,
            "base": _model_to_json(model.base, actions),
        }
    raise ValueError(f"unknown choice model {model!r}")


def _belief_to_json(belief: BeliefModel) -> dict:
    if isinstance(belief, PointMassBelief):
        return {"kind": "point_mass", "pi": belief.pi}
    if isinstance(belief, UniformBelief):
        return {"kind": "uniform", "lo": belief.lo, "hi": belief.hi}
    if isinstance(belief, BetaBelief):
        return {"kind": "beta", "a": belief.a, "b": belief.b}
    if isinstance(belief, MixtureBelief):
        return {
            "kind": "mixture",
            "components": [_belief_to_json(c) for c in belief.components],
            "weights": list(belief.weights),
        }
    if isinstance(belief, EmpiricalBelief):
        return {"kind": "empirical", "samples": _floats(belief.samples)}
    raise ValueError(f"unknown belief model {belief!r}")


def _population_to_json(section: PopulationSection) -> dict:
    pop = section.population
    return {
        "actions": list(pop.actions.labels),
        "types": [
            {"utilities": _floats(t.utilities), "weight": t.weight}
            for t in pop.types
        ],
        "models": {
            name: _model_to_json(model, pop.actions)
            for name, model in section.models.items()
        },
    }


def _hotelling_to_json(scenario: HotellingScenario) -> dict:
    out = {
        "store_locations": _floats(scenario.store_locations),
        "person_locations": _floats(scenario.person_locations),
    }
    if scenario.person_weights is not None:
        out["person_weights"] = _floats(scenario.person_weights)
    return out


def _treatment_to_json(scenario: TreatmentScenario) -> dict:
    x_cells = []
    for cell in scenario.x_cells:
        u = cell.utilities.values
        z_cells = []
        for z in cell.z_cells:
            zout = {
                "label": z.z_label,
                "p_z_given_x": z.p_z_given_x,
                "p_xz": z.p_xz,
            }
            if z.belief is not None:
                zout["belief"] = _belief_to_json(z.belief)
            z_cells.append(zout)
        x_cells.append(
            {
                "label": cell.x_label,
                "weight": cell.weight,
                "utilities": {
                    "u0_a": float(u[0, 0]),
                    "u0_b": float(u[0, 1]),
                    "u1_a": float(u[1, 0]),
                    "u1_b": float(u[1, 1]),
                },
                "z_cells": z_cells,
            }
        )
    return {"x_cells": x_cells}


def document_to_json_dict(doc: ScenarioDocument) -> dict:
    """Plain-dict form of a document, ready for json.dump."""
    out: dict = {"schema_version": doc.schema_version}
    if doc.population is not None:
        out["population"] = _population_to_json(doc.population)
    if doc.hotelling is not None:
        out["hotelling"] = _hotelling_to_json(doc.hotelling)
    if doc.treatment is not None:
        out["treatment"] = _treatment_to_json(doc.treatment)
    if doc.sweep is not None:
        out["sweep"] = {
            "q_min": doc.sweep.q_min,
            "q_max": doc.sweep.q_max,
            "q_step": doc.sweep.q_step,
        }
    if doc.mc is not None:
        out["mc"] = {"samples": doc.mc.samples, "seed": doc.mc.seed}
    return out


def serialize_scenario(doc: ScenarioDocument) -> str:
    """Canonical JSON text; parse(serialize(doc)) == doc."""
    return json.dumps(document_to_json_dict(doc), indent=2, sort_keys=True) + "\n"
