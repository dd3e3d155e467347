"""Command-line interface: loads scenario documents, dispatches analyses,
and emits machine-readable reports and plot-data files.

Subcommands:

* ``evaluate``  - welfare/regret report for one choice set under one model.
* ``optimize``  - exhaustive best choice set under one model.
* ``sweep``     - welfare of every choice set across a rationality grid
                  (population or line-location scenario), CSV/JSON rows plus
                  a crossings summary file.
* ``treatment`` - binary-treatment report (mandate vs decentralization).
* ``hotelling`` - sweep of the bundled (or given) line-location scenario.

Reports (evaluate/optimize/treatment) are JSON; plot data (sweep/hotelling)
defaults to CSV with 12-significant-digit floats. Outputs are written
atomically (temp file + rename). Exit codes: 0 success, 1 usage error,
2 scenario validation error, 3 runtime or write error.
"""

import argparse
import csv
import dataclasses
import io
import json
import os
import sys
import tempfile
from typing import Optional

from .document import (
    ScenarioDocument,
    ScenarioError,
    SweepConfig,
    load_bundled_scenario,
    parse_scenario,
)
from .models import ChoiceModel, DefaultNudge, RandomUtilityMC
from .scenario import ActionSet, Population, hotelling_population
from .search import SweepGrid, SweepResult, sweep_logit, optimize_choice_set
from .treatment import TreatmentScenario, build_report
from .welfare import policy_welfare


class _UsageError(Exception):
    """Bad flag combination or value, diagnosed after argument parsing."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; the artifact contract
    # reserves 2 for scenario validation, so remap to 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="choicewelfare",
        description=(
            "Utilitarian welfare analysis of choice-restricting policies "
            "for boundedly rational populations."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, *, scenario_required=True):
        p.add_argument(
            "--scenario",
            required=scenario_required,
            help="path to a JSON scenario file",
        )
        p.add_argument("--out", help="output path (default: stdout)")

    evaluate = sub.add_parser(
        "evaluate", help="welfare/regret of one choice set under one model"
    )
    add_common(evaluate)
    evaluate.add_argument(
        "--model", required=True, help="name of a model from the scenario"
    )
    evaluate.add_argument(
        "--available",
        help="comma-separated action labels to allow (default: all)",
    )
    evaluate.add_argument(
        "--eta",
        type=float,
        default=0.0,
        help="normative share of a nudge's as-if cost (default 0)",
    )
    evaluate.add_argument("--samples", type=int, help="Monte Carlo sample override")
    evaluate.add_argument("--seed", type=int, help="Monte Carlo seed override")
    evaluate.add_argument("--format", choices=("csv", "json"), default="json")

    optimize = sub.add_parser(
        "optimize", help="exhaustive best choice set under one model"
    )
    add_common(optimize)
    optimize.add_argument(
        "--model", required=True, help="name of a model from the scenario"
    )
    optimize.add_argument("--samples", type=int, help="Monte Carlo sample override")
    optimize.add_argument("--seed", type=int, help="Monte Carlo seed override")
    optimize.add_argument("--format", choices=("csv", "json"), default="json")

    def add_sweep_flags(p):
        p.add_argument("--q-min", type=float, help="lowest rationality scale")
        p.add_argument("--q-max", type=float, help="highest rationality scale")
        p.add_argument("--q-step", type=float, help="grid step")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    sweep = sub.add_parser(
        "sweep", help="welfare of every choice set across a rationality grid"
    )
    sweep.add_argument(
        "--scenario", required=True, help="path to a JSON scenario file"
    )
    sweep.add_argument("--out", required=True, help="output path for the rows")
    add_sweep_flags(sweep)

    treatment = sub.add_parser(
        "treatment", help="mandate vs decentralization report"
    )
    add_common(treatment)
    treatment.add_argument("--format", choices=("csv", "json"), default="json")

    hotelling = sub.add_parser(
        "hotelling", help="sweep the bundled (or given) line-location scenario"
    )
    hotelling.add_argument(
        "--scenario", help="line-location scenario file (default: bundled)"
    )
    hotelling.add_argument("--out", required=True, help="output path for the rows")
    add_sweep_flags(hotelling)

    return parser


# --- emission helpers ---


def _fmt(value: float) -> str:
    return format(float(value), ".12g")


def _write_text_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".choicewelfare-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        _write_text_atomic(out, text)


def _json_text(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _csv_text(header, rows) -> str:
    sio = io.StringIO()
    writer = csv.writer(sio)
    writer.writerow(header)
    writer.writerows(rows)
    return sio.getvalue()


# --- scenario plumbing ---


def _load(args) -> ScenarioDocument:
    return parse_scenario(args.scenario)


def _require_kind(doc: ScenarioDocument, kind: str, command: str):
    if getattr(doc, kind) is None:
        raise ScenarioError(
            f"scenario kind {doc.kind!r} does not match command {command!r} "
            f"(expected {kind!r})"
        )
    return getattr(doc, kind)


def _resolve_model(doc: ScenarioDocument, name: str, command: str) -> ChoiceModel:
    section = _require_kind(doc, "population", command)
    if name not in section.models:
        known = ", ".join(sorted(section.models)) or "none"
        raise ScenarioError(
            f"population.models: unknown model {name!r} (defined: {known})"
        )
    return section.models[name]


def _override_mc(
    model: ChoiceModel, samples: Optional[int], seed: Optional[int]
) -> ChoiceModel:
    """Apply --samples/--seed to every Monte Carlo model inside `model`."""
    if isinstance(model, RandomUtilityMC):
        changes = {}
        if samples is not None:
            changes["samples"] = samples
        if seed is not None:
            changes["seed"] = seed
        return dataclasses.replace(model, **changes) if changes else model
    if isinstance(model, DefaultNudge):
        base = _override_mc(model.base, samples, seed)
        return dataclasses.replace(model, base=base) if base is not model.base else model
    return model


def _resolve_available(args, actions: ActionSet) -> Optional[list[int]]:
    if args.available is None:
        return None
    labels = [part.strip() for part in args.available.split(",")]
    try:
        return [actions.index_of(label) for label in labels]
    except ValueError as exc:
        raise ScenarioError(f"--available: {exc}") from None


def _sweep_config(doc: ScenarioDocument, args) -> SweepConfig:
    base = doc.sweep if doc.sweep is not None else SweepConfig()
    try:
        return SweepConfig(
            q_min=args.q_min if args.q_min is not None else base.q_min,
            q_max=args.q_max if args.q_max is not None else base.q_max,
            q_step=args.q_step if args.q_step is not None else base.q_step,
        )
    except ValueError as exc:
        raise _UsageError(str(exc)) from None


def _require_json_format(args):
    if args.format != "json":
        raise _UsageError(
            f"--format {args.format} is not supported for {args.command}; "
            "reports are JSON"
        )


# --- subcommands ---


def _cmd_evaluate(args) -> int:
    _require_json_format(args)
    doc = _load(args)
    section = _require_kind(doc, "population", "evaluate")
    pop = section.population
    model = _override_mc(
        _resolve_model(doc, args.model, "evaluate"), args.samples, args.seed
    )
    available = _resolve_available(args, pop.actions)
    if not 0.0 <= args.eta <= 1.0:
        raise _UsageError("--eta must lie in [0, 1]")
    result = policy_welfare(pop, available, model, eta=args.eta)
    payload = {
        "available": [pop.actions.labels[i] for i in result.available],
        "welfare": result.welfare,
        "regret": result.regret,
        "per_type": [
            {
                "type_index": t.type_index,
                "value": t.value,
                "probs": {
                    pop.actions.labels[i]: float(p)
                    for i, p in zip(t.probs.available, t.probs.probs)
                },
            }
            for t in result.per_type
        ],
    }
    _emit(_json_text(payload), args.out)
    return 0


def _cmd_optimize(args) -> int:
    _require_json_format(args)
    doc = _load(args)
    section = _require_kind(doc, "population", "optimize")
    pop = section.population
    model = _override_mc(
        _resolve_model(doc, args.model, "optimize"), args.samples, args.seed
    )
    result = optimize_choice_set(pop, model)
    payload = {
        "subset": [pop.actions.labels[i] for i in result.subset],
        "welfare": result.welfare,
    }
    _emit(_json_text(payload), args.out)
    return 0


def _population_for_sweep(doc: ScenarioDocument, command: str) -> Population:
    if doc.population is not None:
        return doc.population.population
    if doc.hotelling is not None:
        return hotelling_population(doc.hotelling)
    raise ScenarioError(
        f"scenario kind {doc.kind!r} does not match command {command!r} "
        "(expected 'population' or 'hotelling')"
    )


def _crossings_path(out: str, fmt: str) -> str:
    root, ext = os.path.splitext(out)
    if not ext:
        ext = f".{fmt}"
    return f"{root}.crossings{ext}"


def _emit_sweep_files(result: SweepResult, actions: ActionSet, args) -> int:
    labels = ["+".join(actions.labels[i] for i in subset) for subset in result.subsets]
    q_values = result.grid.q_values
    crossings_out = _crossings_path(args.out, args.format)

    if args.format == "csv":
        rows = []
        for si, label in enumerate(labels):
            for qi, q in enumerate(q_values):
                rows.append(
                    (
                        label,
                        _fmt(q),
                        _fmt(result.welfare[si, qi]),
                        "true" if int(result.envelope[qi]) == si else "false",
                    )
                )
        main_text = _csv_text(("subset_label", "q", "welfare", "is_envelope"), rows)
        crossing_rows = [
            (
                "+".join(actions.labels[i] for i in c.subset_a),
                "+".join(actions.labels[i] for i in c.subset_b),
                _fmt(c.q_star),
            )
            for c in result.crossings
        ]
        crossings_text = _csv_text(("subset_a", "subset_b", "q"), crossing_rows)
    else:
        main_text = _json_text(
            {
                "rows": [
                    {
                        "subset_label": label,
                        "q": float(q),
                        "welfare": float(result.welfare[si, qi]),
                        "is_envelope": bool(int(result.envelope[qi]) == si),
                    }
                    for si, label in enumerate(labels)
                    for qi, q in enumerate(q_values)
                ]
            }
        )
        crossings_text = _json_text(
            {
                "crossings": [
                    {
                        "subset_a": "+".join(actions.labels[i] for i in c.subset_a),
                        "subset_b": "+".join(actions.labels[i] for i in c.subset_b),
                        "q": c.q_star,
                    }
                    for c in result.crossings
                ]
            }
        )

    _write_text_atomic(args.out, main_text)
    _write_text_atomic(crossings_out, crossings_text)
    n_rows = len(labels) * q_values.shape[0]
    print(f"wrote {n_rows} sweep rows to {args.out}")
    print(f"wrote {len(result.crossings)} crossings to {crossings_out}")
    return 0


def _run_sweep(doc: ScenarioDocument, args, command: str) -> int:
    pop = _population_for_sweep(doc, command)
    cfg = _sweep_config(doc, args)
    grid = SweepGrid.from_range(q_min=cfg.q_min, q_max=cfg.q_max, q_step=cfg.q_step)
    result = sweep_logit(pop, grid)
    return _emit_sweep_files(result, pop.actions, args)


def _cmd_sweep(args) -> int:
    return _run_sweep(_load(args), args, "sweep")


def _cmd_hotelling(args) -> int:
    doc = parse_scenario(args.scenario) if args.scenario else load_bundled_scenario()
    _require_kind(doc, "hotelling", "hotelling")
    return _run_sweep(doc, args, "hotelling")


def _cmd_treatment(args) -> int:
    _require_json_format(args)
    doc = _load(args)
    scenario: TreatmentScenario = _require_kind(doc, "treatment", "treatment")
    for i, cell in enumerate(scenario.x_cells):
        for j, z in enumerate(cell.z_cells):
            if z.belief is None:
                raise ScenarioError(
                    f"treatment.x_cells[{i}].z_cells[{j}]: belief required "
                    "for the treatment command"
                )
    report = build_report(scenario)
    payload = {
        "aggregate_welfare": report.aggregate_welfare,
        "per_x": [
            {
                "x_label": x.x_label,
                "weight": x.weight,
                "mandate_treatment": x.mandate_treatment,
                "mandate_welfare": x.mandate_welfare,
                "decentralized_welfare": x.decentralized_welfare,
                "z_a": list(x.z_a),
                "z_b": list(x.z_b),
                "value_of_information": {
                    "voi": x.information_value.voi,
                    "p_better": x.information_value.p_better,
                    "mean_gain": x.information_value.mean_gain,
                },
                "q_by_z": dict(x.q_by_z),
                "bounded_rational_welfare": x.bounded_rational_welfare,
                "recommendation": x.recommendation,
            }
            for x in report.per_x
        ],
    }
    _emit(_json_text(payload), args.out)
    return 0


_COMMANDS = {
    "evaluate": _cmd_evaluate,
    "optimize": _cmd_optimize,
    "sweep": _cmd_sweep,
    "treatment": _cmd_treatment,
    "hotelling": _cmd_hotelling,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return _COMMANDS[args.command](args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
