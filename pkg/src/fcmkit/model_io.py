"""Canonical on-disk formats with strict validation and stable round-trips.

Model documents are UTF-8 JSON with a fixed key order, LF line endings and
shortest-round-trip floats, so saving is canonical: structurally equal
models produce byte-identical documents, and save(load(doc)) is a byte
fixpoint on canonical documents. Unknown fields are rejected rather than
ignored, so typos surface immediately.

Optional concept fields keep their defaults out of the document: a missing
label falls back to the id for display, a missing kind means ordinary, and
a missing initial resolves to the range midpoint at simulation time.
"""

from __future__ import annotations

import json
from typing import Any, Mapping

from .core import (
    Concept,
    ConceptKind,
    FcmError,
    FcmModel,
    Edge,
    Outcome,
    OutcomeKind,
    Range,
    Scenario,
    ScenarioError,
    SimulationConfig,
    SimulationResult,
    Submodel,
    ThresholdKind,
    ThresholdSpec,
    default_config,
    require_valid,
)

FORMAT_VERSION = 1

MODEL_SUFFIX = ".fcm.json"
SCENARIO_SUFFIX = ".scn.json"


class DocumentError(FcmError):
    """A document failed to parse; carries a rule id and a position."""

    def __init__(self, rule: str, location: str, message: str):
        self.rule = rule
        self.location = location
        super().__init__(f"{location}: {message} [{rule}]")


def _as_text(data: bytes | str) -> str:
    if isinstance(data, str):
        return data
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DocumentError("encoding", f"byte {exc.start}", "document is not valid UTF-8") from exc


def _parse_json(data: bytes | str) -> Any:
    try:
        return json.loads(_as_text(data))
    except json.JSONDecodeError as exc:
        raise DocumentError(
            "syntax", f"line {exc.lineno} column {exc.colno}", exc.msg
        ) from exc


def _expect_object(value: Any, location: str) -> dict:
    if not isinstance(value, dict):
        raise DocumentError("bad-type", location, f"expected an object, got {type(value).__name__}")
    return value


def _expect_list(value: Any, location: str) -> list:
    if not isinstance(value, list):
        raise DocumentError("bad-type", location, f"expected an array, got {type(value).__name__}")
    return value


def _expect_str(value: Any, location: str) -> str:
    if not isinstance(value, str):
        raise DocumentError("bad-type", location, f"expected text, got {type(value).__name__}")
    return value


def _expect_number(value: Any, location: str) -> float:
    # bool is an int subclass; true/false are not numbers here
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DocumentError("bad-type", location, f"expected a number, got {type(value).__name__}")
    return float(value)


def _expect_int(value: Any, location: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise DocumentError("bad-type", location, f"expected an integer, got {type(value).__name__}")
    return value


def _reject_unknown(obj: Mapping, allowed: set[str], location: str) -> None:
    unknown = [k for k in obj if k not in allowed]
    if unknown:
        raise DocumentError(
            "unknown-field", location, f"unknown field(s): {', '.join(sorted(unknown))}"
        )


def _parse_concept(obj: Any, location: str) -> Concept:
    obj = _expect_object(obj, location)
    _reject_unknown(obj, {"id", "label", "kind", "initial", "submodel"}, location)
    if "id" not in obj:
        raise DocumentError("missing-field", location, "concept needs an 'id'")
    cid = _expect_str(obj["id"], f"{location}.id")
    label = _expect_str(obj["label"], f"{location}.label") if "label" in obj else ""
    kind = ConceptKind.ORDINARY
    if "kind" in obj:
        raw = _expect_str(obj["kind"], f"{location}.kind")
        try:
            kind = ConceptKind(raw)
        except ValueError:
            raise DocumentError("bad-kind", f"{location}.kind", f"unknown concept kind {raw!r}") from None
    initial = _expect_number(obj["initial"], f"{location}.initial") if "initial" in obj else None
    submodel = None
    if "submodel" in obj:
        sub = _expect_object(obj["submodel"], f"{location}.submodel")
        _reject_unknown(sub, {"target", "model"}, f"{location}.submodel")
        for key in ("target", "model"):
            if key not in sub:
                raise DocumentError(
                    "missing-field", f"{location}.submodel", f"submodel needs a '{key}'"
                )
        submodel = Submodel(
            model=_parse_model_body(sub["model"], f"{location}.submodel.model"),
            target=_expect_str(sub["target"], f"{location}.submodel.target"),
        )
    return Concept(id=cid, label=label, kind=kind, initial=initial, submodel=submodel)


def _parse_edge(obj: Any, location: str) -> Edge:
    obj = _expect_object(obj, location)
    _reject_unknown(obj, {"source", "target", "weight"}, location)
    for key in ("source", "target", "weight"):
        if key not in obj:
            raise DocumentError("missing-field", location, f"edge needs a '{key}'")
    return Edge(
        source=_expect_str(obj["source"], f"{location}.source"),
        target=_expect_str(obj["target"], f"{location}.target"),
        weight=_expect_number(obj["weight"], f"{location}.weight"),
    )


def _parse_model_body(obj: Any, location: str) -> FcmModel:
    obj = _expect_object(obj, location)
    _reject_unknown(obj, {"name", "range", "concepts", "edges", "metadata"}, location)
    for key in ("name", "range", "concepts"):
        if key not in obj:
            raise DocumentError("missing-field", location, f"model needs a '{key}'")
    raw_range = _expect_str(obj["range"], f"{location}.range")
    try:
        rng = Range(raw_range)
    except ValueError:
        raise DocumentError("bad-range", f"{location}.range", f"unknown range {raw_range!r}") from None
    concepts = [
        _parse_concept(c, f"{location}.concepts[{i}]")
        for i, c in enumerate(_expect_list(obj["concepts"], f"{location}.concepts"))
    ]
    edges = [
        _parse_edge(e, f"{location}.edges[{i}]")
        for i, e in enumerate(_expect_list(obj.get("edges", []), f"{location}.edges"))
    ]
    metadata = _expect_object(obj.get("metadata", {}), f"{location}.metadata")
    return FcmModel(
        name=_expect_str(obj["name"], f"{location}.name"),
        concepts=tuple(concepts),
        edges=tuple(edges),
        range=rng,
        metadata=metadata,
    )


def parse_model(data: bytes | str) -> FcmModel:
    """Parse a model document without checking structural rules.

    Raises DocumentError on syntax or schema problems, with a position.
    """
    obj = _parse_json(data)
    obj = _expect_object(obj, "$")
    _reject_unknown(obj, {"format_version", "name", "range", "concepts", "edges", "metadata"}, "$")
    if "format_version" not in obj:
        raise DocumentError("missing-field", "$", "document needs a 'format_version'")
    version = _expect_int(obj["format_version"], "$.format_version")
    if version != FORMAT_VERSION:
        raise DocumentError(
            "format-version", "$.format_version",
            f"unsupported format_version {version}, expected {FORMAT_VERSION}",
        )
    body = {k: v for k, v in obj.items() if k != "format_version"}
    return _parse_model_body(body, "$")


def load_model(data: bytes | str) -> FcmModel:
    """Parse and validate a model document.

    Raises DocumentError on syntax or schema problems (with a position) and
    ModelValidationError when the parsed model breaks a structural rule.
    """
    model = parse_model(data)
    require_valid(model)
    return model


def _sorted_json(value: Any) -> Any:
    """Recursively order mapping keys so free-form metadata is canonical."""
    if isinstance(value, dict):
        return {k: _sorted_json(value[k]) for k in sorted(value)}
    if isinstance(value, list):
        return [_sorted_json(v) for v in value]
    return value


def _concept_to_document(c: Concept) -> dict:
    doc: dict[str, Any] = {"id": c.id}
    if c.label:
        doc["label"] = c.label
    if c.kind is not ConceptKind.ORDINARY:
        doc["kind"] = c.kind.value
    if c.initial is not None:
        doc["initial"] = c.initial
    if c.submodel is not None:
        doc["submodel"] = {
            "target": c.submodel.target,
            "model": _model_body_to_document(c.submodel.model),
        }
    return doc


def _model_body_to_document(model: FcmModel) -> dict:
    return {
        "name": model.name,
        "range": model.range.value,
        "concepts": [_concept_to_document(c) for c in model.concepts],
        "edges": [
            {"source": e.source, "target": e.target, "weight": e.weight} for e in model.edges
        ],
        "metadata": _sorted_json(model.metadata),
    }


def model_to_document(model: FcmModel) -> dict:
    """Model as a plain document dict in canonical key order."""
    return {"format_version": FORMAT_VERSION, **_model_body_to_document(model)}


def dump_canonical(doc: Any) -> bytes:
    """Serialize a document dict exactly as the canonical writers do."""
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def save_model(model: FcmModel) -> bytes:
    """Canonical serialization; load(save(m)) structurally equals m."""
    require_valid(model)
    return dump_canonical(model_to_document(model))


def load_scenario(data: bytes | str, model: FcmModel) -> Scenario:
    """Parse a scenario document and resolve it against a model.

    Raises DocumentError on schema problems and ScenarioError on unknown
    concept ids or out-of-range values.
    """
    obj = _expect_object(_parse_json(data), "$")
    _reject_unknown(obj, {"name", "clamps", "initial_overrides"}, "$")
    name = _expect_str(obj.get("name", ""), "$.name")
    ids = set(model.concept_ids)

    def read_values(key: str) -> dict[str, float]:
        section = _expect_object(obj.get(key, {}), f"$.{key}")
        out: dict[str, float] = {}
        for cid, raw in section.items():
            value = _expect_number(raw, f"$.{key}.{cid}")
            if cid not in ids:
                raise ScenarioError(f"{key} references unknown concept {cid!r}")
            if not model.range.contains(value):
                raise ScenarioError(
                    f"{key} for {cid!r} is {value}, outside {model.range.value} range"
                )
            out[cid] = value
        return out

    return Scenario(
        name=name,
        clamps=read_values("clamps"),
        initial_overrides=read_values("initial_overrides"),
    )


def scenario_to_document(scenario: Scenario) -> dict:
    return {
        "name": scenario.name,
        "clamps": {k: float(scenario.clamps[k]) for k in sorted(scenario.clamps)},
        "initial_overrides": {
            k: float(scenario.initial_overrides[k]) for k in sorted(scenario.initial_overrides)
        },
    }


_THRESHOLD_KEYS = {"kind", "steepness"}
_CONFIG_KEYS = {"k1", "k2", "threshold", "epsilon", "max_iters", "cycle_window", "quantization"}


def config_from_document(obj: Any, rng: Range) -> SimulationConfig:
    """Build a config from a (possibly partial) document; missing fields
    take the defaults for the model range."""
    obj = _expect_object(obj, "$.config")
    _reject_unknown(obj, _CONFIG_KEYS, "$.config")
    base = default_config(rng)
    threshold = base.threshold
    if "threshold" in obj:
        tobj = _expect_object(obj["threshold"], "$.config.threshold")
        _reject_unknown(tobj, _THRESHOLD_KEYS, "$.config.threshold")
        if "kind" not in tobj:
            raise DocumentError("missing-field", "$.config.threshold", "threshold needs a 'kind'")
        raw_kind = _expect_str(tobj["kind"], "$.config.threshold.kind")
        try:
            kind = ThresholdKind(raw_kind)
        except ValueError:
            raise DocumentError(
                "bad-threshold", "$.config.threshold.kind", f"unknown threshold kind {raw_kind!r}"
            ) from None
        steepness = (
            _expect_number(tobj["steepness"], "$.config.threshold.steepness")
            if "steepness" in tobj
            else 1.0
        )
        threshold = ThresholdSpec(kind, steepness)
    return SimulationConfig(
        threshold=threshold,
        k1=_expect_number(obj["k1"], "$.config.k1") if "k1" in obj else base.k1,
        k2=_expect_number(obj["k2"], "$.config.k2") if "k2" in obj else base.k2,
        epsilon=_expect_number(obj["epsilon"], "$.config.epsilon") if "epsilon" in obj else base.epsilon,
        max_iters=_expect_int(obj["max_iters"], "$.config.max_iters") if "max_iters" in obj else base.max_iters,
        cycle_window=_expect_int(obj["cycle_window"], "$.config.cycle_window")
        if "cycle_window" in obj
        else base.cycle_window,
        quantization=_expect_number(obj["quantization"], "$.config.quantization")
        if "quantization" in obj
        else base.quantization,
    )


def config_to_document(config: SimulationConfig) -> dict:
    return {
        "k1": config.k1,
        "k2": config.k2,
        "threshold": {"kind": config.threshold.kind.value, "steepness": config.threshold.steepness},
        "epsilon": config.epsilon,
        "max_iters": config.max_iters,
        "cycle_window": config.cycle_window,
        "quantization": config.quantization,
    }


def result_to_document(result: SimulationResult) -> dict:
    outcome: dict[str, Any] = {"kind": result.outcome.kind.value}
    if result.outcome.period is not None:
        outcome["period"] = result.outcome.period
    return {
        "outcome": outcome,
        "iterations": result.iterations,
        "final": list(result.final),
        "trajectory": [list(state) for state in result.trajectory],
    }


def result_from_document(obj: dict) -> SimulationResult:
    """Rebuild a result from its document form; exact float round-trip."""
    outcome = obj["outcome"]
    return SimulationResult(
        trajectory=tuple(tuple(float(v) for v in state) for state in obj["trajectory"]),
        outcome=Outcome(OutcomeKind(outcome["kind"]), outcome.get("period")),
        iterations=int(obj["iterations"]),
    )


def export_trajectory(result: SimulationResult, model: FcmModel) -> bytes:
    """Trajectory as CSV: header, one row per state, then an outcome comment.

    Columns follow model concept order; values carry 9 significant digits.
    """
    if any(len(state) != model.n for state in result.trajectory):
        raise ValueError("trajectory states do not align with the model's concepts")
    lines = ["t," + ",".join(model.concept_ids)]
    for t, state in enumerate(result.trajectory):
        lines.append(f"{t}," + ",".join(format(v, ".9g") for v in state))
    lines.append(f"# outcome={result.outcome.label} iterations={result.iterations}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def load_indicators(data: bytes | str) -> dict[str, float]:
    """Parse a two-column `indicator,value` table into a mapping.

    An optional literal `indicator,value` header row is skipped. Duplicate
    ids and non-numeric values are rejected with their row number.
    """
    text = _as_text(data)
    out: dict[str, float] = {}
    for row_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line:
            continue
        if row_no == 1 and line == "indicator,value":
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise DocumentError(
                "malformed-row", f"row {row_no}", f"expected 'indicator,value', got {line!r}"
            )
        indicator, value_text = parts[0].strip(), parts[1].strip()
        if not indicator:
            raise DocumentError("malformed-row", f"row {row_no}", "empty indicator id")
        if indicator in out:
            raise DocumentError(
                "duplicate-indicator", f"row {row_no}", f"indicator {indicator!r} repeats"
            )
        try:
            value = float(value_text)
        except ValueError:
            raise DocumentError(
                "bad-number", f"row {row_no}", f"value {value_text!r} is not a number"
            ) from None
        out[indicator] = value
    return out
