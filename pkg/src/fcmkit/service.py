"""HTTP service exposing models, scenario runs and analyses.

All request and response bodies use the canonical document formats, so a
run fetched from here exports the same bytes the CLI writes. Runs and
analyses are immutable and content-complete: the stored record embeds the
config and scenario that produced it, which makes any record replayable.

Simulations are stateless and run concurrently; writes to a given model id
are serialized by the store.
"""

from __future__ import annotations

import json
from typing import Any

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from starlette.concurrency import run_in_threadpool

from .analysis import (
    influence_report,
    influence_to_document,
    stability_report,
    stability_to_document,
    structural_search,
    suggestions_to_document,
    transitive_closure,
)
from .core import (
    FcmError,
    FcmModel,
    ModelValidationError,
    default_config,
    flatten_hierarchy,
    simulate,
)
from .model_io import (
    DocumentError,
    config_from_document,
    config_to_document,
    export_trajectory,
    load_model,
    load_scenario,
    model_to_document,
    result_from_document,
    result_to_document,
    scenario_to_document,
)
from .store import ConflictError, NotFoundError, ScenarioStore, now_utc
from .templates import builtin_template_library

ANALYSIS_KINDS = ("closure", "stability", "structural_search")


def _error(status: int, message: str, rules: list[str] | None = None) -> JSONResponse:
    body: dict[str, Any] = {"error": message}
    if rules:
        body["rules"] = rules
    return JSONResponse(body, status_code=status)


def _parse_body(raw: bytes) -> dict:
    if not raw:
        return {}
    try:
        obj = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DocumentError("syntax", "$", f"request body is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise DocumentError("bad-type", "$", "request body must be a JSON object")
    return obj


def create_app(store_dir: str) -> FastAPI:
    app = FastAPI(title="fcmkit scenario service", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    store = ScenarioStore(store_dir)
    app.state.store = store

    def parse_version(text: str) -> int | None:
        try:
            return int(text)
        except ValueError:
            return None

    def model_or_404(model_id: str, version_text: str | None = None):
        version = None
        if version_text is not None:
            version = parse_version(version_text)
            if version is None:
                raise NotFoundError(f"no version {version_text!r} of model {model_id!r}")
        return store.get_model(model_id, version)

    @app.exception_handler(NotFoundError)
    async def _not_found(request: Request, exc: NotFoundError):
        return _error(404, str(exc))

    @app.exception_handler(ConflictError)
    async def _conflict(request: Request, exc: ConflictError):
        return _error(409, str(exc))

    @app.exception_handler(ModelValidationError)
    async def _invalid_model(request: Request, exc: ModelValidationError):
        return _error(422, str(exc), rules=[v.rule for v in exc.violations])

    @app.exception_handler(DocumentError)
    async def _bad_document(request: Request, exc: DocumentError):
        return _error(400, str(exc), rules=[exc.rule])

    @app.exception_handler(FcmError)
    async def _domain_error(request: Request, exc: FcmError):
        # scenario/config/hierarchy problems: well-formed but unusable
        return _error(422, str(exc))

    @app.post("/models", status_code=201)
    async def create_model(request: Request):
        model = load_model(await request.body())
        model_id, version = store.create_model(model)
        return {"model_id": model_id, "version": version}

    @app.put("/models/{model_id}")
    async def update_model(model_id: str, request: Request):
        expected = request.headers.get("if-match")
        if expected is None or parse_version(expected) is None:
            return _error(400, "missing or non-integer If-Match header with the expected version")
        model = load_model(await request.body())
        version = store.update_model(model_id, int(expected), model)
        return {"model_id": model_id, "version": version}

    @app.get("/models/{model_id}")
    async def get_model_latest(model_id: str):
        model, version = store.get_model(model_id)
        return _model_response(store, model_id, version, model)

    @app.get("/models/{model_id}/{version}")
    async def get_model_version(model_id: str, version: str):
        model, resolved = model_or_404(model_id, version)
        return _model_response(store, model_id, resolved, model)

    @app.post("/models/{model_id}/{version}/runs", status_code=201)
    async def run_simulation(model_id: str, version: str, request: Request):
        model, resolved = model_or_404(model_id, version)
        body = _parse_body(await request.body())
        unknown = [k for k in body if k not in ("config", "scenario")]
        if unknown:
            return _error(422, f"unknown request field(s): {', '.join(sorted(unknown))}")
        try:
            config = config_from_document(body.get("config", {}), model.range)
            scenario = load_scenario(json.dumps(body.get("scenario", {})), model)
        except DocumentError as exc:
            return _error(422, str(exc), rules=[exc.rule])

        def execute() -> dict:
            flat = flatten_hierarchy(model, config)
            result = simulate(flat, config, scenario)
            record = {
                "model_id": model_id,
                "version": resolved,
                "config": config_to_document(config),
                "scenario": scenario_to_document(scenario),
                "seed": None,
                "result": result_to_document(result),
                "concepts": list(model.concept_ids),
                "created_at": now_utc(),
            }
            return store.get_run(store.add_run(record))

        # keep the event loop free: simulations run in the worker pool
        return JSONResponse(await run_in_threadpool(execute), status_code=201)

    @app.get("/runs/{run_id}")
    async def get_run(run_id: str):
        return store.get_run(run_id)

    @app.get("/runs/{run_id}/trajectory.csv")
    async def get_run_trajectory(run_id: str):
        record = store.get_run(run_id)
        model, _ = store.get_model(record["model_id"], record["version"])
        result = result_from_document(record["result"])
        return Response(export_trajectory(result, model), media_type="text/csv; charset=utf-8")

    @app.post("/models/{model_id}/{version}/analyses", status_code=201)
    async def run_analysis(model_id: str, version: str, request: Request):
        model, resolved = model_or_404(model_id, version)
        body = _parse_body(await request.body())
        unknown = [k for k in body if k not in ("kind", "params")]
        if unknown:
            return _error(422, f"unknown request field(s): {', '.join(sorted(unknown))}")
        kind = body.get("kind")
        if kind not in ANALYSIS_KINDS:
            return _error(422, f"kind must be one of {', '.join(ANALYSIS_KINDS)}")
        params = body.get("params", {})
        if not isinstance(params, dict):
            return _error(422, "params must be an object")
        try:
            resolved_params = _check_analysis_params(kind, params)
        except DocumentError as exc:
            return _error(422, str(exc), rules=[exc.rule])

        def execute() -> dict:
            result = _run_analysis(model, kind, resolved_params)
            record = {
                "model_id": model_id,
                "version": resolved,
                "kind": kind,
                "params": resolved_params,
                "result": result,
                "created_at": now_utc(),
            }
            return store.get_analysis(store.add_analysis(record))

        return JSONResponse(await run_in_threadpool(execute), status_code=201)

    @app.get("/analyses/{analysis_id}")
    async def get_analysis(analysis_id: str):
        return store.get_analysis(analysis_id)

    @app.get("/runs/{run_id_a}/compare/{run_id_b}")
    async def compare_runs(run_id_a: str, run_id_b: str):
        a = store.get_run(run_id_a)
        b = store.get_run(run_id_b)
        if (a["model_id"], a["version"]) != (b["model_id"], b["version"]):
            raise ConflictError(
                "runs reference different models: "
                f"{a['model_id']}@{a['version']} vs {b['model_id']}@{b['version']}"
            )
        model, _ = store.get_model(a["model_id"], a["version"])
        final_a = a["result"]["final"]
        final_b = b["result"]["final"]
        ordered = sorted(
            range(model.n), key=lambda i: (model.concepts[i].kind.value != "target", i)
        )
        return {
            "run_a": run_id_a,
            "run_b": run_id_b,
            "model_id": a["model_id"],
            "version": a["version"],
            "outcome_a": a["result"]["outcome"],
            "outcome_b": b["result"]["outcome"],
            "concepts": [
                {
                    "id": model.concepts[i].id,
                    "kind": model.concepts[i].kind.value,
                    "final_a": final_a[i],
                    "final_b": final_b[i],
                    "delta": final_b[i] - final_a[i],
                }
                for i in ordered
            ],
        }

    @app.get("/templates")
    async def get_templates():
        library = builtin_template_library()
        return {
            "archetypes": [
                {
                    "id": a.id,
                    "label": a.label,
                    "centroid": {k: a.centroid.values[k] for k in sorted(a.centroid.values)},
                    "template": model_to_document(a.template),
                }
                for a in library.archetypes
            ]
        }

    return app


def _model_response(store: ScenarioStore, model_id: str, version: int, model: FcmModel) -> dict:
    meta = store.model_meta(model_id)
    return {
        "model_id": model_id,
        "version": version,
        "created_at": meta.get("created_at", ""),
        "updated_at": meta.get("updated_at", ""),
        "document": model_to_document(model),
    }


def _analysis_params(params: dict, defaults: dict[str, int]) -> dict:
    unknown = [k for k in params if k not in defaults]
    if unknown:
        raise DocumentError(
            "unknown-field", "$.params", f"unknown param(s): {', '.join(sorted(unknown))}"
        )
    out = {}
    for key, default in defaults.items():
        value = params.get(key, default)
        if isinstance(value, bool) or not isinstance(value, int):
            raise DocumentError("bad-type", f"$.params.{key}", "expected an integer")
        out[key] = value
    if "samples" in out and out["samples"] < 1:
        raise DocumentError("bad-value", "$.params.samples", "samples must be >= 1")
    if "top_k" in out and out["top_k"] < 1:
        raise DocumentError("bad-value", "$.params.top_k", "top_k must be >= 1")
    return out


_ANALYSIS_DEFAULTS = {
    "closure": {},
    "stability": {"samples": 100, "seed": 0},
    "structural_search": {"samples": 100, "seed": 0, "top_k": 10},
}


def _check_analysis_params(kind: str, params: dict) -> dict:
    return _analysis_params(params, _ANALYSIS_DEFAULTS[kind])


def _run_analysis(model: FcmModel, kind: str, resolved: dict) -> dict:
    if kind == "closure":
        report = influence_report(transitive_closure(model))
        return influence_to_document(model.concept_ids, report)
    config = default_config(model.range)
    if kind == "stability":
        report = stability_report(model, config, resolved["samples"], resolved["seed"])
        return stability_to_document(report)
    suggestions = structural_search(
        model, config, resolved["samples"], resolved["seed"], resolved["top_k"]
    )
    return suggestions_to_document(suggestions)
