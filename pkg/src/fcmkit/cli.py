"""Command-line front door: validate, simulate, analyze, search, serve.

Machine-readable output (canonical JSON or CSV) goes to the file named by
--out, or to stdout when --out is omitted; human summaries go to stderr so
stdout stays pipe-safe. Exit codes: 0 success, 1 validation or domain
error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

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
    Range,
    SimulationConfig,
    ThresholdKind,
    ThresholdSpec,
    flatten_hierarchy,
    simulate,
    validate_model,
)
from .model_io import (
    DocumentError,
    export_trajectory,
    load_model,
    load_scenario,
    parse_model,
    save_model,
)
from .templates import builtin_sed_template

DEFAULT_ADDR = "127.0.0.1:8000"
DEFAULT_STORE = "fcmkit-store"


def _emit(data: bytes, out: str | None) -> None:
    if out:
        with open(out, "wb") as f:
            f.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()


def _emit_json(doc: dict, out: str | None) -> None:
    _emit((json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8"), out)


def _read_model(path: str) -> FcmModel:
    with open(path, "rb") as f:
        return load_model(f.read())


def _config_from_args(args: argparse.Namespace, rng: Range) -> SimulationConfig:
    kind = args.threshold
    if kind is None:
        kind = "tanh" if rng is Range.BIPOLAR else "logistic"
    return SimulationConfig(
        threshold=ThresholdSpec(ThresholdKind(kind), args.steepness),
        k1=args.k1,
        k2=args.k2,
        epsilon=args.epsilon,
        max_iters=args.max_iters,
        cycle_window=args.cycle_window,
        quantization=args.quantization,
    )


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        with open(args.model, "rb") as f:
            model = parse_model(f.read())
    except DocumentError as exc:
        _emit_json(
            {"ok": False, "violations": [
                {"rule": exc.rule, "subject": exc.location, "message": str(exc)}
            ]},
            None,
        )
        print(f"invalid document: {exc}", file=sys.stderr)
        return 1
    violations = validate_model(model)
    _emit_json(
        {"ok": not violations, "violations": [
            {"rule": v.rule, "subject": v.subject, "message": v.message} for v in violations
        ]},
        None,
    )
    if violations:
        print(f"{len(violations)} violation(s)", file=sys.stderr)
        return 1
    print("model ok", file=sys.stderr)
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    model = _read_model(args.model)
    config = _config_from_args(args, model.range)
    scenario = None
    if args.scenario:
        with open(args.scenario, "rb") as f:
            scenario = load_scenario(f.read(), model)
    flat = flatten_hierarchy(model, config)
    result = simulate(flat, config, scenario)
    _emit(export_trajectory(result, flat), args.out)
    print(f"outcome={result.outcome.label} iterations={result.iterations}", file=sys.stderr)
    return 0


def cmd_closure(args: argparse.Namespace) -> int:
    model = _read_model(args.model)
    report = influence_report(transitive_closure(model))
    _emit_json(influence_to_document(model.concept_ids, report), args.out)
    return 0


def cmd_stability(args: argparse.Namespace) -> int:
    model = _read_model(args.model)
    config = _config_from_args(args, model.range)
    report = stability_report(model, config, args.samples, args.seed, workers=args.workers)
    _emit_json(stability_to_document(report), args.out)
    return 0


def cmd_search(args: argparse.Namespace) -> int:
    model = _read_model(args.model)
    config = _config_from_args(args, model.range)
    suggestions = structural_search(
        model, config, args.samples, args.seed, args.top_k, workers=args.workers
    )
    _emit_json(suggestions_to_document(suggestions), args.out)
    return 0


def cmd_template(args: argparse.Namespace) -> int:
    _emit(save_model(builtin_sed_template()), args.out)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    host, _, port_text = args.addr.rpartition(":")
    if not host or not port_text.isdigit():
        print(f"error: --addr must look like host:port, got {args.addr!r}", file=sys.stderr)
        return 2
    store = args.store or os.environ.get("FCMKIT_STORE") or DEFAULT_STORE
    app = create_app(store)
    uvicorn.run(app, host=host, port=int(port_text))
    return 0


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--k1", type=float, default=1.0, help="edge-sum coefficient")
    parser.add_argument("--k2", type=float, default=1.0, help="self-memory coefficient")
    parser.add_argument(
        "--threshold",
        choices=[k.value for k in ThresholdKind],
        default=None,
        help="threshold kind (default: tanh for bipolar, logistic for unipolar)",
    )
    parser.add_argument("--steepness", type=float, default=1.0, help="tanh/logistic steepness")
    parser.add_argument("--epsilon", type=float, default=1e-4, help="fixed-point tolerance")
    parser.add_argument("--max-iters", type=int, default=200, help="iteration budget")
    parser.add_argument("--cycle-window", type=int, default=50, help="recurrence search depth")
    parser.add_argument("--quantization", type=float, default=1e-9, help="recurrence rounding step")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fcmkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a model document against every rule")
    p.add_argument("--model", required=True, help="model document path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("simulate", help="run a scenario and write the trajectory CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--scenario", help="scenario document path")
    _add_config_flags(p)
    p.add_argument("--out", help="trajectory CSV path (stdout when omitted)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("closure", help="accumulated influence report")
    p.add_argument("--model", required=True)
    p.add_argument("--out", help="report JSON path (stdout when omitted)")
    p.set_defaults(func=cmd_closure)

    p = sub.add_parser("stability", help="outcome tally over sampled starts")
    p.add_argument("--model", required=True)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    _add_config_flags(p)
    p.add_argument("--out", help="report JSON path (stdout when omitted)")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("search", help="rank single-edge edits by resulting stability")
    p.add_argument("--model", required=True)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--top-k", type=int, default=10)
    p.add_argument("--workers", type=int, default=1)
    _add_config_flags(p)
    p.add_argument("--out", help="suggestions JSON path (stdout when omitted)")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("template", help="write the bundled standard model")
    p.add_argument("--out", help="model document path (stdout when omitted)")
    p.set_defaults(func=cmd_template)

    p = sub.add_parser("serve", help="run the scenario HTTP service")
    p.add_argument("--addr", default=DEFAULT_ADDR, help="listen address host:port")
    p.add_argument("--store", default=None, help="store directory (or env FCMKIT_STORE)")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FcmError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
