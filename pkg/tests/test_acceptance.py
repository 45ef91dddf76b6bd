"""Acceptance gate: every criterion at its stated tolerance.

Run with `pytest tests/test_acceptance.py -v -s` to see one PASS/FAIL line
per criterion.
"""

import json
import random
import time
from contextlib import contextmanager
from dataclasses import replace
from importlib import resources

import numpy as np
from starlette.testclient import TestClient

from fcmkit.analysis import (
    adjacency_matrix,
    stability_report,
    stability_to_document,
    structural_search,
    suggestions_to_document,
    transitive_closure,
)
from fcmkit.cli import main
from fcmkit.core import (
    Concept,
    Edge,
    FcmModel,
    OutcomeKind,
    Range,
    Scenario,
    SimulationConfig,
    ThresholdKind,
    ThresholdSpec,
    simulate,
    step,
)
from fcmkit.model_io import load_model, save_model
from fcmkit.service import create_app
from fcmkit.templates import builtin_sed_template
from oracles import (
    brute_force_closure,
    direct_update,
    random_model,
    random_valid_document_model,
    spectral_radius_oracle,
)


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"[FAIL] {name}")
        raise
    print(f"[PASS] {name}")


def sign_map():
    return FcmModel(
        name="sign-map",
        concepts=(Concept("x1", initial=1.0), Concept("x2", initial=1.0)),
        edges=(Edge("x1", "x2", 1.0), Edge("x2", "x1", -1.0)),
    )


BIVALENT = SimulationConfig(threshold=ThresholdSpec(ThresholdKind.BIVALENT), k1=1.0, k2=0.0)

THRESHOLD_CASES = (
    (ThresholdKind.CLAMP, Range.BIPOLAR),
    (ThresholdKind.CLAMP, Range.UNIPOLAR),
    (ThresholdKind.TANH, Range.BIPOLAR),
    (ThresholdKind.LOGISTIC, Range.UNIPOLAR),
    (ThresholdKind.BIVALENT, Range.BIPOLAR),
    (ThresholdKind.TRIVALENT, Range.BIPOLAR),
)


def test_update_rule_oracle_equivalence():
    with criterion(
        "update-rule oracle equivalence: 1000 random models (n<=6, every "
        "threshold kind), step vs direct evaluation, max-norm <= 1e-12, < 5 s"
    ):
        started = time.perf_counter()
        worst = 0.0
        for i in range(1000):
            rnd = random.Random(i)
            kind, rng = THRESHOLD_CASES[i % len(THRESHOLD_CASES)]
            model = random_model(rnd, max_n=6, rng=rng)
            config = SimulationConfig(
                threshold=ThresholdSpec(kind, steepness=rnd.choice((0.5, 1.0, 2.0))),
                k1=rnd.uniform(0.0, 1.5),
                k2=rnd.uniform(0.0, 1.5),
            )
            state = tuple(rnd.uniform(rng.lo, rng.hi) for _ in range(model.n))
            got = step(model, state, config)
            want = direct_update(model, state, config)
            worst = max(worst, max(abs(a - b) for a, b in zip(got, want)))
        elapsed = time.perf_counter() - started
        assert worst <= 1e-12, f"max-norm {worst}"
        assert elapsed < 5.0, f"took {elapsed:.2f}s"


def test_closure_oracle():
    with criterion(
        "closure oracle: 200 random grid models (n<=5), transitive_closure vs "
        "brute-force walk aggregation, exact to 1e-12, < 30 s"
    ):
        started = time.perf_counter()
        for i in range(200):
            rnd = random.Random(10_000 + i)
            model = random_model(rnd, max_n=5, grid=True, edge_prob=0.5)
            got = transitive_closure(model)
            want_p, want_n = brute_force_closure(model)
            assert np.max(np.abs(got.positive - want_p)) <= 1e-12
            assert np.max(np.abs(got.negative - want_n)) <= 1e-12
        elapsed = time.perf_counter() - started
        assert elapsed < 30.0, f"took {elapsed:.2f}s"


def test_cycle_fixture():
    with criterion(
        "cycle fixture: sign map from (1,1) is LimitCycle(4) with the exact "
        "orbit; removing either edge gives fixed_point_fraction 1.0 "
        "(brute-forced over all 4 sign starts)"
    ):
        model = sign_map()
        result = simulate(model, BIVALENT)
        assert result.outcome.kind is OutcomeKind.LIMIT_CYCLE
        assert result.outcome.period == 4
        assert result.trajectory == (
            (1.0, 1.0),
            (-1.0, 1.0),
            (-1.0, -1.0),
            (1.0, -1.0),
            (1.0, 1.0),
        )
        for drop in model.edges:
            pruned = replace(model, edges=tuple(e for e in model.edges if e is not drop))
            report = stability_report(pruned, BIVALENT, samples=32, seed=17)
            assert report.fixed_point_fraction == 1.0
            for sx in (-1.0, 1.0):
                for sy in (-1.0, 1.0):
                    corner = simulate(
                        pruned, BIVALENT, Scenario(initial_overrides={"x1": sx, "x2": sy})
                    )
                    assert corner.outcome.kind is OutcomeKind.FIXED_POINT


def test_crime_direction_on_template():
    with criterion(
        "direction check: bundled template, tanh k1=k2=1, crime clamped 0.9 "
        "vs 0.1 strictly lowers the quality_of_life final value"
    ):
        model = builtin_sed_template()
        config = SimulationConfig(threshold=ThresholdSpec(ThresholdKind.TANH), k1=1.0, k2=1.0)
        qol = model.index_of("quality_of_life")
        low = simulate(model, config, Scenario(clamps={"crime": 0.1}))
        high = simulate(model, config, Scenario(clamps={"crime": 0.9}))
        assert high.final[qol] < low.final[qol]


def test_round_trip():
    with criterion(
        "round-trip: save/load byte fixpoint on the bundled template and 100 "
        "random models; load(save(m)) structurally equals m"
    ):
        bundled = resources.files("fcmkit").joinpath("data/sed_standard.fcm.json").read_bytes()
        assert save_model(load_model(bundled)) == bundled
        for i in range(100):
            m = random_valid_document_model(random.Random(20_000 + i))
            data = save_model(m)
            loaded = load_model(data)
            assert loaded == m
            assert save_model(loaded) == data


def test_cli_service_parity(tmp_path):
    with criterion(
        "CLI/service parity: period-4 fixture via `cli simulate` and via "
        "POST runs + GET trajectory.csv produce byte-identical CSV"
    ):
        model_path = tmp_path / "sign.fcm.json"
        model_path.write_bytes(save_model(sign_map()))
        csv_path = tmp_path / "traj.csv"
        code = main(
            [
                "simulate",
                "--model", str(model_path),
                "--threshold", "bivalent",
                "--k2", "0",
                "--out", str(csv_path),
            ]
        )
        assert code == 0
        via_cli = csv_path.read_bytes()

        with TestClient(create_app(str(tmp_path / "store"))) as client:
            created = client.post("/models", content=save_model(sign_map()))
            assert created.status_code == 201
            run = client.post(
                f"/models/{created.json()['model_id']}/1/runs",
                content=json.dumps(
                    {"config": {"k1": 1.0, "k2": 0.0, "threshold": {"kind": "bivalent"}}}
                ),
            )
            assert run.status_code == 201
            via_service = client.get(f"/runs/{run.json()['run_id']}/trajectory.csv").content
        assert via_cli == via_service


def test_seeded_determinism():
    with criterion(
        "determinism: stability_report and structural_search with a fixed "
        "seed are byte-identical across two runs and across thread counts"
    ):
        model = sign_map()

        def stability_bytes(workers):
            report = stability_report(model, BIVALENT, samples=40, seed=7, workers=workers)
            return json.dumps(stability_to_document(report)).encode()

        def search_bytes(workers):
            found = structural_search(
                model, BIVALENT, samples=24, seed=7, top_k=20, workers=workers
            )
            return json.dumps(suggestions_to_document(found)).encode()

        assert stability_bytes(1) == stability_bytes(1) == stability_bytes(3)
        assert search_bytes(1) == search_bytes(1) == search_bytes(4)

        template = builtin_sed_template()
        config = SimulationConfig(threshold=ThresholdSpec(ThresholdKind.TANH), k1=1.0, k2=1.0)
        a = stability_report(template, config, samples=16, seed=3, workers=1)
        b = stability_report(template, config, samples=16, seed=3, workers=3)
        assert stability_to_document(a) == stability_to_document(b)


def test_spectral_heuristic():
    with criterion(
        "spectral heuristic: period-4 sign map with k1=1 reports spectral "
        "radius 1.0 +/- 1e-6 against an independent eigenvalue oracle"
    ):
        model = sign_map()
        report = stability_report(model, BIVALENT, samples=4, seed=0)
        oracle = spectral_radius_oracle(BIVALENT.k1 * adjacency_matrix(model))
        assert abs(oracle - 1.0) <= 1e-12
        assert abs(report.spectral_radius_heuristic - 1.0) <= 1e-6
        assert abs(report.spectral_radius_heuristic - oracle) <= 1e-6
