import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fcmkit.core import (
    Concept,
    ConceptKind,
    FcmModel,
    ModelValidationError,
    Scenario,
    ScenarioError,
    simulate,
)
from fcmkit.model_io import (
    DocumentError,
    export_trajectory,
    load_indicators,
    load_model,
    load_scenario,
    model_to_document,
    save_model,
)
from fcmkit.templates import builtin_sed_template
from oracles import random_valid_document_model

MINIMAL = """
{
  "format_version": 1,
  "name": "tiny",
  "range": "bipolar",
  "concepts": [{"id": "a", "initial": 0.0}],
  "edges": [],
  "metadata": {}
}
"""


def doc(**overrides):
    base = json.loads(MINIMAL)
    base.update(overrides)
    return json.dumps(base)


class TestLoadModel:
    def test_minimal_document(self):
        m = load_model(MINIMAL)
        assert m.name == "tiny" and m.n == 1 and m.edges == ()

    def test_weight_out_of_range_is_validation_error(self):
        text = doc(
            concepts=[{"id": "a"}, {"id": "b"}],
            edges=[{"source": "a", "target": "b", "weight": 1.5}],
        )
        with pytest.raises(ModelValidationError) as exc:
            load_model(text)
        assert "weight-out-of-range" in {v.rule for v in exc.value.violations}

    def test_dangling_edge(self):
        text = doc(edges=[{"source": "a", "target": "ghost", "weight": 0.5}])
        with pytest.raises(ModelValidationError) as exc:
            load_model(text)
        assert "dangling-edge" in {v.rule for v in exc.value.violations}

    def test_syntax_error_carries_position(self):
        with pytest.raises(DocumentError) as exc:
            load_model('{"format_version": 1,,}')
        assert exc.value.rule == "syntax"
        assert "line 1" in exc.value.location

    def test_unknown_top_level_field(self):
        with pytest.raises(DocumentError) as exc:
            load_model(doc(extra=1))
        assert exc.value.rule == "unknown-field"

    def test_unknown_nested_field(self):
        text = doc(concepts=[{"id": "a", "initail": 0.1}])  # typo must surface
        with pytest.raises(DocumentError) as exc:
            load_model(text)
        assert exc.value.rule == "unknown-field"
        assert "concepts[0]" in exc.value.location

    def test_missing_format_version(self):
        body = json.loads(MINIMAL)
        del body["format_version"]
        with pytest.raises(DocumentError) as exc:
            load_model(json.dumps(body))
        assert exc.value.rule == "missing-field"

    def test_wrong_format_version(self):
        with pytest.raises(DocumentError) as exc:
            load_model(doc(format_version=2))
        assert exc.value.rule == "format-version"

    def test_bad_range_and_kind(self):
        with pytest.raises(DocumentError) as exc:
            load_model(doc(range="tripolar"))
        assert exc.value.rule == "bad-range"
        with pytest.raises(DocumentError) as exc:
            load_model(doc(concepts=[{"id": "a", "kind": "boss"}]))
        assert exc.value.rule == "bad-kind"

    def test_weight_as_text_is_schema_error(self):
        text = doc(
            concepts=[{"id": "a"}, {"id": "b"}],
            edges=[{"source": "a", "target": "b", "weight": "0.5"}],
        )
        with pytest.raises(DocumentError) as exc:
            load_model(text)
        assert exc.value.rule == "bad-type"
        assert "edges[0].weight" in exc.value.location

    def test_bool_is_not_a_number(self):
        with pytest.raises(DocumentError):
            load_model(doc(concepts=[{"id": "a", "initial": True}]))

    def test_submodel_round_trip(self):
        text = doc(
            concepts=[
                {
                    "id": "a",
                    "submodel": {
                        "target": "t",
                        "model": {
                            "name": "inner",
                            "range": "bipolar",
                            "concepts": [{"id": "t", "kind": "target", "initial": 0.4}],
                            "edges": [],
                            "metadata": {},
                        },
                    },
                }
            ]
        )
        m = load_model(text)
        sub = m.concepts[0].submodel
        assert sub is not None and sub.target == "t"
        assert sub.model.concepts[0].kind is ConceptKind.TARGET
        assert load_model(save_model(m)) == m


class TestSaveModel:
    def test_round_trip_fixpoint_on_template(self):
        data = save_model(builtin_sed_template())
        assert save_model(load_model(data)) == data

    def test_structurally_equal_models_serialize_identically(self):
        a = FcmModel(name="m", concepts=(Concept("x", initial=1),), metadata={"k": "v"})
        b = FcmModel(name="m", concepts=(Concept("x", initial=1.0),), metadata={"k": "v"})
        assert save_model(a) == save_model(b)

    def test_input_key_order_ignored(self):
        shuffled = json.dumps(
            {
                "metadata": {},
                "edges": [],
                "concepts": [{"initial": 0.0, "id": "a"}],
                "range": "bipolar",
                "name": "tiny",
                "format_version": 1,
            }
        )
        assert save_model(load_model(shuffled)) == save_model(load_model(MINIMAL))

    def test_metadata_keys_canonically_sorted(self):
        a = doc(metadata={"zz": 1, "aa": {"y": 2, "x": 3}})
        b = doc(metadata={"aa": {"x": 3, "y": 2}, "zz": 1})
        assert save_model(load_model(a)) == save_model(load_model(b))

    def test_canonical_output_is_lf_utf8_with_trailing_newline(self):
        data = save_model(load_model(MINIMAL))
        assert b"\r" not in data and data.endswith(b"\n")
        data.decode("utf-8")

    def test_defaults_omitted(self):
        m = FcmModel(name="m", concepts=(Concept("a"),))
        body = json.loads(save_model(m))
        assert body["concepts"][0] == {"id": "a"}

    def test_invalid_model_refused(self):
        m = FcmModel(name="m", concepts=(Concept("a", initial=7.0),))
        with pytest.raises(ModelValidationError):
            save_model(m)

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 100_000))
    def test_random_round_trips(self, seed):
        m = random_valid_document_model(random.Random(seed))
        data = save_model(m)
        loaded = load_model(data)
        assert loaded == m
        assert save_model(loaded) == data


class TestLoadScenario:
    def model(self):
        return load_model(doc(concepts=[{"id": "a"}, {"id": "b"}]))

    def test_neutral_scenario(self):
        s = load_scenario("{}", self.model())
        assert s.clamps == {} and s.initial_overrides == {}

    def test_values_resolved(self):
        s = load_scenario(
            '{"name": "push", "clamps": {"a": 0.9}, "initial_overrides": {"b": -0.5}}',
            self.model(),
        )
        assert s == Scenario(name="push", clamps={"a": 0.9}, initial_overrides={"b": -0.5})

    def test_unknown_id_named(self):
        with pytest.raises(ScenarioError) as exc:
            load_scenario('{"clamps": {"ghost": 0.1}}', self.model())
        assert "ghost" in str(exc.value)

    def test_out_of_range_clamp(self):
        with pytest.raises(ScenarioError):
            load_scenario('{"clamps": {"a": 1.2}}', self.model())

    def test_unknown_field(self):
        with pytest.raises(DocumentError):
            load_scenario('{"clams": {}}', self.model())


class TestExportTrajectory:
    def test_shape_and_outcome_comment(self, clamp_config):
        m = load_model(MINIMAL)
        result = simulate(m, clamp_config)
        lines = export_trajectory(result, m).decode().splitlines()
        assert lines[0] == "t,a"
        assert lines[1] == "0,0"
        assert lines[2] == "1,0"
        assert lines[3] == "# outcome=FixedPoint iterations=1"
        assert len(lines) == 4

    def test_columns_follow_model_order(self, sign_map, sign_map_config):
        result = simulate(sign_map, sign_map_config)
        header = export_trajectory(result, sign_map).decode().splitlines()[0]
        assert header == "t," + ",".join(sign_map.concept_ids)

    def test_limit_cycle_comment_and_determinism(self, sign_map, sign_map_config):
        result = simulate(sign_map, sign_map_config)
        data = export_trajectory(result, sign_map)
        assert data == export_trajectory(result, sign_map)
        assert b"# outcome=LimitCycle:4 iterations=4" in data

    def test_nine_significant_digits(self, sign_map):
        from fcmkit.core import SimulationConfig, ThresholdKind, ThresholdSpec

        config = SimulationConfig(threshold=ThresholdSpec(ThresholdKind.TANH))
        result = simulate(sign_map, config)
        rows = export_trajectory(result, sign_map).decode().splitlines()
        cell = rows[2].split(",")[1]
        assert len(cell.lstrip("-0.").replace(".", "")) <= 9

    def test_misaligned_result_rejected(self, sign_map, sign_map_config):
        m = load_model(MINIMAL)
        result = simulate(sign_map, sign_map_config)
        with pytest.raises(ValueError):
            export_trajectory(result, m)


class TestLoadIndicators:
    def test_basic(self):
        assert load_indicators("population,0.5\n") == {"population": 0.5}

    def test_header_skipped(self):
        assert load_indicators("indicator,value\npopulation,0.5\n") == {"population": 0.5}

    def test_blank_lines_skipped(self):
        assert load_indicators("\npopulation,0.5\n\nincome,0.25\n") == {
            "population": 0.5,
            "income": 0.25,
        }

    def test_duplicate_rejected(self):
        with pytest.raises(DocumentError) as exc:
            load_indicators("population,0.5\npopulation,0.6\n")
        assert exc.value.rule == "duplicate-indicator"
        assert "row 2" in exc.value.location

    def test_non_numeric_value(self):
        with pytest.raises(DocumentError) as exc:
            load_indicators("population,abc\n")
        assert exc.value.rule == "bad-number"
        assert "row 1" in exc.value.location

    def test_malformed_row(self):
        with pytest.raises(DocumentError) as exc:
            load_indicators("population,0.5\njust-one-column\n")
        assert exc.value.rule == "malformed-row"
        assert "row 2" in exc.value.location


def test_model_to_document_key_order():
    body = model_to_document(load_model(MINIMAL))
    assert list(body) == ["format_version", "name", "range", "concepts", "edges", "metadata"]
