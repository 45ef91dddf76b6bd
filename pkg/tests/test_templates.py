from importlib import resources

import pytest

from fcmkit.core import Concept, ConceptKind, FcmModel, Range, validate_model
from fcmkit.model_io import save_model
from fcmkit.templates import (
    Archetype,
    IndicatorProfile,
    TemplateError,
    TemplateLibrary,
    assign_archetype,
    builtin_sed_template,
    builtin_template_library,
    instantiate_template,
    normalize_indicators,
)


class TestBuiltinTemplate:
    def test_passes_validation(self):
        assert validate_model(builtin_sed_template()) == []

    def test_single_target_is_quality_of_life(self):
        m = builtin_sed_template()
        targets = [c.id for c in m.concepts if c.kind is ConceptKind.TARGET]
        assert targets == ["quality_of_life"]

    def test_variable_factor_is_production(self):
        m = builtin_sed_template()
        assert any(
            c.id == "production" and c.kind is ConceptKind.VARIABLE for c in m.concepts
        )

    def test_crime_edge_is_negative(self):
        m = builtin_sed_template()
        crime_edges = [
            e for e in m.edges if (e.source, e.target) == ("crime", "quality_of_life")
        ]
        assert len(crime_edges) == 1
        assert crime_edges[0].weight < 0
        assert crime_edges[0].weight == -0.7  # shipped default magnitude

    def test_stable_across_runs_and_canonical_on_disk(self):
        bundled = resources.files("fcmkit").joinpath("data/sed_standard.fcm.json").read_bytes()
        assert save_model(builtin_sed_template()) == bundled
        assert save_model(builtin_sed_template()) == save_model(builtin_sed_template())


class TestBuiltinLibrary:
    def test_archetypes_unique_and_valid(self):
        lib = builtin_template_library()
        ids = [a.id for a in lib.archetypes]
        assert len(ids) == len(set(ids)) >= 2
        for a in lib.archetypes:
            assert validate_model(a.template) == []
            assert all(0.0 <= v <= 1.0 for v in a.centroid.values.values())

    def test_duplicate_archetype_rejected(self):
        lib = builtin_template_library()
        a = lib.archetypes[0]
        with pytest.raises(TemplateError):
            TemplateLibrary((a, a))


class TestNormalizeIndicators:
    def test_midpoint(self):
        p = normalize_indicators({"x": 50.0}, {"x": (0.0, 100.0)})
        assert p.values == {"x": 0.5}

    def test_clip(self):
        p = normalize_indicators({"x": 120.0}, {"x": (0.0, 100.0)})
        assert p.values == {"x": 1.0}
        p = normalize_indicators({"x": -5.0}, {"x": (0.0, 100.0)})
        assert p.values == {"x": 0.0}

    def test_degenerate_bounds(self):
        p = normalize_indicators({"x": 7.0}, {"x": (7.0, 7.0)})
        assert p.values == {"x": 0.5}

    def test_missing_bounds(self):
        with pytest.raises(TemplateError):
            normalize_indicators({"x": 1.0}, {})

    def test_reversed_bounds(self):
        with pytest.raises(TemplateError):
            normalize_indicators({"x": 1.0}, {"x": (2.0, 1.0)})


def tiny_template(rng=Range.BIPOLAR):
    return FcmModel(
        name="t",
        concepts=(
            Concept("quality_of_life", kind=ConceptKind.TARGET, initial=0.0),
            Concept("other", initial=rng.midpoint),
        ),
        range=rng,
    )


def archetype(arch_id, centroid, rng=Range.BIPOLAR):
    return Archetype(
        id=arch_id, label=arch_id, centroid=IndicatorProfile(centroid), template=tiny_template(rng)
    )


class TestAssignArchetype:
    def test_exact_match(self):
        lib = builtin_template_library()
        some = lib.archetypes[1]
        arch_id, distance = assign_archetype(some.centroid, lib)
        assert arch_id == some.id and distance == 0.0

    def test_one_dimensional_distances(self):
        lib = TemplateLibrary((archetype("low", {"x": 0.0}), archetype("high", {"x": 1.0})))
        arch_id, distance = assign_archetype(IndicatorProfile({"x": 0.2}), lib)
        assert arch_id == "low"
        assert distance == pytest.approx(0.2)

    def test_tie_breaks_lexicographically(self):
        lib = TemplateLibrary((archetype("b", {"x": 0.0}), archetype("a", {"x": 1.0})))
        arch_id, distance = assign_archetype(IndicatorProfile({"x": 0.5}), lib)
        assert arch_id == "a" and distance == pytest.approx(0.5)

    def test_distance_uses_indicator_intersection(self):
        lib = TemplateLibrary((archetype("a", {"x": 0.0, "y": 0.0}),))
        _, distance = assign_archetype(IndicatorProfile({"x": 0.3, "z": 0.9}), lib)
        assert distance == pytest.approx(0.3)  # only x is shared

    def test_empty_library(self):
        with pytest.raises(TemplateError):
            assign_archetype(IndicatorProfile({"x": 0.5}), TemplateLibrary(()))

    def test_zero_overlap(self):
        lib = TemplateLibrary((archetype("a", {"x": 0.0}),))
        with pytest.raises(TemplateError):
            assign_archetype(IndicatorProfile({"y": 0.5}), lib)

    def test_scale_consistency(self):
        # an indicator identical across all centroids never changes the winner
        lib = TemplateLibrary(
            (archetype("a", {"x": 0.1, "y": 0.2}), archetype("b", {"x": 0.9, "y": 0.8}))
        )
        extended = TemplateLibrary(
            (
                archetype("a", {"x": 0.1, "y": 0.2, "common": 0.5}),
                archetype("b", {"x": 0.9, "y": 0.8, "common": 0.5}),
            )
        )
        for profile in ({"x": 0.2, "y": 0.1}, {"x": 0.7, "y": 0.95}, {"x": 0.5, "y": 0.5}):
            base_winner, _ = assign_archetype(IndicatorProfile(profile), lib)
            extended_winner, _ = assign_archetype(
                IndicatorProfile({**profile, "common": 0.9}), extended
            )
            assert base_winner == extended_winner


class TestInstantiateTemplate:
    def test_empty_binding_is_byte_identical_copy(self):
        lib = builtin_template_library()
        arch = lib.archetypes[0]
        out = instantiate_template(arch, IndicatorProfile({"x": 0.5}), {})
        assert save_model(out) == save_model(arch.template)

    def test_bipolar_linear_map(self):
        arch = archetype("a", {"qol_index": 0.0})
        out = instantiate_template(
            arch, IndicatorProfile({"qol_index": 0.75}), {"quality_of_life": "qol_index"}
        )
        assert out.concepts[0].initial == pytest.approx(0.5)

    def test_unipolar_identity_map(self):
        arch = archetype("a", {"qol_index": 0.0}, rng=Range.UNIPOLAR)
        out = instantiate_template(
            arch, IndicatorProfile({"qol_index": 0.75}), {"quality_of_life": "qol_index"}
        )
        assert out.concepts[0].initial == pytest.approx(0.75)

    def test_indicator_half_maps_to_bipolar_zero(self):
        arch = archetype("a", {"i": 0.0})
        out = instantiate_template(
            arch, IndicatorProfile({"i": 0.5}), {"quality_of_life": "i"}
        )
        assert out.concepts[0].initial == 0.0

    def test_unbound_concepts_keep_template_initials(self):
        arch = archetype("a", {"i": 0.0})
        out = instantiate_template(arch, IndicatorProfile({"i": 1.0}), {"quality_of_life": "i"})
        assert out.concepts[1].initial == arch.template.concepts[1].initial

    def test_dangling_bindings(self):
        arch = archetype("a", {"i": 0.0})
        with pytest.raises(TemplateError):
            instantiate_template(arch, IndicatorProfile({"i": 0.5}), {"ghost": "i"})
        with pytest.raises(TemplateError):
            instantiate_template(arch, IndicatorProfile({"i": 0.5}), {"quality_of_life": "missing"})

    def test_template_not_mutated(self):
        lib = builtin_template_library()
        arch = lib.archetypes[0]
        before = save_model(arch.template)
        profile = IndicatorProfile({"qol": 1.0})
        instantiate_template(arch, profile, {"quality_of_life": "qol"})
        assert save_model(arch.template) == before


class TestIndicatorProfile:
    def test_rejects_out_of_range(self):
        with pytest.raises(TemplateError):
            IndicatorProfile({"x": 1.5})

    def test_rejects_empty_id(self):
        with pytest.raises(TemplateError):
            IndicatorProfile({"": 0.5})
