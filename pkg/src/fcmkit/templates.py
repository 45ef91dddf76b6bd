"""Standard socio-economic map template, archetypes and instantiation.

The bundled standard model fixes three elements: quality_of_life is the
single target factor, production is the variable factor expected to differ
by territorial specialization, and crime carries a negative edge into
quality_of_life. Every other concept and weight in the bundled file is an
illustrative default meant to be edited per territory.

Archetypes group territories with similar indicator profiles; assignment
is nearest-centroid over the shared indicators, and instantiation maps
normalized indicator values onto a template's initial activations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from importlib import resources
from typing import Mapping

from .core import Concept, FcmError, FcmModel, Range, require_valid
from .model_io import load_model


class TemplateError(FcmError):
    """Bad indicator data, binding, or archetype library usage."""


@dataclass(frozen=True)
class IndicatorProfile:
    """Normalized indicator values, each in [0, 1]."""

    values: dict

    def __post_init__(self):
        object.__setattr__(self, "values", dict(self.values))
        for key, value in self.values.items():
            if not isinstance(key, str) or not key:
                raise TemplateError("indicator ids must be nonempty text")
            if not 0.0 <= value <= 1.0:
                raise TemplateError(f"indicator {key!r} is {value}, outside [0, 1]")


@dataclass(frozen=True)
class Archetype:
    """A representative territory profile plus the template map it seeds."""

    id: str
    label: str
    centroid: IndicatorProfile
    template: FcmModel

    def __post_init__(self):
        require_valid(self.template)


@dataclass(frozen=True)
class TemplateLibrary:
    archetypes: tuple[Archetype, ...]

    def __post_init__(self):
        object.__setattr__(self, "archetypes", tuple(self.archetypes))
        seen = set()
        for a in self.archetypes:
            if a.id in seen:
                raise TemplateError(f"duplicate archetype id {a.id!r}")
            seen.add(a.id)


def builtin_sed_template() -> FcmModel:
    """The bundled standard socio-economic development map."""
    data = resources.files("fcmkit").joinpath("data/sed_standard.fcm.json").read_bytes()
    return load_model(data)


def _with_weight(model: FcmModel, source: str, target: str, weight: float) -> FcmModel:
    edges = tuple(
        replace(e, weight=weight) if (e.source, e.target) == (source, target) else e
        for e in model.edges
    )
    return replace(model, edges=edges)


# Centroids and weight tweaks are illustrative defaults, not calibrated data.
_ARCHETYPES = (
    ("agrarian", "Agrarian territory", -0.15,
     {"agriculture_share": 0.8, "budget_per_capita": 0.3, "industry_share": 0.15,
      "population": 0.2, "services_share": 0.25}),
    ("industrial", "Industrial territory", -0.45,
     {"agriculture_share": 0.1, "budget_per_capita": 0.6, "industry_share": 0.8,
      "population": 0.55, "services_share": 0.35}),
    ("service_hub", "Service hub", -0.2,
     {"agriculture_share": 0.05, "budget_per_capita": 0.7, "industry_share": 0.3,
      "population": 0.8, "services_share": 0.8}),
)


def builtin_template_library() -> TemplateLibrary:
    """Built-in archetypes; each varies the production->environment load."""
    base = builtin_sed_template()
    archetypes = []
    for arch_id, label, env_weight, centroid in _ARCHETYPES:
        template = _with_weight(base, "production", "environment", env_weight)
        template = replace(template, name=f"{base.name} ({arch_id})")
        archetypes.append(
            Archetype(
                id=arch_id,
                label=label,
                centroid=IndicatorProfile(centroid),
                template=template,
            )
        )
    return TemplateLibrary(tuple(archetypes))


def normalize_indicators(
    raw: Mapping[str, float], bounds: Mapping[str, tuple[float, float]]
) -> IndicatorProfile:
    """Min-max scale raw indicator readings into [0, 1], clipping outliers.

    A degenerate bound (min == max) yields 0.5, meaning "no information".
    """
    values = {}
    for key, value in raw.items():
        if key not in bounds:
            raise TemplateError(f"no bounds given for indicator {key!r}")
        lo, hi = bounds[key]
        if lo > hi:
            raise TemplateError(f"bounds for {key!r} are reversed: min {lo} > max {hi}")
        if lo == hi:
            values[key] = 0.5
        else:
            values[key] = min(max((value - lo) / (hi - lo), 0.0), 1.0)
    return IndicatorProfile(values)


def assign_archetype(profile: IndicatorProfile, library: TemplateLibrary) -> tuple[str, float]:
    """Pick the nearest archetype by RMS distance over shared indicators.

    Distance is Euclidean over the indicator-id intersection, divided by
    the square root of the intersection size; ties go to the
    lexicographically smallest archetype id.
    """
    if not library.archetypes:
        raise TemplateError("archetype library is empty")
    best: tuple[float, str] | None = None
    for arch in sorted(library.archetypes, key=lambda a: a.id):
        shared = [k for k in profile.values if k in arch.centroid.values]
        if not shared:
            raise TemplateError(
                f"profile has no indicators in common with archetype {arch.id!r}"
            )
        sq = sum((profile.values[k] - arch.centroid.values[k]) ** 2 for k in shared)
        distance = math.sqrt(sq / len(shared))
        if best is None or distance < best[0]:
            best = (distance, arch.id)
    return best[1], best[0]


def instantiate_template(
    archetype: Archetype, profile: IndicatorProfile, binding: Mapping[str, str]
) -> FcmModel:
    """Copy the archetype's template with bound initials set from indicators.

    Each bound concept's initial becomes the linear image of the [0, 1]
    indicator value in the model range (2v-1 for bipolar, v for unipolar);
    everything else keeps the template's values.
    """
    template = archetype.template
    if not binding:
        return template
    ids = set(template.concept_ids)
    for cid, indicator in binding.items():
        if cid not in ids:
            raise TemplateError(f"binding references unknown concept {cid!r}")
        if indicator not in profile.values:
            raise TemplateError(f"binding references unknown indicator {indicator!r}")

    def bound_initial(c: Concept) -> Concept:
        if c.id not in binding:
            return c
        v = profile.values[binding[c.id]]
        initial = 2.0 * v - 1.0 if template.range is Range.BIPOLAR else v
        return replace(c, initial=initial)

    model = replace(template, concepts=tuple(bound_initial(c) for c in template.concepts))
    require_valid(model)
    return model
