"""Fuzzy-cognitive-map modeling engine and scenario workbench."""

from .core import (
    ActivationState,
    Concept,
    ConceptId,
    ConceptKind,
    ConfigError,
    Edge,
    FcmError,
    FcmModel,
    HierarchyError,
    ModelValidationError,
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
    Violation,
    apply_threshold,
    default_config,
    flatten_hierarchy,
    simulate,
    step,
    validate_model,
)
from .analysis import (
    EditKind,
    EditSuggestion,
    InfluenceMatrix,
    InfluenceReport,
    StabilityReport,
    influence_report,
    spectral_radius,
    stability_report,
    structural_search,
    transitive_closure,
)
from .model_io import (
    DocumentError,
    export_trajectory,
    load_indicators,
    load_model,
    load_scenario,
    save_model,
)
from .templates import (
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

__version__ = "0.1.0"

__all__ = [
    "ActivationState",
    "Archetype",
    "Concept",
    "ConceptId",
    "ConceptKind",
    "ConfigError",
    "DocumentError",
    "Edge",
    "EditKind",
    "EditSuggestion",
    "FcmError",
    "FcmModel",
    "HierarchyError",
    "IndicatorProfile",
    "InfluenceMatrix",
    "InfluenceReport",
    "ModelValidationError",
    "Outcome",
    "OutcomeKind",
    "Range",
    "Scenario",
    "ScenarioError",
    "SimulationConfig",
    "SimulationResult",
    "StabilityReport",
    "Submodel",
    "TemplateError",
    "TemplateLibrary",
    "ThresholdKind",
    "ThresholdSpec",
    "Violation",
    "apply_threshold",
    "assign_archetype",
    "builtin_sed_template",
    "builtin_template_library",
    "default_config",
    "export_trajectory",
    "flatten_hierarchy",
    "influence_report",
    "instantiate_template",
    "load_indicators",
    "load_model",
    "load_scenario",
    "normalize_indicators",
    "save_model",
    "simulate",
    "spectral_radius",
    "stability_report",
    "step",
    "structural_search",
    "transitive_closure",
    "validate_model",
]
