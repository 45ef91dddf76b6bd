"""Core types and the deterministic simulation engine for fuzzy cognitive maps.

A map is a signed weighted digraph over concepts. Each simulation step
recomputes every unclamped concept as

    x_i(t) = f(k1 * sum_{j != i} w_ji * x_j(t-1) + k2 * x_i(t-1))

where f is the configured threshold function and w_ji is the weight of the
edge j -> i (absent edges contribute nothing). Self-edges are forbidden:
a concept's own history enters only through the k2 term.

Everything here is a pure function over immutable values; independent
simulations are safe to run in parallel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Mapping, Sequence

ConceptId = str

# State vectors are plain tuples aligned with FcmModel.concepts order.
ActivationState = tuple[float, ...]


class FcmError(Exception):
    """Base class for domain errors raised by this package."""


class ModelValidationError(FcmError):
    """A model failed validation; carries the full violation list."""

    def __init__(self, violations: list["Violation"]):
        self.violations = violations
        rules = ", ".join(v.rule for v in violations)
        super().__init__(f"invalid model: {rules}")


class ConfigError(FcmError):
    """A simulation configuration or threshold spec is unusable."""


class ScenarioError(FcmError):
    """A scenario references unknown concepts or out-of-range values."""


class HierarchyError(FcmError):
    """A submodel hierarchy is cyclic or cannot be resolved."""


class Range(str, Enum):
    """Activation interval shared by every concept of a model."""

    BIPOLAR = "bipolar"
    UNIPOLAR = "unipolar"

    @property
    def lo(self) -> float:
        return -1.0 if self is Range.BIPOLAR else 0.0

    @property
    def hi(self) -> float:
        return 1.0

    @property
    def midpoint(self) -> float:
        """Default activation meaning "no information"."""
        return 0.0 if self is Range.BIPOLAR else 0.5

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi


class ConceptKind(str, Enum):
    TARGET = "target"
    VARIABLE = "variable"
    ORDINARY = "ordinary"


class ThresholdKind(str, Enum):
    CLAMP = "clamp"
    TANH = "tanh"
    LOGISTIC = "logistic"
    BIVALENT = "bivalent"
    TRIVALENT = "trivalent"


# Threshold kinds whose image fits each range. Clamp adapts to either range;
# tanh/bivalent/trivalent produce negatives, logistic never does.
_THRESHOLD_RANGES = {
    ThresholdKind.CLAMP: (Range.BIPOLAR, Range.UNIPOLAR),
    ThresholdKind.TANH: (Range.BIPOLAR,),
    ThresholdKind.LOGISTIC: (Range.UNIPOLAR,),
    ThresholdKind.BIVALENT: (Range.BIPOLAR,),
    ThresholdKind.TRIVALENT: (Range.BIPOLAR,),
}


@dataclass(frozen=True)
class ThresholdSpec:
    """Threshold function selection; steepness only affects tanh/logistic."""

    kind: ThresholdKind
    steepness: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ThresholdKind(self.kind))

    def check(self, rng: Range) -> None:
        """Raise ConfigError unless this spec is usable with the range."""
        if self.steepness <= 0:
            raise ConfigError(f"threshold steepness must be > 0, got {self.steepness}")
        if rng not in _THRESHOLD_RANGES[self.kind]:
            raise ConfigError(
                f"threshold kind '{self.kind.value}' is not valid for {rng.value} range"
            )


def apply_threshold(spec: ThresholdSpec, x: float, rng: Range) -> float:
    """Squash a raw update value into the model range.

    Raises ConfigError for an incompatible kind/range combination.
    """
    spec.check(rng)
    kind = spec.kind
    if kind is ThresholdKind.CLAMP:
        return min(max(x, rng.lo), rng.hi)
    if kind is ThresholdKind.TANH:
        return math.tanh(spec.steepness * x)
    if kind is ThresholdKind.LOGISTIC:
        z = spec.steepness * x
        if z >= 0:
            return 1.0 / (1.0 + math.exp(-z))
        e = math.exp(z)
        return e / (1.0 + e)
    if kind is ThresholdKind.BIVALENT:
        return -1.0 if x < 0 else 1.0
    # trivalent: dead zone |x| < 0.5 maps to 0, otherwise the sign
    if abs(x) < 0.5:
        return 0.0
    return -1.0 if x < 0 else 1.0


@dataclass(frozen=True)
class Submodel:
    """A nested map refining one concept; `target` names the concept whose
    settled value feeds the parent."""

    model: "FcmModel"
    target: ConceptId


@dataclass(frozen=True)
class Concept:
    id: ConceptId
    label: str = ""
    kind: ConceptKind = ConceptKind.ORDINARY
    initial: float | None = None  # None resolves to the range midpoint
    submodel: Submodel | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ConceptKind(self.kind))
        if self.initial is not None:
            object.__setattr__(self, "initial", float(self.initial))

    @property
    def display_label(self) -> str:
        return self.label or self.id


@dataclass(frozen=True)
class Edge:
    source: ConceptId
    target: ConceptId
    weight: float

    def __post_init__(self):
        object.__setattr__(self, "weight", float(self.weight))


@dataclass(frozen=True)
class FcmModel:
    name: str
    concepts: tuple[Concept, ...]
    edges: tuple[Edge, ...] = ()
    range: Range = Range.BIPOLAR
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "concepts", tuple(self.concepts))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "range", Range(self.range))
        object.__setattr__(self, "metadata", dict(self.metadata))

    @property
    def n(self) -> int:
        return len(self.concepts)

    @property
    def concept_ids(self) -> tuple[ConceptId, ...]:
        return tuple(c.id for c in self.concepts)

    def index_of(self, cid: ConceptId) -> int:
        for i, c in enumerate(self.concepts):
            if c.id == cid:
                return i
        raise KeyError(cid)

    def initial_state(self) -> ActivationState:
        mid = self.range.midpoint
        return tuple(mid if c.initial is None else c.initial for c in self.concepts)


@dataclass(frozen=True)
class Violation:
    """One broken validation rule, with the offending id or pair."""

    rule: str
    subject: str
    message: str


def _check_concept_id(cid: object, subject: str, out: list[Violation]) -> None:
    if not isinstance(cid, str) or not cid:
        out.append(Violation("bad-concept-id", subject, "concept id must be nonempty text"))
    elif any(ch.isspace() for ch in cid):
        out.append(Violation("bad-concept-id", subject, f"concept id {cid!r} contains whitespace"))


def validate_model(model: FcmModel) -> list[Violation]:
    """Check every structural invariant; an empty list means the model is ok."""
    return _validate(model, frozenset())


def _validate(model: FcmModel, ancestry: frozenset[int]) -> list[Violation]:
    out: list[Violation] = []
    if model.n < 1:
        out.append(Violation("empty-model", model.name, "model must have at least one concept"))
    ancestry = ancestry | {id(model)}

    seen: set[ConceptId] = set()
    for c in model.concepts:
        _check_concept_id(c.id, c.id if isinstance(c.id, str) else "?", out)
        if c.id in seen:
            out.append(Violation("duplicate-concept-id", c.id, f"concept id {c.id!r} repeats"))
        seen.add(c.id)
        if c.initial is not None and not model.range.contains(c.initial):
            out.append(
                Violation(
                    "initial-out-of-range",
                    c.id,
                    f"initial {c.initial} outside {model.range.value} range",
                )
            )
        if c.submodel is not None:
            sub = c.submodel
            if id(sub.model) in ancestry:
                out.append(
                    Violation(
                        "cyclic-hierarchy",
                        c.id,
                        f"submodel of {c.id!r} transitively contains its parent",
                    )
                )
                continue
            sub_ids = {sc.id: sc for sc in sub.model.concepts}
            if sub.target not in sub_ids:
                out.append(
                    Violation(
                        "submodel-target-missing",
                        c.id,
                        f"submodel target {sub.target!r} not among submodel concepts",
                    )
                )
            elif sub_ids[sub.target].kind is not ConceptKind.TARGET:
                out.append(
                    Violation(
                        "submodel-target-kind",
                        c.id,
                        f"submodel target {sub.target!r} must have kind=target",
                    )
                )
            for v in _validate(sub.model, ancestry):
                out.append(Violation(v.rule, f"{c.id}/{v.subject}", f"in submodel of {c.id!r}: {v.message}"))

    seen_pairs: set[tuple[ConceptId, ConceptId]] = set()
    for e in model.edges:
        pair = (e.source, e.target)
        subject = f"{e.source}->{e.target}"
        if e.source not in seen or e.target not in seen:
            out.append(Violation("dangling-edge", subject, "edge endpoint is not a concept id"))
        if e.source == e.target:
            out.append(Violation("self-edge", subject, "self-edge forbidden; self-influence is the k2 term"))
        if not -1.0 <= e.weight <= 1.0:
            out.append(Violation("weight-out-of-range", subject, f"weight {e.weight} outside [-1, 1]"))
        if pair in seen_pairs:
            out.append(Violation("duplicate-edge", subject, "at most one edge per (source, target) pair"))
        seen_pairs.add(pair)
    return out


def require_valid(model: FcmModel) -> None:
    violations = validate_model(model)
    if violations:
        raise ModelValidationError(violations)


@dataclass(frozen=True)
class SimulationConfig:
    """Update-rule coefficients plus stopping/recurrence parameters."""

    threshold: ThresholdSpec
    k1: float = 1.0
    k2: float = 1.0
    epsilon: float = 1e-4
    max_iters: int = 200
    cycle_window: int = 50
    quantization: float = 1e-9

    def check(self, rng: Range) -> None:
        if self.k1 < 0 or self.k2 < 0:
            raise ConfigError(f"k1 and k2 must be >= 0, got k1={self.k1}, k2={self.k2}")
        if self.epsilon <= 0:
            raise ConfigError(f"epsilon must be > 0, got {self.epsilon}")
        if self.max_iters < 1:
            raise ConfigError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.cycle_window < 2:
            raise ConfigError(f"cycle_window must be >= 2, got {self.cycle_window}")
        if self.quantization <= 0:
            raise ConfigError(f"quantization must be > 0, got {self.quantization}")
        self.threshold.check(rng)


def default_config(rng: Range = Range.BIPOLAR) -> SimulationConfig:
    """Common defaults: k1=k2=1, tanh for bipolar / logistic for unipolar."""
    kind = ThresholdKind.TANH if rng is Range.BIPOLAR else ThresholdKind.LOGISTIC
    return SimulationConfig(threshold=ThresholdSpec(kind, 1.0))


@dataclass(frozen=True)
class Scenario:
    """A what-if intervention: values held fixed for the whole run (clamps)
    plus one-off replacements of initial values."""

    name: str = ""
    clamps: dict = field(default_factory=dict)
    initial_overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "clamps", dict(self.clamps))
        object.__setattr__(self, "initial_overrides", dict(self.initial_overrides))


NEUTRAL_SCENARIO = Scenario(name="baseline")


def check_scenario(model: FcmModel, scenario: Scenario) -> None:
    """Raise ScenarioError on unknown ids or out-of-range values."""
    ids = set(model.concept_ids)
    for label, mapping in (("clamp", scenario.clamps), ("initial override", scenario.initial_overrides)):
        for cid, value in mapping.items():
            if cid not in ids:
                raise ScenarioError(f"{label} references unknown concept {cid!r}")
            if not model.range.contains(value):
                raise ScenarioError(
                    f"{label} for {cid!r} is {value}, outside {model.range.value} range"
                )


class OutcomeKind(str, Enum):
    FIXED_POINT = "FixedPoint"
    LIMIT_CYCLE = "LimitCycle"
    MAX_ITERS = "MaxItersReached"


@dataclass(frozen=True)
class Outcome:
    kind: OutcomeKind
    period: int | None = None  # set only for limit cycles

    @property
    def label(self) -> str:
        if self.kind is OutcomeKind.LIMIT_CYCLE:
            return f"{self.kind.value}:{self.period}"
        return self.kind.value


@dataclass(frozen=True)
class SimulationResult:
    trajectory: tuple[ActivationState, ...]
    outcome: Outcome
    iterations: int

    @property
    def final(self) -> ActivationState:
        return self.trajectory[-1]


def _compile_incoming(model: FcmModel) -> list[list[tuple[int, float]]]:
    """Per-target list of (source index, weight), preserving edge order."""
    index = {c.id: i for i, c in enumerate(model.concepts)}
    incoming: list[list[tuple[int, float]]] = [[] for _ in model.concepts]
    for e in model.edges:
        incoming[index[e.target]].append((index[e.source], e.weight))
    return incoming


def step(
    model: FcmModel,
    state: Sequence[float],
    config: SimulationConfig,
    clamps: Mapping[ConceptId, float] | None = None,
) -> ActivationState:
    """Advance the state by one application of the update rule.

    Clamped concepts take their clamp value verbatim; the computed update is
    not even evaluated for them.
    """
    if len(state) != model.n:
        raise ValueError(f"state has {len(state)} entries, model has {model.n} concepts")
    incoming = _compile_incoming(model)
    clamp_by_index = {}
    if clamps:
        index = {c.id: i for i, c in enumerate(model.concepts)}
        clamp_by_index = {index[cid]: v for cid, v in clamps.items() if cid in index}
    return _step_compiled(state, config, model.range, incoming, clamp_by_index)


def _step_compiled(
    state: Sequence[float],
    config: SimulationConfig,
    rng: Range,
    incoming: list[list[tuple[int, float]]],
    clamp_by_index: Mapping[int, float],
) -> ActivationState:
    k1, k2, threshold = config.k1, config.k2, config.threshold
    out = []
    for i, inputs in enumerate(incoming):
        if i in clamp_by_index:
            out.append(clamp_by_index[i])
            continue
        acc = 0.0
        for j, w in inputs:
            acc += state[j] * w
        out.append(apply_threshold(threshold, k1 * acc + k2 * state[i], rng))
    return tuple(out)


def _quantize(state: ActivationState, q: float) -> tuple[int, ...]:
    return tuple(round(v / q) for v in state)


def simulate(
    model: FcmModel,
    config: SimulationConfig,
    scenario: Scenario | None = None,
) -> SimulationResult:
    """Run the map from its resolved initial state until it settles.

    Stopping rules, checked in order after every step: fixed point
    (max-norm change <= epsilon), then recurrence of the quantized state
    within `cycle_window` steps (minimal period >= 2), then the iteration
    budget. Both classifications are confirmed forward before they are
    reported: a fixed point must also move <= epsilon on the step out of
    the final state, and a cycle must actually return to the final state
    after its period with no shorter return. Candidates that fail the
    confirmation (possible when the map locally expands faster than the
    tolerance) just keep iterating.
    """
    require_valid(model)
    config.check(model.range)
    scenario = scenario or NEUTRAL_SCENARIO
    check_scenario(model, scenario)

    index = {c.id: i for i, c in enumerate(model.concepts)}
    clamp_by_index = {index[cid]: v for cid, v in scenario.clamps.items()}

    state0 = list(model.initial_state())
    for cid, v in scenario.initial_overrides.items():
        state0[index[cid]] = v
    for i, v in clamp_by_index.items():
        state0[i] = v

    incoming = _compile_incoming(model)
    q = config.quantization
    states: list[ActivationState] = [tuple(state0)]
    quantized: list[tuple[int, ...]] = [_quantize(states[0], q)]

    def advance(state: ActivationState) -> ActivationState:
        return _step_compiled(state, config, model.range, incoming, clamp_by_index)

    def cycle_confirmed(period: int) -> bool:
        # walk the claimed orbit: it must come back after `period` steps
        # and not any earlier (p >= 2; p == 1 is the fixed-point rule's job)
        here = quantized[-1]
        state = states[-1]
        for k in range(1, period + 1):
            state = advance(state)
            if _quantize(state, q) == here:
                return k == period
        return False

    for t in range(1, config.max_iters + 1):
        new = advance(states[-1])
        delta = max(abs(a - b) for a, b in zip(new, states[-1]))
        states.append(new)
        quantized.append(_quantize(new, q))
        if delta <= config.epsilon:
            ahead = advance(new)
            if max(abs(a - b) for a, b in zip(ahead, new)) <= config.epsilon:
                return SimulationResult(tuple(states), Outcome(OutcomeKind.FIXED_POINT), t)
        for p in range(2, min(t, config.cycle_window) + 1):
            if quantized[t] == quantized[t - p]:
                if cycle_confirmed(p):
                    return SimulationResult(
                        tuple(states), Outcome(OutcomeKind.LIMIT_CYCLE, period=p), t
                    )
                break  # spurious recurrence; keep iterating
    return SimulationResult(tuple(states), Outcome(OutcomeKind.MAX_ITERS), config.max_iters)


def flatten_hierarchy(model: FcmModel, config: SimulationConfig) -> FcmModel:
    """Resolve nested submodels bottom-up into plain initial values.

    Each submodel is simulated to completion with the same config; its
    target concept's final value becomes the parent concept's initial.
    Raises HierarchyError on cyclic nesting or a submodel that fails to
    settle within the iteration budget.
    """
    _check_acyclic(model, frozenset())
    require_valid(model)
    flat = _flatten(model, config)
    require_valid(flat)
    return flat


def _check_acyclic(model: FcmModel, stack: frozenset[int]) -> None:
    if id(model) in stack:
        raise HierarchyError(f"cyclic hierarchy through model {model.name!r}")
    stack = stack | {id(model)}
    for c in model.concepts:
        if c.submodel is not None:
            _check_acyclic(c.submodel.model, stack)


def _flatten(model: FcmModel, config: SimulationConfig) -> FcmModel:
    if all(c.submodel is None for c in model.concepts):
        return model
    concepts = []
    for c in model.concepts:
        if c.submodel is None:
            concepts.append(c)
            continue
        sub_flat = _flatten(c.submodel.model, config)
        result = simulate(sub_flat, config)
        if result.outcome.kind is OutcomeKind.MAX_ITERS:
            raise HierarchyError(
                f"submodel of concept {c.id!r} did not settle within "
                f"{config.max_iters} iterations; hierarchy unresolved"
            )
        value = result.final[sub_flat.index_of(c.submodel.target)]
        concepts.append(replace(c, initial=value, submodel=None))
    return replace(model, concepts=tuple(concepts))
