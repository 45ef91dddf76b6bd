"""Static map analysis: accumulated influence, stability sampling, edit search.

Influence is accumulated over walks with a doubled channel: positive and
negative evidence propagate separately, composing by max of products of
edge magnitudes. A walk's channel is the parity of negative edges on it,
so indirect pressure through two inhibiting links counts as positive.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import (
    Edge,
    FcmError,
    FcmModel,
    OutcomeKind,
    Scenario,
    SimulationConfig,
    require_valid,
    simulate,
)


@dataclass(frozen=True)
class InfluenceMatrix:
    """Accumulated influence split into channels, indexed [source][target].

    `positive[i][j]` is the strongest even-parity walk product from concept
    i to concept j, `negative[i][j]` the strongest odd-parity one; both lie
    in [0, 1]. Walks of length >= 1 only, so the diagonal starts at zero.
    """

    positive: np.ndarray
    negative: np.ndarray

    def __post_init__(self):
        self.positive.flags.writeable = False
        self.negative.flags.writeable = False


@dataclass(frozen=True)
class InfluenceReport:
    """Pairwise signed influence with agreement measures.

    `signed` carries the dominant channel's magnitude with its sign (zero
    when the channels tie, including the no-evidence case). `consonance`
    is |P-N|/(P+N) where evidence exists and 0 where none does, so "no
    evidence" reads as fully dissonant, not as agreement.
    """

    signed: np.ndarray
    consonance: np.ndarray
    dissonance: np.ndarray

    def __post_init__(self):
        for a in (self.signed, self.consonance, self.dissonance):
            a.flags.writeable = False


def adjacency_matrix(model: FcmModel) -> np.ndarray:
    """Dense signed weights, entry [i][j] = weight of the edge i -> j."""
    n = model.n
    index = {c.id: i for i, c in enumerate(model.concepts)}
    m = np.zeros((n, n))
    for e in model.edges:
        m[index[e.source], index[e.target]] = e.weight
    return m


def _max_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # c[i][j] = max_k a[i][k] * b[k][j]
    return (a[:, :, None] * b[None, :, :]).max(axis=1)


def transitive_closure(model: FcmModel) -> InfluenceMatrix:
    """Least fixpoint of doubled-channel max-product composition.

    Starts from the direct edges and composes until unchanged. Entries are
    non-decreasing and bounded by 1, and every value is a finite product of
    edge magnitudes, so the iteration terminates.
    """
    require_valid(model)
    m = adjacency_matrix(model)
    pos = np.maximum(m, 0.0)
    neg = np.maximum(-m, 0.0)
    while True:
        new_pos = np.maximum(pos, np.maximum(_max_product(pos, pos), _max_product(neg, neg)))
        new_neg = np.maximum(neg, np.maximum(_max_product(pos, neg), _max_product(neg, pos)))
        if np.array_equal(new_pos, pos) and np.array_equal(new_neg, neg):
            return InfluenceMatrix(positive=pos, negative=neg)
        pos, neg = new_pos, new_neg


def influence_report(matrix: InfluenceMatrix) -> InfluenceReport:
    """Collapse the two channels into signed influence plus consonance."""
    pos, neg = matrix.positive, matrix.negative
    signed = np.where(pos > neg, pos, np.where(neg > pos, -neg, 0.0))
    total = pos + neg
    safe_total = np.where(total > 0, total, 1.0)
    consonance = np.where(total > 0, np.abs(pos - neg) / safe_total, 0.0)
    return InfluenceReport(
        signed=signed, consonance=consonance, dissonance=1.0 - consonance
    )


def spectral_radius(matrix: np.ndarray, tol: float = 1e-9, max_iters: int = 10_000) -> float:
    """Norm-growth power iteration estimate of the largest |eigenvalue|.

    The growth ratio converges for a dominant real eigenvalue and is exact
    for norm-preserving maps; for rotating (complex-pair) dynamics it may
    keep oscillating, in which case the last estimate is returned. Treat
    the result as a heuristic, not a verdict.
    """
    n = matrix.shape[0]
    if n == 0:
        return 0.0
    v = np.random.default_rng(0).uniform(-1.0, 1.0, n)
    v /= np.linalg.norm(v)
    ratio = 0.0
    prev = None
    for _ in range(max_iters):
        w = matrix @ v
        ratio = float(np.linalg.norm(w))
        if ratio == 0.0:
            return 0.0
        v = w / ratio
        if prev is not None and abs(ratio - prev) <= tol:
            return ratio
        prev = ratio
    return ratio


@dataclass(frozen=True)
class StabilityReport:
    """Outcome tally over sampled starts plus a linear-part heuristic."""

    samples: int
    fixed_point_fraction: float
    cycle_periods: dict  # period -> count, keys sorted ascending
    non_converged: int
    spectral_radius_heuristic: float


def _sample_states(model: FcmModel, samples: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(model.range.lo, model.range.hi, size=(samples, model.n))


def _tally_outcomes(
    model: FcmModel,
    config: SimulationConfig,
    states: np.ndarray,
    workers: int,
) -> tuple[int, dict, int]:
    ids = model.concept_ids

    def run_one(row: np.ndarray):
        scenario = Scenario(initial_overrides={cid: float(v) for cid, v in zip(ids, row)})
        return simulate(model, config, scenario).outcome

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run_one, states))
    else:
        outcomes = [run_one(row) for row in states]

    fixed = 0
    cycles: dict[int, int] = {}
    non_converged = 0
    for outcome in outcomes:
        if outcome.kind is OutcomeKind.FIXED_POINT:
            fixed += 1
        elif outcome.kind is OutcomeKind.LIMIT_CYCLE:
            cycles[outcome.period] = cycles.get(outcome.period, 0) + 1
        else:
            non_converged += 1
    return fixed, {p: cycles[p] for p in sorted(cycles)}, non_converged


def stability_report(
    model: FcmModel,
    config: SimulationConfig,
    samples: int,
    seed: int,
    workers: int = 1,
) -> StabilityReport:
    """Simulate from `samples` seeded uniform starts and tally the outcomes.

    The starts are drawn without clamps, uniformly over the model range.
    The same seed always yields the same report, regardless of `workers`.
    """
    require_valid(model)
    config.check(model.range)
    if samples < 1:
        raise FcmError(f"samples must be >= 1, got {samples}")
    states = _sample_states(model, samples, seed)
    fixed, cycles, non_converged = _tally_outcomes(model, config, states, workers)
    radius = spectral_radius(config.k1 * adjacency_matrix(model))
    return StabilityReport(
        samples=samples,
        fixed_point_fraction=fixed / samples,
        cycle_periods=cycles,
        non_converged=non_converged,
        spectral_radius_heuristic=radius,
    )


def stability_to_document(report: StabilityReport) -> dict:
    """Report as a JSON-ready dict with deterministic key order."""
    return {
        "samples": report.samples,
        "fixed_point_fraction": report.fixed_point_fraction,
        "cycle_periods": {str(p): c for p, c in report.cycle_periods.items()},
        "non_converged": report.non_converged,
        "spectral_radius_heuristic": report.spectral_radius_heuristic,
    }


def influence_to_document(concept_ids: tuple[str, ...], report: InfluenceReport) -> dict:
    return {
        "concepts": list(concept_ids),
        "signed": report.signed.tolist(),
        "consonance": report.consonance.tolist(),
        "dissonance": report.dissonance.tolist(),
    }


class EditKind(str, Enum):
    REMOVE_EDGE = "remove_edge"
    FLIP_SIGN = "flip_sign"
    SET_WEIGHT = "set_weight"


WEIGHT_GRID = (-1.0, -0.75, -0.5, -0.25, 0.25, 0.5, 0.75, 1.0)


@dataclass(frozen=True)
class EditSuggestion:
    edit: EditKind
    edge: tuple[str, str]
    value: float | None  # set_weight target, None for the other kinds
    resulting_fixed_point_fraction: float


def _apply_edit(model: FcmModel, edge: Edge, kind: EditKind, value: float | None) -> FcmModel:
    edges = []
    for e in model.edges:
        if (e.source, e.target) != (edge.source, edge.target):
            edges.append(e)
        elif kind is EditKind.REMOVE_EDGE:
            continue
        elif kind is EditKind.FLIP_SIGN:
            edges.append(Edge(e.source, e.target, -e.weight))
        else:
            edges.append(Edge(e.source, e.target, value))
    return FcmModel(
        name=model.name,
        concepts=model.concepts,
        edges=tuple(edges),
        range=model.range,
        metadata=model.metadata,
    )


def _edit_magnitude(edge: Edge, kind: EditKind, value: float | None) -> float:
    if kind is EditKind.REMOVE_EDGE:
        return abs(edge.weight)
    if kind is EditKind.FLIP_SIGN:
        return 2.0 * abs(edge.weight)
    return abs(value - edge.weight)


_KIND_ORDER = {EditKind.REMOVE_EDGE: 0, EditKind.FLIP_SIGN: 1, EditKind.SET_WEIGHT: 2}


def structural_search(
    model: FcmModel,
    config: SimulationConfig,
    samples: int,
    seed: int,
    top_k: int,
    workers: int = 1,
) -> list[EditSuggestion]:
    """Exhaustively score single-edge edits by resulting stability.

    Every existing edge is tried with removal, sign flip, and reweighting
    over the quarter-step grid; each edited model is sampled with the same
    seed so scores are comparable. Results come back sorted by descending
    fixed-point fraction, ties broken by smaller weight change, then by
    edge order, then by a fixed edit-kind order so the listing is total.
    """
    require_valid(model)
    config.check(model.range)
    if not model.edges:
        raise FcmError("structural search needs at least one edge (empty edge set)")
    if top_k < 1:
        raise FcmError(f"top_k must be >= 1, got {top_k}")

    jobs: list[tuple[Edge, EditKind, float | None]] = []
    for edge in model.edges:
        jobs.append((edge, EditKind.REMOVE_EDGE, None))
        jobs.append((edge, EditKind.FLIP_SIGN, None))
        for value in WEIGHT_GRID:
            jobs.append((edge, EditKind.SET_WEIGHT, value))

    states = _sample_states(model, samples, seed)

    def score(job: tuple[Edge, EditKind, float | None]) -> float:
        edge, kind, value = job
        edited = _apply_edit(model, edge, kind, value)
        fixed, _, _ = _tally_outcomes(edited, config, states, workers=1)
        return fixed / samples

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            fractions = list(pool.map(score, jobs))
    else:
        fractions = [score(job) for job in jobs]

    suggestions = [
        (
            EditSuggestion(
                edit=kind,
                edge=(edge.source, edge.target),
                value=value,
                resulting_fixed_point_fraction=fraction,
            ),
            _edit_magnitude(edge, kind, value),
        )
        for (edge, kind, value), fraction in zip(jobs, fractions)
    ]
    suggestions.sort(
        key=lambda item: (
            -item[0].resulting_fixed_point_fraction,
            item[1],
            item[0].edge,
            _KIND_ORDER[item[0].edit],
            item[0].value if item[0].value is not None else 0.0,
        )
    )
    return [s for s, _ in suggestions[:top_k]]


def suggestions_to_document(suggestions: list[EditSuggestion]) -> dict:
    return {
        "suggestions": [
            {
                "edit": s.edit.value,
                "edge": list(s.edge),
                "value": s.value,
                "resulting_fixed_point_fraction": s.resulting_fixed_point_fraction,
            }
            for s in suggestions
        ]
    }
