// Workbench state and the pure transitions over it.
//
// Draft edits (weights, initials, added/removed edges) live apart from the
// saved document and never touch the stored version until an explicit save
// creates a new version via If-Match. A failed save leaves the state object
// untouched, so drafts survive conflicts by construction. Clamp changes
// only affect the next run request that is built.

import type {
  ConfigDoc,
  EdgeDoc,
  ModelDocument,
  RangeKind,
  RunRecord,
  RunRequest,
} from './types.js';

export interface DraftEdits {
  weights: Record<string, number>; // edgeKey -> new weight
  initials: Record<string, number>; // concept id -> new initial
  addedEdges: EdgeDoc[];
  removedEdges: string[]; // edgeKeys
}

export interface WorkbenchState {
  modelId: string | null;
  version: number | null;
  document: ModelDocument | null;
  draft: DraftEdits;
  clamps: Record<string, number>;
  runs: RunRecord[];
  latestRun: RunRecord | null;
  compareA: string | null;
  compareB: string | null;
}

const emptyDraft = (): DraftEdits => ({
  weights: {},
  initials: {},
  addedEdges: [],
  removedEdges: [],
});

export function initialState(): WorkbenchState {
  return {
    modelId: null,
    version: null,
    document: null,
    draft: emptyDraft(),
    clamps: {},
    runs: [],
    latestRun: null,
    compareA: null,
    compareB: null,
  };
}

export function edgeKey(source: string, target: string): string {
  return `${source}->${target}`;
}

export function withModel(
  state: WorkbenchState,
  modelId: string,
  version: number,
  document: ModelDocument,
): WorkbenchState {
  const sameModel = state.modelId === modelId;
  return {
    ...state,
    modelId,
    version,
    document,
    draft: emptyDraft(),
    clamps: sameModel ? state.clamps : {},
    runs: sameModel ? state.runs : [],
    latestRun: sameModel ? state.latestRun : null,
    compareA: sameModel ? state.compareA : null,
    compareB: sameModel ? state.compareB : null,
  };
}

export function setDraftWeight(
  state: WorkbenchState,
  source: string,
  target: string,
  weight: number,
): WorkbenchState {
  return {
    ...state,
    draft: { ...state.draft, weights: { ...state.draft.weights, [edgeKey(source, target)]: weight } },
  };
}

export function setDraftInitial(
  state: WorkbenchState,
  conceptId: string,
  initial: number,
): WorkbenchState {
  return {
    ...state,
    draft: { ...state.draft, initials: { ...state.draft.initials, [conceptId]: initial } },
  };
}

export function addDraftEdge(state: WorkbenchState, edge: EdgeDoc): WorkbenchState {
  const key = edgeKey(edge.source, edge.target);
  const inDocument =
    state.document?.edges.some((e) => edgeKey(e.source, e.target) === key) ?? false;
  const removed = state.draft.removedEdges.includes(key);
  if (inDocument && !removed) {
    // the pair already exists: adding it again is a weight change
    return setDraftWeight(state, edge.source, edge.target, edge.weight);
  }
  return {
    ...state,
    draft: {
      ...state.draft,
      addedEdges: [
        ...state.draft.addedEdges.filter((e) => edgeKey(e.source, e.target) !== key),
        edge,
      ],
    },
  };
}

export function removeDraftEdge(state: WorkbenchState, source: string, target: string): WorkbenchState {
  const key = edgeKey(source, target);
  const weights = { ...state.draft.weights };
  delete weights[key];
  return {
    ...state,
    draft: {
      ...state.draft,
      weights,
      addedEdges: state.draft.addedEdges.filter((e) => edgeKey(e.source, e.target) !== key),
      removedEdges: state.draft.removedEdges.includes(key)
        ? state.draft.removedEdges
        : [...state.draft.removedEdges, key],
    },
  };
}

export function hasDraft(state: WorkbenchState): boolean {
  const { weights, initials, addedEdges, removedEdges } = state.draft;
  return (
    Object.keys(weights).length > 0 ||
    Object.keys(initials).length > 0 ||
    addedEdges.length > 0 ||
    removedEdges.length > 0
  );
}

/** The saved document with all draft edits applied; what a save submits. */
export function draftDocument(state: WorkbenchState): ModelDocument {
  if (!state.document) throw new Error('no model loaded');
  const doc = state.document;
  const removed = new Set(state.draft.removedEdges);
  const edges = doc.edges
    .filter((e) => !removed.has(edgeKey(e.source, e.target)))
    .map((e) => {
      const weight = state.draft.weights[edgeKey(e.source, e.target)];
      return weight === undefined ? { ...e } : { ...e, weight };
    });
  for (const extra of state.draft.addedEdges) {
    edges.push({ ...extra });
  }
  const concepts = doc.concepts.map((c) => {
    const initial = state.draft.initials[c.id];
    return initial === undefined ? { ...c } : { ...c, initial };
  });
  return { ...doc, concepts, edges };
}

/** After a successful save: the draft becomes the document at the new version. */
export function applySaved(state: WorkbenchState, version: number): WorkbenchState {
  return { ...state, version, document: draftDocument(state), draft: emptyDraft() };
}

export function setClamp(state: WorkbenchState, conceptId: string, value: number): WorkbenchState {
  return { ...state, clamps: { ...state.clamps, [conceptId]: value } };
}

export function clearClamp(state: WorkbenchState, conceptId: string): WorkbenchState {
  const clamps = { ...state.clamps };
  delete clamps[conceptId];
  return { ...state, clamps };
}

/** Request body for the next run; clamp edits affect only requests built
 * after them. */
export function buildRunRequest(state: WorkbenchState, config?: ConfigDoc): RunRequest {
  const request: RunRequest = { scenario: { clamps: { ...state.clamps } } };
  if (config && Object.keys(config).length > 0) request.config = config;
  return request;
}

export function recordRun(state: WorkbenchState, run: RunRecord): WorkbenchState {
  return { ...state, runs: [...state.runs, run], latestRun: run };
}

/** Clamp slider bounds follow the model range. */
export function sliderBounds(range: RangeKind): { min: number; max: number; step: number } {
  return { min: range === 'bipolar' ? -1 : 0, max: 1, step: 0.01 };
}
