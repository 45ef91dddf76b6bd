// Wire types mirroring the scenario service's canonical document formats.
// The workbench never computes dynamics itself: every number it renders
// comes from one of these payloads.

export type RangeKind = 'bipolar' | 'unipolar';
export type ConceptKind = 'target' | 'variable' | 'ordinary';
export type ThresholdKind = 'clamp' | 'tanh' | 'logistic' | 'bivalent' | 'trivalent';

export interface SubmodelDoc {
  target: string;
  model: ModelBody;
}

export interface ConceptDoc {
  id: string;
  label?: string;
  kind?: ConceptKind; // omitted means ordinary
  initial?: number; // omitted means the range midpoint
  submodel?: SubmodelDoc;
}

export interface EdgeDoc {
  source: string;
  target: string;
  weight: number;
}

export interface ModelBody {
  name: string;
  range: RangeKind;
  concepts: ConceptDoc[];
  edges: EdgeDoc[];
  metadata: Record<string, unknown>;
}

export interface ModelDocument extends ModelBody {
  format_version: 1;
}

export interface ModelResponse {
  model_id: string;
  version: number;
  created_at: string;
  updated_at: string;
  document: ModelDocument;
}

export interface CreatedModel {
  model_id: string;
  version: number;
}

export interface ThresholdDoc {
  kind: ThresholdKind;
  steepness?: number;
}

export interface ConfigDoc {
  k1?: number;
  k2?: number;
  threshold?: ThresholdDoc;
  epsilon?: number;
  max_iters?: number;
  cycle_window?: number;
  quantization?: number;
}

export interface ScenarioDoc {
  name?: string;
  clamps?: Record<string, number>;
  initial_overrides?: Record<string, number>;
}

export interface RunRequest {
  config?: ConfigDoc;
  scenario?: ScenarioDoc;
}

export interface OutcomeDoc {
  kind: 'FixedPoint' | 'LimitCycle' | 'MaxItersReached';
  period?: number;
}

export interface ResultDoc {
  outcome: OutcomeDoc;
  iterations: number;
  final: number[];
  trajectory: number[][];
}

export interface RunRecord {
  run_id: string;
  model_id: string;
  version: number;
  config: Required<Omit<ConfigDoc, 'threshold'>> & { threshold: Required<ThresholdDoc> };
  scenario: Required<ScenarioDoc>;
  seed: number | null;
  result: ResultDoc;
  concepts: string[];
  created_at: string;
}

export interface CompareRow {
  id: string;
  kind: ConceptKind;
  final_a: number;
  final_b: number;
  delta: number;
}

export interface CompareRecord {
  run_a: string;
  run_b: string;
  model_id: string;
  version: number;
  outcome_a: OutcomeDoc;
  outcome_b: OutcomeDoc;
  concepts: CompareRow[];
}

export interface AnalysisRecord {
  analysis_id: string;
  model_id: string;
  version: number;
  kind: 'closure' | 'stability' | 'structural_search';
  params: Record<string, number>;
  result: unknown;
  created_at: string;
}

export interface ArchetypeDoc {
  id: string;
  label: string;
  centroid: Record<string, number>;
  template: ModelDocument;
}

export interface TemplatesResponse {
  archetypes: ArchetypeDoc[];
}
