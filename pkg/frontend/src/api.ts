// Thin typed client for the scenario service HTTP API. The fetch function
// is injectable so tests can intercept requests and assert on payloads.

import type {
  AnalysisRecord,
  CompareRecord,
  CreatedModel,
  ModelDocument,
  ModelResponse,
  RunRecord,
  RunRequest,
  TemplatesResponse,
} from './types.js';

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
    readonly rules: string[] = [],
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ScenarioServiceClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async requestText(
    method: string,
    path: string,
    body?: unknown,
    headers: Record<string, string> = {},
  ): Promise<string> {
    const init: RequestInit = { method, headers };
    if (body !== undefined) {
      init.headers = { 'Content-Type': 'application/json', ...headers };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.baseUrl + path, init);
    const text = await response.text();
    if (!response.ok) {
      let message = `${response.status} on ${method} ${path}`;
      let rules: string[] = [];
      try {
        const payload = JSON.parse(text);
        if (typeof payload.error === 'string') message = payload.error;
        if (Array.isArray(payload.rules)) rules = payload.rules;
      } catch {
        if (text) message = text;
      }
      throw new ApiError(response.status, message, rules);
    }
    return text;
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    headers: Record<string, string> = {},
  ): Promise<T> {
    return JSON.parse(await this.requestText(method, path, body, headers)) as T;
  }

  createModel(document: ModelDocument): Promise<CreatedModel> {
    return this.request('POST', '/models', document);
  }

  updateModel(
    modelId: string,
    expectedVersion: number,
    document: ModelDocument,
  ): Promise<CreatedModel> {
    return this.request('PUT', `/models/${modelId}`, document, {
      'If-Match': String(expectedVersion),
    });
  }

  getModel(modelId: string, version?: number): Promise<ModelResponse> {
    const suffix = version === undefined ? '' : `/${version}`;
    return this.request('GET', `/models/${modelId}${suffix}`);
  }

  runSimulation(modelId: string, version: number, body: RunRequest): Promise<RunRecord> {
    return this.request('POST', `/models/${modelId}/${version}/runs`, body);
  }

  getRun(runId: string): Promise<RunRecord> {
    return this.request('GET', `/runs/${runId}`);
  }

  trajectoryCsv(runId: string): Promise<string> {
    return this.requestText('GET', `/runs/${runId}/trajectory.csv`);
  }

  runAnalysis(
    modelId: string,
    version: number,
    kind: AnalysisRecord['kind'],
    params: Record<string, number> = {},
  ): Promise<AnalysisRecord> {
    return this.request('POST', `/models/${modelId}/${version}/analyses`, { kind, params });
  }

  getAnalysis(analysisId: string): Promise<AnalysisRecord> {
    return this.request('GET', `/analyses/${analysisId}`);
  }

  compareRuns(runA: string, runB: string): Promise<CompareRecord> {
    return this.request('GET', `/runs/${runA}/compare/${runB}`);
  }

  templates(): Promise<TemplatesResponse> {
    return this.request('GET', '/templates');
  }
}
