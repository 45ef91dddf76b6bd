import { describe, expect, it } from 'vitest';

import { ApiError, ScenarioServiceClient } from '../src/api.js';
import { buildRunRequest, initialState, setClamp, withModel } from '../src/state.js';
import type { ModelDocument } from '../src/types.js';
import modelSed from './fixtures/model_sed.json';
import modelSignMap from './fixtures/model_sign_map.json';

interface Recorded {
  url: string;
  init?: RequestInit;
}

function recordingClient(status = 200, body: unknown = {}) {
  const calls: Recorded[] = [];
  const client = new ScenarioServiceClient('http://svc', async (url, init) => {
    calls.push({ url, init });
    return new Response(JSON.stringify(body), { status });
  });
  return { client, calls };
}

const doc = modelSignMap.document as ModelDocument;

describe('ScenarioServiceClient', () => {
  it('posts model documents as JSON', async () => {
    const { client, calls } = recordingClient(201, { model_id: 'm1', version: 1 });
    const created = await client.createModel(doc);
    expect(created).toEqual({ model_id: 'm1', version: 1 });
    expect(calls[0]!.url).toBe('http://svc/models');
    expect(calls[0]!.init?.method).toBe('POST');
    expect((calls[0]!.init?.headers as Record<string, string>)['Content-Type']).toBe(
      'application/json',
    );
    expect(JSON.parse(calls[0]!.init?.body as string)).toEqual(doc);
  });

  it('sends the expected version in If-Match on update', async () => {
    const { client, calls } = recordingClient(200, { model_id: 'm1', version: 3 });
    await client.updateModel('m1', 2, doc);
    expect(calls[0]!.url).toBe('http://svc/models/m1');
    expect(calls[0]!.init?.method).toBe('PUT');
    expect((calls[0]!.init?.headers as Record<string, string>)['If-Match']).toBe('2');
  });

  it('emits the clamp slider value in the run request body', async () => {
    // the workbench law: slider at 0.9 for crime -> clamps{crime: 0.9}
    const sedDoc = modelSed.document as ModelDocument;
    let state = withModel(initialState(), modelSed.model_id, modelSed.version, sedDoc);
    state = setClamp(state, 'crime', 0.9);
    const { client, calls } = recordingClient(201, { run_id: 'r1' });
    await client.runSimulation(modelSed.model_id, modelSed.version, buildRunRequest(state));
    expect(calls[0]!.url).toBe(
      `http://svc/models/${modelSed.model_id}/${modelSed.version}/runs`,
    );
    const body = JSON.parse(calls[0]!.init?.body as string);
    expect(body.scenario.clamps).toEqual({ crime: 0.9 });
    expect(typeof body.scenario.clamps.crime).toBe('number');
  });

  it('maps error payloads onto ApiError with status and rule ids', async () => {
    const { client } = recordingClient(409, {
      error: 'model is at version 2, expected 1',
      rules: ['weight-out-of-range'],
    });
    const failure = await client.updateModel('m1', 1, doc).catch((e) => e);
    expect(failure).toBeInstanceOf(ApiError);
    expect(failure.status).toBe(409);
    expect(failure.message).toContain('version 2');
    expect(failure.rules).toEqual(['weight-out-of-range']);
  });

  it('returns trajectory CSV as raw text', async () => {
    const csv = 't,x1\n0,1\n# outcome=FixedPoint iterations=1\n';
    const client = new ScenarioServiceClient(
      'http://svc',
      async () => new Response(csv, { status: 200 }),
    );
    expect(await client.trajectoryCsv('r1')).toBe(csv);
  });

  it('builds versioned and unversioned model paths', async () => {
    const { client, calls } = recordingClient(200, modelSignMap);
    await client.getModel('m1');
    await client.getModel('m1', 4);
    expect(calls.map((c) => c.url)).toEqual(['http://svc/models/m1', 'http://svc/models/m1/4']);
  });
});
