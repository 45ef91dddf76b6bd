// Workbench page wiring: load a map, edit weights/initials/edges as an
// unsaved draft, clamp factors with sliders, run scenarios against the
// service, and compare runs. All numbers shown come from service payloads.

import { ApiError, ScenarioServiceClient } from './api.js';
import { outcomeBadge, renderLegendHtml, renderTrajectoryChartSvg, trajectorySeries } from './chart.js';
import { renderCompareTableHtml } from './compare.js';
import { renderGraphSvg } from './graph.js';
import {
  WorkbenchState,
  addDraftEdge,
  buildRunRequest,
  draftDocument,
  edgeKey,
  hasDraft,
  initialState,
  recordRun,
  removeDraftEdge,
  setClamp,
  clearClamp,
  setDraftInitial,
  setDraftWeight,
  sliderBounds,
  withModel,
} from './state.js';
import type { ConfigDoc, ThresholdKind } from './types.js';

let state: WorkbenchState = initialState();
let client = new ScenarioServiceClient(defaultBaseUrl());

function defaultBaseUrl(): string {
  return localStorage.getItem('fcmkit-base-url') ?? 'http://127.0.0.1:8000';
}

function $(selector: string): HTMLElement {
  const el = document.querySelector(selector);
  if (!el) throw new Error(`missing element ${selector}`);
  return el as HTMLElement;
}

function setStatus(message: string, kind: 'info' | 'error' = 'info', rules: string[] = []) {
  const banner = $('#status');
  banner.className = `status status-${kind}`;
  banner.textContent = message;
  for (const rule of rules) {
    const chip = document.createElement('span');
    chip.className = 'rule-chip';
    chip.textContent = rule;
    banner.appendChild(chip);
  }
}

function surface(err: unknown) {
  if (err instanceof ApiError) {
    setStatus(err.message, 'error', err.rules);
  } else {
    setStatus(String(err), 'error');
  }
}

async function guarded(action: () => Promise<void>) {
  try {
    await action();
  } catch (err) {
    surface(err); // non-destructive: state is only replaced on success
  }
}

function update(next: WorkbenchState) {
  state = next;
  render();
}

// -- template loading ---------------------------------------------------------

async function loadTemplates() {
  const response = await client.templates();
  const select = $('#archetype') as HTMLSelectElement;
  select.innerHTML = '';
  for (const arch of response.archetypes) {
    const option = document.createElement('option');
    option.value = arch.id;
    option.textContent = `${arch.label} (${arch.template.name})`;
    select.appendChild(option);
  }
  select.dataset.payload = JSON.stringify(response);
  setStatus(`loaded ${response.archetypes.length} archetype templates`);
}

async function openTemplate() {
  const select = $('#archetype') as HTMLSelectElement;
  if (!select.dataset.payload) throw new Error('load the template library first');
  const archetypes = JSON.parse(select.dataset.payload).archetypes as {
    id: string;
    template: Parameters<typeof renderGraphSvg>[0];
  }[];
  const chosen = archetypes.find((a) => a.id === select.value) ?? archetypes[0];
  if (!chosen) throw new Error('no archetype available');
  const created = await client.createModel(chosen.template);
  const fetched = await client.getModel(created.model_id, created.version);
  update(withModel(initialState(), fetched.model_id, fetched.version, fetched.document));
  setStatus(`opened ${chosen.id} as model ${fetched.model_id} v${fetched.version}`);
}

async function openModelById() {
  const id = ($('#model-id-input') as HTMLInputElement).value.trim();
  if (!id) throw new Error('enter a model id');
  const fetched = await client.getModel(id);
  update(withModel(state, fetched.model_id, fetched.version, fetched.document));
  setStatus(`opened model ${fetched.model_id} v${fetched.version}`);
}

// -- model editing ------------------------------------------------------------

async function saveModel() {
  if (!state.modelId || state.version === null) throw new Error('no model loaded');
  const submitted = draftDocument(state);
  const saved = await client.updateModel(state.modelId, state.version, submitted);
  const fetched = await client.getModel(saved.model_id, saved.version);
  // success path only: a 409 leaves state (and the draft) untouched
  update(withModel(state, fetched.model_id, fetched.version, fetched.document));
  setStatus(`saved version ${fetched.version}`);
}

function conceptEditorHtml(): string {
  const doc = state.document;
  if (!doc) return '';
  const bounds = sliderBounds(doc.range);
  const rows = doc.concepts
    .map((c) => {
      const draftInitial = state.draft.initials[c.id];
      const initial = draftInitial ?? c.initial ?? (doc.range === 'bipolar' ? 0 : 0.5);
      const clamped = c.id in state.clamps;
      const clampValue = state.clamps[c.id] ?? initial;
      return (
        `<tr data-concept="${c.id}">` +
        `<td>${c.label || c.id}<div class="concept-id">${c.id}</div></td>` +
        `<td><span class="kind-chip kind-chip-${c.kind ?? 'ordinary'}">${c.kind ?? 'ordinary'}</span></td>` +
        `<td><input class="initial-input${draftInitial !== undefined ? ' dirty' : ''}" type="number" ` +
        `step="0.05" min="${bounds.min}" max="${bounds.max}" value="${initial}"></td>` +
        `<td class="clamp-cell"><label><input class="clamp-toggle" type="checkbox"${clamped ? ' checked' : ''}> clamp</label>` +
        `<input class="clamp-slider" type="range" min="${bounds.min}" max="${bounds.max}" ` +
        `step="${bounds.step}" value="${clampValue}"${clamped ? '' : ' disabled'}>` +
        `<span class="clamp-value">${clamped ? String(clampValue) : ''}</span></td>` +
        '</tr>'
      );
    })
    .join('');
  return (
    '<table class="editor-table"><thead><tr><th>concept</th><th>kind</th>' +
    '<th>initial</th><th>intervention</th></tr></thead>' +
    `<tbody>${rows}</tbody></table>`
  );
}

function edgeEditorHtml(): string {
  const doc = state.document;
  if (!doc) return '';
  const removed = new Set(state.draft.removedEdges);
  const current = [
    ...doc.edges.filter((e) => !removed.has(edgeKey(e.source, e.target))),
    ...state.draft.addedEdges,
  ];
  const rows = current
    .map((e) => {
      const key = edgeKey(e.source, e.target);
      const weight = state.draft.weights[key] ?? e.weight;
      return (
        `<tr data-edge="${key}" data-source="${e.source}" data-target="${e.target}">` +
        `<td>${e.source} &rarr; ${e.target}</td>` +
        `<td><input class="weight-input${key in state.draft.weights ? ' dirty' : ''}" ` +
        `type="number" step="0.05" min="-1" max="1" value="${weight}"></td>` +
        '<td><button class="remove-edge">remove</button></td></tr>'
      );
    })
    .join('');
  const options = doc.concepts.map((c) => `<option value="${c.id}">${c.id}</option>`).join('');
  return (
    '<table class="editor-table"><thead><tr><th>edge</th><th>weight</th><th></th></tr></thead>' +
    `<tbody>${rows}</tbody></table>` +
    `<div class="add-edge">from <select id="new-edge-source">${options}</select> ` +
    `to <select id="new-edge-target">${options}</select> ` +
    'weight <input id="new-edge-weight" type="number" step="0.05" min="-1" max="1" value="0.5"> ' +
    '<button id="add-edge">add edge</button></div>'
  );
}

// -- scenario runs ------------------------------------------------------------

function configFromForm(): ConfigDoc {
  const doc = state.document;
  const threshold = ($('#cfg-threshold') as HTMLSelectElement).value as ThresholdKind;
  const read = (id: string) => Number(($(id) as HTMLInputElement).value);
  return {
    k1: read('#cfg-k1'),
    k2: read('#cfg-k2'),
    threshold: { kind: threshold, steepness: read('#cfg-steepness') },
    epsilon: read('#cfg-epsilon'),
    max_iters: read('#cfg-max-iters'),
    ...(doc ? {} : {}),
  };
}

async function runScenario() {
  if (!state.modelId || state.version === null) throw new Error('no model loaded');
  const request = buildRunRequest(state, configFromForm());
  const run = await client.runSimulation(state.modelId, state.version, request);
  update(recordRun(state, run));
  setStatus(`run ${run.run_id}: ${outcomeBadge(run.result.outcome)} in ${run.result.iterations} iterations`);
}

function runPanelHtml(): string {
  const run = state.latestRun;
  const doc = state.document;
  if (!run || !doc) return '<p class="placeholder">run a scenario to see its trajectory</p>';
  const badge = outcomeBadge(run.result.outcome);
  const badgeClass = run.result.outcome.kind.toLowerCase();
  return (
    `<div class="run-headline">outcome <span class="outcome-badge badge-${badgeClass}">${badge}</span> ` +
    `iterations <strong>${run.result.iterations}</strong> run <code>${run.run_id}</code></div>` +
    renderTrajectoryChartSvg(run, doc) +
    renderLegendHtml(trajectorySeries(run, doc))
  );
}

// -- run list and comparison --------------------------------------------------

function runsPanelHtml(): string {
  if (state.runs.length === 0) return '<p class="placeholder">no runs yet</p>';
  const rows = state.runs
    .map((run) => {
      const clamps = Object.entries(run.scenario.clamps)
        .map(([k, v]) => `${k}=${String(v)}`)
        .join(', ');
      return (
        `<tr data-run="${run.run_id}">` +
        `<td><input type="radio" name="compare-a"${state.compareA === run.run_id ? ' checked' : ''}></td>` +
        `<td><input type="radio" name="compare-b"${state.compareB === run.run_id ? ' checked' : ''}></td>` +
        `<td><code>${run.run_id}</code></td>` +
        `<td><span class="outcome-badge">${outcomeBadge(run.result.outcome)}</span></td>` +
        `<td>${clamps || '&mdash;'}</td></tr>`
      );
    })
    .join('');
  return (
    '<table class="runs-table"><thead><tr><th>A</th><th>B</th><th>run</th>' +
    '<th>outcome</th><th>clamps</th></tr></thead>' +
    `<tbody>${rows}</tbody></table>` +
    '<button id="compare-runs">compare A vs B</button>'
  );
}

async function compareSelected() {
  if (!state.compareA || !state.compareB) throw new Error('pick run A and run B first');
  const record = await client.compareRuns(state.compareA, state.compareB);
  $('#compare-result').innerHTML = renderCompareTableHtml(record);
  setStatus(`compared ${record.run_a} vs ${record.run_b}`);
}

// -- rendering ----------------------------------------------------------------

function render() {
  const doc = state.document;
  $('#model-meta').textContent = doc
    ? `${doc.name} · ${state.modelId} v${state.version} (${doc.range})${hasDraft(state) ? ' · unsaved draft' : ''}`
    : 'no model loaded';
  $('#graph').innerHTML = doc ? renderGraphSvg(draftDocument(state)) : '';
  $('#concept-editor').innerHTML = conceptEditorHtml();
  $('#edge-editor').innerHTML = edgeEditorHtml();
  ($('#save-model') as HTMLButtonElement).disabled = !doc || !hasDraft(state);
  ($('#run-button') as HTMLButtonElement).disabled = !doc;
  $('#run-view').innerHTML = runPanelHtml();
  $('#runs-list').innerHTML = runsPanelHtml();
  bindEditorEvents();
}

function bindEditorEvents() {
  $('#concept-editor')
    .querySelectorAll('tr[data-concept]')
    .forEach((row) => {
      const concept = (row as HTMLElement).dataset.concept!;
      const initialInput = row.querySelector('.initial-input') as HTMLInputElement;
      initialInput.addEventListener('change', () => {
        update(setDraftInitial(state, concept, Number(initialInput.value)));
      });
      const toggle = row.querySelector('.clamp-toggle') as HTMLInputElement;
      const slider = row.querySelector('.clamp-slider') as HTMLInputElement;
      const valueLabel = row.querySelector('.clamp-value') as HTMLElement;
      toggle.addEventListener('change', () => {
        update(
          toggle.checked
            ? setClamp(state, concept, Number(slider.value))
            : clearClamp(state, concept),
        );
      });
      slider.addEventListener('input', () => {
        valueLabel.textContent = slider.value; // live readout; state on release
      });
      slider.addEventListener('change', () => {
        update(setClamp(state, concept, Number(slider.value)));
      });
    });

  $('#edge-editor')
    .querySelectorAll('tr[data-edge]')
    .forEach((row) => {
      const source = (row as HTMLElement).dataset.source!;
      const target = (row as HTMLElement).dataset.target!;
      const weightInput = row.querySelector('.weight-input') as HTMLInputElement;
      weightInput.addEventListener('change', () => {
        update(setDraftWeight(state, source, target, Number(weightInput.value)));
      });
      (row.querySelector('.remove-edge') as HTMLButtonElement).addEventListener('click', () => {
        update(removeDraftEdge(state, source, target));
      });
    });

  const addButton = document.querySelector('#add-edge');
  if (addButton) {
    addButton.addEventListener('click', () => {
      const source = ($('#new-edge-source') as HTMLSelectElement).value;
      const target = ($('#new-edge-target') as HTMLSelectElement).value;
      const weight = Number(($('#new-edge-weight') as HTMLInputElement).value);
      if (source === target) {
        setStatus('self-edges are not allowed: self-influence is the k2 term', 'error');
        return;
      }
      update(addDraftEdge(state, { source, target, weight }));
    });
  }

  $('#runs-list')
    .querySelectorAll('tr[data-run]')
    .forEach((row) => {
      const runId = (row as HTMLElement).dataset.run!;
      const [radioA, radioB] = Array.from(row.querySelectorAll('input[type=radio]'));
      radioA?.addEventListener('change', () => update({ ...state, compareA: runId }));
      radioB?.addEventListener('change', () => update({ ...state, compareB: runId }));
    });
  document.querySelector('#compare-runs')?.addEventListener('click', () => guarded(compareSelected));
}

function bindStaticEvents() {
  const baseInput = $('#base-url') as HTMLInputElement;
  baseInput.value = client.baseUrl;
  baseInput.addEventListener('change', () => {
    localStorage.setItem('fcmkit-base-url', baseInput.value);
    client = new ScenarioServiceClient(baseInput.value);
    setStatus(`service base url set to ${baseInput.value}`);
  });
  $('#load-templates').addEventListener('click', () => guarded(loadTemplates));
  $('#open-template').addEventListener('click', () => guarded(openTemplate));
  $('#open-model').addEventListener('click', () => guarded(openModelById));
  $('#save-model').addEventListener('click', () => guarded(saveModel));
  $('#run-button').addEventListener('click', () => guarded(runScenario));
}

bindStaticEvents();
render();
