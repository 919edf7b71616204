// DOM wiring: loads datasets, renders the workbench, routes events through
// the state store.  All drawing goes through the pure render functions.

import { ApiClient, ApiError } from './api.js';
import { heatmapModel, renderHeatmap } from './heatmap.js';
import { parcoordsModel, renderParcoords } from './parcoords.js';
import { renderRulesTable, rulesTableRows, type RuleSortKey } from './rules.js';
import { brushSelect, legendHtml, renderScatter, scatterModel, type ScatterModel } from './scatter.js';
import { DEFAULT_MINING_PARAMS, WorkbenchState } from './state.js';
import type { SolutionRecord, WhatIfDraft } from './types.js';
import { localTbc, renderResultCard } from './whatif.js';

const state = new WorkbenchState();
const api = new ApiClient();

let currentModel: ScatterModel | null = null;
let sortKey: RuleSortKey = 'unsignificance';
let sortAscending = true;

function el<T extends HTMLElement>(id: string): T {
    return document.getElementById(id) as T;
}

function visibleByDataset(): Map<string, SolutionRecord[]> {
    const out = new Map<string, SolutionRecord[]>();
    for (const [id, ds] of state.datasets) {
        if (ds.visible) out.set(id, ds.solutions);
    }
    return out;
}

function redrawScatter(): void {
    currentModel = scatterModel(visibleByDataset());
    el('scatter-host').innerHTML = renderScatter(currentModel, state.selection, state.highlighted);
    el('selection-badge').textContent = `${state.selection.size} selected`;
    attachBrush();
}

function redrawRules(): void {
    const rows = rulesTableRows(state.rules, state.ruleVisibility, state.activeRule,
                                sortKey, sortAscending);
    el('rules-host').innerHTML = renderRulesTable(rows);
}

function redrawHeatmap(): void {
    const first = [...state.datasets.values()][0];
    if (!first) return;
    const selected = [...state.selection]
        .map((uid) => state.solutionByUid(uid))
        .filter((s): s is SolutionRecord => !!s);
    el('heatmap-host').innerHTML = renderHeatmap(heatmapModel(first.columns, selected));
}

function redrawParcoords(): void {
    const first = [...state.datasets.values()][0];
    if (!first) return;
    el('parcoords-host').innerHTML = renderParcoords(
        parcoordsModel(first.columns, visibleByDataset()), state.selection,
    );
}

function redrawAll(): void {
    redrawScatter();
    redrawRules();
    redrawHeatmap();
    redrawParcoords();
}

function attachBrush(): void {
    const svg = el('scatter-host').querySelector('svg');
    if (!svg || !currentModel) return;
    let start: { x: number; y: number } | null = null;
    let rect: SVGRectElement | null = null;

    const toLocal = (ev: PointerEvent) => {
        const bounds = svg.getBoundingClientRect();
        const scaleX = currentModel!.width / bounds.width;
        const scaleY = currentModel!.height / bounds.height;
        return { x: (ev.clientX - bounds.left) * scaleX, y: (ev.clientY - bounds.top) * scaleY };
    };

    svg.addEventListener('pointerdown', (ev) => {
        start = toLocal(ev as PointerEvent);
        rect = document.createElementNS('http://www.w3.org/2000/svg', 'rect');
        rect.setAttribute('class', 'brush');
        svg.appendChild(rect);
        svg.setPointerCapture((ev as PointerEvent).pointerId);
    });
    svg.addEventListener('pointermove', (ev) => {
        if (!start || !rect) return;
        const p = toLocal(ev as PointerEvent);
        rect.setAttribute('x', String(Math.min(start.x, p.x)));
        rect.setAttribute('y', String(Math.min(start.y, p.y)));
        rect.setAttribute('width', String(Math.abs(p.x - start.x)));
        rect.setAttribute('height', String(Math.abs(p.y - start.y)));
    });
    svg.addEventListener('pointerup', (ev) => {
        if (!start || !currentModel) return;
        const p = toLocal(ev as PointerEvent);
        const uids = brushSelect(currentModel, { x0: start.x, y0: start.y, x1: p.x, y1: p.y });
        state.setSelection(uids);
        start = null;
        redrawScatter();
        redrawHeatmap();
        redrawParcoords();
    });
}

async function runMining(): Promise<void> {
    const status = el('mine-status');
    if (!state.selection.size) {
        status.textContent = 'brush a selection first';
        return;
    }
    const grouped = state.selectionByDataset();
    const datasetIds = [...grouped.keys()].sort();
    const uids = [...state.selection].sort();
    const token = state.nextToken();
    status.textContent = 'mining...';
    try {
        const interactions = await api.mine(
            datasetIds, uids,
            state.miningParams.maxLevel, state.miningParams.minSignificance,
        );
        if (!state.isCurrent(token)) return; // stale response
        state.setRules(interactions);
        status.textContent = `${interactions.length} interactions`;
        redrawRules();
        redrawScatter();
    } catch (err) {
        if (!state.isCurrent(token)) return;
        status.textContent = err instanceof ApiError ? String(err.message) : 'mining failed';
    }
}

async function highlightRule(index: number): Promise<void> {
    const interaction = state.rules[index];
    if (!interaction) return;
    const token = state.nextToken();
    const hits = new Set<string>();
    for (const dsId of state.datasets.keys()) {
        const resp = await api.ruleMatch(dsId, [interaction]);
        resp.solutions.forEach((uid, i) => {
            if (resp.matrix[i][0]) hits.add(uid);
        });
    }
    if (!state.isCurrent(token)) return;
    state.setHighlight(index, hits);
    redrawRules();
    redrawScatter();
}

function readDraft(): WhatIfDraft {
    const parse = (id: string) =>
        el<HTMLInputElement>(id).value.split(',').map((x) => Number(x.trim()));
    const assignment = el<HTMLTextAreaElement>('whatif-assignment').value
        .split(';')
        .filter((row) => row.trim().length)
        .map((row) => row.split(',').map((x) => Number(x.trim()) - 1));
    return {
        resources_per_ws: parse('whatif-resources'),
        assignment,
        buffers: parse('whatif-buffers'),
    };
}

async function runWhatIf(): Promise<void> {
    const host = el('whatif-result');
    const draft = readDraft();
    host.innerHTML = renderResultCard(null, localTbc(draft), []);
    const seedRaw = el<HTMLInputElement>('whatif-seed').value.trim();
    const overrides: Record<string, number> = {};
    if (seedRaw) overrides.seed = Number(seedRaw);
    const datasetId = [...state.datasets.keys()][0];
    if (!datasetId) return;
    try {
        const result = await api.whatIf(datasetId, draft, overrides);
        host.innerHTML = renderResultCard(result, localTbc(draft), []);
    } catch (err) {
        const detail = err instanceof ApiError ? err.detail : { error: String(err) };
        const messages =
            (detail as { violations?: string[] }).violations ??
            [JSON.stringify(detail)];
        host.innerHTML = renderResultCard(null, localTbc(draft), messages);
    }
}

function wireEvents(): void {
    el('mine-button').addEventListener('click', () => void runMining());
    el('whatif-button').addEventListener('click', () => void runWhatIf());
    el<HTMLInputElement>('mine-level').addEventListener('change', (ev) => {
        const level = Number((ev.target as HTMLInputElement).value);
        state.setMiningParams(level, state.miningParams.minSignificance);
    });
    el<HTMLInputElement>('mine-sig').addEventListener('change', (ev) => {
        const sig = Number((ev.target as HTMLInputElement).value);
        state.setMiningParams(state.miningParams.maxLevel, sig);
    });
    el('legend').addEventListener('change', (ev) => {
        const input = ev.target as HTMLInputElement;
        const id = input.dataset.dataset;
        if (id) {
            state.toggleDataset(id, input.checked);
            redrawAll();
        }
    });
    el('rules-host').addEventListener('click', (ev) => {
        const target = ev.target as HTMLElement;
        const toggle = target.closest('input[data-toggle]') as HTMLInputElement | null;
        if (toggle) {
            state.toggleRule(Number(toggle.dataset.toggle), toggle.checked);
            return;
        }
        const header = target.closest('th[data-sort]') as HTMLElement | null;
        if (header) {
            const key = header.dataset.sort as RuleSortKey;
            if (key === sortKey) sortAscending = !sortAscending;
            else {
                sortKey = key;
                sortAscending = key === 'unsignificance';
            }
            redrawRules();
            return;
        }
        const row = target.closest('tr[data-rule]') as HTMLElement | null;
        if (row) void highlightRule(Number(row.dataset.rule));
    });
    document.querySelectorAll('.tab-button').forEach((button) => {
        button.addEventListener('click', () => {
            document.querySelectorAll('.tab-button').forEach((b) => b.classList.remove('active'));
            document.querySelectorAll('.tab-panel').forEach((p) => p.classList.remove('active'));
            button.classList.add('active');
            el((button as HTMLElement).dataset.tab!).classList.add('active');
        });
    });
}

async function boot(): Promise<void> {
    el<HTMLInputElement>('mine-level').value = String(DEFAULT_MINING_PARAMS.maxLevel);
    el<HTMLInputElement>('mine-sig').value = String(DEFAULT_MINING_PARAMS.minSignificance);
    const summaries = await api.listDatasets();
    for (const summary of summaries) {
        const page = await api.solutions(summary.id);
        state.addDataset(summary, page.columns, page.solutions);
    }
    el('legend').innerHTML = legendHtml(
        summaries.map((s) => s.id),
        summaries.map((s) => `${s.id} (NO=${s.operators}, ${s.mix}, ${s.algorithm})`),
    );
    redrawAll();
    wireEvents();
}

if (typeof document !== 'undefined' && document.getElementById('scatter-host')) {
    void boot();
}
