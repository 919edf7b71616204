// THP-vs-TBC objective scatter: pure geometry + markup, DOM-free.
// Points are colored per dataset, final-front members drawn distinct, and a
// rectangular brush maps back to solution uids.

import { extent, linearScale, ticks, type LinearScale } from './scale.js';
import type { SolutionRecord } from './types.js';

export const PALETTE = [
    '#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e',
    '#17becf', '#8c564b', '#e377c2', '#7f7f7f', '#bcbd22',
];

export interface ScatterPoint {
    uid: string;
    x: number;
    y: number;
    thp: number;
    tbc: number;
    datasetIndex: number;
    finalFront: boolean;
}

export interface ScatterModel {
    width: number;
    height: number;
    margin: number;
    xScale: LinearScale;
    yScale: LinearScale;
    points: ScatterPoint[];
}

export function scatterModel(
    solutionsByDataset: Map<string, SolutionRecord[]>,
    width = 640,
    height = 420,
    margin = 45,
): ScatterModel {
    const all: { rec: SolutionRecord; ds: number; dsId: string }[] = [];
    let index = 0;
    for (const [dsId, records] of solutionsByDataset) {
        for (const rec of records) all.push({ rec, ds: index, dsId });
        index += 1;
    }
    const xScale = linearScale(extent(all.map((p) => p.rec.tbc), 0.05), [margin, width - margin]);
    const yScale = linearScale(extent(all.map((p) => p.rec.thp), 0.05), [height - margin, margin]);
    return {
        width,
        height,
        margin,
        xScale,
        yScale,
        points: all.map(({ rec, ds }) => ({
            uid: rec.uid,
            x: xScale(rec.tbc),
            y: yScale(rec.thp),
            thp: rec.thp,
            tbc: rec.tbc,
            datasetIndex: ds,
            finalFront: rec.in_final_front,
        })),
    };
}

export interface BrushRect {
    x0: number;
    y0: number;
    x1: number;
    y1: number;
}

/** Solution uids whose plotted position falls inside the brush rectangle. */
export function brushSelect(model: ScatterModel, rect: BrushRect): string[] {
    const [xa, xb] = [Math.min(rect.x0, rect.x1), Math.max(rect.x0, rect.x1)];
    const [ya, yb] = [Math.min(rect.y0, rect.y1), Math.max(rect.y0, rect.y1)];
    return model.points
        .filter((p) => p.x >= xa && p.x <= xb && p.y >= ya && p.y <= yb)
        .map((p) => p.uid);
}

export function renderScatter(
    model: ScatterModel,
    selection: Set<string>,
    highlighted: Set<string>,
): string {
    const { width, height, margin, xScale, yScale } = model;
    const parts: string[] = [];
    parts.push(
        `<svg class="scatter" viewBox="0 0 ${width} ${height}" data-role="scatter">`,
        `<rect class="plot-bg" x="${margin}" y="${margin}" width="${width - 2 * margin}" height="${height - 2 * margin}"/>`,
    );
    for (const t of ticks(xScale.domain[0], xScale.domain[1])) {
        const x = xScale(t);
        parts.push(
            `<line class="grid" x1="${x.toFixed(1)}" y1="${margin}" x2="${x.toFixed(1)}" y2="${height - margin}"/>`,
            `<text class="tick" x="${x.toFixed(1)}" y="${height - margin + 16}" text-anchor="middle">${t}</text>`,
        );
    }
    for (const t of ticks(yScale.domain[0], yScale.domain[1])) {
        const y = yScale(t);
        parts.push(
            `<line class="grid" x1="${margin}" y1="${y.toFixed(1)}" x2="${width - margin}" y2="${y.toFixed(1)}"/>`,
            `<text class="tick" x="${margin - 6}" y="${(y + 4).toFixed(1)}" text-anchor="end">${t}</text>`,
        );
    }
    parts.push(
        `<text class="axis-label" x="${width / 2}" y="${height - 6}" text-anchor="middle">total buffer capacity</text>`,
        `<text class="axis-label" x="14" y="${height / 2}" text-anchor="middle" transform="rotate(-90 14 ${height / 2})">throughput (JPH)</text>`,
    );
    for (const p of model.points) {
        const color = PALETTE[p.datasetIndex % PALETTE.length];
        const classes = ['pt'];
        if (p.finalFront) classes.push('front');
        if (selection.has(p.uid)) classes.push('selected');
        if (highlighted.has(p.uid)) classes.push('rule-hit');
        const r = p.finalFront ? 5 : 3;
        parts.push(
            `<circle class="${classes.join(' ')}" data-uid="${p.uid}" cx="${p.x.toFixed(1)}" ` +
            `cy="${p.y.toFixed(1)}" r="${r}" fill="${color}">` +
            `<title>${p.uid}: THP ${p.thp.toFixed(2)} / TBC ${p.tbc}</title></circle>`,
        );
    }
    parts.push('</svg>');
    return parts.join('');
}

export function legendHtml(datasetIds: string[], labels: string[]): string {
    return datasetIds
        .map((id, i) => {
            const color = PALETTE[i % PALETTE.length];
            return (
                `<label class="legend-item"><input type="checkbox" checked data-dataset="${id}">` +
                `<span class="swatch" style="background:${color}"></span>${labels[i]}</label>`
            );
        })
        .join('');
}
