// Parallel-coordinates view over decision variables (secondary tab): one
// polyline per solution across the numeric axes plus objectives.

import { extent, linearScale } from './scale.js';
import { PALETTE } from './scatter.js';
import type { ColumnInfo, SolutionRecord } from './types.js';

export interface ParcoordsModel {
    axes: string[];
    lines: { uid: string; datasetIndex: number; ys: number[] }[];
    width: number;
    height: number;
}

export function parcoordsModel(
    columns: ColumnInfo[],
    solutionsByDataset: Map<string, SolutionRecord[]>,
    width = 720,
    height = 320,
): ParcoordsModel {
    const numeric = columns.filter((c) => c.kind === 'numeric').map((c) => c.name);
    const axes = ['thp', 'tbc', ...numeric];
    const margin = 30;
    const records: { rec: SolutionRecord; ds: number }[] = [];
    let index = 0;
    for (const [, recs] of solutionsByDataset) {
        for (const rec of recs) records.push({ rec, ds: index });
        index += 1;
    }
    const scales = axes.map((axis) =>
        linearScale(
            extent(records.map(({ rec }) => Number(rec[axis]))),
            [height - margin, margin],
        ),
    );
    return {
        axes,
        width,
        height,
        lines: records.map(({ rec, ds }) => ({
            uid: rec.uid,
            datasetIndex: ds,
            ys: axes.map((axis, i) => scales[i](Number(rec[axis]))),
        })),
    };
}

export function renderParcoords(model: ParcoordsModel, selection: Set<string>): string {
    const { axes, width, height } = model;
    if (!model.lines.length) {
        return '<p class="empty">Load a dataset to see decision variables.</p>';
    }
    const step = (width - 60) / Math.max(1, axes.length - 1);
    const xs = axes.map((_, i) => 30 + i * step);
    const parts = [`<svg class="parcoords" viewBox="0 0 ${width} ${height}" data-role="parcoords">`];
    axes.forEach((axis, i) => {
        parts.push(
            `<line class="axis" x1="${xs[i]}" y1="20" x2="${xs[i]}" y2="${height - 20}"/>`,
            `<text class="axis-label" x="${xs[i]}" y="14" text-anchor="middle">${axis}</text>`,
        );
    });
    for (const line of model.lines) {
        const d = line.ys.map((y, i) => `${xs[i].toFixed(1)},${y.toFixed(1)}`).join(' ');
        const classes = selection.has(line.uid) ? 'line selected' : 'line';
        const color = PALETTE[line.datasetIndex % PALETTE.length];
        parts.push(`<polyline class="${classes}" data-uid="${line.uid}" points="${d}" stroke="${color}"/>`);
    }
    parts.push('</svg>');
    return parts.join('');
}
