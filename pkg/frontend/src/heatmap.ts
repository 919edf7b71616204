// Assignment heatmap: one row per selected solution, one column per task,
// cell color encodes the workstation the task landed on.

import type { ColumnInfo, SolutionRecord } from './types.js';

const WS_PALETTE = ['#4e9bd4', '#f2a65a', '#7fb069', '#c76fb4', '#8d8d8d'];

export interface HeatmapModel {
    taskColumns: string[];
    rows: { uid: string; stations: number[] }[];
    maxStation: number;
}

export function taskColumnNames(columns: ColumnInfo[]): string[] {
    return columns.filter((c) => c.kind === 'categorical').map((c) => c.name);
}

export function heatmapModel(
    columns: ColumnInfo[],
    selected: SolutionRecord[],
): HeatmapModel {
    const taskColumns = taskColumnNames(columns);
    const rows = selected.map((rec) => ({
        uid: rec.uid,
        stations: taskColumns.map((name) => Number(rec[name])),
    }));
    const maxStation = Math.max(1, ...rows.flatMap((r) => r.stations));
    return { taskColumns, rows, maxStation };
}

export function renderHeatmap(model: HeatmapModel, cell = 14, labelWidth = 110): string {
    if (!model.rows.length) {
        return '<p class="empty">Select solutions on the scatter to see their task allocation.</p>';
    }
    const width = labelWidth + model.taskColumns.length * cell + 10;
    const headerH = 58;
    const height = headerH + model.rows.length * cell + 6;
    const parts = [
        `<svg class="heatmap" viewBox="0 0 ${width} ${height}" data-role="heatmap">`,
    ];
    model.taskColumns.forEach((name, c) => {
        const x = labelWidth + c * cell + cell / 2;
        parts.push(
            `<text class="col-label" x="${x}" y="${headerH - 8}" text-anchor="start" ` +
            `transform="rotate(-55 ${x} ${headerH - 8})">${name}</text>`,
        );
    });
    model.rows.forEach((row, r) => {
        const y = headerH + r * cell;
        parts.push(
            `<g class="row" data-uid="${row.uid}">`,
            `<text class="row-label" x="${labelWidth - 6}" y="${y + cell - 3}" text-anchor="end">${row.uid}</text>`,
        );
        row.stations.forEach((station, c) => {
            const color = WS_PALETTE[(station - 1) % WS_PALETTE.length];
            parts.push(
                `<rect x="${labelWidth + c * cell}" y="${y}" width="${cell - 1}" height="${cell - 1}" ` +
                `fill="${color}" data-task="${model.taskColumns[c]}" data-ws="${station}">` +
                `<title>${model.taskColumns[c]} &#8594; WS ${station}</title></rect>`,
            );
        });
        parts.push('</g>');
    });
    parts.push('</svg>');
    return parts.join('');
}
