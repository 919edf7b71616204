import { describe, expect, it } from 'vitest';

import { heatmapModel, renderHeatmap, taskColumnNames } from '../src/heatmap.js';
import { solution, toyColumns } from './helpers.js';

describe('assignment heatmap', () => {
    it('uses only task (categorical) columns', () => {
        expect(taskColumnNames(toyColumns)).toEqual(['A_1', 'A_2', 'A_3', 'A_4']);
    });

    it('renders one row per selected solution', () => {
        const selected = [
            solution('a:0', 100, 2, true),
            solution('a:1', 95, 3),
            solution('a:4', 90, 4),
        ];
        const svg = renderHeatmap(heatmapModel(toyColumns, selected));
        expect(svg.match(/<g class="row"/g)!.length).toBe(3);
        expect(svg).toContain('data-uid="a:0"');
        expect(svg).toContain('data-uid="a:4"');
    });

    it('single solution renders a single row', () => {
        const svg = renderHeatmap(heatmapModel(toyColumns, [solution('a:0', 1, 1)]));
        expect(svg.match(/<g class="row"/g)!.length).toBe(1);
    });

    it('cells carry task id and station tooltips', () => {
        const svg = renderHeatmap(heatmapModel(toyColumns, [
            solution('a:0', 1, 1, false, { A_3: 2 }),
        ]));
        expect(svg).toContain('data-task="A_3" data-ws="2"');
        expect(svg).toContain('<title>A_3 &#8594; WS 2</title>');
    });

    it('identical allocations render uniform columns', () => {
        const selected = [solution('a:0', 1, 1), solution('a:1', 2, 2)];
        const model = heatmapModel(toyColumns, selected);
        expect(model.rows[0].stations).toEqual(model.rows[1].stations);
    });

    it('shows a hint for an empty selection', () => {
        expect(renderHeatmap(heatmapModel(toyColumns, []))).toContain('Select solutions');
    });
});
