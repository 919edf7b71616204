import { describe, expect, it } from 'vitest';

import { DEFAULT_MINING_PARAMS, WorkbenchState } from '../src/state.js';
import { solution, toyColumns } from './helpers.js';

function loadedState(): WorkbenchState {
    const state = new WorkbenchState();
    state.addDataset(
        { id: 'a', algorithm: 'smo', operators: 3, mix: '100', solutions: 3,
          final_front: 1, generations: 2 },
        toyColumns,
        [solution('a:0', 100, 2, true), solution('a:1', 90, 3), solution('a:2', 80, 4)],
    );
    state.addDataset(
        { id: 'b', algorithm: 'baseline', operators: 3, mix: '100', solutions: 2,
          final_front: 1, generations: 2 },
        toyColumns,
        [solution('b:0', 70, 2, true), solution('b:1', 60, 5)],
    );
    return state;
}

describe('WorkbenchState', () => {
    it('defaults mining params to the usual study settings', () => {
        expect(DEFAULT_MINING_PARAMS).toEqual({ maxLevel: 5, minSignificance: 0.9 });
    });

    it('keeps the brush inside loaded solutions', () => {
        const state = loadedState();
        state.setSelection(['a:0', 'a:999', 'b:1', 'nonsense']);
        expect([...state.selection].sort()).toEqual(['a:0', 'b:1']);
    });

    it('prunes the selection when a dataset is hidden', () => {
        const state = loadedState();
        state.setSelection(['a:0', 'b:0']);
        state.toggleDataset('b', false);
        expect([...state.selection]).toEqual(['a:0']);
        expect(state.visibleSolutions().map((s) => s.uid)).toEqual(['a:0', 'a:1', 'a:2']);
    });

    it('validates mining parameters', () => {
        const state = loadedState();
        expect(state.setMiningParams(0, 0.9)).toMatch(/max level/);
        expect(state.setMiningParams(3, 1.5)).toMatch(/significance/);
        expect(state.setMiningParams(3, 0.8)).toBeNull();
        expect(state.miningParams).toEqual({ maxLevel: 3, minSignificance: 0.8 });
    });

    it('stores mined rules verbatim and resets toggles', () => {
        const state = loadedState();
        const interactions = [
            { rules: [], text: 'WS_1 = 1', significance: 0.9375, unsignificance: 0.104, level: 1 },
            { rules: [], text: 'Bu_1 < 3', significance: 1, unsignificance: 0.2, level: 1 },
        ];
        state.setRules(interactions);
        expect(state.rules).toBe(interactions);
        expect(state.ruleVisibility).toEqual([true, true]);
        state.toggleRule(1, false);
        expect(state.ruleVisibility).toEqual([true, false]);
    });

    it('groups the selection by dataset for mining requests', () => {
        const state = loadedState();
        state.setSelection(['a:0', 'a:2', 'b:1']);
        const grouped = state.selectionByDataset();
        expect([...grouped.keys()].sort()).toEqual(['a', 'b']);
        expect(grouped.get('a')!.sort()).toEqual(['a:0', 'a:2']);
    });

    it('drops stale request tokens', () => {
        const state = loadedState();
        const first = state.nextToken();
        const second = state.nextToken();
        expect(state.isCurrent(first)).toBe(false);
        expect(state.isCurrent(second)).toBe(true);
    });
});
