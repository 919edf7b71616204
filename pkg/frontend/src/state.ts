// Workbench state: loaded datasets, brush selection, mining params and
// results, what-if draft.  All mutations go through methods so views stay
// pure projections; significance values are stored verbatim from the API.

import type {
    ColumnInfo,
    DatasetSummary,
    InteractionDto,
    SolutionRecord,
} from './types.js';

export interface MiningParams {
    maxLevel: number;
    minSignificance: number;
}

export const DEFAULT_MINING_PARAMS: MiningParams = { maxLevel: 5, minSignificance: 0.9 };

export interface LoadedDataset {
    summary: DatasetSummary;
    columns: ColumnInfo[];
    solutions: SolutionRecord[];
    visible: boolean;
}

export class WorkbenchState {
    datasets = new Map<string, LoadedDataset>();
    selection = new Set<string>();
    miningParams: MiningParams = { ...DEFAULT_MINING_PARAMS };
    rules: InteractionDto[] = [];
    ruleVisibility: boolean[] = [];
    activeRule: number | null = null;
    highlighted = new Set<string>();
    /** monotonically increasing token; stale async responses are dropped */
    requestToken = 0;

    nextToken(): number {
        return ++this.requestToken;
    }

    isCurrent(token: number): boolean {
        return token === this.requestToken;
    }

    addDataset(summary: DatasetSummary, columns: ColumnInfo[], solutions: SolutionRecord[]): void {
        this.datasets.set(summary.id, { summary, columns, solutions, visible: true });
    }

    visibleSolutions(): SolutionRecord[] {
        const out: SolutionRecord[] = [];
        for (const ds of this.datasets.values()) {
            if (ds.visible) out.push(...ds.solutions);
        }
        return out;
    }

    solutionByUid(uid: string): SolutionRecord | undefined {
        const dsId = uid.slice(0, uid.lastIndexOf(':'));
        return this.datasets.get(dsId)?.solutions.find((s) => s.uid === uid);
    }

    toggleDataset(id: string, visible: boolean): void {
        const ds = this.datasets.get(id);
        if (!ds) return;
        ds.visible = visible;
        if (!visible) {
            // prune the brush: hidden points cannot stay selected
            for (const uid of [...this.selection]) {
                if (uid.startsWith(`${id}:`)) this.selection.delete(uid);
            }
        }
    }

    setSelection(uids: Iterable<string>): void {
        const valid = new Set<string>();
        for (const uid of uids) {
            if (this.solutionByUid(uid)) valid.add(uid);
        }
        this.selection = valid;
    }

    setMiningParams(maxLevel: number, minSignificance: number): string | null {
        if (!Number.isInteger(maxLevel) || maxLevel < 1) {
            return 'max level must be a positive integer';
        }
        if (!(minSignificance > 0 && minSignificance <= 1)) {
            return 'min significance must be in (0, 1]';
        }
        this.miningParams = { maxLevel, minSignificance };
        return null;
    }

    /** Stores API-computed interactions untouched; resets toggles. */
    setRules(interactions: InteractionDto[]): void {
        this.rules = interactions;
        this.ruleVisibility = interactions.map(() => true);
        this.activeRule = null;
        this.highlighted.clear();
    }

    toggleRule(index: number, visible: boolean): void {
        if (index >= 0 && index < this.ruleVisibility.length) {
            this.ruleVisibility[index] = visible;
        }
    }

    setHighlight(ruleIndex: number | null, matchingUids: Iterable<string>): void {
        this.activeRule = ruleIndex;
        this.highlighted = new Set(matchingUids);
    }

    selectionByDataset(): Map<string, string[]> {
        const grouped = new Map<string, string[]>();
        for (const uid of this.selection) {
            const dsId = uid.slice(0, uid.lastIndexOf(':'));
            const list = grouped.get(dsId) ?? [];
            list.push(uid);
            grouped.set(dsId, list);
        }
        return grouped;
    }
}
