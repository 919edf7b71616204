// Rules table: sortable projection of API-mined interactions.  The numbers
// displayed are exactly the API's significance fields; nothing is recomputed
// client-side.

import type { InteractionDto } from './types.js';

export type RuleSortKey = 'unsignificance' | 'significance' | 'level';

export interface RulesTableRow {
    index: number;
    text: string;
    significance: string;
    unsignificance: string;
    level: number;
    visible: boolean;
    active: boolean;
}

export function formatPercent(fraction: number): string {
    return `${(fraction * 100).toFixed(2)}%`;
}

export function sortRules(
    interactions: InteractionDto[],
    key: RuleSortKey,
    ascending: boolean,
): number[] {
    const order = interactions.map((_, i) => i);
    order.sort((a, b) => {
        const va = interactions[a][key];
        const vb = interactions[b][key];
        if (va !== vb) return ascending ? va - vb : vb - va;
        return a - b;
    });
    return order;
}

export function rulesTableRows(
    interactions: InteractionDto[],
    visibility: boolean[],
    activeRule: number | null,
    sortKey: RuleSortKey = 'unsignificance',
    ascending = true,
): RulesTableRow[] {
    return sortRules(interactions, sortKey, ascending).map((i) => ({
        index: i,
        text: interactions[i].text,
        significance: formatPercent(interactions[i].significance),
        unsignificance: formatPercent(interactions[i].unsignificance),
        level: interactions[i].level,
        visible: visibility[i] ?? true,
        active: activeRule === i,
    }));
}

export function renderRulesTable(rows: RulesTableRow[]): string {
    if (!rows.length) {
        return '<p class="empty">No rules mined yet. Brush a selection and run mining.</p>';
    }
    const body = rows
        .map(
            (row) =>
                `<tr class="${row.active ? 'active' : ''}" data-rule="${row.index}">` +
                `<td><input type="checkbox" ${row.visible ? 'checked' : ''} data-toggle="${row.index}"></td>` +
                `<td class="rule-text">${escapeHtml(row.text)}</td>` +
                `<td class="num">${row.significance}</td>` +
                `<td class="num">${row.unsignificance}</td>` +
                `<td class="num">${row.level}</td></tr>`,
        )
        .join('');
    return (
        '<table class="rules"><thead><tr>' +
        '<th></th><th data-sort="text">Rule-interaction</th>' +
        '<th class="num" data-sort="significance">Sig.</th>' +
        '<th class="num" data-sort="unsignificance">Unsig.</th>' +
        '<th class="num" data-sort="level">Level</th>' +
        `</tr></thead><tbody>${body}</tbody></table>`
    );
}

export function escapeHtml(text: string): string {
    return text
        .replace(/&/g, '&amp;')
        .replace(/</g, '&lt;')
        .replace(/>/g, '&gt;')
        .replace(/"/g, '&quot;');
}
