// What-if panel: client-side bound checks before submission (resource sum,
// per-station bounds, buffer range) and the local TBC arithmetic; throughput
// always comes from the server.

import type { InstanceBounds, WhatIfDraft, WhatIfResult } from './types.js';

export function localTbc(draft: WhatIfDraft): number {
    return draft.buffers.reduce((a, b) => a + b, 0);
}

export function validateDraft(draft: WhatIfDraft, bounds: InstanceBounds): string[] {
    const errors: string[] = [];
    const total = draft.resources_per_ws.reduce((a, b) => a + b, 0);
    if (total !== bounds.totalResources) {
        errors.push(`resources sum to ${total}, expected ${bounds.totalResources}`);
    }
    draft.resources_per_ws.forEach((count, j) => {
        if (count < bounds.minPerWs || count > bounds.maxPerWs) {
            errors.push(`WS${j + 1} count ${count} outside [${bounds.minPerWs}, ${bounds.maxPerWs}]`);
        }
    });
    draft.buffers.forEach((cap, k) => {
        if (cap < bounds.bufferMin || cap > bounds.bufferMax) {
            errors.push(`Bu${k + 1} capacity ${cap} outside [${bounds.bufferMin}, ${bounds.bufferMax}]`);
        }
    });
    return errors;
}

export function renderResultCard(
    result: WhatIfResult | null,
    pendingTbc: number,
    errors: string[],
): string {
    if (errors.length) {
        const items = errors.map((e) => `<li>${e}</li>`).join('');
        return `<div class="card error"><ul>${items}</ul></div>`;
    }
    if (!result) {
        return (
            `<div class="card pending"><span class="tbc">TBC ${pendingTbc}</span>` +
            '<span class="thp">simulating&#8230;</span></div>'
        );
    }
    const stderr = result.thp_stderr > 0 ? ` &#177; ${result.thp_stderr.toFixed(2)}` : '';
    return (
        '<div class="card done">' +
        `<span class="thp">THP ${result.thp.toFixed(2)}${stderr} JPH</span>` +
        `<span class="tbc">TBC ${result.tbc}</span></div>`
    );
}
