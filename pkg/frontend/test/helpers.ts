// Canned-response fetch used across the suite; records every request.

import type { FetchLike } from '../src/api.js';
import type { ColumnInfo, SolutionRecord } from '../src/types.js';

export interface RecordedRequest {
    url: string;
    method: string;
    body: unknown;
}

export function fakeFetch(
    routes: Record<string, unknown | ((req: RecordedRequest) => unknown)>,
    log: RecordedRequest[] = [],
): FetchLike {
    return async (url, init) => {
        const req: RecordedRequest = {
            url,
            method: init?.method ?? 'GET',
            body: init?.body ? JSON.parse(init.body as string) : undefined,
        };
        log.push(req);
        const key = Object.keys(routes).find((k) => url.startsWith(k));
        if (!key) {
            return new Response(JSON.stringify({ detail: { error: 'not found' } }), { status: 404 });
        }
        const value = routes[key];
        const payload = typeof value === 'function' ? (value as (r: RecordedRequest) => unknown)(req) : value;
        if (payload instanceof Response) return payload;
        return new Response(JSON.stringify(payload), {
            status: 200,
            headers: { 'content-type': 'application/json' },
        });
    };
}

export const toyColumns: ColumnInfo[] = [
    { name: 'A_1', kind: 'categorical' },
    { name: 'A_2', kind: 'categorical' },
    { name: 'A_3', kind: 'categorical' },
    { name: 'A_4', kind: 'categorical' },
    { name: 'WS_1', kind: 'numeric' },
    { name: 'WS_2', kind: 'numeric' },
    { name: 'Bu_1', kind: 'numeric' },
];

export function solution(
    uid: string,
    thp: number,
    tbc: number,
    front = false,
    extra: Record<string, number> = {},
): SolutionRecord {
    const [, idText] = uid.split(':');
    return {
        uid,
        id: Number(idText),
        thp,
        tbc,
        thp_stderr: 0,
        sim_seed: 1000 + Number(idText),
        rank: front ? 1 : null,
        in_final_front: front,
        born_gen: 0,
        A_1: 1, A_2: 1, A_3: 2, A_4: 2, WS_1: 1, WS_2: 2, Bu_1: tbc,
        ...extra,
    };
}
