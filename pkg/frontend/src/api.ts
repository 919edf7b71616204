// Thin fetch client for the explorer API.  `fetchFn` is injectable so tests
// can run against canned responses.

import type {
    DatasetSummary,
    InteractionDto,
    MineResponse,
    RuleMatchResponse,
    SolutionsPage,
    WhatIfDraft,
    WhatIfResult,
} from './types.js';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
    constructor(readonly status: number, readonly detail: unknown) {
        super(`API error ${status}: ${JSON.stringify(detail)}`);
    }
}

const POLL_INTERVAL_MS = 250;

export class ApiClient {
    constructor(
        private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
        private readonly base = '',
    ) {}

    private async request<T>(path: string, init?: RequestInit): Promise<T> {
        const resp = await this.fetchFn(this.base + path, init);
        const body = await resp.json();
        if (!resp.ok) {
            throw new ApiError(resp.status, (body as { detail?: unknown }).detail ?? body);
        }
        return body as T;
    }

    private post<T>(path: string, payload: unknown): Promise<T> {
        return this.request<T>(path, {
            method: 'POST',
            headers: { 'content-type': 'application/json' },
            body: JSON.stringify(payload),
        });
    }

    listDatasets(): Promise<DatasetSummary[]> {
        return this.request('/api/datasets');
    }

    solutions(datasetId: string, offset = 0, limit?: number): Promise<SolutionsPage> {
        const query = limit === undefined ? `offset=${offset}` : `offset=${offset}&limit=${limit}`;
        return this.request(`/api/datasets/${datasetId}/solutions?${query}`);
    }

    /** Mines rules; transparently polls when the server answers with a job. */
    async mine(
        datasetIds: string[],
        selectedUids: string[],
        maxLevel: number,
        minSignificance: number,
        sleep: (ms: number) => Promise<void> = (ms) => new Promise((r) => setTimeout(r, ms)),
    ): Promise<InteractionDto[]> {
        const body = await this.post<MineResponse>('/api/mine', {
            dataset_ids: datasetIds,
            selected_solution_ids: selectedUids,
            max_level: maxLevel,
            min_significance: minSignificance,
        });
        if (body.status === 'done') {
            return body.interactions ?? [];
        }
        const jobId = body.job_id!;
        for (;;) {
            await sleep(POLL_INTERVAL_MS);
            const status = await this.request<MineResponse & { detail?: unknown }>(
                `/api/jobs/${jobId}`,
            );
            if (status.status === 'done') {
                return status.interactions ?? [];
            }
            if (status.status !== 'pending') {
                throw new ApiError(500, status);
            }
        }
    }

    /** Simulates an edited configuration; long runs come back as polled jobs. */
    async whatIf(
        datasetId: string,
        configuration: WhatIfDraft,
        simOverrides: Record<string, number> = {},
        sleep: (ms: number) => Promise<void> = (ms) => new Promise((r) => setTimeout(r, ms)),
    ): Promise<WhatIfResult> {
        const body = await this.post<WhatIfResult & { status?: string; job_id?: string }>(
            '/api/whatif',
            { dataset_id: datasetId, configuration, sim_overrides: simOverrides },
        );
        if (body.status !== 'pending') {
            return body;
        }
        for (;;) {
            await sleep(POLL_INTERVAL_MS);
            const status = await this.request<{ status: string; result?: WhatIfResult }>(
                `/api/jobs/${body.job_id}`,
            );
            if (status.status === 'done') {
                return status.result!;
            }
            if (status.status !== 'pending') {
                throw new ApiError(500, status);
            }
        }
    }

    ruleMatch(datasetId: string, interactions: InteractionDto[]): Promise<RuleMatchResponse> {
        return this.post('/api/rulematch', {
            dataset_id: datasetId,
            interactions: interactions.map((ri) => ({ rules: ri.rules })),
        });
    }
}
