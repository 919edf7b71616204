// DTOs mirroring the /api responses.

export interface DatasetSummary {
    id: string;
    algorithm: string;
    operators: number;
    mix: string;
    solutions: number;
    final_front: number;
    generations: number;
}

export interface ColumnInfo {
    name: string;
    kind: 'categorical' | 'numeric';
}

export interface SolutionRecord {
    uid: string;
    id: number;
    thp: number;
    tbc: number;
    thp_stderr: number;
    sim_seed: number;
    rank: number | null;
    in_final_front: boolean;
    born_gen: number;
    [variable: string]: unknown;
}

export interface SolutionsPage {
    dataset: string;
    columns: ColumnInfo[];
    total: number;
    offset: number;
    solutions: SolutionRecord[];
}

export interface RuleDto {
    variable: string;
    relation: string;
    threshold: number;
}

export interface InteractionDto {
    rules: RuleDto[];
    text: string;
    significance: number;
    unsignificance: number;
    level: number;
}

export interface MineResponse {
    status: 'done' | 'pending';
    cached?: boolean;
    job_id?: string;
    interactions?: InteractionDto[];
}

export interface WhatIfResult {
    thp: number;
    thp_stderr: number;
    tbc: number;
    per_replication: number[];
}

export interface RuleMatchResponse {
    solutions: string[];
    matrix: boolean[][];
}

export interface WhatIfDraft {
    resources_per_ws: number[];
    assignment: number[][];
    buffers: number[];
}

export interface InstanceBounds {
    totalResources: number;
    minPerWs: number;
    maxPerWs: number;
    bufferMin: number;
    bufferMax: number;
}
