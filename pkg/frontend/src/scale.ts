export interface LinearScale {
    (value: number): number;
    invert(px: number): number;
    domain: [number, number];
    range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): LinearScale {
    const [d0, d1] = domain;
    const [r0, r1] = range;
    const span = d1 - d0 || 1;
    const scale = ((value: number) => r0 + ((value - d0) / span) * (r1 - r0)) as LinearScale;
    scale.invert = (px: number) => d0 + ((px - r0) / (r1 - r0 || 1)) * span;
    scale.domain = domain;
    scale.range = range;
    return scale;
}

export function extent(values: number[], pad = 0): [number, number] {
    if (!values.length) return [0, 1];
    let lo = Math.min(...values);
    let hi = Math.max(...values);
    if (lo === hi) {
        lo -= 1;
        hi += 1;
    }
    const margin = (hi - lo) * pad;
    return [lo - margin, hi + margin];
}

export function ticks(lo: number, hi: number, count = 5): number[] {
    const span = hi - lo;
    if (span <= 0) return [lo];
    const step = Math.pow(10, Math.floor(Math.log10(span / count)));
    const err = (count * step) / span;
    const factor = err <= 0.15 ? 10 : err <= 0.35 ? 5 : err <= 0.75 ? 2 : 1;
    const s = step * factor;
    const start = Math.ceil(lo / s) * s;
    const out: number[] = [];
    for (let v = start; v <= hi + 1e-9; v += s) {
        out.push(Number(v.toFixed(10)));
    }
    return out;
}
