/* tslint:disable */
/* eslint-disable */

/**
 * A solved 2-d estimate tabulated on a grid.
 */
export class Estimate {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly converged: boolean;
    /**
     * `[Σ₁₁, Σ₁₂, Σ₂₂]`.
     */
    readonly covariance: Float64Array;
    readonly grid: Float64Array;
    readonly iterations: number;
    readonly mean: Float64Array;
    readonly pointsPerAxis: number;
    readonly residual: number;
}

export function estimate(samples: Float64Array, n1: number, n2: number, points: number): Estimate;

export function sampleGaussian(mx: number, my: number, s11: number, s12: number, s22: number, m: number, seed: bigint): Float64Array;

export function start(): void;

export function truncationProfile(amplitude: number, decay: number, radius: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_estimate_free: (a: number, b: number) => void;
    readonly estimate: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly estimate_converged: (a: number) => number;
    readonly estimate_covariance: (a: number) => [number, number];
    readonly estimate_grid: (a: number) => [number, number];
    readonly estimate_iterations: (a: number) => number;
    readonly estimate_mean: (a: number) => [number, number];
    readonly estimate_pointsPerAxis: (a: number) => number;
    readonly estimate_residual: (a: number) => number;
    readonly sampleGaussian: (a: number, b: number, c: number, d: number, e: number, f: number, g: bigint) => [number, number, number, number];
    readonly start: () => void;
    readonly truncationProfile: (a: number, b: number, c: number) => [number, number, number, number];
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
