/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_estimate_free: (a: number, b: number) => void;
export const estimate: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const estimate_converged: (a: number) => number;
export const estimate_covariance: (a: number) => [number, number];
export const estimate_grid: (a: number) => [number, number];
export const estimate_iterations: (a: number) => number;
export const estimate_mean: (a: number) => [number, number];
export const estimate_pointsPerAxis: (a: number) => number;
export const estimate_residual: (a: number) => number;
export const sampleGaussian: (a: number, b: number, c: number, d: number, e: number, f: number, g: bigint) => [number, number, number, number];
export const start: () => void;
export const truncationProfile: (a: number, b: number, c: number) => [number, number, number, number];
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;
