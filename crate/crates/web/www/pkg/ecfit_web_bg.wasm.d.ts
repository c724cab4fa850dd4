/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_nestedsolution_free: (a: number, b: number) => void;
export const __wbg_noiseresult_free: (a: number, b: number) => void;
export const deltaScan: (a: number, b: number, c: bigint, d: number, e: number) => [number, number, number, number];
export const nestedsolution_complexity: (a: number) => [number, number];
export const nestedsolution_diversification: (a: number) => [number, number];
export const nestedsolution_fitness: (a: number) => [number, number];
export const nestedsolution_inefficiency: (a: number) => [number, number];
export const nestedsolution_iterations: (a: number) => number;
export const nestedsolution_netEfficiency: (a: number) => [number, number];
export const nestedsolution_spectralRadius: (a: number) => number;
export const nestedsolution_traceJ2: (a: number) => number;
export const nestedsolution_trend: (a: number) => [number, number];
export const noiseCurve: (a: number, b: number, c: bigint, d: number, e: number) => [number, number, number];
export const noiseresult_etas: (a: number) => [number, number];
export const noiseresult_mean: (a: number) => [number, number];
export const noiseresult_sd: (a: number) => [number, number];
export const noiseresult_skipped: (a: number) => number;
export const solveNested: (a: number, b: number, c: number, d: bigint, e: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
