/* tslint:disable */
/* eslint-disable */

export class NestedSolution {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * `Q̃`; unbounded entries are sent as `-1`.
     */
    readonly complexity: Float64Array;
    readonly diversification: Float64Array;
    readonly fitness: Float64Array;
    readonly inefficiency: Float64Array;
    readonly iterations: number;
    readonly netEfficiency: Float64Array;
    readonly spectralRadius: number;
    readonly traceJ2: number;
    /**
     * `[a, b, r]` of `I ≈ a·D^b`.
     */
    readonly trend: Float64Array;
}

export class NoiseResult {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly etas: Float64Array;
    readonly mean: Float64Array;
    readonly sd: Float64Array;
    readonly skipped: number;
}

/**
 * Largest relative deviation of `F̃(δ)` from `F̃(0)` for each `δ`.
 */
export function deltaScan(countries: number, products: number, seed: bigint, deltas: Float64Array): Float64Array;

/**
 * Mean Spearman correlation of the fitness ranking under bit flips,
 * `η` from 0 to 1 in `steps` steps.
 */
export function noiseCurve(countries: number, products: number, seed: bigint, trials: number, steps: number): NoiseResult;

/**
 * Rescaled solve of a generated nested world with its efficiency trend
 * and stability diagnostics.
 */
export function solveNested(countries: number, products: number, blur: number, seed: bigint, delta: number): NestedSolution;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_nestedsolution_free: (a: number, b: number) => void;
    readonly __wbg_noiseresult_free: (a: number, b: number) => void;
    readonly deltaScan: (a: number, b: number, c: bigint, d: number, e: number) => [number, number, number, number];
    readonly nestedsolution_complexity: (a: number) => [number, number];
    readonly nestedsolution_diversification: (a: number) => [number, number];
    readonly nestedsolution_fitness: (a: number) => [number, number];
    readonly nestedsolution_inefficiency: (a: number) => [number, number];
    readonly nestedsolution_iterations: (a: number) => number;
    readonly nestedsolution_netEfficiency: (a: number) => [number, number];
    readonly nestedsolution_spectralRadius: (a: number) => number;
    readonly nestedsolution_traceJ2: (a: number) => number;
    readonly nestedsolution_trend: (a: number) => [number, number];
    readonly noiseCurve: (a: number, b: number, c: bigint, d: number, e: number) => [number, number, number];
    readonly noiseresult_etas: (a: number) => [number, number];
    readonly noiseresult_mean: (a: number) => [number, number];
    readonly noiseresult_sd: (a: number) => [number, number];
    readonly noiseresult_skipped: (a: number) => number;
    readonly solveNested: (a: number, b: number, c: number, d: bigint, e: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
