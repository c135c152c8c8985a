/* tslint:disable */
/* eslint-disable */

/**
 * A discrete solution sampled on a `res × res` grid of cell centres.
 */
export class Plate {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    dofs(): number;
    h1(): number;
    norm_iota_h(): number;
    res(): number;
    /**
     * Row-major samples, `y` increasing with the row.
     */
    values(): Float64Array;
}

/**
 * Samples local basis function `index` (0–9) of the reference triangle
 * `(0,0), (1,0), (0,1)` on a `res × res` grid; points outside are NaN.
 *
 * Order: values at the three vertices, `(∂x, ∂y)` at each vertex, barycenter value.
 */
export function basis_function(index: number, res: number): Float64Array;

/**
 * Runs a convergence study for example 1 on `n = 2, 4, …, max_n` and returns the rows as JSON.
 */
export function convergence(iota: number, eta: number, max_n: number): string;

/**
 * Solves example 1 or 2 on the `n × n` structured mesh.
 */
export function solve_plate(example_id: number, n: number, iota: number, eta: number, res: number): Plate;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_plate_free: (a: number, b: number) => void;
    readonly basis_function: (a: number, b: number) => [number, number, number, number];
    readonly convergence: (a: number, b: number, c: number) => [number, number, number, number];
    readonly plate_dofs: (a: number) => number;
    readonly plate_h1: (a: number) => number;
    readonly plate_norm_iota_h: (a: number) => number;
    readonly plate_res: (a: number) => number;
    readonly plate_values: (a: number) => [number, number];
    readonly solve_plate: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
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
