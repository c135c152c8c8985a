/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_plate_free: (a: number, b: number) => void;
export const basis_function: (a: number, b: number) => [number, number, number, number];
export const convergence: (a: number, b: number, c: number) => [number, number, number, number];
export const plate_dofs: (a: number) => number;
export const plate_h1: (a: number) => number;
export const plate_norm_iota_h: (a: number) => number;
export const plate_res: (a: number) => number;
export const plate_values: (a: number) => [number, number];
export const solve_plate: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
