/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_pattern_free: (a: number, b: number) => void;
export const momentum_pattern: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
export const pattern_angle: (a: number) => number;
export const pattern_extent: (a: number) => number;
export const pattern_height: (a: number) => number;
export const pattern_isotropic: (a: number) => number;
export const pattern_rgba: (a: number) => [number, number];
export const pattern_values: (a: number) => [number, number];
export const pattern_width: (a: number) => number;
export const position_pattern: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
