/* tslint:disable */
/* eslint-disable */

export class Pattern {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Major-axis angle in radians, `(−π/2, π/2]`.
     */
    angle(): number;
    /**
     * Half-extent of the axes (λ₁ for position, ℏk₁ for momentum).
     */
    extent(): number;
    height(): number;
    isotropic(): boolean;
    rgba(): Uint8Array;
    values(): Float64Array;
    width(): number;
}

/**
 * Quadrature-conditioned momentum pattern.
 */
export function momentum_pattern(a_re: number, a_im: number, b: number, eta: number, chi: number, points: number): Pattern;

/**
 * Quadrature-conditioned position pattern at the cavity exit.
 */
export function position_pattern(a_re: number, a_im: number, b: number, eta: number, chi: number, points: number): Pattern;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_pattern_free: (a: number, b: number) => void;
    readonly momentum_pattern: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
    readonly pattern_angle: (a: number) => number;
    readonly pattern_extent: (a: number) => number;
    readonly pattern_height: (a: number) => number;
    readonly pattern_isotropic: (a: number) => number;
    readonly pattern_rgba: (a: number) => [number, number];
    readonly pattern_values: (a: number) => [number, number];
    readonly pattern_width: (a: number) => number;
    readonly position_pattern: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
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
