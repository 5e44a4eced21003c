/* tslint:disable */
/* eslint-disable */

/**
 * Text sources of a random acyclic design.
 */
export function generate(cells: number, inputs: number, transitions: number, skewed: boolean, seed: bigint): string;

/**
 * Text sources of a small hand-written design.
 */
export function preset(name: string): string;

/**
 * Parses the three sources, runs both engines, and returns every net's
 * waveform plus store statistics.
 */
export function simulate(netlist: string, delays: string, stimulus: string, page_len: number): string;

/**
 * Output table of one gate over the four logic values.
 */
export function truth_table(gate: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly generate: (a: number, b: number, c: number, d: number, e: bigint) => [number, number];
    readonly preset: (a: number, b: number) => [number, number];
    readonly simulate: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number];
    readonly truth_table: (a: number, b: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
