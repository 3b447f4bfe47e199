/** Shared types for the figure renderer. */

/** One observable sampled on a (position x photon energy) grid. */
export interface FieldGrid {
  /** positions in micrometres, strictly increasing */
  xs: number[];
  /** photon energies in eV, strictly increasing */
  energies: number[];
  /** values[i][j] belongs to (xs[i], energies[j]) */
  values: number[][];
  /** units string carried through from the data file */
  units: string;
}

export interface ColorScale {
  mode: "auto" | "fixed";
  min?: number;
  max?: number;
}

/** One heatmap panel: an input file plus presentation options. */
export interface PanelSpec {
  file: string;
  label: string;
  scale?: ColorScale;
}

/** Figure manifest consumed by the CLI. */
export interface Manifest {
  panels: PanelSpec[];
  /** path to the generator's metadata.json (interfaces, resonances) */
  metadata: string;
  /** output SVG path */
  output: string;
  title?: string;
}

/** The subset of the generator's metadata.json the renderer uses. */
export interface FigureMetadata {
  interfaces_um: number[];
  resonance_energies_eV: number[];
}

export class FormatError extends Error {}
export class GridMismatchError extends Error {}
export class MissingInputError extends Error {}
