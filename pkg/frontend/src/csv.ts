/** Parser for the generator's delimiter-separated field files. */

import { FieldGrid, FormatError } from "./types.js";

export const EXPECTED_HEADER = "x_um,energy_eV,value,units";

/**
 * Parse one field CSV (`x_um,energy_eV,value,units`) into a dense grid.
 *
 * The file must cover a complete cartesian product of its position and
 * energy values; anything else (bad header, ragged rows, non-numeric cells,
 * missing grid points) raises FormatError.
 */
export function parseFieldCsv(text: string, name = "<csv>"): FieldGrid {
  const lines = text.split("\n").filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new FormatError(`${name}: empty file`);
  }
  if (lines[0].trim() !== EXPECTED_HEADER) {
    throw new FormatError(
      `${name}: bad header ${JSON.stringify(lines[0])}; expected "${EXPECTED_HEADER}"`,
    );
  }
  const xs: number[] = [];
  const energies: number[] = [];
  const xIndex = new Map<number, number>();
  const eIndex = new Map<number, number>();
  type Row = { xi: number; ei: number; value: number };
  const rows: Row[] = [];
  let units: string | null = null;

  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== 4) {
      throw new FormatError(`${name}:${i + 1}: expected 4 columns, got ${parts.length}`);
    }
    const x = Number(parts[0]);
    const e = Number(parts[1]);
    const v = Number(parts[2]);
    if (!Number.isFinite(x) || !Number.isFinite(e) || !Number.isFinite(v)) {
      throw new FormatError(`${name}:${i + 1}: non-numeric cell in ${JSON.stringify(lines[i])}`);
    }
    if (units === null) {
      units = parts[3];
    } else if (units !== parts[3]) {
      throw new FormatError(`${name}:${i + 1}: inconsistent units ${parts[3]} vs ${units}`);
    }
    if (!xIndex.has(x)) {
      xIndex.set(x, xs.length);
      xs.push(x);
    }
    if (!eIndex.has(e)) {
      eIndex.set(e, energies.length);
      energies.push(e);
    }
    rows.push({ xi: xIndex.get(x)!, ei: eIndex.get(e)!, value: v });
  }
  if (rows.length !== xs.length * energies.length) {
    throw new FormatError(
      `${name}: ${rows.length} rows do not fill a ${xs.length} x ${energies.length} grid`,
    );
  }
  const values: number[][] = xs.map(() => new Array<number>(energies.length).fill(NaN));
  for (const { xi, ei, value } of rows) {
    if (!Number.isNaN(values[xi][ei])) {
      throw new FormatError(`${name}: duplicate grid point (${xs[xi]}, ${energies[ei]})`);
    }
    values[xi][ei] = value;
  }
  for (const [a, b] of [xs, energies].map((axis) => [axis, axis.slice(1)])) {
    for (let i = 0; i < b.length; i++) {
      if (b[i] <= a[i]) {
        throw new FormatError(`${name}: grid axis is not strictly increasing`);
      }
    }
  }
  return { xs, energies, values, units: units ?? "" };
}
