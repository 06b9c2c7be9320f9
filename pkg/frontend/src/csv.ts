import { readFileSync } from "node:fs";

import Papa from "papaparse";

import { FigureInputError } from "./errors.js";

/** One parsed CSV data row, keyed by header name. */
export type CsvRow = Record<string, number>;

/**
 * Read a simulation CSV and return numeric rows.
 *
 * Every column in `required` must be present; a missing column is
 * reported together with the offending file. Cell values are converted
 * with Number(), so "nan" becomes NaN (orientation-scan branch files
 * use it for gaps).
 */
export function readCsv(path: string, required: readonly string[]): CsvRow[] {
  let raw: string;
  try {
    raw = readFileSync(path, "utf8");
  } catch {
    throw new FigureInputError(`${path}: file not found`);
  }
  const parsed = Papa.parse<Record<string, string>>(raw.trimEnd(), {
    header: true,
    delimiter: ",",
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new FigureInputError(
      `${path}: CSV parse error: ${first ? first.message : "unknown"}`,
    );
  }
  const fields = parsed.meta.fields ?? [];
  for (const column of required) {
    if (!fields.includes(column)) {
      throw new FigureInputError(
        `${path}: missing required column "${column}" ` +
          `(found: ${fields.join(", ") || "none"})`,
      );
    }
  }
  return parsed.data.map((record, index) => {
    const row: CsvRow = {};
    for (const column of fields) {
      const cell = record[column];
      const value = Number(cell);
      if (cell === undefined || (Number.isNaN(value) && cell.toLowerCase() !== "nan")) {
        throw new FigureInputError(
          `${path}: row ${index + 2}: non-numeric value ` +
            `${JSON.stringify(cell)} in column "${column}"`,
        );
      }
      row[column] = value;
    }
    return row;
  });
}

/** Distinct values of a column, in first-appearance order. */
export function distinct(rows: readonly CsvRow[], column: string): number[] {
  const seen = new Set<number>();
  const values: number[] = [];
  for (const row of rows) {
    const value = row[column];
    if (value !== undefined && !seen.has(value)) {
      seen.add(value);
      values.push(value);
    }
  }
  return values;
}
