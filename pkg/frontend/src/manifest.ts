import { readFileSync } from "node:fs";
import { basename, dirname, join } from "node:path";

import { FigureInputError } from "./errors.js";

/** Manifest written by the simulation CLI next to every CSV output. */
export interface RunManifest {
  schema_version: number;
  experiment: string;
  artifact_version: string;
  seed: number | null;
  workers: number;
  parameters: Record<string, unknown>;
  tolerances: Record<string, unknown>;
  derived: Record<string, unknown>;
  outputs: string[];
  wall_time_seconds: number;
}

export const SUPPORTED_SCHEMA_VERSION = 1;

/** Parse a manifest file, refusing unsupported schema versions. */
export function readManifest(path: string): RunManifest {
  let raw: string;
  try {
    raw = readFileSync(path, "utf8");
  } catch {
    throw new FigureInputError(`${path}: manifest not found`);
  }
  let parsed: unknown;
  try {
    parsed = JSON.parse(raw);
  } catch (err) {
    throw new FigureInputError(`${path}: not valid JSON (${String(err)})`);
  }
  const manifest = parsed as RunManifest;
  if (manifest.schema_version !== SUPPORTED_SCHEMA_VERSION) {
    throw new FigureInputError(
      `${path}: unsupported manifest schema_version ` +
        `${String(manifest.schema_version)} (expected ${SUPPORTED_SCHEMA_VERSION})`,
    );
  }
  if (typeof manifest.experiment !== "string" || !Array.isArray(manifest.outputs)) {
    throw new FigureInputError(`${path}: missing experiment or outputs field`);
  }
  return manifest;
}

/**
 * Candidate manifest paths for a CSV path or run directory.
 *
 * Single-file runs write `<stem>.manifest.json` next to `<stem>.csv`
 * (secondary outputs are named `<stem>.<part>.csv`); directory runs
 * write `manifest.json` inside the directory.
 */
export function manifestCandidatesFor(input: string): string[] {
  if (!input.endsWith(".csv")) {
    return [join(input, "manifest.json")];
  }
  const stem = basename(input).replace(/\.csv$/, "");
  const candidates = [join(dirname(input), `${stem}.manifest.json`)];
  const shorter = stem.replace(/\.[^.]+$/, "");
  if (shorter !== stem) {
    candidates.push(join(dirname(input), `${shorter}.manifest.json`));
  }
  return candidates;
}

/** Read the manifest for a CSV path or run directory and verify it. */
export function manifestFor(input: string): RunManifest {
  const candidates = manifestCandidatesFor(input);
  for (const path of candidates.slice(0, -1)) {
    try {
      return readManifest(path);
    } catch (err) {
      if (!(err instanceof FigureInputError) || !err.message.includes("not found")) {
        throw err;
      }
    }
  }
  return readManifest(candidates[candidates.length - 1] as string);
}

/** Fetch a numeric entry from manifest parameters or derived values. */
export function numberField(
  manifest: RunManifest,
  section: "parameters" | "derived",
  key: string,
): number {
  const value = manifest[section][key];
  if (typeof value !== "number") {
    throw new FigureInputError(
      `manifest ${section}.${key} is missing or not a number`,
    );
  }
  return value;
}
