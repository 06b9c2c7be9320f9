import { FigureInputError } from "./errors.js";
import { RunManifest } from "./manifest.js";

/** A self-contained figure definition: expected inputs plus renderer. */
export interface FigureRecipe {
  id: string;
  description: string;
  /** Glob-style hints describing the expected input files. */
  inputGlobs: string[];
  /** Render the figure from input paths; returns the files written. */
  render(inputs: string[], output: string): string[];
}

/** Require the manifest to come from the expected CLI experiment. */
export function expectExperiment(
  manifest: RunManifest,
  expected: string,
  inputPath: string,
): void {
  if (manifest.experiment !== expected) {
    throw new FigureInputError(
      `${inputPath}: manifest experiment "${manifest.experiment}" does not ` +
        `match this recipe (expected "${expected}")`,
    );
  }
}

/** Require an exact number of inputs. */
export function expectInputs(
  recipeId: string,
  inputs: string[],
  min: number,
  max: number = min,
): void {
  if (inputs.length < min || inputs.length > max) {
    const range = min === max ? `${min}` : `${min}..${max}`;
    throw new FigureInputError(
      `${recipeId}: expected ${range} input path(s), got ${inputs.length}`,
    );
  }
}
