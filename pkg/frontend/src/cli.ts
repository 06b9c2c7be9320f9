#!/usr/bin/env node
/**
 * Figure renderer for simulation CLI outputs.
 *
 * Usage:
 *   driventop-figures list
 *   driventop-figures render <figure-id> --input <path> [--input <path> ...] \
 *       --output <file.svg>
 *
 * Exit codes: 0 success, 1 bad input or configuration, 2 unexpected error.
 */

import { parseArgs } from "node:util";

import { FigureInputError } from "./errors.js";
import { RECIPES, getRecipe } from "./recipes.js";

function usage(): string {
  return (
    "usage: driventop-figures list\n" +
    "       driventop-figures render <figure-id> --input <path> " +
    "[--input <path> ...] --output <file.svg>\n"
  );
}

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        input: { type: "string", multiple: true },
        output: { type: "string" },
        help: { type: "boolean", short: "h" },
      },
    });
  } catch (err) {
    process.stderr.write(`argument error: ${String(err)}\n${usage()}`);
    return 1;
  }
  const [command, figureId] = parsed.positionals;
  if (parsed.values.help || command === undefined) {
    process.stdout.write(usage());
    return parsed.values.help ? 0 : 1;
  }

  if (command === "list") {
    for (const recipe of RECIPES) {
      process.stdout.write(`${recipe.id}\n`);
      process.stdout.write(`    ${recipe.description}\n`);
      process.stdout.write(`    inputs: ${recipe.inputGlobs.join("; ")}\n`);
    }
    return 0;
  }

  if (command !== "render") {
    process.stderr.write(`unknown command "${command}"\n${usage()}`);
    return 1;
  }
  const inputs = parsed.values.input ?? [];
  const output = parsed.values.output;
  if (figureId === undefined || inputs.length === 0 || output === undefined) {
    process.stderr.write(
      `render needs a figure id, at least one --input, and --output\n${usage()}`,
    );
    return 1;
  }
  try {
    const written = getRecipe(figureId).render(inputs, output);
    for (const path of written) {
      process.stdout.write(`${path}\n`);
    }
    return 0;
  } catch (err) {
    if (err instanceof FigureInputError) {
      process.stderr.write(`input error: ${err.message}\n`);
      return 1;
    }
    process.stderr.write(`error: ${String(err)}\n`);
    return 2;
  }
}

const entry = process.argv[1];
if (entry !== undefined && (entry.endsWith("cli.js") || entry.endsWith("driventop-figures"))) {
  process.exit(main(process.argv.slice(2)));
}
