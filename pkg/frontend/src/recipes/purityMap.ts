import { writeFileSync } from "node:fs";

import { viridis } from "../color.js";
import { readCsv } from "../csv.js";
import { manifestFor, numberField } from "../manifest.js";
import { colorbar, mapFrame, sphereCells, sphereOutline } from "../mapfigure.js";
import { FigureRecipe, expectExperiment, expectInputs } from "../recipe.js";
import { svgDocument, text } from "../svg.js";
import { tickLabel } from "../axes.js";

/**
 * Ensemble-purity map on the Hammer-projected sphere. The color domain
 * is data-driven [min, max] so island/sea contrast stays visible at any
 * fluctuation strength; identical inputs give identical bytes.
 */
export const purityMapRecipe: FigureRecipe = {
  id: "purity-map",
  description:
    "Hammer-projected ensemble purity from a purity-map run " +
    "(fill: purity after the fluctuating drive)",
  inputGlobs: ["*.csv (purity-map run)"],
  render(inputs, output) {
    expectInputs(this.id, inputs, 1);
    const csvPath = inputs[0] as string;
    const manifest = manifestFor(csvPath);
    expectExperiment(manifest, "purity-map", csvPath);
    const rows = readCsv(csvPath, ["theta", "phi", "purity"]);

    const purities = rows.map((row) => row["purity"] ?? 0.0);
    const lo = Math.min(...purities);
    const hi = Math.max(...purities, lo + 1e-12);
    const frame = mapFrame(300, 215, 255);
    let body = "";
    body += sphereCells(frame, rows, (row) => viridis(row["purity"] ?? 0.0, lo, hi));
    body += sphereOutline(frame);

    const parameter = String(manifest.parameters["parameter"] ?? "?");
    const sigma = numberField(manifest, "parameters", "sigma");
    const periods = numberField(manifest, "parameters", "periods");
    const members = numberField(manifest, "parameters", "members");
    body += text(
      20,
      24,
      `ensemble purity map: ${parameter} fluctuation, ` +
        `sigma=${tickLabel(sigma)}, ${tickLabel(periods)} periods, ` +
        `${tickLabel(members)} members`,
      'font-weight="bold"',
      14,
    );
    body += text(20, 42, "purity of the seed-averaged ensemble state", "", 11);
    body += colorbar(
      590,
      80,
      14,
      270,
      (t) => viridis(t, 0.0, 1.0),
      tickLabel(hi),
      tickLabel(lo),
    );

    const svg = svgDocument(660, 430, body);
    writeFileSync(output, svg, "utf8");
    return [output];
  },
};
