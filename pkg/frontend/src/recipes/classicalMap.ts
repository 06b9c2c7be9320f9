import { writeFileSync } from "node:fs";

import { viridis } from "../color.js";
import { readCsv } from "../csv.js";
import { manifestFor, numberField } from "../manifest.js";
import { colorbar, mapFrame, sphereCells, sphereOutline } from "../mapfigure.js";
import { FigureRecipe, expectExperiment, expectInputs } from "../recipe.js";
import { svgDocument, text } from "../svg.js";
import { tickLabel } from "../axes.js";

/**
 * Divergence-exponent map on the Hammer-projected sphere: cell fill is
 * the exponent, cells classified chaotic get a white outline.
 */
export const classicalMapRecipe: FigureRecipe = {
  id: "classical-map",
  description:
    "Hammer-projected chaos map from a classical-map run " +
    "(fill: divergence exponent; white outline: chaotic cells)",
  inputGlobs: ["*.csv (classical-map run)"],
  render(inputs, output) {
    expectInputs(this.id, inputs, 1);
    const csvPath = inputs[0] as string;
    const manifest = manifestFor(csvPath);
    expectExperiment(manifest, "classical-map", csvPath);
    const rows = readCsv(csvPath, ["theta", "phi", "exponent", "chaotic"]);

    const exponents = rows.map((row) => row["exponent"] ?? 0.0);
    const hi = Math.max(...exponents, 1e-12);
    const frame = mapFrame(300, 215, 255);
    let body = "";
    body += sphereCells(
      frame,
      rows,
      (row) => viridis(row["exponent"] ?? 0.0, 0.0, hi),
      (row) => ((row["chaotic"] ?? 0) > 0.5 ? "white" : "none"),
    );
    body += sphereOutline(frame);

    const beta = numberField(manifest, "parameters", "beta");
    const gamma = numberField(manifest, "parameters", "gamma");
    const freq = numberField(manifest, "parameters", "freq");
    body += text(
      20,
      24,
      `classical chaos map: beta'=${tickLabel(beta)}, ` +
        `gamma'=${tickLabel(gamma)}, f'=${tickLabel(freq)}`,
      'font-weight="bold"',
      14,
    );
    body += text(20, 42, "divergence exponent per stroboscopic cell", "", 11);
    body += colorbar(590, 80, 14, 270, (t) => viridis(t, 0.0, 1.0), tickLabel(hi), "0");

    const svg = svgDocument(660, 430, body);
    writeFileSync(output, svg, "utf8");
    return [output];
  },
};
