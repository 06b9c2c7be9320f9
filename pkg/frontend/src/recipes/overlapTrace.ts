import { writeFileSync } from "node:fs";

import { AxisFrame, drawAxes, linspace, xPixel, yPixel } from "../axes.js";
import { readCsv } from "../csv.js";
import { FigureInputError } from "../errors.js";
import { manifestFor, numberField } from "../manifest.js";
import { FigureRecipe, expectExperiment, expectInputs } from "../recipe.js";
import { line, polyline, svgDocument, text } from "../svg.js";

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/**
 * Squared overlap with the initial coherent state versus time, one
 * curve per run — typically a regular-island seed next to a
 * chaotic-sea seed.
 */
export const overlapTraceRecipe: FigureRecipe = {
  id: "overlap-trace",
  description:
    "squared-overlap revival curves from one or more overlap-trace runs " +
    "(regular vs chaotic seeds)",
  inputGlobs: ["*.csv (overlap-trace runs, 1-4 files)"],
  render(inputs, output) {
    expectInputs(this.id, inputs, 1, 4);
    const curves = inputs.map((csvPath) => {
      const manifest = manifestFor(csvPath);
      expectExperiment(manifest, "overlap-trace", csvPath);
      const rows = readCsv(csvPath, ["period", "time", "amplitude", "squared"]);
      if (rows.length === 0) {
        throw new FigureInputError(`${csvPath}: no trace rows`);
      }
      const theta = numberField(manifest, "derived", "seed_theta");
      const phi = numberField(manifest, "derived", "seed_phi");
      return {
        times: rows.map((row) => (row["time"] ?? 0.0) * 1e6),
        squared: rows.map((row) => row["squared"] ?? 0.0),
        label: `seed theta=${theta.toFixed(3)}, phi=${phi.toFixed(3)}`,
      };
    });

    const tMax = Math.max(...curves.map((c) => c.times[c.times.length - 1] ?? 0.0));
    const frame: AxisFrame = {
      left: 70,
      top: 50,
      width: 520,
      height: 300,
      xLo: 0.0,
      xHi: tMax > 0 ? tMax : 1.0,
      yLo: 0.0,
      yHi: 1.0,
    };
    let body = "";
    body += drawAxes(
      frame,
      "time (us)",
      "squared overlap",
      linspace(0.0, frame.xHi, 6),
      linspace(0.0, 1.0, 5),
    );
    curves.forEach((curve, index) => {
      const color = PALETTE[index % PALETTE.length] as string;
      const points = curve.times.map((t, i) => ({
        x: xPixel(frame, t),
        y: yPixel(frame, curve.squared[i] ?? 0.0),
      }));
      body += polyline(points, `stroke="${color}" stroke-width="1.5"`);
      const legendY = 66 + 16 * index;
      body += line(420, legendY - 4, 445, legendY - 4, `stroke="${color}" stroke-width="2"`);
      body += text(450, legendY, curve.label, "", 10);
    });
    body += text(
      70,
      24,
      "overlap with the initial coherent state under the stroboscopic drive",
      'font-weight="bold"',
      13,
    );

    const svg = svgDocument(680, 400, body);
    writeFileSync(output, svg, "utf8");
    return [output];
  },
};
