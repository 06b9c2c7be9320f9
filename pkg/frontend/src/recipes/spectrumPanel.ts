import { writeFileSync } from "node:fs";
import { basename, dirname, join } from "node:path";

import { AxisFrame, drawAxes, linspace, xPixel, yPixel } from "../axes.js";
import { clamp } from "../color.js";
import { CsvRow, readCsv } from "../csv.js";
import { FigureInputError } from "../errors.js";
import { manifestFor } from "../manifest.js";
import { FigureRecipe, expectExperiment, expectInputs } from "../recipe.js";
import { circle, polyline, svgDocument, text } from "../svg.js";

/**
 * Spectrum-vs-angle panel from an orientation-scan run: line markers
 * sized/shaded by intensity, with the traced branches drawn through
 * them. The branches sidecar is located via the manifest outputs list.
 */
export const spectrumPanelRecipe: FigureRecipe = {
  id: "spectrum-panel",
  description:
    "transition frequencies vs field angle from an orientation-scan run " +
    "(marker shade: line intensity; curves: traced branches)",
  inputGlobs: ["*.csv (orientation-scan main output)"],
  render(inputs, output) {
    expectInputs(this.id, inputs, 1);
    const csvPath = inputs[0] as string;
    const manifest = manifestFor(csvPath);
    expectExperiment(manifest, "orientation-scan", csvPath);
    const rows = readCsv(csvPath, [
      "angle",
      "frequency",
      "intensity",
      "level_low",
      "level_high",
    ]);
    if (rows.length === 0) {
      throw new FigureInputError(`${csvPath}: no spectrum rows`);
    }
    const branchesName = manifest.outputs
      .map((name) => basename(name))
      .find((name) => name.includes("branches"));
    if (branchesName === undefined) {
      throw new FigureInputError(
        `${csvPath}: manifest outputs list has no branches sidecar`,
      );
    }
    const branchesPath = join(dirname(csvPath), branchesName);
    const branchRows = readCsv(branchesPath, [
      "branch",
      "angle",
      "frequency",
      "intensity",
    ]);

    const angles = rows.map((row) => row["angle"] ?? 0.0);
    const freqs = rows.map((row) => (row["frequency"] ?? 0.0) / 1e6);
    const fLo = Math.min(...freqs);
    const fHi = Math.max(...freqs);
    const pad = Math.max((fHi - fLo) * 0.05, 1e-6);
    const frame: AxisFrame = {
      left: 80,
      top: 50,
      width: 500,
      height: 320,
      xLo: Math.min(...angles),
      xHi: Math.max(...angles),
      yLo: fLo - pad,
      yHi: fHi + pad,
    };
    let body = "";
    body += drawAxes(
      frame,
      "field angle (rad)",
      "frequency (MHz)",
      linspace(frame.xLo, frame.xHi, 5),
      linspace(frame.yLo, frame.yHi, 6),
    );

    const byBranch = new Map<number, CsvRow[]>();
    for (const row of branchRows) {
      const branch = row["branch"] ?? 0;
      const bucket = byBranch.get(branch);
      if (bucket === undefined) {
        byBranch.set(branch, [row]);
      } else {
        bucket.push(row);
      }
    }
    for (const [, branch] of [...byBranch.entries()].sort((a, b) => a[0] - b[0])) {
      let segment: { x: number; y: number }[] = [];
      let pieces = "";
      for (const row of branch) {
        const frequency = row["frequency"] ?? NaN;
        if (Number.isNaN(frequency)) {
          if (segment.length > 1) {
            pieces += polyline(segment, 'stroke="#9ecae1" stroke-width="1"');
          }
          segment = [];
          continue;
        }
        segment.push({
          x: xPixel(frame, row["angle"] ?? 0.0),
          y: yPixel(frame, frequency / 1e6),
        });
      }
      if (segment.length > 1) {
        pieces += polyline(segment, 'stroke="#9ecae1" stroke-width="1"');
      }
      body += pieces;
    }

    for (const row of rows) {
      const intensity = clamp(row["intensity"] ?? 0.0, 0.0, 1.0);
      body += circle(
        xPixel(frame, row["angle"] ?? 0.0),
        yPixel(frame, (row["frequency"] ?? 0.0) / 1e6),
        1.2 + 2.0 * intensity,
        `fill="black" fill-opacity="${(0.15 + 0.85 * intensity).toFixed(3)}"`,
      );
    }

    const plane = String(manifest.parameters["plane"] ?? "?");
    body += text(
      80,
      24,
      `transition spectrum vs field orientation (plane ${plane})`,
      'font-weight="bold"',
      13,
    );

    const svg = svgDocument(660, 430, body);
    writeFileSync(output, svg, "utf8");
    return [output];
  },
};
