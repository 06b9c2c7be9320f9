import { writeFileSync } from "node:fs";
import { basename, join } from "node:path";

import { HUSIMI_MAX, husimiColor } from "../color.js";
import { readCsv } from "../csv.js";
import { FigureInputError } from "../errors.js";
import { manifestFor } from "../manifest.js";
import { colorbar, mapFrame, sphereCells, sphereOutline } from "../mapfigure.js";
import { FigureRecipe, expectExperiment, expectInputs } from "../recipe.js";
import { group, svgDocument, text } from "../svg.js";

const SECONDS_PER_FRAME = 0.3;

/**
 * Animated Husimi map from a husimi-frames run directory: one Hammer
 * frame per stored stroboscopic snapshot, cycled with SMIL opacity
 * animation. The color scale is fixed to [0, 1/pi] for every frame.
 */
export const husimiAnimationRecipe: FigureRecipe = {
  id: "husimi-animation",
  description:
    "animated Husimi function from a husimi-frames run directory " +
    "(fixed [0, 1/pi] color scale)",
  inputGlobs: ["run directory containing manifest.json + frame_*.csv"],
  render(inputs, output) {
    expectInputs(this.id, inputs, 1);
    const runDir = inputs[0] as string;
    const manifest = manifestFor(runDir);
    expectExperiment(manifest, "husimi-frames", runDir);
    const frameNames = manifest.outputs
      .map((name) => basename(name))
      .filter((name) => /^frame_\d+\.csv$/.test(name))
      .sort();
    if (frameNames.length === 0) {
      throw new FigureInputError(`${runDir}: manifest lists no frame outputs`);
    }
    const times = manifest.derived["frame_times_s"];
    if (!Array.isArray(times) || times.length !== frameNames.length) {
      throw new FigureInputError(
        `${runDir}: manifest derived.frame_times_s does not match the frame count`,
      );
    }

    const frame = mapFrame(300, 225, 255);
    const n = frameNames.length;
    const total = (n * SECONDS_PER_FRAME).toFixed(3);
    let body = "";
    body += text(
      20,
      24,
      "Husimi function under the stroboscopic drive",
      'font-weight="bold"',
      14,
    );
    body += colorbar(590, 90, 14, 270, (t) => husimiColor(t * HUSIMI_MAX), "1/pi", "0");

    frameNames.forEach((name, index) => {
      const rows = readCsv(join(runDir, name), ["theta", "phi", "husimi"]);
      let cells = sphereCells(frame, rows, (row) => husimiColor(row["husimi"] ?? 0.0));
      cells += sphereOutline(frame);
      const timeUs = ((times[index] as number) * 1e6).toFixed(3);
      cells += text(250, 420, `t = ${timeUs} us`, "", 12);
      const t0 = (index / n).toFixed(6);
      const t1 = ((index + 1) / n).toFixed(6);
      let keyTimes: string;
      let values: string;
      if (index === 0) {
        keyTimes = `0;${t1};1`;
        values = "1;0;0";
      } else if (index === n - 1) {
        keyTimes = `0;${t0};1`;
        values = "0;1;1";
      } else {
        keyTimes = `0;${t0};${t1};1`;
        values = "0;1;0;0";
      }
      const animate =
        `<animate attributeName="opacity" dur="${total}s" ` +
        `repeatCount="indefinite" calcMode="discrete" ` +
        `keyTimes="${keyTimes}" values="${values}"/>\n`;
      body += group(
        `opacity="${index === 0 ? 1 : 0}"`,
        cells + animate,
      );
    });

    const svg = svgDocument(660, 440, body);
    writeFileSync(output, svg, "utf8");
    return [output];
  },
};
