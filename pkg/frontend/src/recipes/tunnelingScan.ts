import { writeFileSync } from "node:fs";

import { AxisFrame, drawAxes, linspace, xPixel, yPixel } from "../axes.js";
import { FigureInputError } from "../errors.js";
import { manifestFor, numberField } from "../manifest.js";
import { FigureRecipe, expectExperiment, expectInputs } from "../recipe.js";
import { circle, polyline, svgDocument, text } from "../svg.js";

/**
 * Tunneling frequency versus the scanned parameter, read from a batch
 * of tunneling-run manifests. The scan axis is inferred: spin I when
 * the runs differ in two_i, otherwise B0. The y axis is log10 so the
 * near-exponential dependence on I reads as a straight line.
 */
export const tunnelingScanRecipe: FigureRecipe = {
  id: "tunneling-scan",
  description:
    "log-scale tunneling frequency vs spin I (or B0) from several " +
    "tunneling runs",
  inputGlobs: ["*.csv (tunneling runs, 2+ files)"],
  render(inputs, output) {
    expectInputs(this.id, inputs, 2, 64);
    const points = inputs.map((csvPath) => {
      const manifest = manifestFor(csvPath);
      expectExperiment(manifest, "tunneling", csvPath);
      const rawTwoI = manifest.parameters["two_i"];
      return {
        twoI: typeof rawTwoI === "number" ? rawTwoI : null,
        b0: numberField(manifest, "parameters", "b0"),
        frequency: numberField(manifest, "derived", "tunneling_frequency_hz"),
      };
    });

    const twoIValues = new Set(points.map((p) => p.twoI));
    const b0Values = new Set(points.map((p) => p.b0));
    let xLabel: string;
    let xs: number[];
    if (!twoIValues.has(null) && twoIValues.size > 1) {
      xLabel = "spin I";
      xs = points.map((p) => (p.twoI as number) / 2.0);
    } else if (b0Values.size > 1) {
      xLabel = "B0 (T)";
      xs = points.map((p) => p.b0);
    } else {
      throw new FigureInputError(
        "tunneling-scan: inputs do not vary in two_i or b0 (donor-preset " +
          "runs do not record two_i; use explicit --two-i for spin scans)",
      );
    }
    const data = xs
      .map((x, i) => ({ x, logF: Math.log10(points[i]?.frequency ?? NaN) }))
      .sort((a, b) => a.x - b.x);
    if (data.some((d) => !Number.isFinite(d.logF))) {
      throw new FigureInputError(
        "tunneling-scan: a run has no positive tunneling frequency",
      );
    }

    const xLo = data[0]?.x ?? 0.0;
    const xHi = data[data.length - 1]?.x ?? 1.0;
    const logs = data.map((d) => d.logF);
    const yLo = Math.floor(Math.min(...logs));
    const yHi = Math.ceil(Math.max(...logs));
    const frame: AxisFrame = {
      left: 80,
      top: 50,
      width: 480,
      height: 300,
      xLo,
      xHi,
      yLo,
      yHi: yHi > yLo ? yHi : yLo + 1,
    };
    let body = "";
    const decades = linspace(frame.yLo, frame.yHi, frame.yHi - frame.yLo + 1);
    body += drawAxes(
      frame,
      xLabel,
      "tunneling frequency (Hz)",
      data.map((d) => d.x),
      decades,
      (v) => `1e${v}`,
    );
    const pixels = data.map((d) => ({
      x: xPixel(frame, d.x),
      y: yPixel(frame, d.logF),
    }));
    body += polyline(pixels, 'stroke="#1f77b4" stroke-width="1.5"');
    for (const p of pixels) {
      body += circle(p.x, p.y, 3.5, 'fill="#1f77b4"');
    }
    body += text(
      80,
      24,
      `tunneling frequency vs ${xLabel}`,
      'font-weight="bold"',
      13,
    );

    const svg = svgDocument(640, 400, body);
    writeFileSync(output, svg, "utf8");
    return [output];
  },
};
