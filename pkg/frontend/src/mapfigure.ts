import { CsvRow, distinct } from "./csv.js";
import { FigureInputError } from "./errors.js";
import {
  HAMMER_HALF_HEIGHT,
  HAMMER_HALF_WIDTH,
  PlanePoint,
  hammerCell,
} from "./hammer.js";
import { ellipse, polygon, rect, text } from "./svg.js";

/** Pixel frame into which the Hammer ellipse is drawn. */
export interface MapFrame {
  cx: number;
  cy: number;
  scale: number;
}

export function mapFrame(cx: number, cy: number, halfWidthPx: number): MapFrame {
  return { cx, cy, scale: halfWidthPx / HAMMER_HALF_WIDTH };
}

export function toPixels(frame: MapFrame, p: PlanePoint): PlanePoint {
  return { x: frame.cx + frame.scale * p.x, y: frame.cy - frame.scale * p.y };
}

/** Uniform grid spacing inferred from the distinct cell centers. */
export function gridSteps(rows: readonly CsvRow[]): { dTheta: number; dPhi: number } {
  const thetas = distinct(rows, "theta");
  const phis = distinct(rows, "phi");
  if (thetas.length === 0 || phis.length === 0) {
    throw new FigureInputError("map CSV contains no grid rows");
  }
  return { dTheta: Math.PI / thetas.length, dPhi: (2.0 * Math.PI) / phis.length };
}

/**
 * Render every (theta, phi) cell of a map CSV as a filled Hammer cell.
 */
export function sphereCells(
  frame: MapFrame,
  rows: readonly CsvRow[],
  colorOf: (row: CsvRow) => string,
  strokeOf: (row: CsvRow) => string = () => "none",
): string {
  const { dTheta, dPhi } = gridSteps(rows);
  let body = "";
  for (const row of rows) {
    const theta = row["theta"];
    const phi = row["phi"];
    if (theta === undefined || phi === undefined) {
      continue;
    }
    const ring = hammerCell(theta, phi, dTheta, dPhi).map((p) => toPixels(frame, p));
    const stroke = strokeOf(row);
    const strokeAttr =
      stroke === "none"
        ? 'stroke="none"'
        : `stroke="${stroke}" stroke-width="0.8"`;
    body += polygon(ring, `fill="${colorOf(row)}" ${strokeAttr}`);
  }
  return body;
}

/** Outline of the projection ellipse. */
export function sphereOutline(frame: MapFrame): string {
  return ellipse(
    frame.cx,
    frame.cy,
    frame.scale * HAMMER_HALF_WIDTH,
    frame.scale * HAMMER_HALF_HEIGHT,
    'fill="none" stroke="black" stroke-width="1"',
  );
}

/** Vertical colorbar with end labels. */
export function colorbar(
  x: number,
  y: number,
  width: number,
  height: number,
  colorAt: (t: number) => string,
  hiLabel: string,
  loLabel: string,
): string {
  const steps = 64;
  let body = "";
  for (let i = 0; i < steps; i += 1) {
    const t = 1.0 - (i + 0.5) / steps;
    body += rect(x, y + (i * height) / steps, width, height / steps + 0.5, `fill="${colorAt(t)}"`);
  }
  body += rect(x, y, width, height, 'fill="none" stroke="black" stroke-width="0.5"');
  body += text(x + width + 4, y + 10, hiLabel);
  body += text(x + width + 4, y + height, loLabel);
  return body;
}
