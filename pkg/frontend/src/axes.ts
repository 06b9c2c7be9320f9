/** Shared axis helpers for the line/scatter figures. */

import { line, text } from "./svg.js";

export interface AxisFrame {
  left: number;
  top: number;
  width: number;
  height: number;
  xLo: number;
  xHi: number;
  yLo: number;
  yHi: number;
}

export function xPixel(frame: AxisFrame, x: number): number {
  return frame.left + ((x - frame.xLo) / (frame.xHi - frame.xLo)) * frame.width;
}

export function yPixel(frame: AxisFrame, y: number): number {
  return frame.top + frame.height - ((y - frame.yLo) / (frame.yHi - frame.yLo)) * frame.height;
}

/** Round tick label: strips trailing zeros but keeps precision. */
export function tickLabel(value: number): string {
  if (value === 0) {
    return "0";
  }
  const magnitude = Math.abs(value);
  if (magnitude >= 1e4 || magnitude < 1e-3) {
    return value.toExponential(1);
  }
  return String(Number(value.toPrecision(4)));
}

/** Evenly spaced ticks including both endpoints. */
export function linspace(lo: number, hi: number, n: number): number[] {
  const out: number[] = [];
  for (let i = 0; i < n; i += 1) {
    out.push(lo + ((hi - lo) * i) / (n - 1));
  }
  return out;
}

/** Draw the plot frame with ticks and labels; returns SVG text. */
export function drawAxes(
  frame: AxisFrame,
  xLabel: string,
  yLabel: string,
  xTicks: readonly number[],
  yTicks: readonly number[],
  yTickLabel: (v: number) => string = tickLabel,
): string {
  let body = "";
  const x0 = frame.left;
  const y0 = frame.top + frame.height;
  const x1 = frame.left + frame.width;
  body += line(x0, y0, x1, y0, 'stroke="black" stroke-width="1"');
  body += line(x0, frame.top, x0, y0, 'stroke="black" stroke-width="1"');
  for (const tick of xTicks) {
    const px = xPixel(frame, tick);
    body += line(px, y0, px, y0 + 5, 'stroke="black" stroke-width="1"');
    body += text(px - 10, y0 + 18, tickLabel(tick), "", 11);
  }
  for (const tick of yTicks) {
    const py = yPixel(frame, tick);
    body += line(x0 - 5, py, x0, py, 'stroke="black" stroke-width="1"');
    body += text(x0 - 45, py + 4, yTickLabel(tick), "", 11);
  }
  body += text(frame.left + frame.width / 2 - 30, y0 + 34, xLabel);
  body += text(
    frame.left - 50,
    frame.top - 8,
    yLabel,
  );
  return body;
}
