/**
 * Minimal deterministic SVG emission: fixed fonts and sizes, no
 * timestamps, and a single shared number formatter so identical inputs
 * produce identical bytes.
 */

export const FONT = 'font-family="Helvetica, Arial, sans-serif"';

/** Format a coordinate or style number compactly and reproducibly. */
export function fmt(value: number): string {
  if (!Number.isFinite(value)) {
    return "0";
  }
  const fixed = value.toFixed(3);
  return fixed === "-0.000" ? "0.000" : fixed;
}

export function svgDocument(width: number, height: number, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}">\n${body}</svg>\n`
  );
}

export function group(attrs: string, body: string): string {
  return `<g ${attrs}>\n${body}</g>\n`;
}

export function polygon(points: readonly { x: number; y: number }[], style: string): string {
  const coords = points.map((p) => `${fmt(p.x)},${fmt(p.y)}`).join(" ");
  return `<polygon points="${coords}" ${style}/>\n`;
}

export function polyline(points: readonly { x: number; y: number }[], style: string): string {
  const coords = points.map((p) => `${fmt(p.x)},${fmt(p.y)}`).join(" ");
  return `<polyline points="${coords}" fill="none" ${style}/>\n`;
}

export function line(x1: number, y1: number, x2: number, y2: number, style: string): string {
  return (
    `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" ${style}/>\n`
  );
}

export function rect(
  x: number,
  y: number,
  width: number,
  height: number,
  style: string,
): string {
  return (
    `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(width)}" ` +
    `height="${fmt(height)}" ${style}/>\n`
  );
}

export function circle(cx: number, cy: number, r: number, style: string): string {
  return `<circle cx="${fmt(cx)}" cy="${fmt(cy)}" r="${fmt(r)}" ${style}/>\n`;
}

export function ellipse(
  cx: number,
  cy: number,
  rx: number,
  ry: number,
  style: string,
): string {
  return (
    `<ellipse cx="${fmt(cx)}" cy="${fmt(cy)}" rx="${fmt(rx)}" ry="${fmt(ry)}" ` +
    `${style}/>\n`
  );
}

export function text(
  x: number,
  y: number,
  content: string,
  style = "",
  size = 12,
): string {
  const escaped = content
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
  return (
    `<text x="${fmt(x)}" y="${fmt(y)}" ${FONT} font-size="${size}" ${style}>` +
    `${escaped}</text>\n`
  );
}
