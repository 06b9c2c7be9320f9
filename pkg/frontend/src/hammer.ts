/**
 * Hammer equal-area projection of the sphere, used for phase-space and
 * Husimi maps. Sphere points arrive as polar angle theta in [0, pi]
 * (0 = +z) and azimuth phi in [0, 2pi]; the projected ellipse spans
 * x in [-2*sqrt(2), 2*sqrt(2)], y in [-sqrt(2), sqrt(2)], with phi = pi
 * mapped to the central meridian so both islands of a period-doubled
 * pair stay away from the seam.
 */

export const HAMMER_HALF_WIDTH = 2.0 * Math.SQRT2;
export const HAMMER_HALF_HEIGHT = Math.SQRT2;

export interface PlanePoint {
  x: number;
  y: number;
}

/** Project sphere angles to Hammer plane coordinates. */
export function hammerProject(theta: number, phi: number): PlanePoint {
  let p = phi;
  if (p < 0.0 || p > 2.0 * Math.PI) {
    p -= 2.0 * Math.PI * Math.floor(p / (2.0 * Math.PI));
  }
  const lat = Math.PI / 2.0 - theta;
  const lon = p - Math.PI;
  const denom = Math.sqrt(1.0 + Math.cos(lat) * Math.cos(lon / 2.0));
  return {
    x: (2.0 * Math.SQRT2 * Math.cos(lat) * Math.sin(lon / 2.0)) / denom,
    y: (Math.SQRT2 * Math.sin(lat)) / denom,
  };
}

/**
 * Projected outline of the grid cell centered on (theta, phi).
 *
 * The boundary is clamped into theta in [0, pi], phi in [0, 2pi], so a
 * cell never straddles the projection seam; corners and edge midpoints
 * are projected individually so cells stay area-faithful near the rim.
 */
export function hammerCell(
  theta: number,
  phi: number,
  dTheta: number,
  dPhi: number,
): PlanePoint[] {
  const tLo = Math.max(theta - dTheta / 2.0, 0.0);
  const tHi = Math.min(theta + dTheta / 2.0, Math.PI);
  const pLo = Math.max(phi - dPhi / 2.0, 0.0);
  const pHi = Math.min(phi + dPhi / 2.0, 2.0 * Math.PI);
  const tMid = (tLo + tHi) / 2.0;
  const pMid = (pLo + pHi) / 2.0;
  return [
    hammerProject(tHi, pLo),
    hammerProject(tHi, pMid),
    hammerProject(tHi, pHi),
    hammerProject(tMid, pHi),
    hammerProject(tLo, pHi),
    hammerProject(tLo, pMid),
    hammerProject(tLo, pLo),
    hammerProject(tMid, pLo),
  ];
}
