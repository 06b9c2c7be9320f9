import {
  copyFileSync,
  existsSync,
  mkdtempSync,
  readFileSync,
  writeFileSync,
} from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { main } from "../src/cli.js";
import { CsvRow, readCsv } from "../src/csv.js";
import { FigureInputError } from "../src/errors.js";
import { manifestFor, numberField } from "../src/manifest.js";
import { RECIPES, getRecipe } from "../src/recipes.js";
import { FIXTURES } from "./genFixtures.js";

const CLASSICAL = join(FIXTURES, "classical", "map.csv");
const CLASSICAL_RERUN = join(FIXTURES, "classical-rerun", "map.csv");
const PURITY = join(FIXTURES, "purity", "purity.csv");
const TRACE_REGULAR = join(FIXTURES, "trace", "regular.csv");
const TRACE_CHAOTIC = join(FIXTURES, "trace", "chaotic.csv");
const TUN_SPINS = ["3", "5", "7"].map((twoI) => join(FIXTURES, "tun", `i${twoI}.csv`));
const TUN_FIELDS = ["0.28", "0.5"].map((b0) => join(FIXTURES, "tunb0", `b0_${b0}.csv`));
const TUN_DRIVEN = join(FIXTURES, "tun", "driven.csv");
const SCAN = join(FIXTURES, "scan", "scan.csv");
const HUSIMI_DIR = join(FIXTURES, "husimi");

const outDir = () => mkdtempSync(join(tmpdir(), "figures-out-"));

function render(id: string, inputs: string[]): string {
  const path = join(outDir(), `${id}.svg`);
  const written = getRecipe(id).render(inputs, path);
  expect(written).toEqual([path]);
  return path;
}

function svgOf(id: string, inputs: string[]): string {
  const path = render(id, inputs);
  const svg = readFileSync(path, "utf8");
  expect(svg.startsWith("<svg ")).toBe(true);
  expect(svg.endsWith("</svg>\n")).toBe(true);
  expect(svg).not.toContain("NaN");
  expect(svg).not.toContain("undefined");
  return svg;
}

function countOf(haystack: string, needle: string): number {
  return haystack.split(needle).length - 1;
}

describe("figure rendering from real CLI outputs", () => {
  it("classical-map draws every grid cell and flags chaotic ones", () => {
    const svg = svgOf("classical-map", [CLASSICAL]);
    expect(svg).toContain("classical chaos map");
    expect(countOf(svg, "<polygon ")).toBeGreaterThanOrEqual(12 * 24);
    expect(svg).toContain('stroke="white"');
  });

  it("purity-map renders the ensemble purity with a colorbar", () => {
    const svg = svgOf("purity-map", [PURITY]);
    expect(svg).toContain("ensemble purity map");
    expect(countOf(svg, "<polygon ")).toBeGreaterThanOrEqual(6 * 12);
    expect(countOf(svg, "<rect ")).toBeGreaterThan(60);
  });

  it("overlap-trace overlays regular and chaotic seed curves", () => {
    const svg = svgOf("overlap-trace", [TRACE_REGULAR, TRACE_CHAOTIC]);
    expect(svg).toContain("time (us)");
    expect(countOf(svg, 'stroke="#1f77b4"')).toBeGreaterThanOrEqual(1);
    expect(countOf(svg, 'stroke="#d62728"')).toBeGreaterThanOrEqual(1);
    expect(countOf(svg, "seed theta=")).toBe(2);
  });

  it("tunneling-scan plots log frequency vs spin I", () => {
    const svg = svgOf("tunneling-scan", TUN_SPINS);
    expect(svg).toContain("spin I");
    expect(svg).toContain("1e");
    expect(countOf(svg, "<circle ")).toBe(3);
  });

  it("tunneling-scan falls back to a B0 axis", () => {
    const svg = svgOf("tunneling-scan", TUN_FIELDS);
    expect(svg).toContain("B0 (T)");
    expect(countOf(svg, "<circle ")).toBe(2);
  });

  it("tunneling-scan refuses inputs with no scanned parameter", () => {
    expect(() => render("tunneling-scan", [TUN_DRIVEN, TUN_DRIVEN])).toThrowError(
      /do not vary/,
    );
  });

  it("spectrum-panel draws markers plus traced branches from the sidecar", () => {
    const svg = svgOf("spectrum-panel", [SCAN]);
    expect(svg).toContain("plane zx");
    expect(countOf(svg, "<circle ")).toBeGreaterThan(50);
    expect(countOf(svg, "<polyline ")).toBeGreaterThanOrEqual(5);
  });

  it("husimi-animation cycles one SMIL frame per stored snapshot", () => {
    const svg = svgOf("husimi-animation", [HUSIMI_DIR]);
    expect(svg).toContain("1/pi");
    expect(countOf(svg, "<animate ")).toBe(18);
    expect(countOf(svg, "t = ")).toBe(18);
    expect(svg).toContain('calcMode="discrete"');
  });
});

describe("pixel determinism", () => {
  const cases: Array<[string, string[]]> = [
    ["classical-map", [CLASSICAL]],
    ["purity-map", [PURITY]],
    ["overlap-trace", [TRACE_REGULAR, TRACE_CHAOTIC]],
    ["tunneling-scan", TUN_SPINS],
    ["spectrum-panel", [SCAN]],
    ["husimi-animation", [HUSIMI_DIR]],
  ];
  it.each(cases)("%s renders byte-identical SVG twice", (id, inputs) => {
    const first = readFileSync(render(id, inputs));
    const second = readFileSync(render(id, inputs));
    expect(second.equals(first)).toBe(true);
  });

  it("an independent CLI rerun renders byte-identical output", () => {
    const first = readFileSync(render("classical-map", [CLASSICAL]));
    const rerun = readFileSync(render("classical-map", [CLASSICAL_RERUN]));
    expect(rerun.equals(first)).toBe(true);
  });
});

describe("husimi mass transfer between islands", () => {
  const columns = ["theta", "phi", "husimi"] as const;

  function islandMass(rows: CsvRow[], thetaStar: number, phiCenter: number): number {
    let mass = 0.0;
    for (const row of rows) {
      const theta = row["theta"] ?? 0.0;
      const phi = row["phi"] ?? 0.0;
      const cosDist =
        Math.cos(theta) * Math.cos(thetaStar) +
        Math.sin(theta) * Math.sin(thetaStar) * Math.cos(phi - phiCenter);
      if (Math.acos(Math.min(Math.max(cosDist, -1), 1)) <= 0.6) {
        mass += (row["husimi"] ?? 0.0) * Math.sin(theta);
      }
    }
    return mass;
  }

  it("moves Husimi mass from the seeded island to its partner", () => {
    const manifest = manifestFor(HUSIMI_DIR);
    const thetaStar = numberField(manifest, "derived", "seed_theta");
    const drivePeriod = numberField(manifest, "derived", "drive_period_s");
    const tunPeriod = numberField(
      manifestFor(TUN_DRIVEN),
      "derived",
      "tunneling_period_s",
    );
    const halfIndex = Math.round(tunPeriod / 2.0 / drivePeriod);
    expect(halfIndex).toBeGreaterThan(2);
    expect(halfIndex).toBeLessThan(18);

    const start = readCsv(join(HUSIMI_DIR, "frame_0000.csv"), columns);
    const half = readCsv(
      join(HUSIMI_DIR, `frame_${String(halfIndex).padStart(4, "0")}.csv`),
      columns,
    );
    const massA0 = islandMass(start, thetaStar, 0.0);
    const massB0 = islandMass(start, thetaStar, Math.PI);
    const massAHalf = islandMass(half, thetaStar, 0.0);
    const massBHalf = islandMass(half, thetaStar, Math.PI);
    expect(massA0).toBeGreaterThan(3.0 * massB0);
    expect(massBHalf).toBeGreaterThan(massAHalf);
  });
});

describe("input guards", () => {
  it("rejects a CSV from the wrong experiment", () => {
    expect(() => render("purity-map", [CLASSICAL])).toThrowError(
      /manifest experiment "classical-map" does not match/,
    );
  });

  it("rejects a wrong input count", () => {
    expect(() => render("classical-map", [CLASSICAL, CLASSICAL])).toThrowError(
      /expected 1 input path\(s\), got 2/,
    );
  });

  it("reports a missing column with the offending file", () => {
    const dir = mkdtempSync(join(tmpdir(), "figures-bad-"));
    const csv = join(dir, "map.csv");
    writeFileSync(csv, "theta,phi\n0.1,0.2\n", "utf8");
    copyFileSync(
      join(FIXTURES, "classical", "map.manifest.json"),
      join(dir, "map.manifest.json"),
    );
    try {
      render("classical-map", [csv]);
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(FigureInputError);
      const message = (err as Error).message;
      expect(message).toContain(csv);
      expect(message).toContain('"exponent"');
    }
  });

  it("refuses a manifest with an unsupported schema version", () => {
    const dir = mkdtempSync(join(tmpdir(), "figures-schema-"));
    const csv = join(dir, "map.csv");
    copyFileSync(CLASSICAL, csv);
    const manifest = JSON.parse(
      readFileSync(join(FIXTURES, "classical", "map.manifest.json"), "utf8"),
    ) as Record<string, unknown>;
    manifest["schema_version"] = 99;
    writeFileSync(join(dir, "map.manifest.json"), JSON.stringify(manifest), "utf8");
    expect(() => render("classical-map", [csv])).toThrowError(/schema_version 99/);
  });

  it("lists the known figures for an unknown id", () => {
    expect(() => getRecipe("nope")).toThrowError(/known: classical-map/);
    expect(RECIPES.length).toBe(6);
  });
});

describe("command line front end", () => {
  it("renders through main() with exit code 0", () => {
    const path = join(outDir(), "cli.svg");
    const code = main(["render", "classical-map", "--input", CLASSICAL, "--output", path]);
    expect(code).toBe(0);
    expect(existsSync(path)).toBe(true);
  });

  it("returns 1 for unknown figures, bad usage, and missing inputs", () => {
    const path = join(outDir(), "never.svg");
    expect(main(["render", "nope", "--input", CLASSICAL, "--output", path])).toBe(1);
    expect(main(["render"])).toBe(1);
    expect(main(["bogus-command"])).toBe(1);
    expect(
      main(["render", "classical-map", "--input", "/does/not/exist.csv", "--output", path]),
    ).toBe(1);
  });

  it("lists recipes with exit code 0", () => {
    expect(main(["list"])).toBe(0);
  });
});
