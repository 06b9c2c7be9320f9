import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { distinct, readCsv } from "../src/csv.js";
import { FigureInputError } from "../src/errors.js";
import {
  manifestCandidatesFor,
  manifestFor,
  numberField,
  readManifest,
} from "../src/manifest.js";

const tmp = () => mkdtempSync(join(tmpdir(), "figures-test-"));

function writeManifest(path: string, overrides: Record<string, unknown> = {}): void {
  writeFileSync(
    path,
    JSON.stringify({
      schema_version: 1,
      experiment: "classical-map",
      artifact_version: "0.1.0",
      seed: 0,
      workers: 1,
      parameters: { beta: 1.0 },
      tolerances: {},
      derived: {},
      outputs: ["map.csv"],
      wall_time_seconds: 0.1,
      ...overrides,
    }),
    "utf8",
  );
}

describe("readCsv", () => {
  it("parses numeric rows keyed by header", () => {
    const dir = tmp();
    const path = join(dir, "data.csv");
    writeFileSync(path, "a,b\n1,2.5\n3,nan\n", "utf8");
    const rows = readCsv(path, ["a", "b"]);
    expect(rows).toHaveLength(2);
    expect(rows[0]).toEqual({ a: 1, b: 2.5 });
    expect(Number.isNaN(rows[1]?.b)).toBe(true);
  });

  it("reports a missing column together with the offending file", () => {
    const dir = tmp();
    const path = join(dir, "broken.csv");
    writeFileSync(path, "theta,phi\n0.1,0.2\n", "utf8");
    expect(() => readCsv(path, ["theta", "phi", "exponent"])).toThrowError(
      FigureInputError,
    );
    try {
      readCsv(path, ["exponent"]);
      expect.unreachable();
    } catch (err) {
      const message = (err as Error).message;
      expect(message).toContain("broken.csv");
      expect(message).toContain('missing required column "exponent"');
      expect(message).toContain("theta");
    }
  });

  it("rejects non-numeric cells with row context", () => {
    const dir = tmp();
    const path = join(dir, "text.csv");
    writeFileSync(path, "a\nhello\n", "utf8");
    expect(() => readCsv(path, ["a"])).toThrowError(/text\.csv: row 2/);
  });

  it("collects distinct values in order", () => {
    const rows = [{ x: 2 }, { x: 1 }, { x: 2 }, { x: 3 }];
    expect(distinct(rows, "x")).toEqual([2, 1, 3]);
  });
});

describe("readManifest", () => {
  it("accepts the supported schema version", () => {
    const dir = tmp();
    const path = join(dir, "run.manifest.json");
    writeManifest(path);
    expect(readManifest(path).experiment).toBe("classical-map");
  });

  it("refuses a mismatched schema version, naming the file", () => {
    const dir = tmp();
    const path = join(dir, "run.manifest.json");
    writeManifest(path, { schema_version: 2 });
    expect(() => readManifest(path)).toThrowError(
      /run\.manifest\.json: unsupported manifest schema_version 2/,
    );
  });

  it("reports unreadable and non-JSON files", () => {
    const dir = tmp();
    expect(() => readManifest(join(dir, "absent.json"))).toThrowError(/not found/);
    const bad = join(dir, "bad.json");
    writeFileSync(bad, "{", "utf8");
    expect(() => readManifest(bad)).toThrowError(/not valid JSON/);
  });
});

describe("manifestFor", () => {
  it("locates the sibling manifest of a single-file run", () => {
    const dir = tmp();
    writeManifest(join(dir, "run.manifest.json"));
    expect(manifestFor(join(dir, "run.csv")).experiment).toBe("classical-map");
  });

  it("locates the main manifest of a named sidecar output", () => {
    const dir = tmp();
    writeManifest(join(dir, "scan.manifest.json"), {
      experiment: "orientation-scan",
      outputs: ["scan.csv", "scan.branches.csv"],
    });
    expect(manifestFor(join(dir, "scan.branches.csv")).experiment).toBe(
      "orientation-scan",
    );
  });

  it("locates manifest.json inside a run directory", () => {
    const dir = tmp();
    writeManifest(join(dir, "manifest.json"), { experiment: "husimi-frames" });
    expect(manifestFor(dir).experiment).toBe("husimi-frames");
  });

  it("prefers the full-stem manifest for dotted file names", () => {
    const candidates = manifestCandidatesFor("/x/run.v2.csv");
    expect(candidates[0]).toBe("/x/run.v2.manifest.json");
    expect(candidates[1]).toBe("/x/run.manifest.json");
  });
});

describe("numberField", () => {
  it("raises a clear error for missing numeric fields", () => {
    const dir = tmp();
    const path = join(dir, "run.manifest.json");
    writeManifest(path);
    const manifest = readManifest(path);
    expect(numberField(manifest, "parameters", "beta")).toBe(1.0);
    expect(() => numberField(manifest, "derived", "absent")).toThrowError(
      /derived\.absent/,
    );
  });
});
