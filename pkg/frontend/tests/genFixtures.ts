/**
 * Generate real simulation-CLI outputs used by the integration tests.
 *
 * Everything is produced by invoking the Python CLI, never by writing
 * CSVs directly, so the tests exercise the actual file contract. Runs
 * are cached in tests/.fixtures between test invocations (the CLI is
 * deterministic, so the cache is safe); delete the directory to force
 * regeneration.
 */

import { execFileSync } from "node:child_process";
import { existsSync, mkdirSync, rmSync, writeFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

const HERE = dirname(fileURLToPath(import.meta.url));
export const FIXTURES = join(HERE, ".fixtures");
const DONE_MARKER = join(FIXTURES, ".done");

const GAMMA_N = "5.55e6";

function cli(args: string[]): void {
  execFileSync("python3", ["-m", "driventop.cli", ...args], {
    stdio: ["ignore", "pipe", "pipe"],
  });
}

export default function setup(): void {
  if (existsSync(DONE_MARKER)) {
    return;
  }
  rmSync(FIXTURES, { recursive: true, force: true });
  mkdirSync(join(FIXTURES, "classical"), { recursive: true });
  mkdirSync(join(FIXTURES, "classical-rerun"), { recursive: true });
  mkdirSync(join(FIXTURES, "purity"), { recursive: true });
  mkdirSync(join(FIXTURES, "trace"), { recursive: true });
  mkdirSync(join(FIXTURES, "tun"), { recursive: true });
  mkdirSync(join(FIXTURES, "tunb0"), { recursive: true });
  mkdirSync(join(FIXTURES, "scan"), { recursive: true });

  const classicalArgs = [
    "classical-map", "--beta", "1.009", "--gamma", "0.02", "--freq", "1.26",
    "--n-theta", "12", "--n-phi", "24",
  ];
  cli([...classicalArgs, "--output", join(FIXTURES, "classical", "map.csv")]);
  cli([...classicalArgs, "--output", join(FIXTURES, "classical-rerun", "map.csv")]);

  cli([
    "purity-map", "--two-i", "3", "--gamma-n", GAMMA_N, "--b0", "0.5",
    "--q", "4e5", "--b1", "1e-2", "--freq", "3.5e6", "--parameter", "Q",
    "--sigma", "4e3", "--periods", "50", "--members", "10", "--levels", "5",
    "--n-theta", "6", "--n-phi", "12", "--segments", "200", "--seed", "3",
    "--output", join(FIXTURES, "purity", "purity.csv"),
  ]);

  const driven = [
    "--donor", "Sb123", "--b0", "0.5", "--q", "0.8e6", "--b1", "10e-3",
    "--freq", "5e6",
  ];
  cli([
    "overlap-trace", ...driven, "--periods", "120",
    "--output", join(FIXTURES, "trace", "regular.csv"),
  ]);
  cli([
    "overlap-trace", ...driven, "--periods", "120",
    "--theta", "1.254", "--phi", "0.628",
    "--output", join(FIXTURES, "trace", "chaotic.csv"),
  ]);

  // Spin scan at fixed QI = 2.8 MHz (static wells: b1 = 0).
  const qiScan: Array<[string, string]> = [
    ["3", "1866666.6666666667"],
    ["5", "1120000.0"],
    ["7", "800000.0"],
  ];
  for (const [twoI, q] of qiScan) {
    cli([
      "tunneling", "--two-i", twoI, "--gamma-n", GAMMA_N, "--b0", "0.5",
      "--q", q, "--b1", "0", "--freq", "5e6",
      "--output", join(FIXTURES, "tun", `i${twoI}.csv`),
    ]);
  }
  for (const b0 of ["0.28", "0.5"]) {
    cli([
      "tunneling", "--two-i", "7", "--gamma-n", GAMMA_N, "--b0", b0,
      "--q", "800000.0", "--b1", "0", "--freq", "5e6",
      "--output", join(FIXTURES, "tunb0", `b0_${b0}.csv`),
    ]);
  }
  cli([
    "tunneling", ...driven,
    "--output", join(FIXTURES, "tun", "driven.csv"),
  ]);

  cli([
    "orientation-scan", "--donor", "Sb123", "--b0", "0.9", "--q", "0.8e6",
    "--eta", "0.4", "--plane", "zx", "--start", "0",
    "--stop", "3.141592653589793", "--n-angles", "13",
    "--output", join(FIXTURES, "scan", "scan.csv"),
  ]);

  cli([
    "husimi-frames", ...driven, "--frames", "18", "--stride", "1",
    "--n-theta", "24", "--n-phi", "48",
    "--output", join(FIXTURES, "husimi"),
  ]);

  writeFileSync(DONE_MARKER, "fixtures generated\n", "utf8");
}
