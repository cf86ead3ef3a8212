// Node bindings for the geobias command line. No scoring logic lives
// here: every call marshals data to the CLI through temp files and
// parses the files it writes back, so the numbers are the core's
// numbers bit for bit. Calls block; the core may thread internally.

import { spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

/** One map row: longitude and latitude in degrees, then the mark. */
export type PointRow = [lon: number, lat: number, perf: number];

export interface ComputeConfig {
  scores?: string[];
  radius?: number;
  scale?: number;
  lag?: number;
  sectors?: number;
  bins?: number[];
  alpha?: number;
  kl_order?: "roi_patch" | "patch_roi";
  rho?: number;
  k_neighbors?: number;
  bg_floor?: number;
  max_pattern_points?: number;
  min_points?: number;
  center_policy?: "every_point" | "sample";
  sample_size?: number;
  seed?: number;
  threads?: number;
}

export interface SweepConfig {
  radii: number[];
  scales?: number[];
  lags?: number[];
  sector_counts?: number[];
  alpha?: number;
  min_points?: number;
  kl_order?: "roi_patch" | "patch_roi";
}

export interface SynthOptions {
  center_lon?: number;
  center_lat?: number;
  cap_radius?: number;
  cell?: number;
  ring_width?: number;
  sectors?: number;
}

/** One row of locals.csv; unscored cells come back as null. */
export interface LocalRecord {
  lon: number;
  lat: number;
  u_ssi: number | null;
  m_ssi: number | null;
  sg_sre: number | null;
  dl_sre: number | null;
  ds_sre: number | null;
  scoreable: boolean;
}

export interface SweepCell {
  radius: number;
  kind: string;
  param: number;
  value: number | null;
  error: string | null;
}

/** Parsed report plus the raw file texts the core wrote. */
export interface BoundReport {
  hyperparameters: Record<string, unknown>;
  globals: Record<string, number | null>;
  roi_counts: Record<string, number>;
  locals: LocalRecord[];
  locals_csv: string;
  locals_geojson: string;
  summary_json: string;
}

/** Carries the core's stable error code alongside the message. */
export class GeoBiasError extends Error {
  readonly code: string;
  readonly exitStatus: number;

  constructor(code: string, message: string, exitStatus: number) {
    super(message);
    this.name = "GeoBiasError";
    this.code = code;
    this.exitStatus = exitStatus;
  }
}

const PYTHON = process.env.GEOBIAS_PYTHON ?? "python3";

const COMPUTE_KEYS = new Set([
  "scores", "radius", "scale", "lag", "sectors", "bins", "alpha",
  "kl_order", "rho", "k_neighbors", "bg_floor", "max_pattern_points",
  "min_points", "center_policy", "sample_size", "seed", "threads",
]);
const SWEEP_KEYS = new Set([
  "radii", "scales", "lags", "sector_counts", "alpha", "min_points",
  "kl_order",
]);
const SYNTH_KEYS = new Set([
  "center_lon", "center_lat", "cap_radius", "cell", "ring_width", "sectors",
]);

const LOCALS_HEADER = "lon,lat,u_ssi,m_ssi,sg_sre,dl_sre,ds_sre,scoreable";
const MAP_HEADER = "lon,lat,perf";

function checkKeys(config: object, allowed: Set<string>, what: string): void {
  for (const key of Object.keys(config)) {
    if (!allowed.has(key)) {
      throw new GeoBiasError("usage_error",
        `unknown ${what} key '${key}'`, 2);
    }
  }
}

function runCli(args: string[]): string {
  const proc = spawnSync(PYTHON, ["-m", "geobias", ...args], {
    encoding: "utf-8",
    maxBuffer: 1 << 28,
  });
  if (proc.error) {
    throw proc.error;
  }
  const status = proc.status ?? 1;
  if (status !== 0) {
    const stderr = proc.stderr ?? "";
    const match = /^geobias: error: ([a-z_]+): (.*)$/m.exec(stderr);
    if (match) {
      throw new GeoBiasError(match[1], match[2], status);
    }
    // Argument-parser rejections exit 2 without the structured prefix.
    throw new GeoBiasError(status === 2 ? "usage_error" : "geobias_error",
      stderr.trim() || "geobias command failed", status);
  }
  return proc.stdout;
}

function pointsToCsv(points: PointRow[]): string {
  const lines = [MAP_HEADER];
  for (const [lon, lat, perf] of points) {
    lines.push(`${lon},${lat},${perf}`);
  }
  return lines.join("\n") + "\n";
}

function csvToPoints(text: string): PointRow[] {
  const lines = text.split("\n").filter((line) => line.length > 0);
  if (lines[0] !== MAP_HEADER) {
    throw new GeoBiasError("parse_error",
      `unexpected map header ${JSON.stringify(lines[0])}`, 1);
  }
  return lines.slice(1).map((line) => {
    const cells = line.split(",");
    return [Number(cells[0]), Number(cells[1]), Number(cells[2])];
  });
}

function cell(value: string): number | null {
  return value === "" ? null : Number(value);
}

function parseLocalsCsv(text: string): LocalRecord[] {
  const lines = text.split("\n").filter((line) => line.length > 0);
  if (lines[0] !== LOCALS_HEADER) {
    throw new GeoBiasError("parse_error",
      `unexpected locals header ${JSON.stringify(lines[0])}`, 1);
  }
  return lines.slice(1).map((line) => {
    const c = line.split(",");
    return {
      lon: Number(c[0]),
      lat: Number(c[1]),
      u_ssi: cell(c[2]),
      m_ssi: cell(c[3]),
      sg_sre: cell(c[4]),
      dl_sre: cell(c[5]),
      ds_sre: cell(c[6]),
      scoreable: c[7] === "true",
    };
  });
}

function numberList(values: number[]): string {
  return values.map((v) => `${v}`).join(",");
}

function withTempDir<T>(fn: (dir: string) => T): T {
  const dir = mkdtempSync(join(tmpdir(), "geobias-"));
  try {
    return fn(dir);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

function computeFlags(config: ComputeConfig): string[] {
  const flags: string[] = [];
  if (config.scores !== undefined) flags.push("--scores", config.scores.join(","));
  if (config.radius !== undefined) flags.push("--radius", `${config.radius}`);
  if (config.scale !== undefined) flags.push("--scale", `${config.scale}`);
  if (config.lag !== undefined) flags.push("--lag", `${config.lag}`);
  if (config.sectors !== undefined) flags.push("--sectors", `${config.sectors}`);
  if (config.bins !== undefined) flags.push("--bins", numberList(config.bins));
  if (config.alpha !== undefined) flags.push("--alpha", `${config.alpha}`);
  if (config.kl_order !== undefined) flags.push("--kl-order", config.kl_order);
  if (config.rho !== undefined) flags.push("--rho", `${config.rho}`);
  if (config.k_neighbors !== undefined) flags.push("--k-neighbors", `${config.k_neighbors}`);
  if (config.bg_floor !== undefined) flags.push("--bg-floor", `${config.bg_floor}`);
  if (config.max_pattern_points !== undefined) {
    flags.push("--max-pattern-points", `${config.max_pattern_points}`);
  }
  if (config.min_points !== undefined) flags.push("--min-points", `${config.min_points}`);
  if (config.center_policy !== undefined) flags.push("--center-policy", config.center_policy);
  if (config.sample_size !== undefined) flags.push("--sample-size", `${config.sample_size}`);
  if (config.seed !== undefined) flags.push("--seed", `${config.seed}`);
  if (config.threads !== undefined) flags.push("--threads", `${config.threads}`);
  return flags;
}

/** Score a performance map; identical numbers to the compute command. */
export function compute(points: PointRow[], config: ComputeConfig = {}): BoundReport {
  checkKeys(config, COMPUTE_KEYS, "config");
  return withTempDir((dir) => {
    const input = join(dir, "input.csv");
    writeFileSync(input, pointsToCsv(points), "utf-8");
    const out = join(dir, "out");
    runCli(["compute", "--input", input, "--out", out,
      ...computeFlags(config)]);
    const summaryJson = readFileSync(join(out, "summary.json"), "utf-8");
    const localsCsv = readFileSync(join(out, "locals.csv"), "utf-8");
    const localsGeojson = readFileSync(join(out, "locals.geojson"), "utf-8");
    const summary = JSON.parse(summaryJson);
    return {
      hyperparameters: summary.hyperparameters,
      globals: summary.globals,
      roi_counts: summary.roi_counts,
      locals: parseLocalsCsv(localsCsv),
      locals_csv: localsCsv,
      locals_geojson: localsGeojson,
      summary_json: summaryJson,
    };
  });
}

/** Global SRE over a hyperparameter grid; one cell per combination. */
export function sweep(points: PointRow[], config: SweepConfig): SweepCell[] {
  checkKeys(config, SWEEP_KEYS, "sweep");
  if (!config.radii || config.radii.length === 0) {
    throw new GeoBiasError("usage_error", "sweep needs at least one radius", 2);
  }
  return withTempDir((dir) => {
    const input = join(dir, "input.csv");
    writeFileSync(input, pointsToCsv(points), "utf-8");
    const flags: string[] = ["--radii", numberList(config.radii)];
    if (config.scales !== undefined) flags.push("--scales", numberList(config.scales));
    if (config.lags !== undefined) flags.push("--lags", numberList(config.lags));
    if (config.sector_counts !== undefined) {
      flags.push("--sector-counts", config.sector_counts.map((v) => `${v}`).join(","));
    }
    if (config.alpha !== undefined) flags.push("--alpha", `${config.alpha}`);
    if (config.min_points !== undefined) flags.push("--min-points", `${config.min_points}`);
    if (config.kl_order !== undefined) flags.push("--kl-order", config.kl_order);
    const stdout = runCli(["sweep", "--input", input, ...flags]);
    return JSON.parse(stdout).cells;
  });
}

/** Generate a synthetic benchmark map; identical rows to the synth command. */
export function synth(pattern: string, n: number, seed = 0,
                      options: SynthOptions = {}): PointRow[] {
  checkKeys(options, SYNTH_KEYS, "synth option");
  const flags: string[] = [];
  if (options.center_lon !== undefined) flags.push("--center-lon", `${options.center_lon}`);
  if (options.center_lat !== undefined) flags.push("--center-lat", `${options.center_lat}`);
  if (options.cap_radius !== undefined) flags.push("--cap-radius", `${options.cap_radius}`);
  if (options.cell !== undefined) flags.push("--cell", `${options.cell}`);
  if (options.ring_width !== undefined) flags.push("--ring-width", `${options.ring_width}`);
  if (options.sectors !== undefined) flags.push("--pattern-sectors", `${options.sectors}`);
  const stdout = runCli(["synth", "--pattern", pattern, "--n", `${n}`,
    "--seed", `${seed}`, ...flags]);
  return csvToPoints(stdout);
}
