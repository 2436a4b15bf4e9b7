/**
 * CSV readers for the simulator's output files.
 *
 * All files may carry `#`-prefixed comment lines (the campaign CSV logs its
 * master seed that way). Parsing is strict about the columns each figure
 * kind needs: a missing column is a hard error naming every absent field.
 */

import * as fs from "fs";
import Papa from "papaparse";

export interface CampaignRow {
  trial: number;
  k: number;
  g: number;
  algorithm: string;
  precoder: string;
  system_rate_bpshz: number;
  grouping_time_us: number;
  total_time_us: number;
  failed: number;
}

export const CAMPAIGN_COLUMNS = [
  "trial",
  "k",
  "g",
  "algorithm",
  "precoder",
  "system_rate_bpshz",
  "grouping_time_us",
  "total_time_us",
  "failed",
] as const;

export class SchemaError extends Error {
  readonly missing: string[];

  constructor(missing: string[]) {
    super(`CSV is missing required columns: ${missing.join(", ")}`);
    this.missing = missing;
  }
}

interface RawTable {
  fields: string[];
  rows: Record<string, string>[];
}

function parseTable(text: string): RawTable {
  const result = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    comments: "#",
    skipEmptyLines: true,
  });
  const fields = result.meta.fields ?? [];
  return { fields, rows: result.data };
}

function requireColumns(table: RawTable, required: readonly string[]): void {
  const missing = required.filter((c) => !table.fields.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(missing);
  }
}

export function parseCampaignCsv(text: string): CampaignRow[] {
  const table = parseTable(text);
  requireColumns(table, CAMPAIGN_COLUMNS);
  return table.rows.map((r) => ({
    trial: Number(r.trial),
    k: Number(r.k),
    g: Number(r.g),
    algorithm: r.algorithm,
    precoder: r.precoder,
    system_rate_bpshz: Number(r.system_rate_bpshz),
    grouping_time_us: Number(r.grouping_time_us),
    total_time_us: Number(r.total_time_us),
    failed: Number(r.failed),
  }));
}

/** Generic numeric table for the curve/pattern/map CSVs. */
export function parseNumericCsv(
  text: string,
  required: readonly string[],
): { fields: string[]; rows: Record<string, number>[] } {
  const table = parseTable(text);
  requireColumns(table, required);
  const rows = table.rows.map((r) => {
    const out: Record<string, number> = {};
    for (const f of table.fields) {
      out[f] = r[f] === "" || r[f] === undefined ? NaN : Number(r[f]);
    }
    return out;
  });
  return { fields: table.fields, rows };
}

export function readFileText(path: string): string {
  return fs.readFileSync(path, "utf8");
}
