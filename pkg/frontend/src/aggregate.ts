/**
 * Trial aggregation: mean and standard error per sweep cell.
 *
 * Failed trials (the CSV `failed` flag) are dropped before any statistic is
 * computed; callers receive the dropped count for figure footnotes.
 */

import { CampaignRow } from "./csv";

export interface AggregatePoint {
  k: number;
  mean: number;
  stderr: number;
  trials: number;
}

export interface AggregateSeries {
  label: string;
  points: AggregatePoint[];
}

export interface Aggregation {
  series: AggregateSeries[];
  droppedFailed: number;
}

export function mean(values: number[]): number {
  return values.reduce((a, b) => a + b, 0) / values.length;
}

/** Standard error of the mean, with the n-1 variance denominator. */
export function stderr(values: number[]): number {
  if (values.length < 2) {
    return 0;
  }
  const m = mean(values);
  const ss = values.reduce((a, b) => a + (b - m) * (b - m), 0);
  return Math.sqrt(ss / (values.length - 1)) / Math.sqrt(values.length);
}

function groupBy<T>(rows: T[], key: (row: T) => string): Map<string, T[]> {
  const out = new Map<string, T[]>();
  for (const row of rows) {
    const k = key(row);
    const bucket = out.get(k);
    if (bucket) {
      bucket.push(row);
    } else {
      out.set(k, [row]);
    }
  }
  return out;
}

function numericAscending(a: string, b: string): number {
  return Number(a) - Number(b);
}

function aggregateBy(
  rows: CampaignRow[],
  seriesKey: (r: CampaignRow) => string,
  value: (r: CampaignRow) => number,
  labelPrefix: string,
): Aggregation {
  const ok = rows.filter((r) => r.failed === 0);
  const droppedFailed = rows.length - ok.length;
  const series: AggregateSeries[] = [];
  const bySeries = groupBy(ok, seriesKey);
  for (const key of [...bySeries.keys()].sort(numericAscending)) {
    const byK = groupBy(bySeries.get(key)!, (r) => String(r.k));
    const points: AggregatePoint[] = [];
    for (const kKey of [...byK.keys()].sort(numericAscending)) {
      const values = byK.get(kKey)!.map(value);
      points.push({
        k: Number(kKey),
        mean: mean(values),
        stderr: stderr(values),
        trials: values.length,
      });
    }
    series.push({ label: `${labelPrefix}${key}`, points });
  }
  return { series, droppedFailed };
}

/**
 * System rate vs user count, one series per group count, for one algorithm.
 */
export function aggregateRateVsK(
  rows: CampaignRow[],
  algorithm: string,
): Aggregation {
  const mine = rows.filter((r) => r.algorithm === algorithm);
  return aggregateBy(
    mine,
    (r) => String(r.g),
    (r) => r.system_rate_bpshz,
    "G=",
  );
}

/** Grouping wall time vs user count, one series per algorithm. */
export function aggregateTiming(rows: CampaignRow[]): Aggregation {
  const ok = rows.filter((r) => r.failed === 0);
  const droppedFailed = rows.length - ok.length;
  const series: AggregateSeries[] = [];
  const byAlg = groupBy(ok, (r) => r.algorithm);
  for (const alg of [...byAlg.keys()].sort()) {
    const byK = groupBy(byAlg.get(alg)!, (r) => String(r.k));
    const points: AggregatePoint[] = [];
    for (const kKey of [...byK.keys()].sort(numericAscending)) {
      const values = byK.get(kKey)!.map((r) => r.grouping_time_us);
      points.push({
        k: Number(kKey),
        mean: mean(values),
        stderr: stderr(values),
        trials: values.length,
      });
    }
    series.push({ label: alg, points });
  }
  return { series, droppedFailed };
}

export function algorithmsIn(rows: CampaignRow[]): string[] {
  return [...new Set(rows.map((r) => r.algorithm))].sort();
}
