/**
 * Pure ECharts option builders, one per figure kind.
 *
 * Kept free of I/O so tests can assert on series structure directly; the
 * renderer turns the returned option into an SVG string.
 */

import type { EChartsOption, SeriesOption } from "echarts";

import { Aggregation } from "./aggregate";

export type FigureKind =
  | "rate_vs_k"
  | "timing"
  | "omega_curves"
  | "beam_pattern"
  | "heatmap";

export interface Styling {
  title?: string;
  width: number;
  height: number;
}

const PALETTE = [
  "#4c72b0",
  "#dd8452",
  "#55a868",
  "#c44e52",
  "#8172b3",
  "#937860",
  "#da8bc3",
];

function footnote(droppedFailed: number): string | undefined {
  return droppedFailed > 0
    ? `${droppedFailed} failed trial(s) dropped before aggregation`
    : undefined;
}

function baseOption(title: string | undefined, subtext?: string): EChartsOption {
  return {
    animation: false,
    title: title || subtext ? { text: title, subtext } : undefined,
    legend: { top: "bottom" },
    grid: { left: 60, right: 24, top: 48, bottom: 64 },
  };
}

/**
 * Mean system rate vs K, one line per group count, shaded +-1 standard
 * error via a stacked transparent band.
 */
export function rateVsKOption(agg: Aggregation, styling: Styling): EChartsOption {
  const series: SeriesOption[] = [];
  agg.series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const bandStack = `band-${s.label}`;
    series.push({
      name: `${s.label} band floor`,
      type: "line",
      data: s.points.map((p) => [p.k, p.mean - p.stderr]),
      stack: bandStack,
      lineStyle: { opacity: 0 },
      symbol: "none",
      tooltip: { show: false },
      silent: true,
    });
    series.push({
      name: `${s.label} band`,
      type: "line",
      data: s.points.map((p) => [p.k, 2 * p.stderr]),
      stack: bandStack,
      lineStyle: { opacity: 0 },
      symbol: "none",
      areaStyle: { color, opacity: 0.18 },
      tooltip: { show: false },
      silent: true,
    });
    series.push({
      name: s.label,
      type: "line",
      data: s.points.map((p) => [p.k, p.mean]),
      itemStyle: { color },
      lineStyle: { color },
    });
  });
  return {
    ...baseOption(styling.title ?? "System sum-rate vs user count",
      footnote(agg.droppedFailed)),
    legend: { top: "bottom", data: agg.series.map((s) => s.label) },
    xAxis: { type: "value", name: "users K" },
    yAxis: { type: "value", name: "sum rate (bits/s/Hz)" },
    series,
  };
}

/** Mean grouping wall time vs K on a log time axis, one line per algorithm. */
export function timingOption(agg: Aggregation, styling: Styling): EChartsOption {
  return {
    ...baseOption(styling.title ?? "Grouping time vs user count",
      footnote(agg.droppedFailed)),
    xAxis: { type: "value", name: "users K" },
    yAxis: { type: "log", name: "grouping time (us)" },
    series: agg.series.map((s, i) => ({
      name: s.label,
      type: "line",
      data: s.points.map((p) => [p.k, p.mean]),
      itemStyle: { color: PALETTE[i % PALETTE.length] },
    })),
  };
}

/** One line per numeric column (other than the x column) of a curve CSV. */
export function curvesOption(
  fields: string[],
  rows: Record<string, number>[],
  xField: string,
  styling: Styling,
  logY = false,
): EChartsOption {
  const yFields = fields.filter((f) => f !== xField);
  return {
    ...baseOption(styling.title),
    xAxis: { type: "value", name: xField },
    yAxis: { type: logY ? "log" : "value" },
    series: yFields.map((f, i) => ({
      name: f,
      type: "line" as const,
      showSymbol: false,
      data: rows
        .filter((r) => Number.isFinite(r[f]))
        .map((r) => [r[xField], r[f]]),
      itemStyle: { color: PALETTE[i % PALETTE.length] },
    })),
  };
}

/** (x, y, intensity) triples on category axes with a continuous color map. */
export function heatmapOption(
  rows: Record<string, number>[],
  styling: Styling,
): EChartsOption {
  const xs = [...new Set(rows.map((r) => r.x))].sort((a, b) => a - b);
  const ys = [...new Set(rows.map((r) => r.y))].sort((a, b) => a - b);
  const xIndex = new Map(xs.map((v, i) => [v, i]));
  const yIndex = new Map(ys.map((v, i) => [v, i]));
  // intensity spans many decades; color by log10 so the beams stay visible
  const floor = 1e-300;
  const data = rows
    .filter((r) => Number.isFinite(r.intensity))
    .map((r) => [
      xIndex.get(r.x)!,
      yIndex.get(r.y)!,
      Math.log10(Math.max(r.intensity, floor)),
    ]);
  const values = data.map((d) => d[2] as number);
  return {
    animation: false,
    title: styling.title ? { text: styling.title } : undefined,
    grid: { left: 70, right: 90, top: 32, bottom: 48 },
    xAxis: { type: "category", data: xs.map((v) => v.toFixed(1)), name: "x (m)" },
    yAxis: { type: "category", data: ys.map((v) => v.toFixed(1)), name: "y (m)" },
    visualMap: {
      min: Math.min(...values),
      max: Math.max(...values),
      calculable: false,
      orient: "vertical",
      right: 8,
      top: "center",
      text: ["log10 intensity", ""],
      inRange: { color: ["#0d0887", "#7e03a8", "#cc4778", "#f89441", "#f0f921"] },
    },
    series: [{ type: "heatmap", data, progressive: 0 }],
  };
}
