/**
 * Figure rendering: CSV in, SVG out.
 *
 * Rendering is a pure function of the CSV bytes and styling; echarts runs in
 * server-side mode so repeated runs produce identical markup.
 */

import * as fs from "fs";
import * as path from "path";
import * as echarts from "echarts";
import type { EChartsOption } from "echarts";

import { aggregateRateVsK, aggregateTiming, algorithmsIn } from "./aggregate";
import { CAMPAIGN_COLUMNS, parseCampaignCsv, parseNumericCsv, readFileText } from "./csv";
import {
  FigureKind,
  Styling,
  curvesOption,
  heatmapOption,
  rateVsKOption,
  timingOption,
} from "./options";

export interface FigureSpec {
  kind: FigureKind;
  inputCsv: string;
  outputImage: string;
  styling: Styling;
  /** rate_vs_k only: which algorithm's rows to plot (default: first). */
  algorithm?: string;
}

export function buildOption(spec: FigureSpec, csvText: string): EChartsOption {
  switch (spec.kind) {
    case "rate_vs_k": {
      const rows = parseCampaignCsv(csvText);
      const algorithm = spec.algorithm ?? algorithmsIn(rows)[0];
      const styling = { ...spec.styling };
      styling.title ??= `System sum-rate vs user count (${algorithm})`;
      return rateVsKOption(aggregateRateVsK(rows, algorithm), styling);
    }
    case "timing": {
      const rows = parseCampaignCsv(csvText);
      return timingOption(aggregateTiming(rows), spec.styling);
    }
    case "omega_curves": {
      const { fields, rows } = parseNumericCsv(csvText, ["t", "omega"]);
      return curvesOption(fields, rows, "t", spec.styling);
    }
    case "beam_pattern": {
      const { fields, rows } = parseNumericCsv(csvText, ["theta"]);
      return curvesOption(fields, rows, "theta", spec.styling);
    }
    case "heatmap": {
      const { rows } = parseNumericCsv(csvText, ["x", "y", "intensity"]);
      return heatmapOption(rows, spec.styling);
    }
  }
}

export function renderOptionToSvg(
  option: EChartsOption,
  width: number,
  height: number,
): string {
  const chart = echarts.init(null, null, {
    renderer: "svg",
    ssr: true,
    width,
    height,
  });
  try {
    chart.setOption(option);
    // zrender bakes a per-process instance counter into CSS class names;
    // normalize it so identical inputs give byte-identical markup
    return chart.renderToSVGString().replace(/zr\d+-/g, "zr-");
  } finally {
    chart.dispose();
  }
}

/** Render a figure spec to its SVG file; returns the output path. */
export function render(spec: FigureSpec): string {
  const csvText = readFileText(spec.inputCsv);
  const option = buildOption(spec, csvText);
  const svg = renderOptionToSvg(option, spec.styling.width, spec.styling.height);
  fs.mkdirSync(path.dirname(path.resolve(spec.outputImage)), { recursive: true });
  fs.writeFileSync(spec.outputImage, svg);
  return spec.outputImage;
}

export { CAMPAIGN_COLUMNS };
