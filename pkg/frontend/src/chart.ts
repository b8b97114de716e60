import type { Acf, Component, ForecastResponse } from "./types.js";

export interface XyPoint {
  x: number;
  y: number;
}

export interface LineSeries {
  label: string;
  points: XyPoint[];
}

export interface AcfChartData {
  bars: XyPoint[];
  upperBand: number;
  lowerBand: number;
  /** Lags whose correlation magnitude exceeds the white-noise band. */
  significant: number[];
}

/** Day-indexed line for a raw series (day 0 = first observation). */
export function seriesLine(label: string, values: readonly number[], startDay = 0): LineSeries {
  return {
    label,
    points: values.map((y, i) => ({ x: startDay + i, y })),
  };
}

/** One line per component, in application order. */
export function componentLines(components: readonly Component[]): LineSeries[] {
  return components.map((c) => seriesLine(c.label, c.contribution));
}

/**
 * Stack components cumulatively so the top line reconstructs the fitted
 * series; useful for an area chart of the decomposition.
 */
export function stackedComponentLines(components: readonly Component[]): LineSeries[] {
  const lines: LineSeries[] = [];
  let running: number[] | null = null;
  for (const c of components) {
    running = running === null
      ? [...c.contribution]
      : running.map((v, i) => v + (c.contribution[i] ?? 0));
    lines.push(seriesLine(c.label, running));
  }
  return lines;
}

/** Correlogram bars plus the ±band and lags poking outside it. */
export function acfChartData(acf: Acf): AcfChartData {
  const bars = acf.lags.map((lag, i) => ({ x: lag, y: acf.correlations[i] ?? 0 }));
  const significant = bars
    .filter((b) => Math.abs(b.y) > acf.white_noise_band)
    .map((b) => b.x);
  return {
    bars,
    upperBand: acf.white_noise_band,
    lowerBand: -acf.white_noise_band,
    significant,
  };
}

/** White-noise band for a series of length n at the 95% level. */
export function whiteNoiseBand(n: number): number {
  return 1.96 / Math.sqrt(n);
}

/**
 * History plus forecast as continuous lines: the forecast starts at day
 * `historyLength` so both can share one x axis.
 */
export function forecastLines(history: readonly number[], forecast: ForecastResponse): LineSeries[] {
  return [
    seriesLine("history", history),
    seriesLine("forecast", forecast.predicted, history.length),
  ];
}
