/** Payload shapes for the perfdecomp HTTP service (API version v1). */

export type Band =
  | "trend"
  | "subweekly"
  | "weekly"
  | "monthly"
  | "quarterly"
  | "residue";

export type ModelFamily =
  | "linear"
  | "piecewise"
  | "loess"
  | "ma"
  | "sinusoid"
  | "hwes";

export interface SeriesSummary {
  length: number;
  mean: number;
  std: number;
  min: number;
  max: number;
}

export interface RunsTest {
  random: boolean;
  p_value: number;
  degenerate: boolean;
  suggested_period?: number;
}

export interface Acf {
  lags: number[];
  correlations: number[];
  white_noise_band: number;
}

export interface FittedModel {
  family: ModelFamily;
  params: Record<string, unknown>;
}

export interface Component {
  label: string;
  band: Band;
  model: FittedModel | null;
  period_days: number | null;
  contribution: number[];
}

export interface TracePayload {
  start_date: string;
  unit: string;
  values: number[];
}

export interface DecompositionResult {
  source: TracePayload;
  components: Component[];
  residual: number[];
  residual_random: boolean;
  residual_p_value: number;
  diagnostics: Record<string, unknown>;
  tool_version: string;
}

export interface Validation {
  valid: boolean;
  problems: string[];
}

export interface SessionCreated {
  id: string;
  revision: number;
  validation: Validation;
  outliers_replaced: number;
  preview: { start_date: string } & SeriesSummary;
}

export interface SessionStep {
  band: Band;
  family: ModelFamily;
  params: Record<string, unknown>;
  component: Component;
}

export interface SessionDetail {
  id: string;
  revision: number;
  trace: TracePayload;
  steps: SessionStep[];
  residual: number[];
  residual_summary: SeriesSummary;
  runs_test: RunsTest;
  acf: Acf;
}

export interface StepResponse {
  revision: number;
  component: Component;
  residual_summary: SeriesSummary;
  runs_test: RunsTest;
  acf: Acf;
}

export interface UndoResponse {
  revision: number;
  residual_summary: SeriesSummary;
  runs_test: RunsTest;
  acf: Acf;
}

export interface ResidualSeries {
  revision: number;
  dates: string[];
  values: number[];
}

export interface ForecastMetrics {
  mape_percent: number;
  erp_normalized: number;
}

export interface ForecastResponse {
  horizon: number;
  predicted: number[];
  per_component: Record<string, number[]>;
  metrics?: ForecastMetrics;
}

export interface RecipeStep {
  band: Band;
  family: ModelFamily;
  params: Record<string, unknown> | "auto";
}

export interface Recipe {
  name: string;
  runs_alpha: number;
  refine_passes: number;
  steps: RecipeStep[];
}

export interface SessionExport {
  recipe: Recipe;
  result: DecompositionResult;
}

export interface Health {
  status: string;
  version: string;
}

export interface AutoOptions {
  ensemble?: number;
  noise?: number;
  seed?: number;
  max_imfs?: number;
}

export interface ErrorEnvelope {
  code: string;
  message: string;
  detail: string;
}
