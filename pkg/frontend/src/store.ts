import { DecompClient } from "./api.js";
import type {
  Acf,
  Component,
  RunsTest,
  SeriesSummary,
  SessionStep,
} from "./types.js";

export interface AppliedStep {
  band: string;
  family: string;
  params: Record<string, unknown>;
  component: Component;
}

export interface SessionState {
  id: string | null;
  revision: number;
  outliersReplaced: number;
  steps: AppliedStep[];
  residualSummary: SeriesSummary | null;
  runsTest: RunsTest | null;
  acf: Acf | null;
}

export type Listener = (state: SessionState) => void;

function emptyState(): SessionState {
  return {
    id: null,
    revision: 0,
    outliersReplaced: 0,
    steps: [],
    residualSummary: null,
    runsTest: null,
    acf: null,
  };
}

/**
 * Client-side mirror of one service session.  All mutations go through the
 * API; the store only caches what the service reports back, so a reload via
 * `load()` always reconverges with the server.
 */
export class SessionStore {
  private state: SessionState = emptyState();
  private readonly listeners = new Set<Listener>();

  constructor(private readonly client: DecompClient) {}

  getState(): SessionState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private setState(patch: Partial<SessionState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  /** Upload a CSV trace and start a fresh session. */
  async create(csv: string): Promise<void> {
    const created = await this.client.createSession(csv);
    this.state = emptyState();
    this.setState({
      id: created.id,
      revision: created.revision,
      outliersReplaced: created.outliers_replaced,
    });
    await this.load(created.id);
  }

  /** Re-sync the whole store from the service. */
  async load(id: string): Promise<void> {
    const detail = await this.client.getSession(id);
    this.setState({
      id: detail.id,
      revision: detail.revision,
      steps: detail.steps.map(fromSessionStep),
      residualSummary: detail.residual_summary,
      runsTest: detail.runs_test,
      acf: detail.acf,
    });
  }

  async addStep(band: string, family: string, params: Record<string, unknown> | "auto" = "auto"): Promise<void> {
    const id = this.requireSession();
    const response = await this.client.addStep(id, band, family, params);
    this.setState({
      revision: response.revision,
      steps: [
        ...this.state.steps,
        {
          band,
          family,
          params: params === "auto" ? {} : params,
          component: response.component,
        },
      ],
      residualSummary: response.residual_summary,
      runsTest: response.runs_test,
      acf: response.acf,
    });
  }

  async undo(): Promise<void> {
    const id = this.requireSession();
    const response = await this.client.undoLastStep(id);
    this.setState({
      revision: response.revision,
      steps: this.state.steps.slice(0, -1),
      residualSummary: response.residual_summary,
      runsTest: response.runs_test,
      acf: response.acf,
    });
  }

  canUndo(): boolean {
    return this.state.steps.length > 0;
  }

  private requireSession(): string {
    if (this.state.id === null) {
      throw new Error("no active session");
    }
    return this.state.id;
  }
}

function fromSessionStep(step: SessionStep): AppliedStep {
  return {
    band: step.band,
    family: step.family,
    params: step.params,
    component: step.component,
  };
}
