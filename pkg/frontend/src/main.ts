import { ApiError, DecompClient } from "./api.js";
import { SessionStore } from "./store.js";
import { recipeFromSteps, recipeToJson } from "./recipe.js";
import { acfChartData } from "./chart.js";

const client = new DecompClient("");
const store = new SessionStore(client);

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function setStatus(text: string, isError = false): void {
  const status = el<HTMLParagraphElement>("status");
  status.textContent = text;
  status.className = isError ? "error" : "";
}

function describeError(err: unknown): string {
  if (err instanceof ApiError) {
    return err.detail ? `${err.message} (${err.detail})` : err.message;
  }
  return err instanceof Error ? err.message : String(err);
}

function render(): void {
  const state = store.getState();
  el<HTMLSpanElement>("session-id").textContent = state.id ?? "none";
  el<HTMLButtonElement>("undo").disabled = !store.canUndo();
  el<HTMLButtonElement>("apply").disabled = state.id === null;
  el<HTMLButtonElement>("export").disabled = state.id === null;

  const stepList = el<HTMLOListElement>("steps");
  stepList.replaceChildren(
    ...state.steps.map((step) => {
      const item = document.createElement("li");
      const period = step.component.period_days;
      item.textContent =
        `${step.family} on ${step.band}` +
        (period !== null ? ` (period ${period.toFixed(1)}d)` : "");
      return item;
    }),
  );

  const residual = el<HTMLParagraphElement>("residual");
  if (state.residualSummary !== null && state.runsTest !== null) {
    const verdict = state.runsTest.random ? "looks random" : "still structured";
    residual.textContent =
      `residual std ${state.residualSummary.std.toFixed(3)}, ` +
      `runs test p=${state.runsTest.p_value.toFixed(3)} (${verdict})`;
  } else {
    residual.textContent = "";
  }

  const acfNote = el<HTMLParagraphElement>("acf");
  if (state.acf !== null) {
    const { significant } = acfChartData(state.acf);
    acfNote.textContent = significant.length
      ? `ACF lags outside the white-noise band: ${significant.join(", ")}`
      : "No ACF lag exceeds the white-noise band.";
  } else {
    acfNote.textContent = "";
  }
}

async function run(action: () => Promise<void>): Promise<void> {
  try {
    await action();
    setStatus("ok");
  } catch (err) {
    setStatus(describeError(err), true);
  }
}

function wire(): void {
  store.subscribe(render);

  el<HTMLButtonElement>("upload").addEventListener("click", () =>
    run(async () => {
      const csv = el<HTMLTextAreaElement>("csv").value;
      await store.create(csv);
    }),
  );

  el<HTMLButtonElement>("apply").addEventListener("click", () =>
    run(async () => {
      const band = el<HTMLSelectElement>("band").value;
      const family = el<HTMLSelectElement>("family").value;
      await store.addStep(band, family);
    }),
  );

  el<HTMLButtonElement>("undo").addEventListener("click", () => run(() => store.undo()));

  el<HTMLButtonElement>("export").addEventListener("click", () =>
    run(async () => {
      const recipe = recipeFromSteps(`session-${store.getState().id}`, store.getState().steps);
      el<HTMLTextAreaElement>("recipe-out").value = recipeToJson(recipe);
    }),
  );

  render();
}

wire();
