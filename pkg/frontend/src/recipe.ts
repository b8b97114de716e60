import type { Recipe, RecipeStep } from "./types.js";
import type { AppliedStep } from "./store.js";

export const DEFAULT_RUNS_ALPHA = 0.05;

/**
 * Build a replayable recipe from the steps applied in a session.  Matches
 * the service's own export: steps with no explicit parameters are recorded
 * as "auto" so replay re-fits them, and `refine_passes` is pinned to 0 so a
 * strict sequential replay reproduces the session bit for bit.
 */
export function recipeFromSteps(name: string, steps: readonly AppliedStep[], runsAlpha = DEFAULT_RUNS_ALPHA): Recipe {
  return {
    name,
    runs_alpha: runsAlpha,
    refine_passes: 0,
    steps: steps.map(toRecipeStep),
  };
}

function toRecipeStep(step: AppliedStep): RecipeStep {
  const params = Object.keys(step.params).length > 0 ? step.params : "auto";
  return {
    band: step.band as RecipeStep["band"],
    family: step.family as RecipeStep["family"],
    params,
  };
}

/** Serialize a recipe as the JSON document the CLI accepts. */
export function recipeToJson(recipe: Recipe): string {
  return JSON.stringify(recipe, null, 2) + "\n";
}

const BANDS = new Set(["trend", "subweekly", "weekly", "monthly", "quarterly", "residue"]);
const FAMILIES = new Set(["linear", "piecewise", "loess", "ma", "sinusoid", "hwes"]);
const TREND_FAMILIES = new Set(["linear", "piecewise", "loess", "ma"]);

/** Structural checks mirroring what the service rejects. Returns problems, empty when valid. */
export function validateRecipe(recipe: Recipe): string[] {
  const problems: string[] = [];
  if (!recipe.name) {
    problems.push("recipe name must be non-empty");
  }
  if (!(recipe.runs_alpha > 0 && recipe.runs_alpha < 1)) {
    problems.push("runs_alpha must be in (0, 1)");
  }
  if (recipe.refine_passes < 0 || !Number.isInteger(recipe.refine_passes)) {
    problems.push("refine_passes must be a non-negative integer");
  }
  if (recipe.steps.length === 0) {
    problems.push("recipe must contain at least one step");
  }
  recipe.steps.forEach((step, i) => {
    if (!BANDS.has(step.band)) {
      problems.push(`step ${i + 1}: unknown band ${JSON.stringify(step.band)}`);
    }
    if (!FAMILIES.has(step.family)) {
      problems.push(`step ${i + 1}: unknown family ${JSON.stringify(step.family)}`);
    }
  });
  const first = recipe.steps[0];
  if (first !== undefined && FAMILIES.has(first.family) && !TREND_FAMILIES.has(first.family)) {
    problems.push("first step must fit the trend with a trend-capable family");
  }
  return problems;
}
