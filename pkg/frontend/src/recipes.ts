import { FigureInputError } from "./errors.js";
import { FigureRecipe } from "./recipe.js";
import { classicalMapRecipe } from "./recipes/classicalMap.js";
import { husimiAnimationRecipe } from "./recipes/husimiAnimation.js";
import { overlapTraceRecipe } from "./recipes/overlapTrace.js";
import { purityMapRecipe } from "./recipes/purityMap.js";
import { spectrumPanelRecipe } from "./recipes/spectrumPanel.js";
import { tunnelingScanRecipe } from "./recipes/tunnelingScan.js";

export const RECIPES: readonly FigureRecipe[] = [
  classicalMapRecipe,
  purityMapRecipe,
  overlapTraceRecipe,
  tunnelingScanRecipe,
  spectrumPanelRecipe,
  husimiAnimationRecipe,
];

export function getRecipe(id: string): FigureRecipe {
  const recipe = RECIPES.find((candidate) => candidate.id === id);
  if (recipe === undefined) {
    const known = RECIPES.map((candidate) => candidate.id).join(", ");
    throw new FigureInputError(`unknown figure "${id}" (known: ${known})`);
  }
  return recipe;
}
