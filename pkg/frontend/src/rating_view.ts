/**
 * Theme review: one card per assigned theme, rated good / unsure / bad.
 *
 * Cards carry anonymized alphanumeric labels instead of server theme ids
 * (the id would leak where a theme came from). Submit stays disabled
 * until every theme is rated; picking a favorite highlights its card.
 * Service rejections surface inline under the card list.
 */

import type { ThemeDto } from "./api.js";
import { applySettings } from "./css.js";
import { seededRng, seedFrom } from "./rng.js";

export type RatingValue = "good" | "unsure" | "bad";

export interface RatingViewOptions {
  container: HTMLElement;
  themes: ThemeDto[];
  /** per-session anonymization seed, e.g. the session id */
  anonSeed: string;
  previewText?: string;
  onRate: (themeId: string, value: RatingValue) => Promise<unknown>;
  onFavorite: (themeId: string) => Promise<unknown>;
  onSubmit: () => Promise<unknown>;
}

export interface RatingViewHandle {
  root: HTMLElement;
  submitButton: HTMLButtonElement;
  cards: Map<string, HTMLElement>;
  /** theme id -> anonymized label shown to the participant */
  labels: Map<string, string>;
  ratings: Map<string, RatingValue>;
  favorite: string | null;
}

const LABEL_ALPHABET = "ABCDEFGHJKLMNPQRSTUVWXYZ23456789";

/** Stable anonymized codes: distinct per theme, meaningless to readers. */
export function anonymizedLabels(
  themeIds: readonly string[],
  anonSeed: string,
): Map<string, string> {
  const rng = seededRng(seedFrom(anonSeed));
  const codes = new Set<string>();
  const labels = new Map<string, string>();
  for (const themeId of themeIds) {
    let code = "";
    do {
      code = Array.from(
        { length: 4 },
        () => LABEL_ALPHABET[Math.floor(rng() * LABEL_ALPHABET.length)],
      ).join("");
    } while (codes.has(code));
    codes.add(code);
    labels.set(themeId, `Theme ${code}`);
  }
  return labels;
}

export function renderRatingView(options: RatingViewOptions): RatingViewHandle {
  const { container, themes, onRate, onFavorite, onSubmit } = options;
  const previewText =
    options.previewText ?? "The quick brown fox jumps over the lazy dog.";

  const root = document.createElement("section");
  root.className = "rating-view";
  const list = document.createElement("div");
  list.className = "theme-cards";
  const error = document.createElement("p");
  error.className = "inline-error";
  error.hidden = true;
  const submitButton = document.createElement("button");
  submitButton.textContent = "Continue";
  submitButton.disabled = true;

  const labels = anonymizedLabels(
    themes.map((t) => t.theme_id),
    options.anonSeed,
  );
  const cards = new Map<string, HTMLElement>();
  const handle: RatingViewHandle = {
    root,
    submitButton,
    cards,
    labels,
    ratings: new Map(),
    favorite: null,
  };

  const showError = (err: unknown) => {
    error.textContent = err instanceof Error ? err.message : String(err);
    error.hidden = false;
  };
  const clearError = () => {
    error.hidden = true;
    error.textContent = "";
  };
  const refreshSubmit = () => {
    submitButton.disabled = handle.ratings.size < themes.length;
  };

  // assignment order is already shuffled per session by the service; a
  // deterministic re-shuffle here would undo nothing and help nothing
  for (const theme of themes) {
    const card = document.createElement("article");
    card.className = "theme-card";
    card.dataset.themeId = theme.theme_id;

    const title = document.createElement("h3");
    title.textContent = labels.get(theme.theme_id) ?? "Theme";
    const preview = document.createElement("p");
    preview.className = "card-preview";
    preview.textContent = previewText;
    applySettings(preview, theme.settings);

    const buttons = document.createElement("div");
    buttons.className = "rating-buttons";
    for (const value of ["good", "unsure", "bad"] as const) {
      const button = document.createElement("button");
      button.textContent = value;
      button.dataset.value = value;
      button.addEventListener("click", () => {
        void onRate(theme.theme_id, value).then(() => {
          handle.ratings.set(theme.theme_id, value);
          for (const sibling of buttons.querySelectorAll("button")) {
            sibling.classList.toggle("selected", sibling === button);
          }
          clearError();
          refreshSubmit();
        }, showError);
      });
      buttons.append(button);
    }

    const favoriteButton = document.createElement("button");
    favoriteButton.className = "favorite-button";
    favoriteButton.textContent = "Favorite";
    favoriteButton.addEventListener("click", () => {
      void onFavorite(theme.theme_id).then(() => {
        handle.favorite = theme.theme_id;
        for (const [id, el] of cards) {
          el.classList.toggle("favorite", id === theme.theme_id);
        }
        clearError();
      }, showError);
    });

    card.append(title, preview, buttons, favoriteButton);
    cards.set(theme.theme_id, card);
    list.append(card);
  }

  submitButton.addEventListener("click", () => {
    void onSubmit().then(clearError, showError);
  });

  root.append(list, error, submitButton);
  container.append(root);
  return handle;
}
