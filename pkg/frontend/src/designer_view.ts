/**
 * Designer workspace: the same live controls, plus "save as theme".
 *
 * Saving posts the current settings (without the size, which the server
 * derives from the font) as a named theme for the next iteration's pool.
 * Rejections surface inline, like everywhere else.
 */

import type { ApiClient } from "./api.js";
import type { TextSettings } from "./css.js";

export interface DesignerViewOptions {
  container: HTMLElement;
  client: ApiClient;
  iteration: number;
  designerId: string;
  current: () => TextSettings;
}

export interface DesignerViewHandle {
  root: HTMLElement;
  saveButton: HTMLButtonElement;
  savedIds: string[];
}

export function renderDesignerView(
  options: DesignerViewOptions,
): DesignerViewHandle {
  const { container, client, iteration, designerId } = options;

  const root = document.createElement("section");
  root.className = "designer-view";
  const saveButton = document.createElement("button");
  saveButton.textContent = "Save as theme";
  const status = document.createElement("p");
  status.className = "inline-error";
  status.hidden = true;

  const handle: DesignerViewHandle = { root, saveButton, savedIds: [] };

  saveButton.addEventListener("click", () => {
    const settings = options.current();
    const themeId = `designer-${designerId}-${handle.savedIds.length + 1}`;
    void client
      .postDesignerThemes(iteration, [
        {
          theme_id: themeId,
          font: settings.font,
          character_spacing_em: settings.character_spacing_em,
          word_spacing_em: settings.word_spacing_em,
          line_height: settings.line_height,
        },
      ])
      .then(
        () => {
          handle.savedIds.push(themeId);
          status.hidden = true;
        },
        (err: unknown) => {
          status.textContent =
            err instanceof Error ? err.message : String(err);
          status.hidden = false;
        },
      );
  });

  root.append(saveButton, status);
  container.append(root);
  return handle;
}
