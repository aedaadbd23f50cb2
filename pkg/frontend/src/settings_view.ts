/**
 * Live text-settings panel: font dropdown plus three spacing sliders.
 *
 * Every control change restyles the preview immediately and enqueues one
 * refinement event with a client timestamp; the queue flushes in the
 * background and keeps ordering even across failed posts. Dropdown order
 * (fonts, passages) is randomized per participant so list position can't
 * bias choices. Moving the pointer off the panel hides it; a "Show
 * Control" toggle brings it back.
 */

import type { EventQueue } from "./api.js";
import {
  FONTS,
  SETTING_KEYS,
  SLIDERS,
  applySettings,
  clampToSlider,
  withValue,
  type FontFamily,
  type SettingKey,
  type SliderKey,
  type TextSettings,
} from "./css.js";
import { seededRng, shuffled } from "./rng.js";
import type { PanelState } from "./state.js";

export interface PassageOption {
  passage_id: string;
  title: string;
}

export interface SettingsViewOptions {
  container: HTMLElement;
  preview: HTMLElement;
  settings: TextSettings;
  /** per-participant seed controlling dropdown shuffle */
  seed: number;
  queue: EventQueue;
  /** client clock in ms; injectable for tests */
  clock?: () => number;
  passages?: PassageOption[];
  panel?: PanelState;
  onPassageChange?: (passageId: string) => void;
}

export interface SettingsViewHandle {
  root: HTMLElement;
  panel: HTMLElement;
  toggleButton: HTMLButtonElement;
  fontSelect: HTMLSelectElement;
  sliders: Record<SliderKey, HTMLInputElement>;
  passageSelect: HTMLSelectElement | null;
  current: () => TextSettings;
}

const SLIDER_LABELS: Record<SliderKey, string> = {
  character_spacing_em: "Character spacing",
  word_spacing_em: "Word spacing",
  line_height: "Line spacing",
};

export function renderSettingsView(
  options: SettingsViewOptions,
): SettingsViewHandle {
  const { container, preview, queue } = options;
  const clock = options.clock ?? (() => Date.now());
  let current: TextSettings = { ...options.settings };

  const root = document.createElement("section");
  root.className = "settings-view";

  const toggleButton = document.createElement("button");
  toggleButton.className = "show-control";
  toggleButton.textContent = "Show Control";

  const panel = document.createElement("div");
  panel.className = "settings-panel";
  panel.hidden = true;

  const rng = seededRng(options.seed);

  const record = (key: SettingKey, oldValue: string | number, newValue: string | number) => {
    queue.push({
      t_ms: clock(),
      setting_key: key,
      old_value: oldValue,
      new_value: newValue,
    });
    void queue.flush();
  };

  const apply = (next: TextSettings) => {
    current = next;
    applySettings(preview, current);
  };
  apply(current);

  // font dropdown, order randomized per participant
  const fontRow = document.createElement("label");
  fontRow.textContent = "Font";
  const fontSelect = document.createElement("select");
  for (const font of shuffled(FONTS, rng)) {
    const option = document.createElement("option");
    option.value = font;
    option.textContent = font;
    fontSelect.append(option);
  }
  fontSelect.value = current.font;
  fontSelect.addEventListener("change", () => {
    const oldValue = current.font;
    const newValue = fontSelect.value as FontFamily;
    if (newValue === oldValue) return;
    apply(withValue(current, "font", newValue));
    record("font", oldValue, newValue);
  });
  fontRow.append(fontSelect);
  panel.append(fontRow);

  // spacing sliders on the shared lattice
  const sliders = {} as Record<SliderKey, HTMLInputElement>;
  for (const key of SETTING_KEYS) {
    if (key === "font") continue;
    const spec = SLIDERS[key];
    const row = document.createElement("label");
    row.textContent = SLIDER_LABELS[key];
    const input = document.createElement("input");
    input.type = "range";
    input.min = String(spec.lo);
    input.max = String(spec.hi);
    input.step = String(spec.step);
    input.value = String(current[key]);
    input.addEventListener("input", () => {
      const oldValue = current[key];
      const newValue = clampToSlider(key, Number(input.value));
      if (newValue === oldValue) return;
      apply(withValue(current, key, newValue));
      record(key, oldValue, newValue);
    });
    sliders[key] = input;
    row.append(input);
    panel.append(row);
  }

  // optional passage picker, also shuffled
  let passageSelect: HTMLSelectElement | null = null;
  if (options.passages && options.passages.length > 0) {
    const row = document.createElement("label");
    row.textContent = "Passage";
    passageSelect = document.createElement("select");
    for (const passage of shuffled(options.passages, rng)) {
      const option = document.createElement("option");
      option.value = passage.passage_id;
      option.textContent = passage.title;
      passageSelect.append(option);
    }
    passageSelect.addEventListener("change", () => {
      options.onPassageChange?.(passageSelect!.value);
    });
    row.append(passageSelect);
    panel.append(row);
  }

  const showPanel = () => {
    options.panel?.show("settings");
    panel.hidden = false;
    toggleButton.hidden = true;
  };
  const hidePanel = () => {
    options.panel?.pointerLeftSettings();
    panel.hidden = true;
    toggleButton.hidden = false;
  };

  toggleButton.addEventListener("click", showPanel);
  panel.addEventListener("pointerleave", hidePanel);

  root.append(toggleButton, panel);
  container.append(root);

  return {
    root,
    panel,
    toggleButton,
    fontSelect,
    sliders,
    passageSelect,
    current: () => current,
  };
}
