/**
 * Text settings and their CSS mapping.
 *
 * The mapping must stay byte-identical to the service's CSS export: the
 * preview is only honest if the styles it applies are the styles the
 * server would serve. The server remains authoritative for final
 * settings (it replays the event log before accepting them).
 */

export type FontFamily =
  | "Montserrat"
  | "Open Sans"
  | "Arial"
  | "Roboto"
  | "Merriweather"
  | "Georgia"
  | "Source Serif Pro"
  | "Times"
  | "Poppins";

export const FONTS: readonly FontFamily[] = [
  "Montserrat",
  "Open Sans",
  "Arial",
  "Roboto",
  "Merriweather",
  "Georgia",
  "Source Serif Pro",
  "Times",
  "Poppins",
];

/** Normalized size per family so every font shows the same x-height. */
export const FONT_SIZE_PX: Readonly<Record<FontFamily, number>> = {
  Montserrat: 14.3,
  "Open Sans": 14.2,
  Arial: 14.6,
  Roboto: 14.4,
  Merriweather: 15.8,
  Georgia: 15.8,
  "Source Serif Pro": 16.0,
  Times: 17.0,
  Poppins: 14.1,
};

export type SettingKey =
  | "font"
  | "character_spacing_em"
  | "word_spacing_em"
  | "line_height";

/** The order the server compares settings in; keep event keys on it. */
export const SETTING_KEYS: readonly SettingKey[] = [
  "font",
  "character_spacing_em",
  "word_spacing_em",
  "line_height",
];

export interface TextSettings {
  font: FontFamily;
  character_spacing_em: number;
  word_spacing_em: number;
  line_height: number;
  font_size_px: number;
}

export type SliderKey = Exclude<SettingKey, "font">;

/** lo / hi / step per slider, the same lattice the service validates. */
export const SLIDERS: Readonly<
  Record<SliderKey, { lo: number; hi: number; step: number }>
> = {
  character_spacing_em: { lo: -0.05, hi: 0.5, step: 0.01 },
  word_spacing_em: { lo: -0.05, hi: 1.0, step: 0.05 },
  line_height: { lo: 1.0, hi: 5.0, step: 0.1 },
};

export function clampToSlider(key: SliderKey, value: number): number {
  const { lo, hi, step } = SLIDERS[key];
  const clamped = Math.min(hi, Math.max(lo, value));
  const snapped = lo + Math.round((clamped - lo) / step) * step;
  // keep the lattice arithmetic from leaking float dust into events
  return Number(snapped.toFixed(6));
}

export function normalizedSettings(
  font: FontFamily,
  character_spacing_em: number,
  word_spacing_em: number,
  line_height: number,
): TextSettings {
  return {
    font,
    character_spacing_em,
    word_spacing_em,
    line_height,
    font_size_px: FONT_SIZE_PX[font],
  };
}

/** Apply one change, renormalizing the font size on font switches. */
export function withValue(
  settings: TextSettings,
  key: SettingKey,
  value: FontFamily | number,
): TextSettings {
  if (key === "font") {
    const font = value as FontFamily;
    return { ...settings, font, font_size_px: FONT_SIZE_PX[font] };
  }
  return { ...settings, [key]: value as number };
}

/** Minimal-decimal rendering: 0.10 -> "0.1", 17.0 -> "17", -0 -> "0". */
export function formatCssNumber(value: number): string {
  let text = value.toFixed(6).replace(/0+$/, "").replace(/\.$/, "");
  if (text === "-0" || text === "") {
    text = "0";
  }
  return text;
}

export interface CssDeclarations {
  "letter-spacing": string;
  "word-spacing": string;
  "line-height": string;
  "font-family": string;
  "font-size": string;
}

export function settingsToCss(settings: TextSettings): CssDeclarations {
  return {
    "letter-spacing": `${formatCssNumber(settings.character_spacing_em)}em`,
    "word-spacing": `${formatCssNumber(settings.word_spacing_em)}em`,
    "line-height": formatCssNumber(settings.line_height),
    "font-family": settings.font,
    "font-size": `${formatCssNumber(settings.font_size_px)}px`,
  };
}

/** Restyle an element in place; the declaration set is exactly the five. */
export function applySettings(el: HTMLElement, settings: TextSettings): void {
  const css = settingsToCss(settings);
  for (const [property, value] of Object.entries(css)) {
    el.style.setProperty(property, value);
  }
}
