export * from "./css.js";
export * from "./rng.js";
export * from "./api.js";
export * from "./state.js";
export * from "./rating_view.js";
export * from "./settings_view.js";
export * from "./designer_view.js";
export * from "./trial_view.js";
