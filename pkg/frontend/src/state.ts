/**
 * Panel visibility rules.
 *
 * Two invariants the views must never break: the rating panel and the
 * settings panel are never visible together, and the settings panel hides
 * itself when the pointer leaves it (the reading text takes the room).
 */

export type PanelMode = "rating" | "settings" | "designer" | "trial";

export class PanelState {
  private _mode: PanelMode;
  private _visible = new Set<PanelMode>();

  constructor(initial: PanelMode = "rating") {
    this._mode = initial;
    this._visible.add(initial);
  }

  get mode(): PanelMode {
    return this._mode;
  }

  isVisible(mode: PanelMode): boolean {
    return this._visible.has(mode);
  }

  show(mode: PanelMode): void {
    this._mode = mode;
    this._visible.add(mode);
    if (mode === "rating") {
      this._visible.delete("settings");
    } else if (mode === "settings") {
      this._visible.delete("rating");
    }
    this.assertInvariants();
  }

  hide(mode: PanelMode): void {
    this._visible.delete(mode);
  }

  /** Pointer left the settings panel: it folds away on its own. */
  pointerLeftSettings(): void {
    this.hide("settings");
  }

  assertInvariants(): void {
    if (this._visible.has("rating") && this._visible.has("settings")) {
      throw new Error("rating and settings panels may never show together");
    }
  }
}
