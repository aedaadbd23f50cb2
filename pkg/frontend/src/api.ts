/**
 * HTTP client for the theme service, plus the strictly ordered event queue.
 *
 * Every service error body is `{code, message, detail}`; the client turns
 * non-2xx responses into `ApiError` so views can surface `message` inline.
 */

import type { SettingKey, TextSettings } from "./css.js";

export interface RefinementEvent {
  t_ms: number;
  setting_key: SettingKey;
  old_value: number | string;
  new_value: number | string;
}

export interface ThemeDto {
  theme_id: string;
  settings: TextSettings;
  provenance: string;
  iteration: number;
  css: string;
}

export interface SessionDto {
  session_id: string;
  iteration: number;
  phase: string;
  themes: ThemeDto[];
}

export interface ScreenDto {
  trial_id: string;
  condition_index: number;
  n_conditions: number;
  screen_index: number;
  n_screens: number;
  passage_id: string;
  text: string;
  theme: Omit<ThemeDto, "css">;
  css: string;
}

export interface QuestionDto {
  prompt: string;
  options: string[];
}

export interface MeasurementDto {
  participant_id: string;
  theme_id: string;
  comfort: number;
  comprehension: number;
  screen_wpm: number[];
  [extra: string]: unknown;
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
    public readonly detail: unknown = null,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (
  url: string,
  init?: RequestInit,
) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (...args) => fetch(...args),
    private readonly adminToken: string | null = null,
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    admin = false,
  ): Promise<T> {
    const headers: Record<string, string> = {};
    if (body !== undefined) {
      headers["Content-Type"] = "application/json";
    }
    if (admin) {
      headers["X-Admin-Token"] = this.adminToken ?? "";
    }
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await response.json().catch(() => ({}));
    if (!response.ok) {
      const err = payload as { code?: string; message?: string; detail?: unknown };
      throw new ApiError(
        response.status,
        err.code ?? "unknown_error",
        err.message ?? `request failed with ${response.status}`,
        err.detail ?? null,
      );
    }
    return payload as T;
  }

  // sessions ---------------------------------------------------------------

  createSession(participant: {
    participant_id: string;
    age_years: number;
    dyslexia_score?: number;
    dyslexia?: boolean;
  }): Promise<SessionDto> {
    return this.request("POST", "/sessions", participant);
  }

  getSession(sessionId: string): Promise<SessionDto> {
    return this.request("GET", `/sessions/${sessionId}`);
  }

  postRating(
    sessionId: string,
    themeId: string,
    value: "good" | "unsure" | "bad",
  ): Promise<{ remaining: string[] }> {
    return this.request("POST", `/sessions/${sessionId}/ratings`, {
      theme_id: themeId,
      value,
    });
  }

  postFavorite(sessionId: string, themeId: string): Promise<unknown> {
    return this.request("POST", `/sessions/${sessionId}/favorite`, {
      theme_id: themeId,
    });
  }

  advancePhase(sessionId: string, phase: string): Promise<{ phase: string }> {
    return this.request("POST", `/sessions/${sessionId}/phase`, { phase });
  }

  postRefinements(
    sessionId: string,
    events: RefinementEvent[],
  ): Promise<unknown> {
    return this.request("POST", `/sessions/${sessionId}/refinements`, {
      events,
    });
  }

  postFinal(sessionId: string, finalSettings: TextSettings): Promise<unknown> {
    return this.request("POST", `/sessions/${sessionId}/final`, {
      final_settings: finalSettings,
    });
  }

  // designer ---------------------------------------------------------------

  postDesignerThemes(
    iteration: number,
    themes: Array<{
      theme_id: string;
      font: string;
      character_spacing_em: number;
      word_spacing_em: number;
      line_height: number;
    }>,
  ): Promise<unknown> {
    return this.request(
      "POST",
      `/iterations/${iteration}/designer-themes`,
      { themes },
      true,
    );
  }

  // trials -----------------------------------------------------------------

  createTrial(participantId: string): Promise<{ trial_id: string }> {
    return this.request("POST", "/trials", { participant_id: participantId });
  }

  getScreen(trialId: string): Promise<ScreenDto> {
    return this.request("GET", `/trials/${trialId}/screen`);
  }

  keypress(
    trialId: string,
    clientTms?: number,
  ): Promise<{ next: string; screen_index?: number; questions?: QuestionDto[] }> {
    return this.request("POST", `/trials/${trialId}/keypress`, {
      client_t_ms: clientTms ?? null,
    });
  }

  submitAnswers(trialId: string, answers: number[]): Promise<{ next: string }> {
    return this.request("POST", `/trials/${trialId}/answers`, { answers });
  }

  submitComfort(
    trialId: string,
    comfort: number,
  ): Promise<{
    measurement: MeasurementDto;
    next: string;
    measurements?: MeasurementDto[];
  }> {
    return this.request("POST", `/trials/${trialId}/comfort`, { comfort });
  }
}

/**
 * Ordered delivery for refinement events.
 *
 * Pushes never reorder and never drop; a failed POST (offline) keeps the
 * whole batch queued and a later flush retries it ahead of newer events.
 * Only one POST is in flight at a time, so the server sees pushes in
 * exactly push order.
 */
export class EventQueue {
  private pending: RefinementEvent[] = [];
  private inFlight: Promise<boolean> | null = null;
  private lastTms = Number.NEGATIVE_INFINITY;

  constructor(
    private readonly post: (events: RefinementEvent[]) => Promise<void>,
  ) {}

  get size(): number {
    return this.pending.length;
  }

  push(event: RefinementEvent): void {
    // the service requires non-decreasing timestamps; a client clock that
    // jumps backwards must not invalidate the whole log
    const t_ms = Math.max(event.t_ms, this.lastTms);
    this.lastTms = t_ms;
    this.pending.push({ ...event, t_ms });
  }

  /** Deliver everything queued; resolves false if the service is offline. */
  flush(): Promise<boolean> {
    if (this.inFlight) {
      // chain: at most one request in flight, order preserved
      this.inFlight = this.inFlight.then(() => this.deliver());
    } else {
      this.inFlight = this.deliver();
    }
    const current = this.inFlight;
    current.finally(() => {
      if (this.inFlight === current) {
        this.inFlight = null;
      }
    });
    return current;
  }

  private async deliver(): Promise<boolean> {
    if (this.pending.length === 0) {
      return true;
    }
    const batch = this.pending.slice();
    try {
      await this.post(batch);
    } catch {
      return false; // keep the batch; a later flush retries in order
    }
    this.pending.splice(0, batch.length);
    return true;
  }
}
