/**
 * A full reading trial against a scripted server: four conditions, two
 * screens each, keypress-timed WPM, comprehension questions, comfort
 * ratings. The server shares a fake clock with the test so every WPM
 * below is hand arithmetic: wpm = words / (elapsed_ms / 60000).
 */

import { describe, expect, it, vi } from "vitest";
import {
  ApiClient,
  type FetchLike,
  type MeasurementDto,
  type ThemeDto,
} from "../src/api.js";
import { normalizedSettings, type FontFamily } from "../src/css.js";
import { TrialView } from "../src/trial_view.js";

const WORDS_PER_SCREEN = 150;
const N_SCREENS = 2;
const QUESTION_COUNT = 4;
const FONTS_BY_CONDITION: FontFamily[] = ["Arial", "Georgia", "Times", "Poppins"];

class ScriptedServer {
  now = 0; // ms, shared with the test and the view
  measurements: MeasurementDto[] = [];
  participantId = "";

  private conditionIndex = 0;
  private screenIndex = 0;
  private servedAt = 0;
  private screenWpm: number[] = [];
  private comprehension = 0;
  private readonly themes: Array<Omit<ThemeDto, "css">> =
    FONTS_BY_CONDITION.map((font, i) => ({
      theme_id: `trial-theme-${i}`,
      settings: normalizedSettings(font, 0.0, 0.1, 1.4),
      provenance: "cluster_representative",
      iteration: 1,
    }));

  fetch: FetchLike = async (url, init) => {
    const method = init?.method ?? "GET";
    const path = new URL(url).pathname;
    const body = init?.body ? JSON.parse(init.body as string) : {};
    return this.respond(method, path, body);
  };

  private json(payload: unknown, status = 200): Response {
    return new Response(JSON.stringify(payload), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  }

  private respond(method: string, path: string, body: any): Response {
    if (method === "POST" && path === "/trials") {
      this.participantId = body.participant_id;
      this.conditionIndex = 0;
      this.screenIndex = 0;
      this.screenWpm = [];
      this.measurements = [];
      return this.json({ trial_id: "trial-1" });
    }
    if (method === "GET" && path === "/trials/trial-1/screen") {
      this.servedAt = this.now;
      return this.json({
        trial_id: "trial-1",
        condition_index: this.conditionIndex,
        n_conditions: this.themes.length,
        screen_index: this.screenIndex,
        n_screens: N_SCREENS,
        passage_id: `passage-${this.conditionIndex}-${this.screenIndex}`,
        text: "word ".repeat(WORDS_PER_SCREEN).trim(),
        theme: this.themes[this.conditionIndex],
        css: "",
      });
    }
    if (method === "POST" && path === "/trials/trial-1/keypress") {
      const elapsedMinutes = (this.now - this.servedAt) / 60000;
      if (elapsedMinutes <= 0) {
        return this.json(
          { code: "bad_keypress", message: "keypress before screen" },
          422,
        );
      }
      this.screenWpm.push(WORDS_PER_SCREEN / elapsedMinutes);
      this.screenIndex += 1;
      if (this.screenIndex < N_SCREENS) {
        return this.json({ next: "screen", screen_index: this.screenIndex });
      }
      return this.json({
        next: "questions",
        questions: Array.from({ length: QUESTION_COUNT }, (_, qi) => ({
          prompt: `Question ${qi + 1} about the passage?`,
          options: ["first", "second", "third", "fourth"],
        })),
      });
    }
    if (method === "POST" && path === "/trials/trial-1/answers") {
      const answers: number[] = body.answers;
      const correct = answers.filter((a) => a === 0).length; // key: all 0
      this.comprehension = correct / QUESTION_COUNT;
      return this.json({ next: "comfort" });
    }
    if (method === "POST" && path === "/trials/trial-1/comfort") {
      const theme = this.themes[this.conditionIndex]!;
      const meanWpm =
        this.screenWpm.reduce((a, b) => a + b, 0) / this.screenWpm.length;
      const measurement: MeasurementDto = {
        participant_id: this.participantId,
        theme_id: theme.theme_id,
        comfort: body.comfort,
        comprehension: this.comprehension,
        screen_wpm: [...this.screenWpm],
        mean_wpm: meanWpm,
      };
      this.measurements.push(measurement);
      this.conditionIndex += 1;
      this.screenIndex = 0;
      this.screenWpm = [];
      if (this.conditionIndex < this.themes.length) {
        return this.json({ measurement, next: "screen" });
      }
      return this.json({
        measurement,
        next: "complete",
        measurements: this.measurements,
      });
    }
    return this.json({ code: "not_found", message: `no route ${path}` }, 404);
  }
}

function mountTrial() {
  document.body.innerHTML = "";
  const container = document.createElement("div");
  document.body.append(container);
  const server = new ScriptedServer();
  const client = new ApiClient("http://service.test", server.fetch);
  const view = new TrialView({ container, client, clock: () => server.now });
  return { server, view };
}

describe("reading trial", () => {
  it("produces four measurements with hand-checked WPM", async () => {
    const { server, view } = mountTrial();
    await view.start("p-7");

    // condition 0 (Arial): 150 words in 36s -> 250 wpm, then 45s -> 200
    expect(view.currentStage).toBe("reading");
    expect(view.textPanel.style.getPropertyValue("font-family")).toBe("Arial");
    expect(view.textPanel.style.getPropertyValue("font-size")).toBe("14.6px");
    expect(view.textPanel.textContent).toContain("word");
    server.now += 36_000;
    await view.pressKey();
    expect(view.currentStage).toBe("reading");
    expect(view.statusLine.textContent).toContain("screen 2 of 2");
    server.now += 45_000;
    await view.pressKey();
    expect(view.currentStage).toBe("questions");
    expect(view.questionPanel.querySelectorAll("fieldset")).toHaveLength(4);
    await view.submitAnswers([0, 0, 0, 0]); // 4/4 correct
    expect(view.currentStage).toBe("comfort");
    await view.submitComfort(4);
    expect(view.measurements).toHaveLength(1);
    expect(view.measurements[0]!.screen_wpm).toEqual([250, 200]);
    expect(view.measurements[0]!.mean_wpm).toBe(225);
    expect(view.measurements[0]!.comprehension).toBe(1.0);
    expect(view.measurements[0]!.comfort).toBe(4);
    expect(view.measurements[0]!.theme_id).toBe("trial-theme-0");

    // condition 1 (Georgia): 30s -> 300 wpm, 40s -> 225
    expect(view.currentStage).toBe("reading");
    expect(view.textPanel.style.getPropertyValue("font-family")).toBe(
      "Georgia",
    );
    server.now += 30_000;
    await view.pressKey();
    server.now += 40_000;
    await view.pressKey();
    await view.submitAnswers([0, 0, 1, 0]); // 3/4
    await view.submitComfort(5);
    expect(view.measurements[1]!.screen_wpm).toEqual([300, 225]);
    expect(view.measurements[1]!.mean_wpm).toBe(262.5);
    expect(view.measurements[1]!.comprehension).toBe(0.75);
    expect(view.measurements[1]!.comfort).toBe(5);

    // condition 2 (Times): 50s -> 180 wpm, 25s -> 360
    expect(view.textPanel.style.getPropertyValue("font-size")).toBe("17px");
    server.now += 50_000;
    await view.pressKey();
    server.now += 25_000;
    await view.pressKey();
    await view.submitAnswers([1, 1, 0, 0]); // 2/4
    await view.submitComfort(3);
    expect(view.measurements[2]!.screen_wpm).toEqual([180, 360]);
    expect(view.measurements[2]!.mean_wpm).toBe(270);
    expect(view.measurements[2]!.comprehension).toBe(0.5);

    // condition 3 (Poppins): 20s -> 450 wpm, 90s -> 100
    server.now += 20_000;
    await view.pressKey();
    server.now += 90_000;
    await view.pressKey();
    await view.submitAnswers([1, 2, 3, 1]); // 0/4
    await view.submitComfort(2);
    expect(view.measurements[3]!.screen_wpm).toEqual([450, 100]);
    expect(view.measurements[3]!.mean_wpm).toBe(275);
    expect(view.measurements[3]!.comprehension).toBe(0.0);

    expect(view.currentStage).toBe("complete");
    expect(view.measurements).toHaveLength(4);
    expect(view.measurements.map((m) => m.theme_id)).toEqual([
      "trial-theme-0",
      "trial-theme-1",
      "trial-theme-2",
      "trial-theme-3",
    ]);
    expect(server.measurements).toEqual(view.measurements);
  });

  it("advances screens on keydown while reading", async () => {
    const { server, view } = mountTrial();
    await view.start("p-8");
    expect(view.statusLine.textContent).toContain("screen 1 of 2");
    server.now += 60_000;
    view.root.dispatchEvent(new KeyboardEvent("keydown", { key: " " }));
    await vi.waitFor(() =>
      expect(view.statusLine.textContent).toContain("screen 2 of 2"),
    );
    expect(view.currentStage).toBe("reading");
  });

  it("ignores keypresses outside the reading stage", async () => {
    const { server, view } = mountTrial();
    await view.start("p-9");
    server.now += 60_000;
    await view.pressKey();
    server.now += 60_000;
    await view.pressKey(); // -> questions
    expect(view.currentStage).toBe("questions");
    await view.pressKey(); // no-op in questions stage
    expect(view.currentStage).toBe("questions");
    await expect(view.submitComfort(3)).rejects.toThrow(
      "comfort not requested yet",
    );
  });

  it("requires an answer for every question", async () => {
    const { server, view } = mountTrial();
    await view.start("p-10");
    server.now += 60_000;
    await view.pressKey();
    server.now += 60_000;
    await view.pressKey();
    await expect(view.submitAnswers([0, 1])).rejects.toThrow(
      "answer every question",
    );
    expect(view.currentStage).toBe("questions");
  });
});
