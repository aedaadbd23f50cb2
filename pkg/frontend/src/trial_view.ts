/**
 * Reading trial runner: one screen of text at a time, a keypress to
 * advance, comprehension questions after the last screen of a condition,
 * then a comfort rating. The service computes every measurement from its
 * own clock; this view only renders, forwards input, and accumulates the
 * returned measurements.
 */

import type { ApiClient, MeasurementDto, QuestionDto, ScreenDto } from "./api.js";
import { applySettings } from "./css.js";

type TrialStage = "idle" | "reading" | "questions" | "comfort" | "complete";

export interface TrialViewOptions {
  container: HTMLElement;
  client: ApiClient;
  /** client clock in ms; injectable for tests */
  clock?: () => number;
}

export class TrialView {
  readonly root: HTMLElement;
  readonly textPanel: HTMLElement;
  readonly questionPanel: HTMLElement;
  readonly comfortPanel: HTMLElement;
  readonly statusLine: HTMLElement;
  measurements: MeasurementDto[] = [];

  private readonly client: ApiClient;
  private readonly clock: () => number;
  private trialId: string | null = null;
  private stage: TrialStage = "idle";
  private screen: ScreenDto | null = null;
  private questions: QuestionDto[] = [];
  private answers: number[] = [];

  constructor(options: TrialViewOptions) {
    this.client = options.client;
    this.clock = options.clock ?? (() => Date.now());

    this.root = document.createElement("section");
    this.root.className = "trial-view";
    this.root.tabIndex = 0; // focusable so it can take keydown
    this.textPanel = document.createElement("div");
    this.textPanel.className = "trial-text";
    this.questionPanel = document.createElement("div");
    this.questionPanel.className = "trial-questions";
    this.questionPanel.hidden = true;
    this.comfortPanel = document.createElement("div");
    this.comfortPanel.className = "trial-comfort";
    this.comfortPanel.hidden = true;
    this.statusLine = document.createElement("p");
    this.statusLine.className = "trial-status";

    this.root.append(
      this.statusLine,
      this.textPanel,
      this.questionPanel,
      this.comfortPanel,
    );
    this.root.addEventListener("keydown", () => {
      if (this.stage === "reading") {
        void this.pressKey();
      }
    });
    options.container.append(this.root);
  }

  get currentStage(): TrialStage {
    return this.stage;
  }

  async start(participantId: string): Promise<void> {
    const created = await this.client.createTrial(participantId);
    this.trialId = created.trial_id;
    this.measurements = [];
    await this.loadScreen();
  }

  async loadScreen(): Promise<void> {
    if (!this.trialId) throw new Error("trial not started");
    this.screen = await this.client.getScreen(this.trialId);
    this.stage = "reading";
    this.questionPanel.hidden = true;
    this.comfortPanel.hidden = true;
    this.textPanel.hidden = false;
    this.textPanel.textContent = this.screen.text;
    applySettings(this.textPanel, this.screen.theme.settings);
    this.statusLine.textContent =
      `Condition ${this.screen.condition_index + 1} of ` +
      `${this.screen.n_conditions} — screen ` +
      `${this.screen.screen_index + 1} of ${this.screen.n_screens}. ` +
      "Press any key when you finish reading.";
  }

  /** Advance past the current screen; the server times the interval. */
  async pressKey(): Promise<void> {
    if (!this.trialId || this.stage !== "reading") return;
    const result = await this.client.keypress(this.trialId, this.clock());
    if (result.next === "questions") {
      this.questions = result.questions ?? [];
      this.answers = [];
      this.renderQuestions();
    } else {
      await this.loadScreen();
    }
  }

  private renderQuestions(): void {
    this.stage = "questions";
    this.textPanel.hidden = true;
    this.questionPanel.hidden = false;
    this.questionPanel.textContent = "";
    this.statusLine.textContent = "Answer the questions about the passage.";
    this.questions.forEach((question, qi) => {
      const block = document.createElement("fieldset");
      const prompt = document.createElement("legend");
      prompt.textContent = question.prompt;
      block.append(prompt);
      question.options.forEach((option, oi) => {
        const label = document.createElement("label");
        const radio = document.createElement("input");
        radio.type = "radio";
        radio.name = `q${qi}`;
        radio.value = String(oi);
        radio.addEventListener("change", () => {
          this.answers[qi] = oi;
        });
        label.append(radio, document.createTextNode(option));
        block.append(label);
      });
      this.questionPanel.append(block);
    });
  }

  async submitAnswers(answers?: number[]): Promise<void> {
    if (!this.trialId || this.stage !== "questions") {
      throw new Error("no questions to answer");
    }
    const chosen = answers ?? this.answers;
    if (chosen.length !== this.questions.length) {
      throw new Error("answer every question first");
    }
    await this.client.submitAnswers(this.trialId, chosen);
    this.renderComfort();
  }

  private renderComfort(): void {
    this.stage = "comfort";
    this.questionPanel.hidden = true;
    this.comfortPanel.hidden = false;
    this.comfortPanel.textContent = "";
    this.statusLine.textContent = "How comfortable was this text to read?";
    for (let value = 1; value <= 5; value += 1) {
      const button = document.createElement("button");
      button.textContent = String(value);
      button.addEventListener("click", () => {
        void this.submitComfort(value);
      });
      this.comfortPanel.append(button);
    }
  }

  async submitComfort(comfort: number): Promise<void> {
    if (!this.trialId || this.stage !== "comfort") {
      throw new Error("comfort not requested yet");
    }
    const result = await this.client.submitComfort(this.trialId, comfort);
    this.measurements.push(result.measurement);
    if (result.next === "complete") {
      this.stage = "complete";
      this.comfortPanel.hidden = true;
      this.statusLine.textContent =
        `Done — thank you. ${this.measurements.length} conditions recorded.`;
    } else {
      await this.loadScreen();
    }
  }
}
