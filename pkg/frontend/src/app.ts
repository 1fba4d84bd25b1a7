import { ApiClient, ApiError } from "./api.js";
import type { Answer, SessionConfig, SessionStateJson } from "./types.js";
import { answersEnabled, renderSession } from "./view.js";

export interface AppElements {
  form: HTMLFormElement;
  session: HTMLElement;
  error: HTMLElement;
  buttons: { true: HTMLButtonElement; false: HTMLButtonElement; skip: HTMLButtonElement };
  download: HTMLAnchorElement;
}

/** One active session per tab: create, poll every second, answer. */
export class App {
  private state: SessionStateJson | null = null;
  private pollTimer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly el: AppElements,
    private readonly pollMs = 1000,
  ) {}

  start(): void {
    this.el.form.addEventListener("submit", (e) => {
      e.preventDefault();
      void this.createSession();
    });
    for (const answer of ["true", "false", "skip"] as Answer[]) {
      this.el.buttons[answer].addEventListener("click", () => {
        void this.answer(answer);
      });
    }
    window.addEventListener("focus", () => void this.refresh());
  }

  private readConfig(): { source: { dpi?: string; fixture?: string }; config: SessionConfig } {
    const data = new FormData(this.el.form);
    const fixture = String(data.get("fixture") ?? "");
    const dpiText = String(data.get("dpi") ?? "").trim();
    const source = dpiText ? { dpi: dpiText } : { fixture };
    const config: SessionConfig = {
      enhance: data.get("enhance") === "on",
      qsm_measure: String(data.get("qsm") ?? "ENT"),
      qcm_measure: String(data.get("qcm") ?? "SUM"),
    };
    return { source, config };
  }

  async createSession(): Promise<void> {
    const { source, config } = this.readConfig();
    try {
      this.setState(await this.api.createSession(source, config));
      this.startPolling();
    } catch (err) {
      this.showError(err);
    }
  }

  async answer(answer: Answer): Promise<void> {
    if (this.state === null || !answersEnabled(this.state)) return;
    this.setButtonsEnabled(false); // optimistic disable until re-render
    try {
      this.setState(await this.api.answer(this.state.id, answer));
    } catch (err) {
      this.showError(err);
      await this.refresh();
    }
  }

  async refresh(): Promise<void> {
    if (this.state === null) return;
    try {
      this.setState(await this.api.getSession(this.state.id));
    } catch (err) {
      this.showError(err);
    }
  }

  private startPolling(): void {
    if (this.pollTimer !== null) clearInterval(this.pollTimer);
    this.pollTimer = setInterval(() => void this.refresh(), this.pollMs);
  }

  private setState(state: SessionStateJson): void {
    this.state = state;
    this.el.error.textContent = "";
    this.el.session.innerHTML = renderSession(state);
    this.setButtonsEnabled(answersEnabled(state));
    this.el.download.hidden = state.status !== "DONE";
    if (state.status === "DONE") {
      const blob = JSON.stringify(state.history, null, 2);
      this.el.download.href =
        "data:application/json;charset=utf-8," + encodeURIComponent(blob);
      this.el.download.download = `transcript-${state.id}.json`;
      if (this.pollTimer !== null) {
        clearInterval(this.pollTimer);
        this.pollTimer = null;
      }
    }
  }

  private setButtonsEnabled(enabled: boolean): void {
    for (const b of Object.values(this.el.buttons)) b.disabled = !enabled;
  }

  private showError(err: unknown): void {
    this.el.error.textContent =
      err instanceof ApiError
        ? `service error (${err.status}): ${err.message}`
        : String(err);
  }
}

export function bootstrap(baseUrl: string): App {
  const el: AppElements = {
    form: document.querySelector("#create-form") as HTMLFormElement,
    session: document.querySelector("#session") as HTMLElement,
    error: document.querySelector("#error") as HTMLElement,
    buttons: {
      true: document.querySelector("#btn-true") as HTMLButtonElement,
      false: document.querySelector("#btn-false") as HTMLButtonElement,
      skip: document.querySelector("#btn-skip") as HTMLButtonElement,
    },
    download: document.querySelector("#download") as HTMLAnchorElement,
  };
  const app = new App(new ApiClient(baseUrl), el);
  app.start();
  return app;
}
