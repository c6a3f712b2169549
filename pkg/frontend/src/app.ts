/** DOM controller: three screens (setup, identity, session) rendered
 * from scratch on every state change. No protocol math here; every
 * number shown comes from a server response.
 */

import { ApiClient, ApiRequestError } from "./api.js";
import type { SessionState } from "./api.js";
import { SessionPoller } from "./poll.js";
import { SelectionModel, labelOf, newToken, turnView } from "./state.js";

export interface AppConfig {
  apiBase: string;
  pollMs?: number;
}

type Child = Node | string;

function el(
  tag: string,
  attrs: Record<string, string> = {},
  children: Child[] = [],
): HTMLElement {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

export class App {
  private readonly client: ApiClient;
  private readonly pollMs: number;
  private model: SelectionModel | null = null;
  private poller: SessionPoller | null = null;
  private pending: SessionState | null = null;
  private notice = "";
  private busy = false;

  constructor(
    private readonly root: HTMLElement,
    config: AppConfig,
  ) {
    this.client = new ApiClient(config.apiBase);
    this.pollMs = config.pollMs ?? 2000;
  }

  start(): void {
    this.renderSetup();
  }

  private setNotice(text: string): void {
    this.notice = text;
    const banner = this.root.querySelector("[data-role=notice]");
    if (banner) banner.textContent = text;
  }

  private clear(): HTMLElement {
    this.root.replaceChildren();
    const shell = el("div", { class: "shell" });
    shell.append(
      el("h1", {}, ["shortlist"]),
      el("p", { class: "notice", "data-role": "notice" }, [this.notice]),
    );
    this.root.append(shell);
    return shell;
  }

  // -- setup screen -------------------------------------------------

  private renderSetup(): void {
    const shell = this.clear();

    const menuBox = el("textarea", {
      rows: "6",
      placeholder: "one menu item per line",
      "data-role": "menu",
    }) as HTMLTextAreaElement;
    const peopleBox = el("textarea", {
      rows: "3",
      placeholder: "one participant per line",
      "data-role": "participants",
    }) as HTMLTextAreaElement;
    const createButton = el("button", {}, ["Create session"]);
    createButton.addEventListener("click", () => {
      void this.handleCreate(menuBox.value, peopleBox.value);
    });

    const idBox = el("input", {
      placeholder: "session id",
      "data-role": "session-id",
    }) as HTMLInputElement;
    const loadButton = el("button", {}, ["Load session"]);
    loadButton.addEventListener("click", () => {
      void this.handleLoad(idBox.value.trim());
    });

    shell.append(
      el("section", {}, [
        el("h2", {}, ["Start a new session"]),
        menuBox,
        peopleBox,
        createButton,
      ]),
      el("section", {}, [
        el("h2", {}, ["Join an existing session"]),
        idBox,
        loadButton,
      ]),
    );
  }

  private parseLines(raw: string): string[] {
    return raw
      .split("\n")
      .map((line) => line.trim())
      .filter((line) => line.length > 0);
  }

  private async handleCreate(menuRaw: string, peopleRaw: string): Promise<void> {
    const menu = this.parseLines(menuRaw);
    const participants = this.parseLines(peopleRaw);
    if (menu.length === 0 || participants.length === 0) {
      this.setNotice("need at least one menu item and one participant");
      return;
    }
    try {
      const state = await this.client.createSession({
        menu,
        participants,
        idempotency_token: newToken(),
      });
      this.notice = "";
      this.renderIdentity(state);
    } catch (error) {
      this.setNotice(this.describe(error));
    }
  }

  private async handleLoad(sessionId: string): Promise<void> {
    if (!sessionId) {
      this.setNotice("enter a session id");
      return;
    }
    try {
      const state = await this.client.getSession(sessionId);
      this.notice = "";
      this.renderIdentity(state);
    } catch (error) {
      this.setNotice(this.describe(error));
    }
  }

  // -- identity screen ----------------------------------------------

  private renderIdentity(state: SessionState): void {
    const shell = this.clear();
    const list = el("div", { class: "identity" });
    state.participants.forEach((name, index) => {
      const button = el("button", { "data-role": `identity-${index}` }, [
        `I am ${name}`,
      ]);
      button.addEventListener("click", () => this.enterSession(state, index));
      list.append(button);
    });
    shell.append(
      el("section", {}, [
        el("h2", {}, [`Session ${state.session_id}`]),
        el("p", {}, [
          `schedule ${state.schedule.join(" → ")}; share the id with the others`,
        ]),
        list,
      ]),
    );
  }

  // -- session screen -----------------------------------------------

  private enterSession(state: SessionState, participantIndex: number): void {
    this.model = new SelectionModel(participantIndex);
    this.model.syncState(state);
    this.poller?.stop();
    this.poller = new SessionPoller(
      this.client,
      state.session_id,
      (fresh) => {
        this.model?.syncState(fresh);
        this.renderSession();
      },
      (error) => this.setNotice(this.describe(error)),
      this.pollMs,
    );
    this.renderSession();
    this.poller.start();
  }

  private renderSession(): void {
    const model = this.model;
    const state = model?.state ?? this.pending;
    if (!model || !state) return;
    const shell = this.clear();

    const view = turnView(state, model.participantIndex);
    let headline: string;
    switch (view.status) {
      case "my_turn":
        headline = `your turn: keep exactly ${model.requiredCount}`;
        break;
      case "waiting":
        headline = `waiting for ${view.moverName ?? "the next participant"}`;
        break;
      case "complete":
        headline = `decided: ${view.finalLabel ?? ""}`;
        break;
      case "aborted":
        headline = "session aborted";
        break;
      case "loading":
        headline = "loading";
        break;
    }

    const items = el("ul", { class: "items" });
    for (const itemId of state.offered) {
      const picked = model.isSelected(itemId);
      const button = el(
        "button",
        {
          class: picked ? "item picked" : "item",
          "data-role": `item-${itemId}`,
        },
        [labelOf(state, itemId)],
      );
      button.addEventListener("click", () => {
        if (!model.toggle(itemId) && model.isMyTurn) {
          this.setNotice(`keep exactly ${model.requiredCount} items`);
          return;
        }
        this.renderSession();
      });
      const entry = el("li", {});
      entry.append(button);
      items.append(entry);
    }

    const submit = el("button", { "data-role": "submit" }, [
      "Pass my shortlist",
    ]) as HTMLButtonElement;
    submit.disabled = !model.canSubmit || this.busy;
    submit.addEventListener("click", () => void this.handleSubmit());

    const roster = el("ol", { class: "roster" });
    state.participants.forEach((name, index) => {
      const flags: string[] = [];
      if (index === model.participantIndex) flags.push("you");
      if (state.status === "awaiting_shortlist" && index === state.turn) {
        flags.push("moving");
      }
      roster.append(
        el("li", {}, [flags.length ? `${name} (${flags.join(", ")})` : name]),
      );
    });

    shell.append(
      el("section", {}, [
        el("h2", {}, [headline]),
        el("p", {}, [
          `session ${state.session_id}, ` +
            `${model.selectedIds.length} of ${model.requiredCount} picked`,
        ]),
        items,
        submit,
        el("h3", {}, ["participants"]),
        roster,
      ]),
    );
  }

  private async handleSubmit(): Promise<void> {
    const model = this.model;
    const poller = this.poller;
    const state = model?.state;
    if (!model || !poller || !state) return;
    const body = model.buildSubmission();
    if (body === null) return;
    this.busy = true;
    try {
      const fresh = await poller.mutate(() =>
        this.client.submitShortlist(state.session_id, body),
      );
      model.syncState(fresh);
      this.notice = "";
    } catch (error) {
      if (error instanceof ApiRequestError && error.code === "conflict") {
        this.setNotice("that slot was just filled; refreshing");
      } else {
        this.setNotice(this.describe(error));
      }
    } finally {
      this.busy = false;
      this.renderSession();
    }
  }

  private describe(error: unknown): string {
    if (error instanceof ApiRequestError) {
      return `${error.code}: ${error.message}`;
    }
    return error instanceof Error ? error.message : String(error);
  }
}
