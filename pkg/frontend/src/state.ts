/** Client-side selection state with validation parity.
 *
 * The model makes illegal submissions unrepresentable: an item can
 * only enter the selection while it is offered and it is this
 * participant's turn, the selection can never exceed the required
 * count, and buildSubmission returns null until the count is exact.
 * The server's wrong_count and item_not_offered rejections are
 * therefore unreachable from the UI.
 */

import type { SessionState, SubmitShortlistRequest } from "./api.js";

export function newToken(): string {
  const cryptoObj = globalThis.crypto as Crypto | undefined;
  if (cryptoObj && typeof cryptoObj.randomUUID === "function") {
    return cryptoObj.randomUUID();
  }
  return `tok-${Date.now().toString(36)}-${Math.random().toString(36).slice(2)}`;
}

export class SelectionModel {
  private session: SessionState | null = null;
  private selected: string[] = [];
  private token: string | null = null;

  constructor(readonly participantIndex: number) {
    if (!Number.isInteger(participantIndex) || participantIndex < 0) {
      throw new Error("participant index must be a non-negative integer");
    }
  }

  /** Absorb a fresh server state, pruning anything no longer legal. */
  syncState(state: SessionState): void {
    const before = this.selected.join("\u0000");
    if (this.session === null || state.turn !== this.session.turn) {
      // a new slot invalidates any half-built selection
      this.selected = [];
      this.token = null;
    }
    this.session = state;
    if (!this.isMyTurn) {
      this.selected = [];
    } else {
      const offered = new Set(state.offered);
      this.selected = this.selected.filter((id) => offered.has(id));
    }
    if (this.selected.join("\u0000") !== before) {
      this.token = null;
    }
  }

  get state(): SessionState | null {
    return this.session;
  }

  get isMyTurn(): boolean {
    return (
      this.session !== null &&
      this.session.status === "awaiting_shortlist" &&
      this.session.turn === this.participantIndex
    );
  }

  /** How many items the current mover must pass along. */
  get requiredCount(): number {
    if (this.session === null || !this.isMyTurn) return 0;
    const count = this.session.schedule[this.session.turn + 1];
    return count ?? 0;
  }

  get selectedIds(): string[] {
    return [...this.selected];
  }

  isSelected(itemId: string): boolean {
    return this.selected.includes(itemId);
  }

  /** Toggle an offered item; returns false when the click is illegal
   * (not my turn, unknown item, or the selection is already full). */
  toggle(itemId: string): boolean {
    if (!this.isMyTurn || this.session === null) return false;
    const index = this.selected.indexOf(itemId);
    if (index >= 0) {
      this.selected.splice(index, 1);
      this.token = null;
      return true;
    }
    if (!this.session.offered.includes(itemId)) return false;
    if (this.selected.length >= this.requiredCount) return false;
    this.selected.push(itemId);
    this.token = null;
    return true;
  }

  get canSubmit(): boolean {
    return (
      this.isMyTurn &&
      this.requiredCount > 0 &&
      this.selected.length === this.requiredCount
    );
  }

  /** The submission for the current selection, or null while it is
   * incomplete. Repeated calls reuse one idempotency token until the
   * selection changes, so network retries are safe. */
  buildSubmission(): SubmitShortlistRequest | null {
    if (!this.canSubmit) return null;
    if (this.token === null) {
      this.token = newToken();
    }
    return {
      participant_index: this.participantIndex,
      item_ids: [...this.selected],
      idempotency_token: this.token,
    };
  }
}

export interface TurnView {
  status: "loading" | "my_turn" | "waiting" | "complete" | "aborted";
  moverName: string | null;
  finalLabel: string | null;
}

/** What the header should say for one participant right now. */
export function turnView(
  state: SessionState | null,
  participantIndex: number,
): TurnView {
  if (state === null) {
    return { status: "loading", moverName: null, finalLabel: null };
  }
  if (state.status === "aborted") {
    return { status: "aborted", moverName: null, finalLabel: null };
  }
  if (state.status === "complete") {
    const item = state.menu.find((it) => it.item_id === state.final_choice);
    return {
      status: "complete",
      moverName: null,
      finalLabel: item ? item.label : state.final_choice,
    };
  }
  const mover = state.participants[state.turn] ?? null;
  return {
    status: state.turn === participantIndex ? "my_turn" : "waiting",
    moverName: mover,
    finalLabel: null,
  };
}

export function labelOf(state: SessionState, itemId: string): string {
  const item = state.menu.find((it) => it.item_id === itemId);
  return item ? item.label : itemId;
}
