/**
 * Console state: a client-side mirror of the latest server snapshot plus
 * the local UI bits (pending query, recording flag, banner).
 *
 * The store never reorders or recomputes anything from the server; the
 * merged pane is rendered in exactly the order and with exactly the number
 * lexemes the snapshot carried.
 */

import { HistoryEntry, Judgment, MergedRow, Snapshot } from "./api.js";

export class ConsoleStore {
  snapshot: Snapshot | null = null;
  pendingQuery = "";
  recording = false;
  banner: string | null = null;

  constructor(readonly sessionId: string, readonly collaboratorId: string) {}

  applySnapshot(snapshot: Snapshot): void {
    this.snapshot = snapshot;
  }

  showError(message: string): void {
    this.banner = message;
  }

  dismissBanner(): void {
    this.banner = null;
  }

  setPendingQuery(text: string): void {
    this.pendingQuery = text;
  }

  useSuggestion(query: string): void {
    this.pendingQuery = query;
  }

  setRecording(on: boolean): void {
    this.recording = on;
  }

  /** Merged pane rows, in server order. */
  mergedPane(): MergedRow[] {
    return this.snapshot ? this.snapshot.merged : [];
  }

  /** This collaborator's own query history, newest last (server order). */
  myHistory(): HistoryEntry[] {
    return this.snapshot?.histories[this.collaboratorId] ?? [];
  }

  /** The latest individual result list, if any. */
  myResults(): HistoryEntry | null {
    const history = this.myHistory();
    return history.length ? history[history.length - 1] : null;
  }

  mySuggestions(): string[] {
    return this.snapshot?.suggestions[this.collaboratorId] ?? [];
  }

  /** My recorded judgment per doc, for rendering the toggles. */
  myJudgments(): Map<string, boolean> {
    const out = new Map<string, boolean>();
    for (const j of this.snapshot?.judgments ?? []) {
      if (j.collaboratorId === this.collaboratorId) out.set(j.docId, j.relevant);
    }
    return out;
  }

  allJudgments(): Judgment[] {
    return this.snapshot?.judgments ?? [];
  }

  collaborators(): string[] {
    return this.snapshot?.collaborators ?? [];
  }
}
