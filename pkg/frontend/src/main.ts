/** Bootstrap: join/create a session, then poll snapshots and render. */

import { ApiClient, ApiError } from "./api.js";
import { Poller } from "./poll.js";
import { Recorder } from "./recorder.js";
import { ConsoleStore } from "./state.js";
import { render, UiActions } from "./ui.js";

function param(name: string, fallback: string): string {
  return new URLSearchParams(window.location.search).get(name) ?? fallback;
}

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");

  const baseUrl = param("api", "http://127.0.0.1:8000");
  const sessionId = param("session", "team");
  const collaboratorId = param("as", `guest-${Math.floor(Math.random() * 1000)}`);

  const api = new ApiClient(baseUrl);
  const store = new ConsoleStore(sessionId, collaboratorId);
  const recorder = new Recorder();
  let split: Record<string, string[]> | null = null;

  try {
    await api.createSession(sessionId);
  } catch (error) {
    if (!(error instanceof ApiError && error.code === "conflict")) throw error;
  }
  store.applySnapshot(await api.joinSession(sessionId, collaboratorId));

  const redraw = () => render(root, store, actions, split);

  const surface = (error: unknown) => {
    store.showError(error instanceof ApiError ? error.message : String(error));
    redraw();
  };

  const poller = new Poller(async () => {
    try {
      store.applySnapshot(await api.getSnapshot(sessionId));
      redraw();
    } catch (error) {
      surface(error);
    }
  });

  const actions: UiActions = {
    submitText(text: string): void {
      if (!text.trim()) return;
      api.textQuery(sessionId, collaboratorId, text)
        .then(() => {
          store.setPendingQuery("");
          return poller.runOnce();
        })
        .catch(surface);
    },
    toggleRecording(): void {
      if (store.recording) {
        recorder.stop()
          .then(({ wav }) => {
            store.setRecording(false);
            return api.audioQuery(sessionId, collaboratorId, wav);
          })
          .then(() => poller.runOnce())
          .catch((error) => {
            store.setRecording(false);
            surface(error);
          });
      } else {
        recorder.start()
          .then(() => {
            store.setRecording(true);
            redraw();
          })
          .catch(surface);
      }
    },
    judge(docId: string, relevant: boolean): void {
      api.judge(sessionId, collaboratorId, docId, relevant)
        .then(() => poller.runOnce())
        .catch(surface);
    },
    useSuggestion(query: string): void {
      store.useSuggestion(query);
      redraw();
    },
    refreshSplit(): void {
      api.getSplit(sessionId)
        .then((assignment) => {
          split = assignment;
          redraw();
        })
        .catch(surface);
    },
    dismissBanner(): void {
      store.dismissBanner();
      redraw();
    },
  };

  redraw();
  poller.start();
}

boot().catch((error) => {
  document.body.textContent = `failed to start: ${error}`;
});
