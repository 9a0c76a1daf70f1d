/**
 * DOM rendering. Every number shown comes from a server response lexeme;
 * the panes repeat the snapshot's ordering untouched.
 */

import { MergedRow } from "./api.js";
import { ConsoleStore } from "./state.js";

export interface UiActions {
  submitText(text: string): void;
  toggleRecording(): void;
  judge(docId: string, relevant: boolean): void;
  useSuggestion(query: string): void;
  refreshSplit(): void;
  dismissBanner(): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, className?: string, text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function mergedRowNode(row: MergedRow, store: ConsoleStore, actions: UiActions): HTMLElement {
  const li = el("li", "merged-row");
  li.append(
    el("span", "doc-id", row.docId),
    el("span", "score", row.scoreText),
    el("span", "contributors", `x${row.contributors}`),
  );
  const mine = store.myJudgments().get(row.docId);
  const relevant = el("button", mine === true ? "judge on" : "judge", "relevant");
  relevant.onclick = () => actions.judge(row.docId, true);
  const irrelevant = el("button", mine === false ? "judge on" : "judge", "irrelevant");
  irrelevant.onclick = () => actions.judge(row.docId, false);
  li.append(relevant, irrelevant);
  return li;
}

export function render(root: HTMLElement, store: ConsoleStore, actions: UiActions,
                       split: Record<string, string[]> | null): void {
  root.replaceChildren();

  if (store.banner) {
    const banner = el("div", "banner", store.banner);
    const close = el("button", "dismiss", "dismiss");
    close.onclick = () => actions.dismissBanner();
    banner.append(close);
    root.append(banner);
  }

  const header = el("header");
  header.append(el("h1", undefined, `session ${store.sessionId}`));
  header.append(el("p", "who", `you are ${store.collaboratorId} — team: ${
    store.collaborators().join(", ") || "(empty)"}`));
  root.append(header);

  const bar = el("form", "query-bar");
  const input = el("input") as HTMLInputElement;
  input.type = "text";
  input.value = store.pendingQuery;
  input.placeholder = "type a query";
  input.oninput = () => store.setPendingQuery(input.value);
  const go = el("button", undefined, "search");
  go.type = "submit";
  const mic = el("button", store.recording ? "mic on" : "mic",
                 store.recording ? "stop" : "speak");
  mic.type = "button";
  mic.onclick = () => actions.toggleRecording();
  bar.onsubmit = (event) => {
    event.preventDefault();
    actions.submitText(input.value);
  };
  bar.append(input, go, mic);
  root.append(bar);

  const suggestions = el("section", "suggestions");
  suggestions.append(el("h2", undefined, "teammates' queries"));
  const sList = el("ul");
  for (const query of store.mySuggestions()) {
    const item = el("li");
    const use = el("button", "suggestion", query);
    use.onclick = () => {
      actions.useSuggestion(query);
      input.value = query;
    };
    item.append(use);
    sList.append(item);
  }
  suggestions.append(sList);
  root.append(suggestions);

  const panes = el("div", "panes");

  const mine = el("section", "pane mine");
  mine.append(el("h2", undefined, "my results"));
  const latest = store.myResults();
  if (latest) {
    mine.append(el("p", "query-echo", latest.query));
    const list = el("ul");
    for (const row of latest.results) {
      const li = el("li");
      li.append(el("span", "doc-id", row.docId), el("span", "score", row.scoreText));
      list.append(li);
    }
    mine.append(list);
  }
  panes.append(mine);

  const merged = el("section", "pane merged");
  merged.append(el("h2", undefined, "combined judgment"));
  const mList = el("ul");
  for (const row of store.mergedPane()) {
    mList.append(mergedRowNode(row, store, actions));
  }
  merged.append(mList);
  panes.append(merged);

  const splitPane = el("section", "pane split");
  splitPane.append(el("h2", undefined, "my assignment"));
  const refresh = el("button", undefined, "refresh split");
  refresh.onclick = () => actions.refreshSplit();
  splitPane.append(refresh);
  if (split) {
    const list = el("ul");
    for (const docId of split[store.collaboratorId] ?? []) {
      list.append(el("li", undefined, docId));
    }
    splitPane.append(list);
  }
  panes.append(splitPane);

  root.append(panes);
}
