/** Typed client for the session service; the server stays the source of truth. */

import {
  asArray,
  asBoolean,
  asNumber,
  asObject,
  asString,
  JsonValue,
  parseLossless,
} from "./lossless.js";

export interface ResultRow {
  docId: string;
  /** score exactly as serialized by the server */
  scoreText: string;
}

export interface MergedRow {
  docId: string;
  scoreText: string;
  contributors: number;
}

export interface HistoryEntry {
  query: string;
  results: ResultRow[];
}

export interface Judgment {
  collaboratorId: string;
  docId: string;
  relevant: boolean;
}

export interface Snapshot {
  sessionId: string;
  collaborators: string[];
  histories: Record<string, HistoryEntry[]>;
  merged: MergedRow[];
  suggestions: Record<string, string[]>;
  judgments: Judgment[];
}

export interface QueryResponse {
  transcript: string;
  individualResults: ResultRow[];
  mergedResults: MergedRow[];
}

export class ApiError extends Error {
  constructor(readonly code: string, message: string, readonly status: number) {
    super(message);
  }
}

function resultRows(value: JsonValue): ResultRow[] {
  return asArray(value).map((item) => {
    const row = asObject(item);
    return { docId: asString(row.doc_id), scoreText: asNumber(row.score).text };
  });
}

function mergedRows(value: JsonValue): MergedRow[] {
  return asArray(value).map((item) => {
    const row = asObject(item);
    return {
      docId: asString(row.doc_id),
      scoreText: asNumber(row.score).text,
      contributors: asNumber(row.contributors).value,
    };
  });
}

export function snapshotFromJson(value: JsonValue): Snapshot {
  const body = asObject(value);
  const histories: Record<string, HistoryEntry[]> = {};
  for (const [collab, entries] of Object.entries(asObject(body.histories))) {
    histories[collab] = asArray(entries).map((entry) => {
      const row = asObject(entry);
      return { query: asString(row.query), results: resultRows(row.results) };
    });
  }
  const suggestions: Record<string, string[]> = {};
  for (const [collab, queries] of Object.entries(asObject(body.suggestions))) {
    suggestions[collab] = asArray(queries).map(asString);
  }
  return {
    sessionId: asString(body.session_id),
    collaborators: asArray(body.collaborators).map(asString),
    histories,
    merged: mergedRows(body.merged),
    suggestions,
    judgments: asArray(body.judgments).map((item) => {
      const row = asObject(item);
      return {
        collaboratorId: asString(row.collaborator_id),
        docId: asString(row.doc_id),
        relevant: asBoolean(row.relevant),
      };
    }),
  };
}

export class ApiClient {
  constructor(readonly baseUrl: string) {}

  private async request(path: string, init?: RequestInit): Promise<JsonValue> {
    const response = await fetch(this.baseUrl + path, init);
    const text = await response.text();
    let body: JsonValue;
    try {
      body = parseLossless(text);
    } catch {
      throw new ApiError("internal", `unparseable response: ${text.slice(0, 120)}`,
        response.status);
    }
    if (!response.ok) {
      const err = asObject(body);
      throw new ApiError(asString(err.code), asString(err.message), response.status);
    }
    return body;
  }

  private post(path: string, payload: unknown): Promise<JsonValue> {
    return this.request(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  async createSession(sessionId: string): Promise<Snapshot> {
    return snapshotFromJson(await this.post("/sessions", { session_id: sessionId }));
  }

  async joinSession(sessionId: string, collaboratorId: string): Promise<Snapshot> {
    return snapshotFromJson(await this.post(
      `/sessions/${encodeURIComponent(sessionId)}/collaborators`,
      { collaborator_id: collaboratorId },
    ));
  }

  async getSnapshot(sessionId: string): Promise<Snapshot> {
    return snapshotFromJson(
      await this.request(`/sessions/${encodeURIComponent(sessionId)}`),
    );
  }

  async textQuery(sessionId: string, collaboratorId: string,
                  text: string): Promise<QueryResponse> {
    const body = asObject(await this.post(
      `/sessions/${encodeURIComponent(sessionId)}/queries`,
      { collaborator_id: collaboratorId, text },
    ));
    return {
      transcript: asString(body.transcript),
      individualResults: resultRows(body.individual_results),
      mergedResults: mergedRows(body.merged_results),
    };
  }

  async audioQuery(sessionId: string, collaboratorId: string,
                   wav: ArrayBuffer): Promise<QueryResponse> {
    const form = new FormData();
    form.append("collaborator_id", collaboratorId);
    form.append("audio", new Blob([wav], { type: "audio/wav" }), "query.wav");
    const body = asObject(await this.request(
      `/sessions/${encodeURIComponent(sessionId)}/queries`,
      { method: "POST", body: form },
    ));
    return {
      transcript: asString(body.transcript),
      individualResults: resultRows(body.individual_results),
      mergedResults: mergedRows(body.merged_results),
    };
  }

  async judge(sessionId: string, collaboratorId: string, docId: string,
              relevant: boolean): Promise<MergedRow[]> {
    const body = asObject(await this.post(
      `/sessions/${encodeURIComponent(sessionId)}/judgments`,
      { collaborator_id: collaboratorId, doc_id: docId, relevant },
    ));
    return mergedRows(body.merged);
  }

  async getSplit(sessionId: string): Promise<Record<string, string[]>> {
    const body = asObject(await this.request(
      `/sessions/${encodeURIComponent(sessionId)}/split`,
    ));
    const assignment: Record<string, string[]> = {};
    for (const [collab, docs] of Object.entries(asObject(body.assignment))) {
      assignment[collab] = asArray(docs).map(asString);
    }
    return assignment;
  }
}
