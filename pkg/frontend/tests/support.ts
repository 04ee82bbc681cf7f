// Shared test plumbing: a programmable fetch fake and a fixed session.

import { Session, type StorageLike } from "../src/session.js";

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

export function okEnvelope(data: unknown, status = 200): Response {
  return jsonResponse({ ok: true, data }, status);
}

export function errorEnvelope(code: string, message: string, status: number,
                              field?: string): Response {
  const error: Record<string, string> = { code, message };
  if (field) {
    error["field"] = field;
  }
  return jsonResponse({ ok: false, error }, status);
}

export interface RecordedCall {
  url: string;
  method: string;
  body: unknown;
}

/** Route-table fetch fake; handlers run in registration order. */
export class FakeFetch {
  calls: RecordedCall[] = [];
  private routes: {
    method: string;
    path: string;
    handler: (body: unknown, call: RecordedCall) => Response;
  }[] = [];

  on(method: string, path: string,
     handler: (body: unknown, call: RecordedCall) => Response): this {
    this.routes.push({ method, path, handler });
    return this;
  }

  fetch = async (url: string, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(String(init.body)) : undefined;
    const call: RecordedCall = { url, method, body };
    this.calls.push(call);
    const path = url.split("?")[0] ?? url;
    for (const route of this.routes) {
      if (route.method === method && path.endsWith(route.path)) {
        return route.handler(body, call);
      }
    }
    return errorEnvelope("not-found", `no fake route for ${method} ${url}`, 404);
  };
}

class MemoryStorage implements StorageLike {
  private values = new Map<string, string>();

  getItem(key: string): string | null {
    return this.values.get(key) ?? null;
  }

  setItem(key: string, value: string): void {
    this.values.set(key, value);
  }
}

export function memoryStorage(): StorageLike {
  return new MemoryStorage();
}

export function fixedSession(operator = "urn:tapecat:op"): Session {
  const session = new Session(memoryStorage(),
                              () => new Date("2024-05-01T10:00:00Z"));
  if (operator) {
    session.setOperator(operator);
  }
  return session;
}

export function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}

export const AUDIT = {
  activity_iri: "urn:tapecat:act",
  operator_label: "Maria",
  kind_label: "accession",
  timespan: "2024-05-01T10:00/2024-05-01T10:00",
  note: "test",
  entities_created: 1,
  statements_asserted: 1,
  statements_retracted: 0,
  commit_seq: 10,
};
