// App behaviors against a programmable fake: busy retries, inline field
// errors from the envelope, dashboard rows prefilling forms.

import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { App } from "../src/app.js";
import {
  AUDIT,
  FakeFetch,
  errorEnvelope,
  fixedSession,
  flush,
  okEnvelope,
} from "./support.js";

function baseFake(): FakeFetch {
  return new FakeFetch()
    .on("GET", "/api/operators", () => okEnvelope({
      rows: [{ iri: "urn:tapecat:op", label: "Maria" }],
    }))
    .on("GET", "/api/reports/backlog", () => okEnvelope({
      kind: "backlog", generated_at: "now",
      rows: [{ iri: "urn:tapecat:tape1", label: "tape1",
               detail: { inventory_id: "FHKD-1", set: "urn:tapecat:set1" } }],
    }))
    .on("GET", "/api/reports/unverified", () => okEnvelope({
      kind: "unverified", generated_at: "now", rows: [],
    }));
}

async function mountedApp(fake: FakeFetch): Promise<App> {
  document.body.innerHTML = '<div id="app"></div>';
  const app = new App(document.getElementById("app")!,
                      new ApiClient(fake.fetch), fixedSession());
  await app.mount();
  await flush();
  return app;
}

function setField(form: HTMLElement, name: string, value: string): void {
  const input = form.querySelector<HTMLInputElement>(`[name="${name}"]`);
  if (!input) {
    throw new Error(`no field ${name}`);
  }
  input.value = value;
}

describe("App", () => {
  beforeEach(() => {
    document.body.innerHTML = "";
  });

  it("renders dashboard rows and prefills the digitize form", async () => {
    const app = await mountedApp(baseFake());
    const row = document.querySelector('tr[data-iri="urn:tapecat:tape1"]');
    expect(row).not.toBeNull();
    expect(row!.textContent).toContain("FHKD-1");
    (row!.querySelector("button") as HTMLButtonElement).click();
    await flush();
    const form = document.querySelector("#form-digitization");
    expect(form).not.toBeNull();
    const tape = form!.querySelector<HTMLInputElement>('[name="tape"]');
    expect(tape!.value).toBe("urn:tapecat:tape1");
  });

  it("shows client-side validation errors without calling the API", async () => {
    const fake = baseFake();
    const app = await mountedApp(fake);
    await app.openForm("accession");
    const form = document.querySelector("#form-accession") as HTMLFormElement;
    const calls = fake.calls.length;
    form.dispatchEvent(new Event("submit", { cancelable: true }));
    await flush();
    const error = form.querySelector('[data-for="inventory_id"]');
    expect(error!.textContent).toMatch(/required/);
    expect(fake.calls.length).toBe(calls);
  });

  it("maps the envelope's offending field onto the form", async () => {
    const fake = baseFake().on("POST", "/api/workflows/accession",
      () => errorEnvelope("duplicate-identifier",
                          "identifier value 'X' already in use", 409,
                          "inventory_id"));
    const app = await mountedApp(fake);
    await app.openForm("accession");
    const form = document.querySelector("#form-accession") as HTMLFormElement;
    setField(form, "inventory_id", "X");
    setField(form, "parts", "tape");
    form.dispatchEvent(new Event("submit", { cancelable: true }));
    await flush();
    await flush();
    const error = form.querySelector('[data-for="inventory_id"]');
    expect(error!.textContent).toMatch(/already in use/);
  });

  it("offers a retry on busy and resubmits the same payload", async () => {
    let attempts = 0;
    const fake = baseFake().on("POST", "/api/workflows/accession", () => {
      attempts += 1;
      if (attempts === 1) {
        return errorEnvelope("busy", "another activity is open", 409);
      }
      return okEnvelope({
        set: "urn:tapecat:set9", parts: ["urn:tapecat:t9"],
        identifier: "urn:tapecat:id9", source: null, audit: AUDIT,
      }, 201);
    });
    const app = await mountedApp(fake);
    await app.openForm("accession");
    const form = document.querySelector("#form-accession") as HTMLFormElement;
    setField(form, "inventory_id", "FHKD-9");
    setField(form, "parts", "tape");
    form.dispatchEvent(new Event("submit", { cancelable: true }));
    await flush();
    await flush();
    const retry = form.querySelector("button.retry") as HTMLButtonElement;
    expect(retry).not.toBeNull();
    retry.click();
    await flush();
    await flush();
    expect(attempts).toBe(2);
    expect(form.querySelector(".success")).not.toBeNull();
    expect(form.querySelector(".success")!.textContent)
      .toContain("urn:tapecat:set9");
    // the committed activity lands in the session history
    expect(document.querySelector("#history-list")!.textContent)
      .toContain("accession");
  });

  it("shows the offline banner when the service is unreachable", async () => {
    const fake = new FakeFetch()
      .on("GET", "/api/operators", () => okEnvelope({ rows: [] }));
    // backlog/unverified fall through to the 404 default
    const app = await mountedApp(fake);
    expect(document.querySelector("#view .offline")).not.toBeNull();
  });
});
