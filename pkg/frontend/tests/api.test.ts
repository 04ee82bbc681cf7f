// Envelope handling in the API client.

import { describe, expect, it } from "vitest";

import { ApiClient, ApiFailure } from "../src/api.js";
import { FakeFetch, errorEnvelope, okEnvelope } from "./support.js";

describe("ApiClient", () => {
  it("unwraps ok envelopes", async () => {
    const fake = new FakeFetch().on("GET", "/api/health",
                                   () => okEnvelope({ status: "ok" }));
    const client = new ApiClient(fake.fetch);
    expect(await client.meta().catch(() => null)).toBeNull();
    // registered route answers
    const fake2 = new FakeFetch().on("GET", "/api/meta",
                                     () => okEnvelope({ profile: "paper" }));
    const meta = await new ApiClient(fake2.fetch).meta();
    expect(meta.profile).toBe("paper");
  });

  it("throws ApiFailure with the error envelope", async () => {
    const fake = new FakeFetch().on("POST", "/api/workflows/accession",
      () => errorEnvelope("duplicate-identifier", "already in use", 409,
                          "inventory_id"));
    const client = new ApiClient(fake.fetch);
    const failure = await client.accession({}).catch((error) => error);
    expect(failure).toBeInstanceOf(ApiFailure);
    expect(failure.error.code).toBe("duplicate-identifier");
    expect(failure.error.field).toBe("inventory_id");
    expect(failure.status).toBe(409);
    expect(failure.busy).toBe(false);
  });

  it("flags busy failures for retry affordances", async () => {
    const fake = new FakeFetch().on("POST", "/api/workflows/digitization",
      () => errorEnvelope("busy", "another activity is open", 409));
    const client = new ApiClient(fake.fetch);
    const failure = await client.submitWorkflow("digitization", {})
      .catch((error) => error);
    expect(failure.busy).toBe(true);
  });

  it("serializes request bodies and encodes query IRIs", async () => {
    const fake = new FakeFetch()
      .on("POST", "/api/operators", (body) => {
        expect(body).toEqual({ name: "Maria" });
        return okEnvelope({ iri: "urn:op", audit: null });
      })
      .on("GET", "/api/entity", (_body, call) => {
        expect(call.url).toContain("iri=urn%3Atapecat%3Ax");
        return okEnvelope({ entity: null, neighbors: [] });
      });
    const client = new ApiClient(fake.fetch);
    await client.addOperator("Maria");
    await client.entity("urn:tapecat:x");
    expect(fake.calls.length).toBe(2);
  });

  it("reports non-JSON responses as transport failures", async () => {
    const fake: typeof fetch = async () => new Response("<html>boom</html>", {
      status: 502,
    });
    const client = new ApiClient(fake as never);
    const failure = await client.backlog().catch((error) => error);
    expect(failure).toBeInstanceOf(ApiFailure);
    expect(failure.error.code).toBe("transport");
  });
});
