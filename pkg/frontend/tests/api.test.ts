import { describe, expect, it } from "vitest";

import { ApiError, DecompClient } from "../src/api.js";
import { ACF, RUNS, SUMMARY, component, mockFetch } from "./mock.js";

const CSV = "date,value\n2024-01-01,52.1\n2024-01-02,53.0\n";

describe("DecompClient", () => {
  it("posts raw CSV when creating a session", async () => {
    const { impl, calls } = mockFetch({
      "POST /v1/sessions": () => ({
        status: 201,
        json: {
          id: "abc123",
          revision: 0,
          validation: { valid: true, problems: [] },
          outliers_replaced: 2,
          preview: { start_date: "2024-01-01", ...SUMMARY },
        },
      }),
    });
    const client = new DecompClient("http://svc", impl);
    const created = await client.createSession(CSV);
    expect(created.id).toBe("abc123");
    expect(created.outliers_replaced).toBe(2);
    expect(calls[0]?.url).toBe("http://svc/v1/sessions");
    expect(calls[0]?.body).toBe(CSV);
    expect(calls[0]?.contentType).toBe("text/csv");
  });

  it("serializes step requests as JSON with default auto params", async () => {
    const { impl, calls } = mockFetch({
      "POST /v1/sessions/abc123/steps": () => ({
        json: {
          revision: 1,
          component: component("trend", "trend"),
          residual_summary: SUMMARY,
          runs_test: RUNS,
          acf: ACF,
        },
      }),
    });
    const client = new DecompClient("http://svc", impl);
    const response = await client.addStep("abc123", "trend", "linear");
    expect(response.component.band).toBe("trend");
    expect(JSON.parse(calls[0]?.body ?? "")).toEqual({
      band: "trend",
      family: "linear",
      params: "auto",
    });
    expect(calls[0]?.contentType).toBe("application/json");
  });

  it("passes max_lag through as a query parameter", async () => {
    const { impl, calls } = mockFetch({
      "GET /v1/sessions/abc123/acf": () => ({ json: ACF }),
    });
    const client = new DecompClient("http://svc", impl);
    const acf = await client.getAcf("abc123", 56);
    expect(acf.white_noise_band).toBeCloseTo(0.62);
    expect(calls[0]?.url).toBe("http://svc/v1/sessions/abc123/acf?max_lag=56");
  });

  it("omits the actual field when forecasting without holdout data", async () => {
    const { impl, calls } = mockFetch({
      "POST /v1/sessions/abc123/forecast": () => ({
        json: { horizon: 28, predicted: [1, 2], per_component: { trend: [1, 2] } },
      }),
    });
    const client = new DecompClient("http://svc", impl);
    const fc = await client.forecast("abc123", 28);
    expect(fc.metrics).toBeUndefined();
    expect(JSON.parse(calls[0]?.body ?? "")).toEqual({ horizon: 28 });
  });

  it("raises ApiError carrying the service error envelope", async () => {
    const { impl } = mockFetch({
      "DELETE /v1/sessions/abc123/steps/last": () => ({
        status: 409,
        json: { code: "nothing_to_undo", message: "no steps to undo", detail: "" },
      }),
    });
    const client = new DecompClient("http://svc", impl);
    const err = await client.undoLastStep("abc123").catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(409);
    expect((err as ApiError).code).toBe("nothing_to_undo");
  });

  it("falls back to a generic envelope for non-JSON errors", async () => {
    const impl = async () => new Response("boom", { status: 500 });
    const client = new DecompClient("http://svc", impl);
    const err = await client.health().catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).code).toBe("unknown_error");
    expect((err as ApiError).message).toBe("HTTP 500");
  });

  it("strips trailing slashes from the base URL", async () => {
    const { impl, calls } = mockFetch({
      "GET /v1/health": () => ({ json: { status: "ok", version: "0.1.0" } }),
    });
    const client = new DecompClient("http://svc///", impl);
    await client.health();
    expect(calls[0]?.url).toBe("http://svc/v1/health");
  });

  it("forwards auto-decomposition tuning options", async () => {
    const { impl, calls } = mockFetch({
      "POST /v1/auto": () => ({
        json: {
          source: { start_date: "2024-01-01", unit: "ms", values: [1, 2] },
          components: [component("imf1", "weekly", 2)],
          residual: [0, 0],
          residual_random: true,
          residual_p_value: 0.9,
          diagnostics: {},
          tool_version: "0.1.0",
        },
      }),
    });
    const client = new DecompClient("http://svc", impl);
    const result = await client.autoDecompose(CSV, { ensemble: 100, seed: 7 });
    expect(result.components).toHaveLength(1);
    expect(JSON.parse(calls[0]?.body ?? "")).toEqual({ csv: CSV, ensemble: 100, seed: 7 });
  });
});
