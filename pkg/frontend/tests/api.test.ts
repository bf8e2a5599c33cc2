import { afterEach, expect, test, vi } from "vitest";
import { ApiClient, ApiError } from "../src/api.js";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

afterEach(() => {
  vi.unstubAllGlobals();
});

test("getConfig hits the configured base URL", async () => {
  const fetchMock = vi.fn(async () => jsonResponse({ nodes: [] }));
  vi.stubGlobal("fetch", fetchMock);
  const client = new ApiClient("http://example.test:9");
  await client.getConfig();
  expect(fetchMock).toHaveBeenCalledWith("http://example.test:9/api/config");
});

test("an empty base URL yields same-origin paths", async () => {
  const fetchMock = vi.fn(async () => jsonResponse([]));
  vi.stubGlobal("fetch", fetchMock);
  await new ApiClient("").getObservations();
  expect(fetchMock).toHaveBeenCalledWith("/api/observations");
});

test("counterfactual posts JSON and returns the parsed body", async () => {
  const payload = { outcome: -0.901, passes: true };
  const fetchMock = vi.fn(async () => jsonResponse(payload));
  vi.stubGlobal("fetch", fetchMock);
  const res = await new ApiClient("http://h").counterfactual({
    observation_id: 7,
    interventions: { node13: 0.861 },
  });
  expect(res).toEqual(payload);
  const [url, init] = fetchMock.mock.calls[0] as unknown as [string, RequestInit];
  expect(url).toBe("http://h/api/counterfactual");
  expect(init.method).toBe("POST");
  expect((init.headers as Record<string, string>)["Content-Type"]).toBe(
    "application/json",
  );
  expect(JSON.parse(init.body as string)).toEqual({
    observation_id: 7,
    interventions: { node13: 0.861 },
  });
});

test("recommend posts to its endpoint", async () => {
  const fetchMock = vi.fn(async () => jsonResponse({ empty: true }));
  vi.stubGlobal("fetch", fetchMock);
  await new ApiClient("http://h").recommend({ observation_id: 0, mode: "single" });
  const [url, init] = fetchMock.mock.calls[0] as unknown as [string, RequestInit];
  expect(url).toBe("http://h/api/recommend");
  expect(JSON.parse(init.body as string)).toEqual({
    observation_id: 0,
    mode: "single",
  });
});

test("non-2xx with a detail body raises ApiError carrying it", async () => {
  vi.stubGlobal(
    "fetch",
    vi.fn(async () => jsonResponse({ detail: "no observation with id 99" }, 404)),
  );
  const err = await new ApiClient("http://h")
    .counterfactual({ observation_id: 99, interventions: {} })
    .then(() => null)
    .catch((e: unknown) => e);
  expect(err).toBeInstanceOf(ApiError);
  expect((err as ApiError).status).toBe(404);
  expect((err as ApiError).message).toBe("no observation with id 99");
});

test("non-JSON error bodies fall back to the status line", async () => {
  vi.stubGlobal(
    "fetch",
    vi.fn(
      async () =>
        new Response("<html>bad gateway</html>", {
          status: 502,
          statusText: "Bad Gateway",
        }),
    ),
  );
  const err = await new ApiClient("http://h")
    .getConfig()
    .then(() => null)
    .catch((e: unknown) => e);
  expect(err).toBeInstanceOf(ApiError);
  expect((err as ApiError).message).toBe("502 Bad Gateway");
});

test("network failures propagate as-is", async () => {
  vi.stubGlobal(
    "fetch",
    vi.fn(async () => {
      throw new TypeError("fetch failed");
    }),
  );
  await expect(new ApiClient("http://h").getConfig()).rejects.toThrow(
    "fetch failed",
  );
});
