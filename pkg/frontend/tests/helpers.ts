/** Shared fixtures and polling helpers for the explorer tests. */

import { vi } from "vitest";
import type {
  ApiClient,
  CounterfactualResponse,
  ObservationRow,
  RecommendResponse,
  ServiceConfig,
} from "../src/api.js";

export async function waitFor(
  condition: () => boolean,
  timeoutMs = 5000,
  intervalMs = 10,
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (!condition()) {
    if (Date.now() > deadline) throw new Error("waitFor timed out");
    await new Promise((resolve) => setTimeout(resolve, intervalMs));
  }
}

export const demoConfig: ServiceConfig = {
  nodes: ["node13", "node16", "node34", "node39"],
  outcome: "node39",
  actionable: ["node13", "node16", "node34"],
  threshold_z: -0.901,
  threshold_raw: 50.0,
  has_normalization: true,
  observation_count: 2,
};

export const passingRow: ObservationRow = {
  id: 0,
  values: { node13: 0.5, node16: 1.0, node34: -0.2, node39: 0.9 },
  raw_values: { node13: 66.0, node16: 72.0, node34: 57.6, node39: 68.01 },
  outcome: 0.9,
  outcome_raw: 68.01,
  passes: true,
};

export const atRiskRow: ObservationRow = {
  id: 1,
  values: { node13: 0.06, node16: -2.57, node34: -0.365, node39: -1.29 },
  raw_values: { node13: 60.72, node16: 29.16, node34: 55.62, node39: 46.11 },
  outcome: -1.29,
  outcome_raw: 46.11,
  passes: false,
};

export function counterfactualResponse(
  outcome: number,
  passes: boolean,
): CounterfactualResponse {
  return {
    counterfactual_values: { node39: outcome },
    raw_values: { node39: 59.01 + 10 * outcome },
    outcome,
    outcome_raw: 59.01 + 10 * outcome,
    passes,
    abducted_noise: { node39: -0.762605 },
  };
}

export function recommendResponse(
  intervention: Record<string, number>,
): RecommendResponse {
  return {
    intervention,
    intervention_raw: {},
    empty: Object.keys(intervention).length === 0,
    predicted_outcome: -0.901,
    predicted_outcome_raw: 50.0,
    passes: true,
    norm_of_change: 0.702,
  };
}

export interface MockApi {
  client: ApiClient;
  getConfig: ReturnType<typeof vi.fn>;
  getObservations: ReturnType<typeof vi.fn>;
  counterfactual: ReturnType<typeof vi.fn>;
  recommend: ReturnType<typeof vi.fn>;
}

/** An ApiClient stand-in backed by vi.fn()s with sensible defaults. */
export function mockApi(rows: ObservationRow[] = [passingRow, atRiskRow]): MockApi {
  const getConfig = vi.fn(async () => demoConfig);
  const getObservations = vi.fn(async () => rows);
  const counterfactual = vi.fn(async () => counterfactualResponse(-1.29, false));
  const recommend = vi.fn(async () => recommendResponse({ node13: 0.675 }));
  const client = {
    getConfig,
    getObservations,
    counterfactual,
    recommend,
  } as unknown as ApiClient;
  return { client, getConfig, getObservations, counterfactual, recommend };
}
