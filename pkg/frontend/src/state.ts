/**
 * Explorer state: the selected observation, one slider per actionable
 * node, and the latest completed counterfactual response.
 *
 * Two invariants live here:
 *  - slider values are always clamped to the configured z-range [-3, +3];
 *  - responses carry a request sequence number, and only the highest
 *    sequence seen so far may render, so stale responses are discarded.
 *
 * Raw-unit values are never computed locally; they are copied from server
 * payloads (observation rows and counterfactual responses).
 */

import type {
  CounterfactualResponse,
  ObservationRow,
  ServiceConfig,
} from "./api.js";

export const Z_MIN = -3;
export const Z_MAX = 3;

export function clampZ(value: number): number {
  if (Number.isNaN(value)) return 0;
  return Math.min(Z_MAX, Math.max(Z_MIN, value));
}

export class ExplorerStore {
  selected: ObservationRow | null = null;
  latest: CounterfactualResponse | null = null;

  private sliderZ = new Map<string, number>();
  private sliderRaw = new Map<string, number>();
  private nextSequence = 0;
  private renderedSequence = 0;

  constructor(readonly config: ServiceConfig) {}

  get thresholdZ(): number {
    return this.config.threshold_z;
  }

  get thresholdRaw(): number {
    return this.config.threshold_raw;
  }

  /** Load an observation: sliders snap to its values, response resets. */
  select(row: ObservationRow): void {
    this.selected = row;
    this.latest = null;
    this.sliderZ.clear();
    this.sliderRaw.clear();
    for (const node of this.config.actionable) {
      this.sliderZ.set(node, clampZ(row.values[node]));
      this.sliderRaw.set(node, row.raw_values[node]);
    }
    // A new selection must not be overwritten by a response that was
    // already in flight for the previous one.
    this.renderedSequence = this.nextSequence;
  }

  setSlider(node: string, z: number): void {
    if (!this.sliderZ.has(node)) {
      throw new Error(`unknown actionable node ${node}`);
    }
    this.sliderZ.set(node, clampZ(z));
  }

  getSlider(node: string): number {
    const z = this.sliderZ.get(node);
    if (z === undefined) throw new Error(`unknown actionable node ${node}`);
    return z;
  }

  getSliderRaw(node: string): number | undefined {
    return this.sliderRaw.get(node);
  }

  /** Current slider positions as an interventions payload. */
  interventions(): Record<string, number> {
    const out: Record<string, number> = {};
    for (const [node, z] of this.sliderZ) out[node] = z;
    return out;
  }

  /** Tag an outgoing request. */
  beginRequest(): number {
    return ++this.nextSequence;
  }

  /**
   * Accept a completed response. Returns false (and changes nothing)
   * when a newer response has already rendered.
   */
  applyResponse(sequence: number, res: CounterfactualResponse): boolean {
    if (sequence <= this.renderedSequence) return false;
    this.renderedSequence = sequence;
    this.latest = res;
    for (const node of this.config.actionable) {
      if (node in res.raw_values) {
        this.sliderRaw.set(node, res.raw_values[node]);
      }
    }
    return true;
  }

  /** Outcome of the latest completed request, or the observed outcome. */
  displayedOutcome(): { z: number; raw: number; passes: boolean } | null {
    if (this.latest !== null) {
      return {
        z: this.latest.outcome,
        raw: this.latest.outcome_raw,
        passes: this.latest.passes,
      };
    }
    if (this.selected !== null) {
      return {
        z: this.selected.outcome,
        raw: this.selected.outcome_raw,
        passes: this.selected.passes,
      };
    }
    return null;
  }
}
