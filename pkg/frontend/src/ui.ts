/**
 * DOM controller for the explorer: cohort table on the left, what-if
 * panel (sliders, outcome gauge, pass badge, recommend button) on the
 * right, and a non-blocking error banner on top.
 *
 * Every displayed outcome comes from the service; the client never
 * evaluates the model. Slider input is debounced, responses are applied
 * through the store's sequence-number discipline, and a network failure
 * keeps the last good values on screen.
 */

import type { ApiClient, ObservationRow } from "./api.js";
import { debounce, type Debounced } from "./debounce.js";
import { escapeHtml, formatDual, formatZ } from "./format.js";
import { clampZ, ExplorerStore, Z_MAX, Z_MIN } from "./state.js";

export interface ExplorerOptions {
  /** Delay between the last slider movement and the request. */
  debounceMs?: number;
  /** Total duration of the recommend slider animation. */
  animationMs?: number;
  /** Frame interval of that animation. */
  animationStepMs?: number;
}

const GAUGE_MIN = -3.5;
const GAUGE_MAX = 3.5;

function gaugePercent(z: number): number {
  const clipped = Math.min(GAUGE_MAX, Math.max(GAUGE_MIN, z));
  return ((clipped - GAUGE_MIN) / (GAUGE_MAX - GAUGE_MIN)) * 100;
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

type SortKey = "id" | "outcome";

export class ExplorerApp {
  store: ExplorerStore | null = null;

  private rows: ObservationRow[] = [];
  private sortKey: SortKey = "id";
  private sortAscending = true;
  private requestSoon: Debounced<[]>;
  private readonly animationMs: number;
  private readonly animationStepMs: number;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    options: ExplorerOptions = {},
  ) {
    this.animationMs = options.animationMs ?? 350;
    this.animationStepMs = options.animationStepMs ?? 25;
    this.requestSoon = debounce(
      () => this.requestCounterfactual(),
      options.debounceMs ?? 150,
    );
  }

  async init(): Promise<void> {
    this.root.innerHTML = `
      <div id="banner" class="banner" hidden></div>
      <header class="masthead">
        <h1>Counterfactual explorer</h1>
        <div id="session-line" class="session-line"></div>
      </header>
      <main class="layout">
        <section class="panel" id="cohort-panel">
          <h2>Cohort</h2>
          <div class="table-scroll">
            <table id="cohort">
              <thead>
                <tr>
                  <th data-sort="id" class="sortable">#</th>
                  <th data-sort="outcome" class="sortable">outcome</th>
                  <th>status</th>
                </tr>
              </thead>
              <tbody></tbody>
            </table>
          </div>
          <div id="cohort-empty" class="empty-note" hidden>no observations</div>
        </section>
        <section class="panel" id="whatif-panel">
          <h2>What-if</h2>
          <div id="whatif-placeholder" class="empty-note">
            select an observation to explore interventions
          </div>
          <div id="whatif" hidden>
            <div id="sliders"></div>
            <div class="gauge">
              <div class="gauge-track">
                <div id="gauge-threshold" class="gauge-threshold"></div>
                <div id="gauge-marker" class="gauge-marker"></div>
              </div>
              <div class="gauge-caption">
                <span id="outcome-text"></span>
                <span id="badge" class="badge"></span>
              </div>
            </div>
            <div class="actions">
              <button id="recommend" type="button">Recommend</button>
              <button id="reset" type="button">Reset</button>
              <span id="recommend-note" class="recommend-note"></span>
            </div>
          </div>
        </section>
      </main>
    `;

    this.wireEvents();

    try {
      const [config, rows] = await Promise.all([
        this.api.getConfig(),
        this.api.getObservations(),
      ]);
      this.store = new ExplorerStore(config);
      this.rows = rows;
      this.hideBanner();
    } catch (err) {
      this.showBanner(err);
      return;
    }

    const { config } = this.store;
    const threshold = formatDual(
      config.threshold_z,
      config.threshold_raw,
      config.has_normalization,
    );
    this.element("#session-line").textContent =
      `outcome ${config.outcome} · pass at ${threshold} · ` +
      `${this.rows.length} observations`;
    this.renderCohort();
  }

  // --- event wiring -----------------------------------------------------

  private wireEvents(): void {
    this.element("#cohort thead").addEventListener("click", (ev) => {
      const th = (ev.target as HTMLElement).closest<HTMLElement>("th[data-sort]");
      if (!th) return;
      const key = th.dataset.sort as SortKey;
      if (this.sortKey === key) {
        this.sortAscending = !this.sortAscending;
      } else {
        this.sortKey = key;
        this.sortAscending = true;
      }
      this.renderCohort();
    });

    this.element("#cohort tbody").addEventListener("click", (ev) => {
      const tr = (ev.target as HTMLElement).closest<HTMLElement>("tr[data-id]");
      if (!tr) return;
      this.selectRow(Number(tr.dataset.id));
    });

    this.element("#sliders").addEventListener("input", (ev) => {
      const input = ev.target as HTMLInputElement;
      const row = input.closest<HTMLElement>(".slider-row");
      if (!row || !this.store) return;
      const node = row.dataset.node as string;
      this.store.setSlider(node, Number(input.value));
      this.renderSliderLabel(node);
      this.requestSoon();
    });

    this.element("#recommend").addEventListener("click", () => {
      void this.recommend();
    });

    this.element("#reset").addEventListener("click", () => {
      if (this.store?.selected) this.selectRow(this.store.selected.id);
    });
  }

  // --- cohort table -----------------------------------------------------

  private sortedRows(): ObservationRow[] {
    const rows = [...this.rows];
    const direction = this.sortAscending ? 1 : -1;
    rows.sort((a, b) =>
      this.sortKey === "id"
        ? direction * (a.id - b.id)
        : direction * (a.outcome - b.outcome),
    );
    return rows;
  }

  private renderCohort(): void {
    const store = this.store;
    if (!store) return;
    const tbody = this.element("#cohort tbody");
    const empty = this.element("#cohort-empty");
    if (this.rows.length === 0) {
      tbody.innerHTML = "";
      empty.hidden = false;
      return;
    }
    empty.hidden = true;
    const { has_normalization } = store.config;
    const selectedId = store.selected?.id;
    tbody.innerHTML = this.sortedRows()
      .map((row) => {
        const badge = row.passes
          ? '<span class="badge pass">pass</span>'
          : '<span class="badge fail">at risk</span>';
        const selected = row.id === selectedId ? ' class="selected"' : "";
        const outcome = escapeHtml(
          formatDual(row.outcome, row.outcome_raw, has_normalization),
        );
        return `<tr data-id="${row.id}"${selected}>
          <td>${row.id}</td><td>${outcome}</td><td>${badge}</td></tr>`;
      })
      .join("");
  }

  // --- what-if panel ----------------------------------------------------

  selectRow(id: number): void {
    const store = this.store;
    const row = this.rows.find((r) => r.id === id);
    if (!store || !row) return;
    this.requestSoon.cancel();
    store.select(row);
    this.element("#whatif-placeholder").hidden = true;
    this.element("#whatif").hidden = false;
    this.element("#recommend-note").textContent = "";
    this.renderSliders();
    this.renderOutcome();
    this.renderCohort();
  }

  private renderSliders(): void {
    const store = this.store;
    if (!store) return;
    this.element("#sliders").innerHTML = store.config.actionable
      .map((node) => {
        const z = store.getSlider(node);
        return `<div class="slider-row" data-node="${escapeHtml(node)}">
          <label>${escapeHtml(node)}</label>
          <input type="range" min="${Z_MIN}" max="${Z_MAX}" step="0.001"
                 value="${z}" aria-label="${escapeHtml(node)}">
          <span class="slider-value"></span>
        </div>`;
      })
      .join("");
    for (const node of store.config.actionable) this.renderSliderLabel(node);
  }

  private sliderRow(node: string): HTMLElement {
    const row = this.root.querySelector<HTMLElement>(
      `.slider-row[data-node="${node}"]`,
    );
    if (!row) throw new Error(`no slider for ${node}`);
    return row;
  }

  private renderSliderLabel(node: string): void {
    const store = this.store;
    if (!store) return;
    const z = store.getSlider(node);
    const raw = store.getSliderRaw(node);
    const label = this.sliderRow(node).querySelector(".slider-value") as HTMLElement;
    label.textContent =
      store.config.has_normalization && raw !== undefined
        ? formatDual(z, raw, true)
        : `z ${formatZ(z)}`;
  }

  private renderOutcome(): void {
    const store = this.store;
    const outcome = store?.displayedOutcome();
    if (!store || !outcome) return;
    this.element("#outcome-text").textContent = formatDual(
      outcome.z,
      outcome.raw,
      store.config.has_normalization,
    );
    const badge = this.element("#badge");
    badge.textContent = outcome.passes ? "pass" : "at risk";
    badge.classList.toggle("pass", outcome.passes);
    badge.classList.toggle("fail", !outcome.passes);
    this.element("#gauge-marker").style.left = `${gaugePercent(outcome.z)}%`;
    this.element("#gauge-threshold").style.left =
      `${gaugePercent(store.thresholdZ)}%`;
  }

  // --- request lifecycle ------------------------------------------------

  private requestCounterfactual(): void {
    const store = this.store;
    if (!store?.selected) return;
    const sequence = store.beginRequest();
    this.api
      .counterfactual({
        observation_id: store.selected.id,
        interventions: store.interventions(),
      })
      .then((res) => {
        if (!store.applyResponse(sequence, res)) return;
        this.hideBanner();
        this.renderOutcome();
        for (const node of store.config.actionable) this.renderSliderLabel(node);
      })
      .catch((err) => this.showBanner(err));
  }

  async recommend(): Promise<void> {
    const store = this.store;
    if (!store?.selected) return;
    const button = this.element("#recommend") as HTMLButtonElement;
    button.disabled = true;
    try {
      const rec = await this.api.recommend({ observation_id: store.selected.id });
      this.hideBanner();
      if (rec.empty) {
        this.element("#recommend-note").textContent = "already passing";
        return;
      }
      this.element("#recommend-note").textContent = "";
      this.requestSoon.cancel();
      await this.animateSliders(rec.intervention);
      this.requestCounterfactual();
    } catch (err) {
      this.showBanner(err);
    } finally {
      button.disabled = false;
    }
  }

  /** Glide the sliders from where they are to the recommended values. */
  private async animateSliders(target: Record<string, number>): Promise<void> {
    const store = this.store;
    if (!store) return;
    const nodes = Object.keys(target).filter((node) =>
      store.config.actionable.includes(node),
    );
    const from = new Map(nodes.map((node) => [node, store.getSlider(node)]));
    const steps = Math.max(1, Math.round(this.animationMs / this.animationStepMs));
    for (let step = 1; step <= steps; step++) {
      const t = step / steps;
      for (const node of nodes) {
        const start = from.get(node)!;
        // land exactly on the recommendation, lerp only in between
        const z =
          step === steps
            ? clampZ(target[node])
            : clampZ(start + (target[node] - start) * t);
        store.setSlider(node, z);
        const input = this.sliderRow(node).querySelector("input") as HTMLInputElement;
        input.value = String(z);
        this.renderSliderLabel(node);
      }
      if (step < steps) await sleep(this.animationStepMs);
    }
  }

  // --- banner -----------------------------------------------------------

  private showBanner(err: unknown): void {
    const banner = this.element("#banner");
    const message = err instanceof Error ? err.message : String(err);
    banner.textContent = `service error — showing last good values (${message})`;
    banner.hidden = false;
  }

  private hideBanner(): void {
    this.element("#banner").hidden = true;
  }

  private element(selector: string): HTMLElement {
    const el = this.root.querySelector<HTMLElement>(selector);
    if (!el) throw new Error(`missing element ${selector}`);
    return el;
  }
}
