/**
 * Interactive what-if case explorer.
 *
 * A rule base is loaded from the service, its fact-level propositions
 * become toggles, and every toggle / goal / strategy change triggers a
 * re-evaluation. The verdict badge, proof tree, and cost panel always
 * reflect the server's answer for the current state: responses for
 * superseded states are discarded by version stamp, and at most one
 * evaluation request is in flight per state version.
 */

import {
  ApiClient,
  ApiError,
  STRATEGIES,
  type ProofNode,
  type RuleObj,
  type Strategy,
} from "./api.js";
import {
  activeFacts,
  bindRuleBase,
  initialState,
  type ExplorerState,
} from "./state.js";

const HOLDING_STATUSES = new Set(["ESTABLISHED_FACT", "PROVED"]);

export class ExplorerApp {
  readonly state: ExplorerState = initialState();

  private readonly rbSelect: HTMLSelectElement;
  private readonly goalSelect: HTMLSelectElement;
  private readonly strategySelect: HTMLSelectElement;
  private readonly banner: HTMLElement;
  private readonly ruleList: HTMLElement;
  private readonly factToggles: HTMLElement;
  private readonly badge: HTMLElement;
  private readonly proofTree: HTMLElement;
  private readonly statsPanel: HTMLElement;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
  ) {
    root.innerHTML = `
      <div class="explorer">
        <header>
          <h1>case explorer</h1>
          <div class="controls">
            <label>rule base
              <select data-testid="rb-select"></select>
            </label>
            <label>goal
              <select data-testid="goal-select"></select>
            </label>
            <label>strategy
              <select data-testid="strategy-select" disabled></select>
            </label>
          </div>
          <div class="banner hidden" data-testid="error-banner"></div>
        </header>
        <main>
          <section>
            <h2>rules</h2>
            <div data-testid="rule-list"></div>
          </section>
          <section>
            <h2>case facts</h2>
            <div data-testid="fact-toggles"></div>
          </section>
          <section>
            <h2>verdict</h2>
            <div class="badge" data-testid="verdict-badge">no evaluation yet</div>
            <div data-testid="proof-tree"></div>
          </section>
          <section>
            <h2>evaluation cost</h2>
            <table data-testid="stats-panel">
              <thead>
                <tr><th>strategy</th><th>propositions evaluated</th></tr>
              </thead>
              <tbody></tbody>
            </table>
          </section>
        </main>
      </div>`;
    this.rbSelect = this.q("rb-select") as HTMLSelectElement;
    this.goalSelect = this.q("goal-select") as HTMLSelectElement;
    this.strategySelect = this.q("strategy-select") as HTMLSelectElement;
    this.banner = this.q("error-banner");
    this.ruleList = this.q("rule-list");
    this.factToggles = this.q("fact-toggles");
    this.badge = this.q("verdict-badge");
    this.proofTree = this.q("proof-tree");
    this.statsPanel = this.q("stats-panel").querySelector("tbody")!;

    for (const s of STRATEGIES) {
      const option = document.createElement("option");
      option.value = s;
      option.textContent = s.replace("_", " ").toLowerCase();
      this.strategySelect.append(option);
    }
    this.rbSelect.addEventListener("change", () => {
      void this.selectRuleBase(this.rbSelect.value);
    });
    this.goalSelect.addEventListener("change", () => {
      void this.setGoal(this.goalSelect.value);
    });
    this.strategySelect.addEventListener("change", () => {
      void this.setStrategy(this.strategySelect.value as Strategy);
    });
  }

  private q(testId: string): HTMLElement {
    return this.root.querySelector(`[data-testid="${testId}"]`) as HTMLElement;
  }

  /** Populate the rule-base selector from the service. */
  async init(): Promise<void> {
    try {
      const handles = await this.api.listRuleBases();
      this.rbSelect.innerHTML = "";
      const placeholder = document.createElement("option");
      placeholder.value = "";
      placeholder.textContent = "select a rule base";
      this.rbSelect.append(placeholder);
      for (const h of handles) {
        const option = document.createElement("option");
        option.value = h.id;
        option.textContent = `${h.name} (${h.head_count} rule${h.head_count === 1 ? "" : "s"})`;
        this.rbSelect.append(option);
      }
      this.clearError();
    } catch (err) {
      this.showError(err);
    }
  }

  async selectRuleBase(id: string): Promise<void> {
    if (!id) return;
    try {
      const detail = await this.api.getRuleBase(id);
      bindRuleBase(this.state, detail);
      this.clearError();
      this.rbSelect.value = id;
      this.strategySelect.disabled = false;
      this.renderRules(detail.rules);
      this.renderToggles();
      this.renderGoals(detail.rules);
      await this.reevaluate();
    } catch (err) {
      this.showError(err);
    }
  }

  async toggleFact(name: string): Promise<void> {
    if (!this.state.toggles.has(name)) return;
    this.state.toggles.set(name, !this.state.toggles.get(name));
    this.state.statsByStrategy = {}; // counters are per fact set
    this.syncToggleBoxes();
    await this.reevaluate();
  }

  async setGoal(goal: string): Promise<void> {
    this.state.goal = goal;
    this.state.statsByStrategy = {};
    this.goalSelect.value = goal;
    await this.reevaluate();
  }

  async setStrategy(strategy: Strategy): Promise<void> {
    if (this.strategySelect.disabled) return;
    this.state.strategy = strategy;
    this.strategySelect.value = strategy;
    await this.reevaluate();
  }

  /**
   * Issue one evaluation for the current state version; apply the response
   * only if the state has not moved on since.
   */
  async reevaluate(): Promise<void> {
    const { ruleBase, goal } = this.state;
    if (!ruleBase || !goal) return;
    this.state.version += 1;
    const version = this.state.version;
    try {
      const resp = await this.api.evaluate(
        ruleBase.id,
        activeFacts(this.state),
        goal,
        this.state.strategy,
      );
      if (version !== this.state.version) return; // superseded, drop
      this.state.verdict = {
        holds: resp.holds,
        status: resp.status,
        proof: resp.proof,
      };
      this.state.statsByStrategy[resp.stats.strategy] = resp.stats;
      this.clearError();
      this.renderVerdict();
      this.renderStats();
    } catch (err) {
      if (version !== this.state.version) return;
      this.showError(err);
    }
  }

  // -- rendering ----------------------------------------------------------

  private renderRules(rules: RuleObj[]): void {
    this.ruleList.innerHTML = "";
    for (const rule of rules) {
      const card = document.createElement("div");
      card.className = "rule-card";
      card.dataset.head = rule.p;
      const conds = rule.conditions
        .map((c) => `<li class="condition">${c}</li>`)
        .join("");
      const excs = rule.exceptions
        .map((e) => `<li class="exception">${e}</li>`)
        .join("");
      card.innerHTML = `
        <h3>${rule.p}</h3>
        <p class="op">${rule.op} of:</p>
        <ul class="conditions">${conds || "<li class='empty'>(none)</li>"}</ul>
        <p class="op">unless:</p>
        <ul class="exceptions">${excs || "<li class='empty'>(none)</li>"}</ul>`;
      this.ruleList.append(card);
    }
  }

  private renderToggles(): void {
    this.factToggles.innerHTML = "";
    for (const [name, on] of this.state.toggles) {
      const label = document.createElement("label");
      label.className = "toggle";
      const box = document.createElement("input");
      box.type = "checkbox";
      box.checked = on;
      box.dataset.testid = `toggle-${name}`;
      box.addEventListener("change", () => {
        void this.toggleFact(name);
      });
      label.append(box, document.createTextNode(` ${name}`));
      this.factToggles.append(label);
    }
  }

  private syncToggleBoxes(): void {
    for (const [name, on] of this.state.toggles) {
      const box = this.root.querySelector(
        `[data-testid="toggle-${name}"]`,
      ) as HTMLInputElement | null;
      if (box) box.checked = on;
    }
  }

  private renderGoals(rules: RuleObj[]): void {
    this.goalSelect.innerHTML = "";
    for (const rule of rules) {
      const option = document.createElement("option");
      option.value = rule.p;
      option.textContent = rule.p;
      this.goalSelect.append(option);
    }
    if (this.state.goal) this.goalSelect.value = this.state.goal;
  }

  private renderVerdict(): void {
    const verdict = this.state.verdict;
    if (!verdict) return;
    this.badge.textContent = verdict.holds
      ? "HOLDS"
      : `DOES NOT HOLD (${verdict.status})`;
    this.badge.className = `badge ${verdict.holds ? "badge-holds" : "badge-not-held"} badge-${verdict.status.toLowerCase()}`;
    this.proofTree.innerHTML = "";
    this.proofTree.append(this.renderProofNode(verdict.proof));
  }

  private renderProofNode(node: ProofNode, branch?: "condition" | "exception", parentDefeated = false): HTMLElement {
    const holds = HOLDING_STATUSES.has(node.status);
    const classes = [`status-${node.status.toLowerCase()}`];
    if (branch) classes.push(`branch-${branch}`);
    // the exception that actually defeats its parent is called out
    const defeating = branch === "exception" && parentDefeated && holds;
    if (defeating) classes.push("defeating");
    const label = `${branch ? branch + ": " : ""}${node.proposition} [${node.status}] (${node.via})`;
    const children = [
      ...node.exceptions.map((e) =>
        this.renderProofNode(e, "exception", node.status === "DEFEATED"),
      ),
      ...node.conditions.map((c) => this.renderProofNode(c, "condition")),
    ];
    if (children.length === 0) {
      const leaf = document.createElement("div");
      leaf.className = `proof-node proof-leaf ${classes.join(" ")}`;
      leaf.textContent = label;
      return leaf;
    }
    const details = document.createElement("details");
    details.open = true;
    details.className = `proof-node ${classes.join(" ")}`;
    const summary = document.createElement("summary");
    summary.textContent = label;
    details.append(summary, ...children);
    return details;
  }

  private renderStats(): void {
    this.statsPanel.innerHTML = "";
    for (const s of STRATEGIES) {
      const stats = this.state.statsByStrategy[s];
      const row = document.createElement("tr");
      row.dataset.testid = `stats-${s}`;
      if (s === this.state.strategy) row.className = "active-strategy";
      row.innerHTML = `<td>${s.replace("_", " ").toLowerCase()}</td>` +
        `<td>${stats ? stats.propositions_evaluated : "n/a"}</td>`;
      this.statsPanel.append(row);
    }
  }

  private showError(err: unknown): void {
    const message =
      err instanceof ApiError
        ? `service error (${err.status}): ${err.message}`
        : `cannot reach the service: ${String(err)}`;
    this.banner.textContent = message;
    this.banner.classList.remove("hidden");
  }

  private clearError(): void {
    this.banner.textContent = "";
    this.banner.classList.add("hidden");
  }
}
