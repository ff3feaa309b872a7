/**
 * Explorer session state.
 *
 * Every change to the fact toggles, goal, or strategy bumps `version`.
 * Evaluation responses carry the version they were requested under and are
 * dropped if the state has moved on, so the verdict on screen always
 * corresponds to the current toggle set.
 */

import type { EvalStats, ProofNode, RuleBaseDetail, Strategy } from "./api.js";

export interface VerdictView {
  holds: boolean;
  status: string;
  proof: ProofNode;
}

export interface ExplorerState {
  ruleBase: RuleBaseDetail | null;
  toggles: Map<string, boolean>;
  goal: string | null;
  strategy: Strategy;
  verdict: VerdictView | null;
  statsByStrategy: Partial<Record<Strategy, EvalStats>>;
  version: number;
}

export function initialState(): ExplorerState {
  return {
    ruleBase: null,
    toggles: new Map(),
    goal: null,
    strategy: "EXCEPTION_FIRST",
    verdict: null,
    statsByStrategy: {},
    version: 0,
  };
}

/** Reset toggles to the rule base's leaves, all off. */
export function bindRuleBase(state: ExplorerState, detail: RuleBaseDetail): void {
  state.ruleBase = detail;
  state.toggles = new Map(detail.leaves.map((leaf) => [leaf, false]));
  state.goal = detail.rules.length > 0 ? detail.rules[0].p : null;
  state.verdict = null;
  state.statsByStrategy = {};
  state.version += 1;
}

export function activeFacts(state: ExplorerState): string[] {
  return [...state.toggles.entries()]
    .filter(([, on]) => on)
    .map(([name]) => name);
}
