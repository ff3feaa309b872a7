/**
 * Typed client for the rule-engine HTTP API.
 *
 * The UI computes nothing itself: every verdict, proof tree, and cost
 * counter shown on screen comes from an /evaluate response.
 */

export type Operator = "ALL" | "ANY";

export type Strategy = "EXCEPTION_FIRST" | "CONDITIONS_FIRST" | "RACING";

export const STRATEGIES: Strategy[] = [
  "EXCEPTION_FIRST",
  "CONDITIONS_FIRST",
  "RACING",
];

export interface RuleBaseHandle {
  id: string;
  name: string;
  head_count: number;
}

export interface RuleObj {
  p: string;
  op: Operator;
  conditions: string[];
  exceptions: string[];
}

export interface RuleBaseDetail extends RuleBaseHandle {
  rules: RuleObj[];
  leaves: string[];
}

export interface ProofNode {
  proposition: string;
  status: string;
  via: string;
  order_note: string | null;
  conditions: ProofNode[];
  exceptions: ProofNode[];
}

export interface EvalStats {
  propositions_evaluated: number;
  rule_expansions: number;
  fact_lookups: number;
  strategy: Strategy;
}

export interface EvalResponse {
  goal: string;
  holds: boolean;
  status: string;
  proof: ProofNode;
  stats: EvalStats;
}

export type FetchFn = typeof fetch;

export class ApiError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
  }
}

export class ApiClient {
  private readonly fetchFn: FetchFn;

  constructor(readonly baseUrl: string, fetchFn?: FetchFn) {
    this.fetchFn = fetchFn ?? globalThis.fetch.bind(globalThis);
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (!resp.ok) {
      let detail = `${resp.status}`;
      try {
        const body = await resp.json();
        detail = body.error ?? JSON.stringify(body);
      } catch {
        /* non-JSON error body; keep the status code */
      }
      throw new ApiError(detail, resp.status);
    }
    return (await resp.json()) as T;
  }

  listRuleBases(): Promise<RuleBaseHandle[]> {
    return this.request<RuleBaseHandle[]>("/rulebases");
  }

  getRuleBase(id: string): Promise<RuleBaseDetail> {
    return this.request<RuleBaseDetail>(`/rulebases/${id}`);
  }

  evaluate(
    rulebaseId: string,
    facts: string[],
    goal: string,
    strategy: Strategy,
  ): Promise<EvalResponse> {
    return this.request<EvalResponse>("/evaluate", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        rulebase_id: rulebaseId,
        facts,
        goal,
        strategy,
      }),
    });
  }
}
