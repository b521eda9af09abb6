/** Thin typed client for the workbench HTTP API.
 *
 * The cockpit never computes similarity, adaptation or aggregation
 * locally: every number it shows comes out of one of these calls.
 */

import type {
  AdaptationPayload,
  Description,
  ErrorEnvelope,
  FeedbackResponseBody,
  OutcomePayload,
  RetainPayload,
  RetrievalPayload,
  SubstitutionPayload,
  SubtreePayload,
  SubtreeSubstitutionPayload,
  TaxonomyPayload,
  TreeNode,
  ValidationPayload,
} from "./types";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly details: string[] = []
  ) {
    super(message);
  }
}

/** Transport seam: the browser uses fetch, tests plug in a stub. */
export type Transport = (
  path: string,
  init: { method: string; body?: string; headers: Record<string, string> }
) => Promise<{ status: number; text: () => Promise<string> }>;

export interface ClientConfig {
  baseUrl: string;
  token: string;
  transport?: Transport;
}

const fetchTransport: Transport = (path, init) => fetch(path, init);

export class ApiClient {
  private readonly transport: Transport;

  constructor(private readonly config: ClientConfig) {
    this.transport = config.transport ?? fetchTransport;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.transport(`${this.config.baseUrl}${path}`, {
      method,
      body: body === undefined ? undefined : JSON.stringify(body),
      headers: {
        "Content-Type": "application/json",
        Authorization: `Bearer ${this.config.token}`,
      },
    });
    const text = await response.text();
    if (response.status >= 400) {
      let envelope: ErrorEnvelope | null = null;
      try {
        envelope = JSON.parse(text) as ErrorEnvelope;
      } catch {
        // non-JSON error body; fall through to the generic error
      }
      if (envelope && envelope.error) {
        throw new ApiError(
          response.status,
          envelope.error.code,
          envelope.error.message,
          envelope.error.details
        );
      }
      throw new ApiError(response.status, "HttpError", `HTTP ${response.status}`);
    }
    return JSON.parse(text) as T;
  }

  taxonomy(): Promise<TaxonomyPayload> {
    return this.request("GET", "/taxonomy");
  }

  query(description: Description, k: number): Promise<RetrievalPayload> {
    return this.request("POST", "/query", { description, k });
  }

  adapt(
    description: Description,
    caseIds: string[],
    intent: string
  ): Promise<AdaptationPayload> {
    return this.request("POST", "/adapt", {
      query: description,
      case_ids: caseIds,
      intent,
    });
  }

  explainerSubstitutes(
    targetId: string,
    description: Description
  ): Promise<SubstitutionPayload> {
    return this.request("POST", "/substitutions/explainer", {
      target_id: targetId,
      description,
    });
  }

  subtreeSubstitutes(
    subtree: SubtreePayload,
    k: number
  ): Promise<SubtreeSubstitutionPayload> {
    return this.request("POST", "/substitutions/subtree", { subtree, k });
  }

  validateTree(tree: TreeNode): Promise<ValidationPayload> {
    return this.request("POST", "/bt/validate", { tree });
  }

  simulateTree(tree: TreeNode, script: string[]): Promise<{ trace: string[] }> {
    return this.request("POST", "/bt/simulate", { tree, script });
  }

  aggregateFeedback(
    caseId: string,
    responses: FeedbackResponseBody[]
  ): Promise<OutcomePayload> {
    return this.request("POST", "/feedback", { case_id: caseId, responses });
  }

  retain(caseDoc: unknown, consent: boolean): Promise<RetainPayload> {
    return this.request("POST", "/cases/retain", { case: caseDoc, consent });
  }

  getCase(caseId: string): Promise<Record<string, unknown>> {
    return this.request("GET", `/cases/${caseId}`);
  }
}
