/** Stakeholder evaluation form and the consent-gated retain step. */

import { ApiClient } from "./api";
import type {
  Description,
  FeedbackResponseBody,
  OutcomePayload,
  RetainPayload,
  TreeNode,
} from "./types";

export const DIMENSIONS = ["Learning", "Utility", "Fulfilment", "Engagement"] as const;

/** Default questionnaire: four items per dimension, scored 0..4. */
export function defaultItems(): Record<string, string> {
  const items: Record<string, string> = {};
  for (const dimension of DIMENSIONS) {
    for (let index = 1; index <= 4; index += 1) {
      items[`${dimension[0]}${index}`] = dimension;
    }
  }
  return items;
}

export interface EvaluationState {
  responses: FeedbackResponseBody[];
  outcome: OutcomePayload | null;
  consent: boolean;
}

export function emptyEvaluation(): EvaluationState {
  return { responses: [], outcome: null, consent: false };
}

export function addResponse(
  state: EvaluationState,
  respondent: string,
  itemScores: Record<string, number>
): EvaluationState {
  for (const [item, score] of Object.entries(itemScores)) {
    if (!Number.isInteger(score) || score < 0 || score > 4) {
      throw new Error(`item ${item}: scores are integers from 0 to 4`);
    }
  }
  return {
    ...state,
    responses: [...state.responses, { respondent, item_scores: itemScores }],
    outcome: null,
  };
}

export async function submitFeedback(
  client: ApiClient,
  state: EvaluationState,
  draftId: string
): Promise<EvaluationState> {
  const outcome = await client.aggregateFeedback(draftId, state.responses);
  return { ...state, outcome };
}

export function setConsent(state: EvaluationState, consent: boolean): EvaluationState {
  return { ...state, consent };
}

/** The retain button is enabled only with an aggregated outcome and consent. */
export function canRetain(state: EvaluationState): boolean {
  return state.consent && state.outcome !== null;
}

export async function retainCase(
  client: ApiClient,
  state: EvaluationState,
  description: Description,
  solution: Record<string, TreeNode>
): Promise<RetainPayload> {
  if (!state.consent) {
    throw new Error("retention requires explicit consent");
  }
  if (state.outcome === null) {
    throw new Error("aggregate stakeholder feedback before retaining");
  }
  const caseDoc = {
    description,
    solution,
    outcome: {
      dimension_means: state.outcome.dimension_means,
      respondent_count: state.outcome.respondent_count,
    },
  };
  return client.retain(caseDoc, true);
}
