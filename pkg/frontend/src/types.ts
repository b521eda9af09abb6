/** Wire types mirroring the engine's JSON payloads. */

export type NodeKind = "Priority" | "Sequence" | "Variant" | "UserQuestion" | "Explainer";

export interface TreeNode {
  kind: NodeKind;
  question?: string;
  explainer?: string;
  children?: TreeNode[];
}

export interface IntentDraft {
  label: string;
  user_questions: string[];
}

export interface PersonaDraft {
  name: string;
  intents: IntentDraft[];
}

export interface Description {
  ai_task: string;
  ai_method: string;
  dataset_type: string;
  model_framework: string;
  model_access: string;
  has_training_data: boolean;
  technical_facilities: string[];
  personas: PersonaDraft[];
  summary?: string;
  model_access_descriptor?: string;
}

export interface RankedCase {
  case_id: string;
  score: number;
  local_scores: Record<string, number>;
}

export interface RetrievalPayload {
  k: number;
  ranked: RankedCase[];
}

export interface SubtreePayload {
  question: string;
  origin_case: string | null;
  tree: TreeNode;
}

export interface PlanMatch {
  question: string;
  origin_case: string;
  source_question: string;
  provenance: string;
  subtree: SubtreePayload;
}

export interface AdaptationPayload {
  base_case: string;
  intent: string;
  unmet: string[];
  matches: PlanMatch[];
  residual_unmet: string[];
  skipped_neighbours: string[];
  adapted: TreeNode;
}

export interface ApplicabilityWarning {
  kind: string;
  detail: string;
}

export interface ApplicabilityPayload {
  explainer_id: string;
  applicable: boolean;
  warnings: ApplicabilityWarning[];
}

export interface RankedSubstitute {
  candidate_id: string;
  score: number;
  applicability: ApplicabilityPayload | null;
}

export interface SubstitutionPayload {
  target: string;
  metric: string;
  ranked: RankedSubstitute[];
}

export interface RankedSubtree {
  origin_case: string;
  question: string;
  score: number;
  subtree: SubtreePayload;
}

export interface SubtreeSubstitutionPayload {
  target_question: string;
  metric: string;
  ranked: RankedSubtree[];
  skipped: string[];
}

export interface ValidationIssue {
  kind: string;
  path: string;
  detail: string;
}

export interface ValidationPayload {
  valid: boolean;
  issues: ValidationIssue[];
}

export interface OutcomePayload {
  case_id?: string;
  dimension_means: Record<string, number>;
  respondent_count: number;
}

export interface FeedbackResponseBody {
  respondent: string;
  item_scores: Record<string, number>;
}

export interface RetainPayload {
  case_id: string;
  revision: number;
}

export interface TaxonomyTree {
  name: string;
  root: string;
  edges: [string, string][];
  labels: Record<string, string>;
}

export interface TaxonomyPayload {
  trees: TaxonomyTree[];
}

export interface ErrorEnvelope {
  error: {
    code: string;
    message: string;
    details: string[];
  };
}
