/** Use-case wizard: collect the AI-model settings and the personas with
 * their intents and user questions, validating client-side before a query
 * is ever submitted. Field diagnostics returned by the service on a 400
 * are mapped back onto the offending fields.
 */

import { ApiClient, ApiError } from "./api";
import type { Description, PersonaDraft, RetrievalPayload } from "./types";

export type WizardStep = "model" | "personas" | "retrieval";

export interface UseCaseDraft {
  step: WizardStep;
  description: Description;
  fieldErrors: Record<string, string>;
}

export function emptyDraft(): UseCaseDraft {
  return {
    step: "model",
    description: {
      ai_task: "",
      ai_method: "",
      dataset_type: "",
      model_framework: "",
      model_access: "",
      has_training_data: false,
      technical_facilities: [],
      personas: [],
      summary: "",
    },
    fieldErrors: {},
  };
}

const MODEL_FIELDS: (keyof Description)[] = [
  "ai_task",
  "ai_method",
  "dataset_type",
  "model_framework",
  "model_access",
];

/** Validation messages keyed by field path; empty object means submittable. */
export function validateDraft(draft: UseCaseDraft): Record<string, string> {
  const errors: Record<string, string> = {};
  for (const field of MODEL_FIELDS) {
    if (!draft.description[field]) {
      errors[field] = "required";
    }
  }
  if (draft.description.personas.length === 0) {
    errors["personas"] = "add at least one persona";
  }
  draft.description.personas.forEach((persona, personaIndex) => {
    if (!persona.name) {
      errors[`personas[${personaIndex}].name`] = "required";
    }
    if (persona.intents.length === 0) {
      errors[`personas[${personaIndex}].intents`] = "add at least one intent";
    }
    persona.intents.forEach((intent, intentIndex) => {
      if (!intent.label) {
        errors[`personas[${personaIndex}].intents[${intentIndex}].label`] = "required";
      }
      if (intent.user_questions.length === 0) {
        errors[`personas[${personaIndex}].intents[${intentIndex}].user_questions`] =
          "pick at least one user question";
      }
    });
  });
  return errors;
}

export function canSubmit(draft: UseCaseDraft): boolean {
  return Object.keys(validateDraft(draft)).length === 0;
}

export function setModelField(
  draft: UseCaseDraft,
  field: (typeof MODEL_FIELDS)[number] | "has_training_data",
  value: string | boolean
): UseCaseDraft {
  const description = { ...draft.description, [field]: value };
  return { ...draft, description, fieldErrors: {} };
}

export function addPersona(draft: UseCaseDraft, persona: PersonaDraft): UseCaseDraft {
  const description = {
    ...draft.description,
    personas: [...draft.description.personas, persona],
  };
  return { ...draft, description, fieldErrors: {} };
}

export type QueryOutcome =
  | { state: "ranked"; payload: RetrievalPayload }
  | { state: "no-matches"; datasetType: string; message: string }
  | { state: "invalid"; fieldErrors: Record<string, string> };

/** Submit the draft; client-side invariants must already hold. */
export async function submitQuery(
  client: ApiClient,
  draft: UseCaseDraft,
  k: number
): Promise<QueryOutcome> {
  const errors = validateDraft(draft);
  if (Object.keys(errors).length > 0) {
    return { state: "invalid", fieldErrors: errors };
  }
  try {
    const payload = await client.query(draft.description, k);
    return { state: "ranked", payload };
  } catch (error) {
    if (error instanceof ApiError && error.status === 404) {
      return {
        state: "no-matches",
        datasetType: draft.description.dataset_type,
        message: error.message,
      };
    }
    if (error instanceof ApiError && error.status === 400) {
      const fieldErrors: Record<string, string> = {};
      for (const detail of error.details) {
        const [field, ...rest] = detail.split(":");
        fieldErrors[field.trim()] = rest.join(":").trim() || error.message;
      }
      return { state: "invalid", fieldErrors };
    }
    throw error;
  }
}
