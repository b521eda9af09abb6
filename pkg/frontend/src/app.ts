/** Cockpit entry point: wires the wizard, editor and evaluation screens
 * to the HTTP API in the order a design session flows.
 */

import { ApiClient } from "./api";
import {
  renderAdaptation,
  renderOutcome,
  renderRetrieval,
  renderSubstitutes,
  renderTree,
  el,
} from "./dom";
import {
  applyExplainerSubstitution,
  openEditor,
  saveTree,
  selectNode,
  undo,
  type EditorState,
} from "./editor";
import {
  addResponse,
  canRetain,
  emptyEvaluation,
  retainCase,
  setConsent,
  submitFeedback,
  type EvaluationState,
} from "./feedback";
import type { Description, TreeNode } from "./types";
import { canSubmit, submitQuery, type UseCaseDraft } from "./wizard";
import {
  adaptationView,
  outcomeView,
  retrievalView,
  substitutionView,
  treeView,
} from "./views";

interface AppConfig {
  baseUrl: string;
  token: string;
  intent: string;
}

export class Cockpit {
  private readonly client: ApiClient;
  private editor: EditorState | null = null;
  private evaluation: EvaluationState = emptyEvaluation();
  private description: Description | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly config: AppConfig
  ) {
    this.client = new ApiClient({ baseUrl: config.baseUrl, token: config.token });
  }

  private section(name: string): HTMLElement {
    let section = this.root.querySelector<HTMLElement>(`#${name}`);
    if (!section) {
      section = el("section", { id: name });
      this.root.append(section);
    }
    section.replaceChildren();
    return section;
  }

  async runQuery(draft: UseCaseDraft, k = 3): Promise<void> {
    if (!canSubmit(draft)) {
      return;
    }
    this.description = draft.description;
    const outcome = await submitQuery(this.client, draft, k);
    const section = this.section("retrieval");
    if (outcome.state === "no-matches") {
      section.append(
        el("p", { class: "empty" }, [
          `no matching experiences for dataset type "${outcome.datasetType}"`,
        ])
      );
      return;
    }
    if (outcome.state === "invalid") {
      for (const [field, message] of Object.entries(outcome.fieldErrors)) {
        section.append(el("p", { class: "field-error", "data-field": field }, [message]));
      }
      return;
    }
    section.append(
      renderRetrieval(retrievalView(outcome.payload), (caseId) => {
        void this.adaptAndLoad(
          outcome.payload.ranked.map((entry) => entry.case_id),
          caseId
        );
      })
    );
  }

  private async adaptAndLoad(caseIds: string[], _selected: string): Promise<void> {
    if (!this.description) {
      return;
    }
    const plan = await this.client.adapt(this.description, caseIds, this.config.intent);
    this.section("plan").append(renderAdaptation(adaptationView(plan)));
    this.loadEditor(plan.adapted);
  }

  loadEditor(tree: TreeNode): void {
    this.editor = openEditor(tree);
    this.renderEditor();
  }

  private renderEditor(): void {
    if (!this.editor) {
      return;
    }
    const section = this.section("editor");
    section.append(
      renderTree(treeView(this.editor.tree), (path) => {
        void this.onSelect(path);
      })
    );
    const undoButton = el("button", { id: "undo" }, ["undo"]);
    undoButton.addEventListener("click", () => {
      if (this.editor) {
        this.editor = undo(this.editor);
        this.renderEditor();
      }
    });
    section.append(undoButton);
  }

  private async onSelect(path: number[]): Promise<void> {
    if (!this.editor || !this.description) {
      return;
    }
    this.editor = await selectNode(this.client, this.editor, path, this.description);
    if (this.editor.pendingExplainers) {
      const section = this.section("substitutions");
      section.append(
        renderSubstitutes(substitutionView(this.editor.pendingExplainers), (candidate) => {
          void this.onApply(candidate);
        })
      );
    }
  }

  private async onApply(candidateId: string): Promise<void> {
    if (!this.editor) {
      return;
    }
    const result = await applyExplainerSubstitution(this.client, this.editor, candidateId);
    this.editor = result.editor;
    if (result.state === "blocked") {
      this.section("substitutions").append(
        el("p", { class: "blocked" }, [
          `substitution rejected: ${result.issues.map((issue) => issue.detail).join("; ")}`,
        ])
      );
      return;
    }
    this.renderEditor();
  }

  async recordFeedback(respondent: string, scores: Record<string, number>): Promise<void> {
    this.evaluation = addResponse(this.evaluation, respondent, scores);
  }

  async showOutcome(draftId: string): Promise<void> {
    this.evaluation = await submitFeedback(this.client, this.evaluation, draftId);
    if (this.evaluation.outcome) {
      const view = outcomeView(this.evaluation.outcome);
      this.section("outcome").append(renderOutcome(view.rows, view.respondents));
    }
  }

  setConsent(consent: boolean): void {
    this.evaluation = setConsent(this.evaluation, consent);
    const button = this.root.querySelector<HTMLButtonElement>("#retain");
    if (button) {
      button.disabled = !canRetain(this.evaluation);
    }
  }

  async retain(): Promise<string | null> {
    if (!this.editor || !this.description || !canRetain(this.evaluation)) {
      return null;
    }
    const tree = await saveTree(this.client, this.editor);
    const retained = await retainCase(this.client, this.evaluation, this.description, {
      [this.config.intent]: tree,
    });
    this.section("confirmation").append(
      el("p", {}, [
        "retained as ",
        el("a", { href: `${this.config.baseUrl}/cases/${retained.case_id}` }, [
          retained.case_id,
        ]),
      ])
    );
    return retained.case_id;
  }
}

export function mount(root: HTMLElement, config: AppConfig): Cockpit {
  return new Cockpit(root, config);
}
