/** Strategy editor state.
 *
 * Edits are substitution-driven: select an explainer node or a question
 * subtree, fetch the ranked candidates, apply one. Every applied edit is
 * re-validated through the service before it is committed, and committing
 * pushes the exact prior tree onto the undo stack. A save is only possible
 * for a tree the service has validated.
 */

import { ApiClient } from "./api";
import type {
  Description,
  SubstitutionPayload,
  SubtreePayload,
  SubtreeSubstitutionPayload,
  TreeNode,
  ValidationIssue,
} from "./types";

/** Path of child indices from the root; [] addresses the root itself. */
export type NodePath = number[];

export interface EditorState {
  tree: TreeNode;
  selected: NodePath | null;
  pendingExplainers: SubstitutionPayload | null;
  pendingSubtrees: SubtreeSubstitutionPayload | null;
  undoStack: TreeNode[];
  validated: boolean;
  lastIssues: ValidationIssue[];
}

export function openEditor(tree: TreeNode): EditorState {
  return {
    tree,
    selected: null,
    pendingExplainers: null,
    pendingSubtrees: null,
    undoStack: [],
    validated: false,
    lastIssues: [],
  };
}

export function nodeAt(tree: TreeNode, path: NodePath): TreeNode {
  let node = tree;
  for (const index of path) {
    const children = node.children ?? [];
    if (index < 0 || index >= children.length) {
      throw new Error(`no node at path [${path.join(", ")}]`);
    }
    node = children[index];
  }
  return node;
}

function cloneTree(tree: TreeNode): TreeNode {
  return JSON.parse(JSON.stringify(tree)) as TreeNode;
}

/** Immutable node replacement along a path. */
export function replaceAt(tree: TreeNode, path: NodePath, replacement: TreeNode): TreeNode {
  if (path.length === 0) {
    return replacement;
  }
  const [head, ...rest] = path;
  const children = tree.children ?? [];
  return {
    ...tree,
    children: children.map((child, index) =>
      index === head ? replaceAt(child, rest, replacement) : child
    ),
  };
}

/** Select a node; explainer nodes fetch ranked substitute explainers,
 * question nodes fetch ranked substitute subtrees. */
export async function selectNode(
  client: ApiClient,
  state: EditorState,
  path: NodePath,
  description: Description,
  k = 5
): Promise<EditorState> {
  const node = nodeAt(state.tree, path);
  const next: EditorState = {
    ...state,
    selected: path,
    pendingExplainers: null,
    pendingSubtrees: null,
  };
  if (node.kind === "Explainer" && node.explainer) {
    next.pendingExplainers = await client.explainerSubstitutes(node.explainer, description);
  } else if (node.kind === "UserQuestion" && node.question) {
    const payload: SubtreePayload = {
      question: node.question,
      origin_case: null,
      tree: node,
    };
    next.pendingSubtrees = await client.subtreeSubstitutes(payload, k);
  }
  return next;
}

export type ApplyResult =
  | { state: "committed"; editor: EditorState }
  | { state: "blocked"; editor: EditorState; issues: ValidationIssue[] };

async function commitEdit(
  client: ApiClient,
  state: EditorState,
  candidateTree: TreeNode
): Promise<ApplyResult> {
  const validation = await client.validateTree(candidateTree);
  if (!validation.valid) {
    return {
      state: "blocked",
      editor: { ...state, lastIssues: validation.issues },
      issues: validation.issues,
    };
  }
  return {
    state: "committed",
    editor: {
      ...state,
      tree: candidateTree,
      undoStack: [...state.undoStack, cloneTree(state.tree)],
      pendingExplainers: null,
      pendingSubtrees: null,
      validated: true,
      lastIssues: [],
    },
  };
}

/** Swap the selected explainer leaf for a ranked candidate. */
export function applyExplainerSubstitution(
  client: ApiClient,
  state: EditorState,
  candidateId: string
): Promise<ApplyResult> {
  if (state.selected === null) {
    throw new Error("select an explainer node first");
  }
  const node = nodeAt(state.tree, state.selected);
  if (node.kind !== "Explainer") {
    throw new Error("the selected node is not an explainer");
  }
  const candidateTree = replaceAt(state.tree, state.selected, {
    kind: "Explainer",
    explainer: candidateId,
  });
  return commitEdit(client, state, candidateTree);
}

/** Swap the selected question subtree for a ranked candidate subtree. */
export function applySubtreeSubstitution(
  client: ApiClient,
  state: EditorState,
  candidate: SubtreePayload
): Promise<ApplyResult> {
  if (state.selected === null) {
    throw new Error("select a question node first");
  }
  const node = nodeAt(state.tree, state.selected);
  if (node.kind !== "UserQuestion") {
    throw new Error("the selected node is not a question subtree");
  }
  // the substitute answers the same question the original node carried
  const replacement: TreeNode = { ...candidate.tree, question: node.question };
  const candidateTree = replaceAt(state.tree, state.selected, replacement);
  return commitEdit(client, state, candidateTree);
}

/** Restore the exact tree before the most recent committed edit. */
export function undo(state: EditorState): EditorState {
  if (state.undoStack.length === 0) {
    return state;
  }
  const previous = state.undoStack[state.undoStack.length - 1];
  return {
    ...state,
    tree: previous,
    undoStack: state.undoStack.slice(0, -1),
    pendingExplainers: null,
    pendingSubtrees: null,
    validated: true,
    lastIssues: [],
  };
}

/** The tree to persist; only available once validated by the service. */
export async function saveTree(client: ApiClient, state: EditorState): Promise<TreeNode> {
  if (!state.validated) {
    const validation = await client.validateTree(state.tree);
    if (!validation.valid) {
      throw new Error(
        `cannot save an invalid strategy: ${validation.issues
          .map((issue) => issue.kind)
          .join(", ")}`
      );
    }
  }
  return state.tree;
}
