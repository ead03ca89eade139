/**
 * DOM wiring for the annotation screen. All annotation state lives in the
 * latest service responses (plus the pending token selection); every
 * event handler re-renders from that single source of truth.
 */

import { Client, ApiError, StaleRevisionError } from "./api.js";
import {
  AnnotationView,
  MalformedResponseError,
  SelectionState,
  clearSelection,
  clickToken,
  correctionError,
  emptySelection,
  renderDetection,
  setRole,
  tokenRole,
} from "./model.js";
import { patternHeading, signatureLines } from "./patternView.js";
import type { PatternDoc, SentenceRecord } from "./types.js";

const EXAMPLE_RECORD: SentenceRecord = {
  id: "example-1",
  ptb:
    "(S (SBAR (IN If) (S (NP (DT the) (NN file)) (VP (VBZ fails)))) (, ,) " +
    "(NP (DT the) (NN system)) (VP (VBZ halts)) (. .))",
};

interface Ui {
  recordInput: HTMLTextAreaElement;
  analyzeButton: HTMLButtonElement;
  noncausalButton: HTMLButtonElement;
  correctButton: HTMLButtonElement;
  clearButton: HTMLButtonElement;
  roleInputs: HTMLInputElement[];
  tokenStrip: HTMLElement;
  statusLine: HTMLElement;
  outcomeBadge: HTMLElement;
  errorBanner: HTMLElement;
  reloadPrompt: HTMLElement;
  patternPanel: HTMLElement;
  statsLine: HTMLElement;
}

let view: AnnotationView | null = null;
let selection: SelectionState = emptySelection();
let client: Client;
let ui: Ui;

function query<T extends HTMLElement>(id: string): T {
  const element = document.getElementById(id);
  if (!element) {
    throw new Error(`missing element #${id}`);
  }
  return element as T;
}

function currentRecord(): SentenceRecord {
  return JSON.parse(ui.recordInput.value) as SentenceRecord;
}

function showError(message: string | null): void {
  ui.errorBanner.textContent = message ?? "";
  ui.errorBanner.hidden = message === null;
}

function showReloadPrompt(show: boolean): void {
  ui.reloadPrompt.hidden = !show;
}

function renderTokens(): void {
  ui.tokenStrip.replaceChildren();
  if (!view) {
    return;
  }
  for (const token of view.tokens) {
    const span = document.createElement("button");
    span.type = "button";
    span.className = "token";
    span.textContent = token.text;
    span.title = `${token.index} · ${token.pos}`;
    const role = tokenRole(view, selection, token.index);
    if (role) {
      span.classList.add(role);
    }
    if (selection.anchor === token.index) {
      span.classList.add("anchor");
    }
    span.addEventListener("click", () => {
      selection = clickToken(selection, token.index);
      render();
    });
    ui.tokenStrip.appendChild(span);
  }
}

function renderStatus(): void {
  if (!view) {
    ui.statusLine.textContent = "paste a pre-parsed record and analyze it";
    ui.correctButton.disabled = true;
    ui.noncausalButton.disabled = true;
    return;
  }
  ui.noncausalButton.disabled = false;
  ui.correctButton.disabled = false;
  if (view.causeHighlight) {
    ui.statusLine.textContent =
      `matched pattern ${view.matchedPatternId}; ` +
      "click tokens to correct the spans if they are wrong";
  } else if (view.matchedPatternId !== null) {
    ui.statusLine.textContent =
      `pattern ${view.matchedPatternId} matched but extraction failed ` +
      `(${view.failure ?? "unknown"}); train me with the right spans`;
  } else {
    ui.statusLine.textContent =
      "no pattern matched; train me: select cause and effect tokens";
  }
}

function renderPatterns(patterns: PatternDoc[]): void {
  ui.patternPanel.replaceChildren();
  if (patterns.length === 0) {
    ui.patternPanel.textContent = "no patterns learned yet";
    return;
  }
  for (const pattern of patterns) {
    const block = document.createElement("div");
    block.className = "pattern";
    const heading = document.createElement("div");
    heading.className = "pattern-heading";
    heading.textContent = patternHeading(pattern);
    const tree = document.createElement("pre");
    tree.textContent = signatureLines(pattern).join("\n");
    block.append(heading, tree);
    ui.patternPanel.appendChild(block);
  }
}

async function refreshPanels(): Promise<void> {
  const [patterns, stats] = await Promise.all([
    client.patterns(),
    client.stats(),
  ]);
  renderPatterns(patterns.patterns);
  const flags = Object.entries(stats.flags)
    .filter(([, count]) => count > 0)
    .map(([flag, count]) => `${flag}: ${count}`)
    .join("  ");
  ui.statsLine.textContent =
    `revision ${stats.revision} · ${stats.patterns} patterns · ` +
    `${stats.noncausal} non-causal` + (flags ? ` · ${flags}` : "");
}

function render(): void {
  renderTokens();
  renderStatus();
}

async function onAnalyze(): Promise<void> {
  showError(null);
  showReloadPrompt(false);
  ui.outcomeBadge.textContent = "";
  let record: SentenceRecord;
  try {
    record = currentRecord();
  } catch {
    view = null;
    render();
    showError("record is not valid JSON");
    return;
  }
  try {
    const response = await client.analyze(record);
    view = renderDetection(response);
    selection = clearSelection(selection);
    render();
    await refreshPanels();
  } catch (error) {
    view = null;
    render();
    if (error instanceof MalformedResponseError) {
      showError(`malformed service response: ${error.message}`);
    } else if (error instanceof ApiError) {
      showError(String(error.detail ?? error.message));
    } else {
      showError(String(error));
    }
  }
}

async function onCorrect(): Promise<void> {
  if (!view) {
    return;
  }
  const problem = correctionError(selection);
  if (problem) {
    showError(problem);
    return;
  }
  showError(null);
  try {
    const outcome = await client.correct(
      currentRecord(),
      selection.cause!,
      selection.effect!,
      view.revision,
    );
    ui.outcomeBadge.textContent = `${outcome.outcome} [${outcome.flag}]`;
    ui.outcomeBadge.dataset.flag = outcome.flag;
    await refreshPanels();
    await onAnalyze();
  } catch (error) {
    if (error instanceof StaleRevisionError) {
      showReloadPrompt(true);
    } else if (error instanceof ApiError) {
      showError(String(error.detail ?? error.message));
    } else {
      showError(String(error));
    }
  }
}

async function onNoncausal(): Promise<void> {
  if (!view) {
    return;
  }
  showError(null);
  try {
    const outcome = await client.noncausal(currentRecord(), view.revision);
    ui.outcomeBadge.textContent = `${outcome.outcome} [${outcome.flag}]`;
    await refreshPanels();
  } catch (error) {
    if (error instanceof StaleRevisionError) {
      showReloadPrompt(true);
    } else if (error instanceof ApiError) {
      showError(String(error.detail ?? error.message));
    } else {
      showError(String(error));
    }
  }
}

export function start(baseUrl?: string): void {
  client = new Client(baseUrl ?? "");
  ui = {
    recordInput: query("record-input"),
    analyzeButton: query("analyze"),
    noncausalButton: query("mark-noncausal"),
    correctButton: query("submit-correction"),
    clearButton: query("clear-selection"),
    roleInputs: Array.from(
      document.querySelectorAll<HTMLInputElement>("input[name=role]"),
    ),
    tokenStrip: query("token-strip"),
    statusLine: query("status-line"),
    outcomeBadge: query("outcome-badge"),
    errorBanner: query("error-banner"),
    reloadPrompt: query("reload-prompt"),
    patternPanel: query("pattern-panel"),
    statsLine: query("stats-line"),
  };
  ui.recordInput.value = JSON.stringify(EXAMPLE_RECORD, null, 2);
  ui.analyzeButton.addEventListener("click", () => void onAnalyze());
  ui.correctButton.addEventListener("click", () => void onCorrect());
  ui.noncausalButton.addEventListener("click", () => void onNoncausal());
  ui.clearButton.addEventListener("click", () => {
    selection = clearSelection(selection);
    render();
  });
  for (const input of ui.roleInputs) {
    input.addEventListener("change", () => {
      if (input.checked) {
        selection = setRole(selection, input.value as "cause" | "effect");
        render();
      }
    });
  }
  query<HTMLButtonElement>("reload-now").addEventListener("click", () => {
    void onAnalyze();
  });
  render();
  void refreshPanels().catch(() => showError("service unreachable"));
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  start();
}
