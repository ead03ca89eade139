/**
 * View-model for the annotation screen.
 *
 * Everything here is a pure function over service responses and user
 * clicks: the UI never owns annotation state of its own, it derives every
 * display from the latest response plus a pending token selection.
 */

import type { AnalyzeResponse, CegInfo, TokenInfo } from "./types.js";

export interface TokenRange {
  start: number; // inclusive
  end: number; // exclusive
}

export type Role = "cause" | "effect";

export interface AnnotationView {
  sentenceId: string;
  tokens: TokenInfo[];
  causeHighlight: TokenRange | null;
  effectHighlight: TokenRange | null;
  matchedPatternId: number | null;
  failure: string | null;
  /** No CEG came back: offer the correction ("train me") controls. */
  trainable: boolean;
  revision: number;
}

export class MalformedResponseError extends Error {}

function isInt(value: unknown): value is number {
  return typeof value === "number" && Number.isInteger(value);
}

function checkToken(raw: unknown, index: number): TokenInfo {
  const token = raw as TokenInfo;
  if (
    typeof token !== "object" ||
    token === null ||
    !isInt(token.index) ||
    token.index !== index ||
    typeof token.text !== "string" ||
    token.text.length === 0 ||
    typeof token.pos !== "string"
  ) {
    throw new MalformedResponseError(`bad token at position ${index}`);
  }
  return token;
}

function checkSpan(raw: unknown, what: string, tokenCount: number): TokenRange {
  const phrase = raw as { start?: unknown; end?: unknown };
  if (
    typeof phrase !== "object" ||
    phrase === null ||
    !isInt(phrase.start) ||
    !isInt(phrase.end) ||
    phrase.start < 0 ||
    phrase.end <= phrase.start ||
    phrase.end > tokenCount
  ) {
    throw new MalformedResponseError(`bad ${what} span`);
  }
  return { start: phrase.start, end: phrase.end };
}

export function rangesOverlap(a: TokenRange, b: TokenRange): boolean {
  return a.start < b.end && b.start < a.end;
}

/**
 * Validate an /analyze response and build the view. Throws
 * MalformedResponseError on any defect so the caller can show an error
 * banner instead of a partial render.
 */
export function renderDetection(raw: unknown): AnnotationView {
  const response = raw as AnalyzeResponse;
  if (typeof response !== "object" || response === null) {
    throw new MalformedResponseError("response is not an object");
  }
  if (!isInt(response.revision) || typeof response.sentence_id !== "string") {
    throw new MalformedResponseError("missing revision or sentence id");
  }
  if (!Array.isArray(response.tokens) || response.tokens.length === 0) {
    throw new MalformedResponseError("missing token list");
  }
  const tokens = response.tokens.map((token, i) => checkToken(token, i));

  let cause: TokenRange | null = null;
  let effect: TokenRange | null = null;
  if (response.ceg !== null && response.ceg !== undefined) {
    const ceg = response.ceg as CegInfo;
    if (response.matched_pattern_id === null) {
      throw new MalformedResponseError("a CEG requires a matched pattern");
    }
    cause = checkSpan(ceg.cause, "cause", tokens.length);
    effect = checkSpan(ceg.effect, "effect", tokens.length);
    if (rangesOverlap(cause, effect)) {
      throw new MalformedResponseError("cause and effect highlights overlap");
    }
  }
  return {
    sentenceId: response.sentence_id,
    tokens,
    causeHighlight: cause,
    effectHighlight: effect,
    matchedPatternId: response.matched_pattern_id ?? null,
    failure: response.failure ?? null,
    trainable: cause === null,
    revision: response.revision,
  };
}

/** Pending user selection: one contiguous token range per role. */
export interface SelectionState {
  role: Role;
  anchor: number | null;
  cause: TokenRange | null;
  effect: TokenRange | null;
}

export function emptySelection(): SelectionState {
  return { role: "cause", anchor: null, cause: null, effect: null };
}

export function setRole(selection: SelectionState, role: Role): SelectionState {
  return { ...selection, role, anchor: null };
}

/**
 * Token-click state machine: the first click anchors a range, the second
 * completes it (either click order), replacing the active role's range.
 */
export function clickToken(
  selection: SelectionState,
  index: number,
): SelectionState {
  if (selection.anchor === null) {
    return { ...selection, anchor: index };
  }
  const range = {
    start: Math.min(selection.anchor, index),
    end: Math.max(selection.anchor, index) + 1,
  };
  return {
    ...selection,
    anchor: null,
    cause: selection.role === "cause" ? range : selection.cause,
    effect: selection.role === "effect" ? range : selection.effect,
  };
}

export function clearSelection(selection: SelectionState): SelectionState {
  return { ...emptySelection(), role: selection.role };
}

/**
 * Client-side validation before /correct: both ranges selected and
 * disjoint. Returns a message to show, or null when submittable.
 */
export function correctionError(selection: SelectionState): string | null {
  if (selection.cause === null || selection.effect === null) {
    return "select both a cause range and an effect range";
  }
  if (rangesOverlap(selection.cause, selection.effect)) {
    return "cause and effect ranges must not overlap";
  }
  return null;
}

/** Which highlight a token sits in, for rendering. */
export function tokenRole(
  view: AnnotationView,
  selection: SelectionState,
  index: number,
): Role | null {
  const cause = selection.cause ?? view.causeHighlight;
  const effect = selection.effect ?? view.effectHighlight;
  if (cause && index >= cause.start && index < cause.end) {
    return "cause";
  }
  if (effect && index >= effect.start && index < effect.end) {
    return "effect";
  }
  return null;
}
