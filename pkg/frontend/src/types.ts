/** Wire types for the annotation service (JSON over HTTP). */

export interface TokenInfo {
  index: number;
  text: string;
  pos: string;
}

export interface PhraseInfo {
  text: string;
  start: number;
  end: number;
}

export interface CegInfo {
  cause: PhraseInfo;
  effect: PhraseInfo;
}

export interface AnalyzeResponse {
  revision: number;
  sentence_id: string;
  tokens: TokenInfo[];
  matched_pattern_id: number | null;
  ceg: CegInfo | null;
  failure: string | null;
}

export interface CorrectResponse {
  revision: number;
  outcome: string;
  flag: string;
  pattern_id: number | null;
}

export interface NoncausalResponse {
  revision: number;
  outcome: string;
  flag: string;
}

export interface SignatureNodeDoc {
  path: number[];
  label: string;
}

export interface ConstraintDoc {
  path: number[];
  keyword: string;
}

export interface PatternDoc {
  id: number;
  signature: {
    nodes: SignatureNodeDoc[];
    constraints: ConstraintDoc[];
  };
  extractor: {
    cause: number[][];
    effect: number[][];
  };
  accepted: string[];
}

export interface PatternsResponse {
  revision: number;
  patterns: PatternDoc[];
}

export interface StatsResponse {
  revision: number;
  flags: Record<string, number>;
  patterns: number;
  noncausal: number;
}

/** A pre-parsed sentence record, as the corpus files carry them. */
export interface SentenceRecord {
  id?: string | null;
  text?: string | null;
  ptb: string;
  conllu?: string | null;
}
