/** Typed client over the service's JSON endpoints. */

import type {
  AnalyzeResponse,
  CorrectResponse,
  NoncausalResponse,
  PatternsResponse,
  SentenceRecord,
  StatsResponse,
} from "./types.js";
import type { TokenRange } from "./model.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: unknown,
  ) {
    super(`service returned ${status}: ${JSON.stringify(detail)}`);
  }
}

/** The store moved under us (409): the caller should offer a reload. */
export class StaleRevisionError extends ApiError {}

async function parseBody(response: Response): Promise<unknown> {
  try {
    return await response.json();
  } catch {
    return null;
  }
}

export class Client {
  constructor(private baseUrl: string) {}

  private async post(path: string, body: unknown): Promise<unknown> {
    const response = await fetch(this.baseUrl + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    const parsed = await parseBody(response);
    if (!response.ok) {
      const detail =
        parsed && typeof parsed === "object" && "detail" in parsed
          ? (parsed as { detail: unknown }).detail
          : parsed;
      if (response.status === 409) {
        throw new StaleRevisionError(response.status, detail);
      }
      throw new ApiError(response.status, detail);
    }
    return parsed;
  }

  private async get(path: string): Promise<unknown> {
    const response = await fetch(this.baseUrl + path);
    const parsed = await parseBody(response);
    if (!response.ok) {
      throw new ApiError(response.status, parsed);
    }
    return parsed;
  }

  async analyze(record: SentenceRecord): Promise<AnalyzeResponse> {
    return (await this.post("/analyze", { record })) as AnalyzeResponse;
  }

  async correct(
    record: SentenceRecord,
    cause: TokenRange,
    effect: TokenRange,
    revision: number | null,
  ): Promise<CorrectResponse> {
    return (await this.post("/correct", {
      record,
      cause_span: [cause.start, cause.end],
      effect_span: [effect.start, effect.end],
      revision,
    })) as CorrectResponse;
  }

  async noncausal(
    record: SentenceRecord,
    revision: number | null,
  ): Promise<NoncausalResponse> {
    return (await this.post("/noncausal", {
      record,
      revision,
    })) as NoncausalResponse;
  }

  async patterns(): Promise<PatternsResponse> {
    return (await this.get("/patterns")) as PatternsResponse;
  }

  async stats(): Promise<StatsResponse> {
    return (await this.get("/stats")) as StatsResponse;
  }
}
