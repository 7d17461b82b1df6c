/**
 * Typed client for the copywriting service HTTP API.
 *
 * All semantics (verdicts, scores, generation) live on the server; this file
 * only shapes requests and responses. Each request type keeps at most one
 * call in flight: a newer call aborts the previous one.
 */

export type ProductRef = {
  id: string;
  title: string;
  cid: string;
};

export type CombinationSuggestion = {
  products: ProductRef[];
  score: number;
  pattern: [string, string][];
};

export type Verdict = {
  forbidden: "clean" | "altered" | "dropped";
  forbidden_reason: string;
  coverage: boolean;
  creative: boolean;
  approved: boolean;
};

export type CopywritingResult = {
  copy: string;
  approved: boolean;
  verdict: Verdict;
  score: number;
};

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status?: number,
  ) {
    super(message);
  }
}

async function parseError(res: Response): Promise<never> {
  let detail = `${res.status} ${res.statusText}`;
  try {
    const body = await res.json();
    if (typeof body.detail === "string") detail = body.detail;
  } catch {
    // keep the status text
  }
  throw new ApiError(detail, res.status);
}

export class ApiClient {
  private controllers = new Map<string, AbortController>();

  constructor(readonly baseUrl: string = "") {}

  private async request<T>(key: string, path: string, init?: RequestInit): Promise<T> {
    this.controllers.get(key)?.abort();
    const controller = new AbortController();
    this.controllers.set(key, controller);
    let res: Response;
    try {
      res = await fetch(this.baseUrl + path, { ...init, signal: controller.signal });
    } catch (err) {
      if (err instanceof DOMException && err.name === "AbortError") throw err;
      throw new ApiError(`service unreachable: ${String(err)}`);
    }
    if (!res.ok) await parseError(res);
    return (await res.json()) as T;
  }

  private post<T>(key: string, path: string, body: unknown): Promise<T> {
    return this.request<T>(key, path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  async topics(): Promise<string[]> {
    const body = await this.request<{ topics: string[] }>("topics", "/topics");
    return body.topics;
  }

  async combinations(topic: string, n = 5, seed = 0): Promise<CombinationSuggestion[]> {
    const body = await this.post<{ combinations: CombinationSuggestion[] }>(
      "combinations",
      "/combinations",
      { topic, n, seed },
    );
    return body.combinations;
  }

  copywriting(productIds: string[], seed = 0): Promise<CopywritingResult> {
    return this.post("copywriting", "/copywriting", {
      product_ids: productIds,
      seed,
    });
  }

  async assess(productIds: string[], copy: string): Promise<Verdict> {
    const body = await this.post<{ verdict: Verdict }>("assess", "/assess", {
      product_ids: productIds,
      copy,
    });
    return body.verdict;
  }
}
