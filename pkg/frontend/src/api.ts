/** Thin typed client for the rule-discovery HTTP service.
 *
 * All failures surface as ApiError. A non-2xx status carries the parsed
 * `detail` body when one exists; a 2xx response whose body is not valid
 * JSON is also an ApiError, so callers can treat "server said something
 * unusable" uniformly.
 */

import type {
  BlockInfo,
  DatasetInfo,
  DatasetSummary,
  DescribeResponse,
  LayoutRequest,
  MineTicket,
  PlotJson,
  RuleDoc,
  RuleResponse,
  RunRecord,
  Selection,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  readonly status: number;
  /** Parsed `detail` field of the error body, when the server sent one. */
  readonly detail: unknown;

  constructor(status: number, message: string, detail: unknown = null) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.detail = detail;
  }
}

function detailMessage(detail: unknown, status: number): string {
  if (typeof detail === "string") return detail;
  if (detail !== null && detail !== undefined) {
    try {
      return JSON.stringify(detail);
    } catch {
      /* fall through */
    }
  }
  return `request failed with status ${status}`;
}

export interface BlocksQuery {
  attr: number;
  ref?: number;
  purity?: number;
  small?: number;
}

export interface DescribeQuery {
  purity?: number;
  size?: number;
}

export class ApiClient {
  readonly baseUrl: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl = "", fetchFn?: FetchLike) {
    // strip one trailing slash so path joining stays predictable
    this.baseUrl = baseUrl.endsWith("/") ? baseUrl.slice(0, -1) : baseUrl;
    const fallback = globalThis.fetch
      ? (globalThis.fetch.bind(globalThis) as FetchLike)
      : undefined;
    const chosen = fetchFn ?? fallback;
    if (!chosen) throw new Error("no fetch implementation available");
    this.fetchFn = chosen;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchFn(this.baseUrl + path, init);
    let body: unknown = null;
    let parseFailed = false;
    try {
      body = await res.json();
    } catch {
      parseFailed = true;
    }
    if (!res.ok) {
      const detail =
        body !== null && typeof body === "object" && "detail" in body
          ? (body as { detail: unknown }).detail
          : body;
      throw new ApiError(res.status, detailMessage(detail, res.status), detail);
    }
    if (parseFailed) {
      throw new ApiError(res.status, "server returned a malformed JSON body");
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  listDatasets(): Promise<DatasetInfo[]> {
    return this.request<DatasetInfo[]>("/datasets");
  }

  summary(datasetId: string): Promise<DatasetSummary> {
    return this.request<DatasetSummary>(`/datasets/${datasetId}/summary`);
  }

  blocks(datasetId: string, query: BlocksQuery): Promise<BlockInfo[]> {
    const params = new URLSearchParams({ attr: String(query.attr) });
    if (query.ref !== undefined) params.set("ref", String(query.ref));
    if (query.purity !== undefined) params.set("purity", String(query.purity));
    if (query.small !== undefined) params.set("small", String(query.small));
    return this.request<BlockInfo[]>(`/datasets/${datasetId}/blocks?${params}`);
  }

  layout(datasetId: string, req: LayoutRequest): Promise<PlotJson> {
    return this.post<PlotJson>(`/datasets/${datasetId}/layout`, req);
  }

  ruleMetrics(datasetId: string, rule: RuleDoc): Promise<RuleResponse> {
    return this.post<RuleResponse>(`/datasets/${datasetId}/rule/metrics`, rule);
  }

  ruleFromBlocks(
    datasetId: string,
    selections: Selection[],
    targetClass: number,
  ): Promise<RuleResponse> {
    return this.post<RuleResponse>(`/datasets/${datasetId}/rule/from-blocks`, {
      selections,
      target_class: targetClass,
    });
  }

  describe(datasetId: string, query: DescribeQuery = {}): Promise<DescribeResponse> {
    const params = new URLSearchParams();
    if (query.purity !== undefined) params.set("purity", String(query.purity));
    if (query.size !== undefined) params.set("size", String(query.size));
    const qs = params.toString();
    return this.request<DescribeResponse>(
      `/datasets/${datasetId}/describe${qs ? `?${qs}` : ""}`,
    );
  }

  mine(datasetId: string, config: unknown): Promise<MineTicket> {
    return this.post<MineTicket>(`/datasets/${datasetId}/mine`, config);
  }

  run(runId: string): Promise<RunRecord> {
    return this.request<RunRecord>(`/runs/${runId}`);
  }
}
