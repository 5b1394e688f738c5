/** JSON contracts of the rule-discovery HTTP service.
 *
 * The UI renders these documents verbatim. It never recomputes a statistic
 * that the service already reports: every number shown on screen is a field
 * from one of these payloads.
 */

export interface DatasetInfo {
  id: string;
  cases: number;
  attributes: number;
  classes: Record<string, string>;
}

export interface AttributeInfo {
  index: number;
  name: string;
  mtype: string;
  values: number | null;
}

export interface DatasetSummary {
  id: string;
  cases: number;
  attributes: AttributeInfo[];
  classes: Record<string, string>;
  class_counts: Record<string, number>;
  fingerprint: string;
}

/** One value block on an axis, as listed by GET /datasets/{id}/blocks. */
export interface BlockInfo {
  attribute: number;
  values: number[];
  frequency: number;
  histogram: Record<string, number>;
  dominant_class: number | null;
  purity: number;
  role: string;
}

/** Block geometry inside a layout axis; y0/y1 are fractions of axis height. */
export interface BlockGeom {
  values: number[];
  y0: number;
  y1: number;
  frequency: number;
  histogram: Record<string, number>;
  dominant_class: number | null;
  purity: number;
  role: string;
}

export interface AxisGeom {
  attr: number;
  flipped: boolean;
  blocks: BlockGeom[];
}

/** A weighted polyline; path holds one y-fraction per axis, in axis order. */
export interface LineGeom {
  path: number[];
  weight: number;
  class: number;
}

export interface PlotJson {
  axes: AxisGeom[];
  lines: LineGeom[];
}

export interface Metrics {
  N: number;
  N_correct: number;
  N_incorrect: number;
  N_covered: number;
  recall_pct: number;
  precision_pct: number;
  coverage_pct: number;
}

export interface ClauseDoc {
  attr: number;
  polarity: "include" | "exclude";
  values: number[];
}

/** Plain rules carry clauses; combined rules carry base + subtracted. */
export interface RuleDoc {
  class: number;
  clauses?: ClauseDoc[];
  base?: RuleDoc;
  subtracted?: RuleDoc[];
}

export interface RuleResponse {
  rule: RuleDoc;
  text: string;
  metrics: Metrics;
}

export type Membership = "in" | "not-in";

/** A block the user highlighted, to be turned into a rule clause. */
export interface Selection {
  attr: number;
  values: number[];
  membership: Membership;
}

export type Transform =
  | { op: "flip"; attr: number }
  | { op: "reorder"; order: number[] }
  | { op: "relocate"; threshold: number }
  | { op: "sort"; class: number; on_top?: boolean };

/** Request body for POST /datasets/{id}/layout. */
export interface LayoutRequest {
  attributes?: number[];
  reference?: number | null;
  small?: number;
  purity?: number;
  transforms?: Transform[];
}

export interface MineTicket {
  run_id: string;
  status: string;
}

export interface RunRecord {
  status: string;
  dataset: string;
  config: unknown;
  result: unknown;
  error: string | null;
}

export interface DescribeResponse {
  lines: string[];
}
