// Result document contract (format_version 1); see docs/result_schema.md.

export interface VariableInfo {
  name: string;
  kind: "numerical" | "categorical";
}

export interface ValueCount {
  value: string;
  count: number;
}

export interface PartInfo {
  id: number;
  label: string;
  count: number;
  values?: ValueCount[];
  lo_rank?: number;
  hi_rank?: number;
  lo_value?: number;
  hi_value?: number;
}

export interface PartitionInfo {
  variable: string;
  kind: "numerical" | "categorical";
  parts: PartInfo[];
}

export interface MergeRecordInfo {
  step: number;
  variable: string;
  a: number;
  b: number;
  new_id: number;
  delta: number;
  cost_after: number;
  info_ratio: number;
}

export interface MatrixInfo {
  kind: "frequency" | "cmi" | "contrast";
  row_variable: string;
  col_variable: string;
  row_labels: string[];
  col_labels: string[];
  values: number[][];
  total: number;
  step: number;
  selection?: Record<string, number>;
  target?: { variable: string; part: number };
}

export interface ResultDocument {
  format_version: number;
  schema: { variables: VariableInfo[]; delimiter: string; has_header: boolean };
  dataset: {
    n_records: number;
    n_dropped: number;
    source: string | null;
    variables: { name: string; kind: string; distinct: number }[];
  };
  model: {
    shape: number[];
    partitions: PartitionInfo[];
    cells: number[][]; // [j_1, ..., j_K, count]
  };
  cost: Record<string, number>;
  hierarchy: {
    cost_opt: number;
    cost_null: number;
    freeze: string[];
    records: MergeRecordInfo[];
  };
  optimizer: unknown;
  typicality?: Record<string, Record<string, [string, number][]>>;
  matrices?: MatrixInfo[];
}
