import type { ResultDocument } from "./types.js";

export const SUPPORTED_FORMAT_VERSION = 1;

/** Parse and structurally validate a result document. Throws on anything a
 * viewer cannot safely render. */
export function parseResult(raw: unknown): ResultDocument {
  if (typeof raw !== "object" || raw === null) {
    throw new Error("result document must be a JSON object");
  }
  const doc = raw as ResultDocument;
  if (doc.format_version !== SUPPORTED_FORMAT_VERSION) {
    throw new Error(
      `unsupported format_version ${String(doc.format_version)}; ` +
        `this viewer reads version ${SUPPORTED_FORMAT_VERSION}`,
    );
  }
  if (!doc.schema?.variables?.length || !doc.model?.partitions?.length) {
    throw new Error("result document is missing schema or model sections");
  }
  if (doc.model.partitions.length !== doc.schema.variables.length) {
    throw new Error("partition count does not match the schema");
  }
  if (!Array.isArray(doc.model.cells) || doc.model.cells.length === 0) {
    throw new Error("result document has no cell counts");
  }
  const k = doc.schema.variables.length;
  for (const cell of doc.model.cells) {
    if (cell.length !== k + 1) {
      throw new Error("cell rows must hold K part indices plus a count");
    }
  }
  if (!doc.hierarchy || !Array.isArray(doc.hierarchy.records)) {
    throw new Error("result document is missing the hierarchy");
  }
  return doc;
}

export function parseResultText(text: string): ResultDocument {
  return parseResult(JSON.parse(text));
}
