/**
 * Minimal RFC-4180 CSV reader: quoted fields, embedded commas and newlines.
 * Returns header-keyed records; all values stay strings.
 */

export type Row = Record<string, string>;

export function parseCsv(text: string): Row[] {
  const cells = tokenize(text);
  if (cells.length === 0) {
    throw new Error("CSV is empty");
  }
  const header = cells[0]!;
  const rows: Row[] = [];
  for (let i = 1; i < cells.length; i++) {
    const line = cells[i]!;
    if (line.length === 1 && line[0] === "") continue; // trailing blank line
    if (line.length !== header.length) {
      throw new Error(
        `CSV row ${i} has ${line.length} fields, header has ${header.length}`,
      );
    }
    const row: Row = {};
    header.forEach((name, j) => {
      row[name] = line[j]!;
    });
    rows.push(row);
  }
  if (rows.length === 0) {
    throw new Error("CSV has a header but no data rows");
  }
  return rows;
}

function tokenize(text: string): string[][] {
  const out: string[][] = [];
  let field = "";
  let line: string[] = [];
  let inQuotes = false;
  for (let i = 0; i < text.length; i++) {
    const ch = text[i]!;
    if (inQuotes) {
      if (ch === '"') {
        if (text[i + 1] === '"') {
          field += '"';
          i++;
        } else {
          inQuotes = false;
        }
      } else {
        field += ch;
      }
    } else if (ch === '"') {
      inQuotes = true;
    } else if (ch === ",") {
      line.push(field);
      field = "";
    } else if (ch === "\n" || ch === "\r") {
      if (ch === "\r" && text[i + 1] === "\n") i++;
      line.push(field);
      out.push(line);
      field = "";
      line = [];
    } else {
      field += ch;
    }
  }
  if (field.length > 0 || line.length > 0) {
    line.push(field);
    out.push(line);
  }
  return out;
}

export function requireColumns(rows: Row[], needed: string[], kind: string): void {
  const have = new Set(Object.keys(rows[0] ?? {}));
  const missing = needed.filter((c) => !have.has(c));
  if (missing.length > 0) {
    throw new Error(
      `input does not look like a ${kind} CSV: missing column(s) ${missing.join(", ")}`,
    );
  }
}

export function toNumber(value: string, column: string): number {
  const x = Number(value);
  if (!Number.isFinite(x)) {
    throw new Error(`column ${column} holds a non-numeric value: ${value}`);
  }
  return x;
}
