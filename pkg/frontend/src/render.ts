/** DOM rendering for the annotation document contract.
 *
 * Cell styles map onto the fixed class names hl-colored, hl-framed and
 * hl-lit; aggregate header marks wrap the column name as FN(Column). Both
 * conventions match the server's own static page renderer.
 */
import type {
  HeaderMark,
  HighlightDoc,
  ResultDoc,
  TableDoc,
} from "./api.js";

const STYLE_CLASS: Record<string, string> = {
  colored: "hl-colored",
  framed: "hl-framed",
  lit: "hl-lit",
};

/** Column header text, wrapped once per mark: max on Year gives MAX(Year). */
export function headerLabel(column: string, marks: HeaderMark[]): string {
  const fns = marks
    .filter((m) => m.column === column)
    .map((m) => m.fn)
    .sort();
  let label = column;
  for (const fn of fns) {
    label = `${fn.toUpperCase()}(${label})`;
  }
  return label;
}

/**
 * Table fragment for one candidate. With a sampled-rows annotation only
 * those rows appear (plus a count note) unless expanded is set. Row
 * elements carry data-row with the original row index.
 */
export function renderTableFragment(
  table: TableDoc,
  hl: HighlightDoc | null,
  expanded: boolean,
): HTMLElement {
  const doc = document;
  const wrap = doc.createElement("div");
  wrap.className = "table-fragment";

  const styleByCell = new Map<string, string>();
  for (const s of hl?.styles ?? []) {
    const cls = STYLE_CLASS[s.style];
    if (cls === undefined) {
      throw new Error(`unknown cell style: ${s.style}`);
    }
    styleByCell.set(`${s.row}:${s.column}`, cls);
  }

  const sampled = hl?.sampled_rows ?? null;
  const rowIndexes =
    sampled !== null && !expanded
      ? sampled
      : table.rows.map((_, i) => i);

  if (sampled !== null && !expanded) {
    const note = doc.createElement("p");
    note.className = "hl-note";
    note.textContent = `Showing ${sampled.length} of ${table.n_rows} rows.`;
    wrap.appendChild(note);
  }

  const tableEl = doc.createElement("table");
  tableEl.className = "hl";
  const thead = doc.createElement("thead");
  const headRow = doc.createElement("tr");
  for (const column of table.headers) {
    const th = doc.createElement("th");
    th.textContent = headerLabel(column, hl?.header_marks ?? []);
    headRow.appendChild(th);
  }
  thead.appendChild(headRow);
  tableEl.appendChild(thead);

  const tbody = doc.createElement("tbody");
  for (const i of rowIndexes) {
    const tr = doc.createElement("tr");
    tr.dataset.row = String(i);
    table.headers.forEach((column, c) => {
      const td = doc.createElement("td");
      td.textContent = table.rows[i][c];
      const cls = styleByCell.get(`${i}:${column}`);
      if (cls) {
        td.className = cls;
      }
      tr.appendChild(td);
    });
    tbody.appendChild(tr);
  }
  tableEl.appendChild(tbody);
  wrap.appendChild(tableEl);
  return wrap;
}

/** One-line text form of an evaluation result. */
export function resultText(result: ResultDoc | null): string {
  if (result === null) {
    return "no result";
  }
  if (result.kind === "scalar") {
    return result.value;
  }
  if (result.kind === "values") {
    return result.values.join(", ");
  }
  return `rows ${result.rows.join(", ")}`;
}
