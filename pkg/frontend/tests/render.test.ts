import { describe, expect, it } from "vitest";
import type { HighlightDoc, TableDoc } from "../src/api.js";
import {
  headerLabel,
  renderTableFragment,
  resultText,
} from "../src/render.js";

const olympics: TableDoc = {
  table_id: "olympics",
  headers: ["Year", "Country", "City"],
  rows: [
    ["1896", "Greece", "Athens"],
    ["1900", "France", "Paris"],
    ["2004", "Greece", "Athens"],
    ["2008", "China", "Beijing"],
    ["2012", "United Kingdom", "London"],
    ["2016", "Brazil", "Rio de Janeiro"],
  ],
  n_rows: 6,
};

const maxYearGreece: HighlightDoc = {
  table_id: "olympics",
  styles: [
    { column: "Country", row: 0, style: "framed" },
    { column: "Country", row: 2, style: "framed" },
    { column: "Country", row: 1, style: "lit" },
    { column: "Year", row: 0, style: "framed" },
    { column: "Year", row: 2, style: "colored" },
    { column: "Year", row: 1, style: "lit" },
  ],
  header_marks: [{ fn: "max", column: "Year" }],
  sampled_rows: null,
};

describe("headerLabel", () => {
  it("wraps a marked column as FN(Column)", () => {
    expect(headerLabel("Year", [{ fn: "max", column: "Year" }])).toBe(
      "MAX(Year)",
    );
  });

  it("leaves unmarked columns alone", () => {
    expect(headerLabel("City", [{ fn: "max", column: "Year" }])).toBe("City");
  });

  it("nests multiple marks in sorted order", () => {
    const marks = [
      { fn: "min", column: "Year" },
      { fn: "max", column: "Year" },
    ];
    expect(headerLabel("Year", marks)).toBe("MIN(MAX(Year))");
  });
});

describe("renderTableFragment", () => {
  it("applies the three cell classes at the addressed cells", () => {
    const el = renderTableFragment(olympics, maxYearGreece, false);
    const body = el.querySelector("tbody")!;
    const rows = body.querySelectorAll("tr");
    expect(rows.length).toBe(6);
    const cell = (r: number, c: number) =>
      rows[r].querySelectorAll("td")[c];
    expect(cell(2, 0).className).toBe("hl-colored");
    expect(cell(0, 0).className).toBe("hl-framed");
    expect(cell(1, 0).className).toBe("hl-lit");
    expect(cell(0, 1).className).toBe("hl-framed");
    expect(cell(0, 2).className).toBe("");
    expect(cell(2, 0).textContent).toBe("2004");
  });

  it("marks the header and keeps original row indexes", () => {
    const el = renderTableFragment(olympics, maxYearGreece, false);
    const heads = el.querySelectorAll("th");
    expect(heads[0].textContent).toBe("MAX(Year)");
    expect(heads[1].textContent).toBe("Country");
    const rows = el.querySelectorAll("tbody tr");
    expect(rows[3].getAttribute("data-row")).toBe("3");
  });

  it("renders plain tables without an annotation", () => {
    const el = renderTableFragment(olympics, null, false);
    expect(el.querySelectorAll("tbody tr").length).toBe(6);
    expect(el.querySelector(".hl-note")).toBeNull();
  });

  it("shows only sampled rows by default, with a count note", () => {
    const big: TableDoc = {
      table_id: "big",
      headers: ["A", "B"],
      rows: Array.from({ length: 60 }, (_, i) => [String(i), `b${i}`]),
      n_rows: 60,
    };
    const hl: HighlightDoc = {
      table_id: "big",
      styles: [{ column: "A", row: 30, style: "colored" }],
      header_marks: [],
      sampled_rows: [0, 30, 37],
    };
    const el = renderTableFragment(big, hl, false);
    const rows = el.querySelectorAll("tbody tr");
    expect(rows.length).toBe(3);
    expect([...rows].map((r) => r.getAttribute("data-row"))).toEqual([
      "0",
      "30",
      "37",
    ]);
    expect(el.querySelector(".hl-note")!.textContent).toBe(
      "Showing 3 of 60 rows.",
    );
    const colored = el.querySelectorAll("td.hl-colored");
    expect(colored.length).toBe(1);
    expect(colored[0].textContent).toBe("30");

    const full = renderTableFragment(big, hl, true);
    expect(full.querySelectorAll("tbody tr").length).toBe(60);
    expect(full.querySelector(".hl-note")).toBeNull();
  });

  it("rejects unknown style names", () => {
    const hl = {
      table_id: "olympics",
      styles: [{ column: "Year", row: 0, style: "blinking" }],
      header_marks: [],
      sampled_rows: null,
    } as unknown as HighlightDoc;
    expect(() => renderTableFragment(olympics, hl, false)).toThrow(
      /unknown cell style/,
    );
  });
});

describe("resultText", () => {
  it("formats every result kind", () => {
    expect(resultText({ kind: "scalar", value: "2004" })).toBe("2004");
    expect(resultText({ kind: "values", values: ["1896", "2004"] })).toBe(
      "1896, 2004",
    );
    expect(resultText({ kind: "records", rows: [0, 2] })).toBe("rows 0, 2");
    expect(resultText(null)).toBe("no result");
  });
});
