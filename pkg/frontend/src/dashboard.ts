// Backlog and verification panels. Rows carry an action that opens the
// matching pre-filled workflow form, which is how volunteers are steered
// to the next concrete task.

import type { Report, ReportRow } from "./types.js";

export interface DashboardActions {
  onDigitize(row: ReportRow): void;
  onVerify(row: ReportRow): void;
  onInspect(iri: string): void;
}

function renderPanel(
  title: string,
  report: Report,
  emptyText: string,
  actionLabel: string,
  onAction: (row: ReportRow) => void,
  onInspect: (iri: string) => void,
): HTMLElement {
  const panel = document.createElement("section");
  panel.className = "panel";
  const heading = document.createElement("h2");
  heading.textContent = `${title} (${report.rows.length})`;
  panel.appendChild(heading);

  if (report.rows.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = emptyText;
    panel.appendChild(empty);
    return panel;
  }

  const table = document.createElement("table");
  table.className = "report";
  for (const row of report.rows) {
    const tr = document.createElement("tr");
    tr.dataset["iri"] = row.iri;

    const labelCell = document.createElement("td");
    const inspect = document.createElement("a");
    inspect.href = "#";
    inspect.textContent = row.label;
    inspect.addEventListener("click", (event) => {
      event.preventDefault();
      onInspect(row.iri);
    });
    labelCell.appendChild(inspect);
    tr.appendChild(labelCell);

    const detailCell = document.createElement("td");
    detailCell.className = "detail";
    detailCell.textContent = Object.entries(row.detail)
      .map(([key, value]) => `${key}: ${String(value)}`)
      .join("  ");
    tr.appendChild(detailCell);

    const actionCell = document.createElement("td");
    const button = document.createElement("button");
    button.type = "button";
    button.textContent = actionLabel;
    button.addEventListener("click", () => onAction(row));
    actionCell.appendChild(button);
    tr.appendChild(actionCell);

    table.appendChild(tr);
  }
  panel.appendChild(table);
  return panel;
}

export function renderDashboard(
  backlog: Report,
  unverified: Report,
  actions: DashboardActions,
): HTMLElement {
  const container = document.createElement("div");
  container.className = "dashboard";
  container.appendChild(renderPanel(
    "Digitization backlog", backlog,
    "No tapes waiting. Accession something!",
    "Digitize", actions.onDigitize, actions.onInspect));
  container.appendChild(renderPanel(
    "Unverified binaries", unverified,
    "Every digitized file is verified.",
    "Verify", actions.onVerify, actions.onInspect));
  return container;
}
