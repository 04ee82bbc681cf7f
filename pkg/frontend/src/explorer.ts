// Graph-neighborhood explorer: the focused entity in the middle, one
// node per neighbor on a circle, edges labeled with their property.
// Clicking a neighbor fetches its neighborhood (lazy, one hop per
// click). Everything rendered comes straight from the last API payload;
// retracted statements never arrive, so they are never drawn.

import type { AuditEntry, EntityWithNeighbors, NeighborView } from "./types.js";

const CLASS_COLORS: Record<string, string> = {
  E22: "#2f6f4f", E78: "#2f6f4f", E73: "#275d8c", E39: "#8c5a27",
  E41: "#6b6b6b", E42: "#6b6b6b", E55: "#7a4a8c", E52: "#9a3b3b",
  E53: "#9a3b3b", E7: "#b0801f", E65: "#b0801f",
};

export interface ExplorerActions {
  onFocus(iri: string): void;
}

const SVG_NS = "http://www.w3.org/2000/svg";

function svgElement<K extends keyof SVGElementTagNameMap>(
  tag: K, attrs: Record<string, string>,
): SVGElementTagNameMap[K] {
  const element = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    element.setAttribute(key, value);
  }
  return element;
}

function nodeBadge(classCode: string): string {
  return CLASS_COLORS[classCode] ?? "#444";
}

function shortLabel(text: string): string {
  return text.length > 24 ? `${text.slice(0, 21)}...` : text;
}

export function renderNeighborhood(
  data: EntityWithNeighbors,
  actions: ExplorerActions,
): SVGSVGElement {
  const width = 760;
  const height = 480;
  const centerX = width / 2;
  const centerY = height / 2;
  const radius = Math.min(width, height) / 2 - 70;
  const svg = svgElement("svg", {
    viewBox: `0 0 ${width} ${height}`,
    width: "100%",
    role: "img",
  });
  svg.classList.add("neighborhood");

  const neighbors = data.neighbors;
  neighbors.forEach((neighbor: NeighborView, index: number) => {
    const angle = (2 * Math.PI * index) / Math.max(neighbors.length, 1)
      - Math.PI / 2;
    const x = centerX + radius * Math.cos(angle);
    const y = centerY + radius * Math.sin(angle);

    const line = svgElement("line", {
      x1: String(centerX), y1: String(centerY),
      x2: String(x), y2: String(y),
      class: neighbor.direction === "out" ? "edge out" : "edge in",
    });
    svg.appendChild(line);

    const qualifier = neighbor.statement.qualifier_label
      ? ` [${neighbor.statement.qualifier_label}]` : "";
    const edgeLabel = svgElement("text", {
      x: String((centerX + x) / 2),
      y: String((centerY + y) / 2 - 4),
      class: "edge-label",
      "text-anchor": "middle",
    });
    edgeLabel.textContent = neighbor.direction === "out"
      ? `${neighbor.statement.property}${qualifier} >`
      : `< ${neighbor.statement.property}${qualifier}`;
    svg.appendChild(edgeLabel);

    if (neighbor.other) {
      const other = neighbor.other;
      const group = svgElement("g", { class: "node neighbor" });
      group.dataset["iri"] = other.iri;
      const circle = svgElement("circle", {
        cx: String(x), cy: String(y), r: "26",
        fill: nodeBadge(other.class),
      });
      group.appendChild(circle);
      const badge = svgElement("text", {
        x: String(x), y: String(y + 4),
        class: "badge", "text-anchor": "middle",
      });
      badge.textContent = other.class;
      group.appendChild(badge);
      const label = svgElement("text", {
        x: String(x), y: String(y + 42),
        class: "node-label", "text-anchor": "middle",
      });
      label.textContent = shortLabel(other.label);
      group.appendChild(label);
      group.addEventListener("click", () => actions.onFocus(other.iri));
      svg.appendChild(group);
    } else {
      const note = svgElement("text", {
        x: String(x), y: String(y),
        class: "note-label", "text-anchor": "middle",
      });
      note.textContent = `"${shortLabel(neighbor.statement.note ?? "")}"`;
      svg.appendChild(note);
    }
  });

  const focus = svgElement("g", { class: "node focus" });
  focus.dataset["iri"] = data.entity.iri;
  focus.appendChild(svgElement("circle", {
    cx: String(centerX), cy: String(centerY), r: "34",
    fill: nodeBadge(data.entity.class),
    stroke: "#111", "stroke-width": "2",
  }));
  const badge = svgElement("text", {
    x: String(centerX), y: String(centerY + 5),
    class: "badge", "text-anchor": "middle",
  });
  badge.textContent = data.entity.class;
  focus.appendChild(badge);
  const label = svgElement("text", {
    x: String(centerX), y: String(centerY + 56),
    class: "node-label focus-label", "text-anchor": "middle",
  });
  label.textContent = shortLabel(data.entity.label);
  focus.appendChild(label);
  svg.appendChild(focus);
  return svg;
}

export function renderAuditTrail(trail: AuditEntry[]): HTMLElement {
  const container = document.createElement("section");
  container.className = "audit-trail";
  const heading = document.createElement("h3");
  heading.textContent = "Audit trail";
  container.appendChild(heading);
  const list = document.createElement("ol");
  for (const entry of trail) {
    const item = document.createElement("li");
    item.textContent =
      `${entry.kind_label} by ${entry.operator_label} (${entry.timespan}) ` +
      `+${entry.entities_created}e +${entry.statements_asserted}s ` +
      `-${entry.statements_retracted}s: ${entry.note}`;
    list.appendChild(item);
  }
  container.appendChild(list);
  return container;
}
