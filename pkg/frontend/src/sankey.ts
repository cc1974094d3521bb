import type { SankeyDoc } from "./types";

// Fixed three-layer layout (harm type -> specific harm -> status). Ribbon
// widths are weight * scale, so the payload's flow conservation shows up as
// visually balanced stacks: every middle node's height equals both the sum of
// its incoming ribbons and the sum of its outgoing ribbons.

export interface LaidOutNode {
  id: string;
  layer: string;
  label: string;
  x: number;
  y: number;
  height: number;
}

export interface LaidOutRibbon {
  source: string;
  target: string;
  weight: number;
  width: number;
  path: string;
}

export interface SankeyLayout {
  nodes: LaidOutNode[];
  ribbons: LaidOutRibbon[];
  width: number;
  height: number;
}

const LAYERS = ["harm_type", "specific_harm", "status"] as const;
const NODE_WIDTH = 14;

export function layoutSankey(
  data: SankeyDoc,
  width = 760,
  height = 420,
  gap = 10,
): SankeyLayout {
  const throughput = new Map<string, number>();
  for (const link of data.links) {
    throughput.set(link.source, (throughput.get(link.source) ?? 0) + link.weight);
  }
  // middle and right layers size by inflow; left already counted via outflow
  for (const link of data.links) {
    if (link.target.startsWith("st:")) {
      throughput.set(link.target, (throughput.get(link.target) ?? 0) + link.weight);
    }
  }
  for (const node of data.nodes) {
    if (node.layer === "specific_harm") {
      const inflow = data.links
        .filter((l) => l.target === node.id)
        .reduce((sum, l) => sum + l.weight, 0);
      throughput.set(node.id, inflow);
    }
  }

  const columns = LAYERS.map((layer) => data.nodes.filter((n) => n.layer === layer));
  let scale = Number.POSITIVE_INFINITY;
  for (const column of columns) {
    if (column.length === 0) continue;
    const total = column.reduce((sum, n) => sum + (throughput.get(n.id) ?? 0), 0);
    const usable = height - gap * (column.length - 1);
    if (total > 0) scale = Math.min(scale, usable / total);
  }
  if (!Number.isFinite(scale)) scale = 1;

  const nodes: LaidOutNode[] = [];
  const position = new Map<string, LaidOutNode>();
  columns.forEach((column, columnIndex) => {
    const x = (columnIndex * (width - NODE_WIDTH)) / (LAYERS.length - 1);
    let y = 0;
    for (const node of column) {
      const nodeHeight = (throughput.get(node.id) ?? 0) * scale;
      const laid = { id: node.id, layer: node.layer, label: node.label, x, y, height: nodeHeight };
      nodes.push(laid);
      position.set(node.id, laid);
      y += nodeHeight + gap;
    }
  });

  const sourceOffset = new Map<string, number>();
  const targetOffset = new Map<string, number>();
  const ribbons: LaidOutRibbon[] = [];
  for (const link of data.links) {
    const source = position.get(link.source);
    const target = position.get(link.target);
    if (!source || !target) continue;
    const ribbonWidth = link.weight * scale;
    const sy = source.y + (sourceOffset.get(link.source) ?? 0);
    const ty = target.y + (targetOffset.get(link.target) ?? 0);
    sourceOffset.set(link.source, (sourceOffset.get(link.source) ?? 0) + ribbonWidth);
    targetOffset.set(link.target, (targetOffset.get(link.target) ?? 0) + ribbonWidth);
    const x0 = source.x + NODE_WIDTH;
    const x1 = target.x;
    const mid = (x0 + x1) / 2;
    const path =
      `M ${x0} ${sy}` +
      ` C ${mid} ${sy}, ${mid} ${ty}, ${x1} ${ty}` +
      ` L ${x1} ${ty + ribbonWidth}` +
      ` C ${mid} ${ty + ribbonWidth}, ${mid} ${sy + ribbonWidth}, ${x0} ${sy + ribbonWidth} Z`;
    ribbons.push({
      source: link.source,
      target: link.target,
      weight: link.weight,
      width: ribbonWidth,
      path,
    });
  }
  return { nodes, ribbons, width, height };
}

const SVG_NS = "http://www.w3.org/2000/svg";

export function renderSankey(container: HTMLElement, data: SankeyDoc): SVGSVGElement {
  const layout = layoutSankey(data);
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${layout.width + 160} ${layout.height}`);
  svg.setAttribute("class", "sankey");
  svg.setAttribute("role", "img");
  svg.setAttribute(
    "aria-label",
    `annotator flows for incident ${data.meta.incident} (${data.meta.annotators} annotators)`,
  );

  for (const ribbon of layout.ribbons) {
    const path = document.createElementNS(SVG_NS, "path");
    path.setAttribute("d", ribbon.path);
    path.setAttribute("class", "ribbon");
    path.setAttribute("data-source", ribbon.source);
    path.setAttribute("data-target", ribbon.target);
    path.setAttribute("data-weight", String(ribbon.weight));
    path.setAttribute("data-width", String(ribbon.width));
    const title = document.createElementNS(SVG_NS, "title");
    title.textContent = `${ribbon.source} -> ${ribbon.target}: ${ribbon.weight}`;
    path.append(title);
    svg.append(path);
  }
  for (const node of layout.nodes) {
    const rect = document.createElementNS(SVG_NS, "rect");
    rect.setAttribute("x", String(node.x));
    rect.setAttribute("y", String(node.y));
    rect.setAttribute("width", "14");
    rect.setAttribute("height", String(Math.max(node.height, 1)));
    rect.setAttribute("class", `node ${node.layer}`);
    rect.setAttribute("data-id", node.id);
    rect.setAttribute("data-height", String(node.height));
    svg.append(rect);

    const text = document.createElementNS(SVG_NS, "text");
    text.setAttribute("x", String(node.x + 18));
    text.setAttribute("y", String(node.y + Math.max(node.height, 1) / 2 + 4));
    text.setAttribute("class", "node-label");
    text.textContent = node.label;
    svg.append(text);
  }
  container.append(svg);
  return svg;
}
