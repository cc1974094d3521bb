import { describe, expect, it } from "vitest";

import { layoutSankey, renderSankey } from "../src/sankey";
import type { SankeyDoc } from "../src/types";
import { fixture } from "./helpers";

const recorded = fixture<SankeyDoc>("sankey.json");

const tiny: SankeyDoc = {
  nodes: [
    { id: "ht:psychological", layer: "harm_type", label: "Psychological" },
    { id: "sh:psychological/addiction", layer: "specific_harm", label: "Addiction" },
    { id: "st:actual", layer: "status", label: "Actual" },
    { id: "st:potential", layer: "status", label: "Potential" },
  ],
  links: [
    { source: "ht:psychological", target: "sh:psychological/addiction", weight: 3 },
    { source: "sh:psychological/addiction", target: "st:actual", weight: 2 },
    { source: "sh:psychological/addiction", target: "st:potential", weight: 1 },
  ],
  meta: { incident: "inc-001", round: "round-1", annotators: 3 },
};

function ribbonSums(layout: ReturnType<typeof layoutSankey>) {
  const inflow = new Map<string, number>();
  const outflow = new Map<string, number>();
  for (const ribbon of layout.ribbons) {
    outflow.set(ribbon.source, (outflow.get(ribbon.source) ?? 0) + ribbon.width);
    inflow.set(ribbon.target, (inflow.get(ribbon.target) ?? 0) + ribbon.width);
  }
  return { inflow, outflow };
}

describe("layout", () => {
  it.each([
    ["tiny", tiny],
    ["recorded", recorded],
  ])("middle-layer ribbon stacks balance (%s)", (_name, data) => {
    const layout = layoutSankey(data);
    const { inflow, outflow } = ribbonSums(layout);
    for (const node of layout.nodes) {
      if (node.layer !== "specific_harm") continue;
      expect(inflow.get(node.id) ?? 0).toBeCloseTo(outflow.get(node.id) ?? 0, 9);
      expect(inflow.get(node.id) ?? 0).toBeCloseTo(node.height, 9);
    }
  });

  it("ribbon widths are proportional to weights", () => {
    const layout = layoutSankey(tiny);
    const widths = new Map(layout.ribbons.map((r) => [`${r.source}->${r.target}`, r.width]));
    const unit = widths.get("sh:psychological/addiction->st:potential")!;
    expect(widths.get("sh:psychological/addiction->st:actual")).toBeCloseTo(2 * unit, 9);
    expect(widths.get("ht:psychological->sh:psychological/addiction")).toBeCloseTo(
      3 * unit,
      9,
    );
  });

  it("keeps nodes inside the drawing area", () => {
    const layout = layoutSankey(recorded, 760, 420, 10);
    for (const node of layout.nodes) {
      expect(node.y).toBeGreaterThanOrEqual(0);
      expect(node.y + node.height).toBeLessThanOrEqual(420 + 1e-9);
    }
  });
});

describe("svg rendering", () => {
  it("emits one ribbon per link with weight data attributes", () => {
    const container = document.createElement("div");
    const svg = renderSankey(container, recorded);
    const ribbons = svg.querySelectorAll("path.ribbon");
    expect(ribbons).toHaveLength(recorded.links.length);
    const first = ribbons[0];
    expect(first.getAttribute("data-weight")).toBe(String(recorded.links[0].weight));
  });

  it("renders visually balanced stacks at every middle node", () => {
    const container = document.createElement("div");
    const svg = renderSankey(container, recorded);
    const heights = new Map<string, number>();
    svg.querySelectorAll("rect.node.specific_harm").forEach((rect) => {
      heights.set(rect.getAttribute("data-id")!, Number(rect.getAttribute("data-height")));
    });
    const inflow = new Map<string, number>();
    const outflow = new Map<string, number>();
    svg.querySelectorAll("path.ribbon").forEach((path) => {
      const width = Number(path.getAttribute("data-width"));
      const source = path.getAttribute("data-source")!;
      const target = path.getAttribute("data-target")!;
      outflow.set(source, (outflow.get(source) ?? 0) + width);
      inflow.set(target, (inflow.get(target) ?? 0) + width);
    });
    for (const [id, height] of heights) {
      expect(inflow.get(id) ?? 0).toBeCloseTo(height, 9);
      expect(outflow.get(id) ?? 0).toBeCloseTo(height, 9);
    }
  });
});
