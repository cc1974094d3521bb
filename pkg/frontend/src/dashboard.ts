import { ApiClient } from "./api";
import { renderSankey } from "./sankey";
import type { RoundDoc, SummaryDoc, TrendDoc } from "./types";

// Every number shown here is the API payload value rendered verbatim via
// String(); the dashboard never recomputes a statistic.

type SortKey = "incident_id" | "alpha" | "annotators";

export function formatCell(value: number | null): string {
  return value === null ? "—" : String(value);
}

export function renderAlphaTable(container: HTMLElement, summary: SummaryDoc): void {
  container.innerHTML = "";
  const table = document.createElement("table");
  table.id = "alpha-table";
  const head = document.createElement("thead");
  const headRow = document.createElement("tr");
  const columns: Array<[SortKey, string]> = [
    ["incident_id", "Incident"],
    ["alpha", "Alpha"],
    ["annotators", "Annotators"],
  ];
  let sortKey: SortKey = "incident_id";
  let ascending = true;

  const body = document.createElement("tbody");

  function fill() {
    const rows = [...summary.incidents].sort((a, b) => {
      const left = a[sortKey];
      const right = b[sortKey];
      let order: number;
      if (left === null) order = right === null ? 0 : -1;
      else if (right === null) order = 1;
      else order = left < right ? -1 : left > right ? 1 : 0;
      return ascending ? order : -order;
    });
    body.innerHTML = "";
    for (const row of rows) {
      const tr = document.createElement("tr");
      tr.dataset.incident = row.incident_id;
      const cells = [
        row.incident_id,
        formatCell(row.alpha) + (row.degenerate ? " (unanimous)" : ""),
        String(row.annotators),
      ];
      for (const text of cells) {
        const td = document.createElement("td");
        td.textContent = text;
        tr.append(td);
      }
      body.append(tr);
    }
  }

  for (const [key, label] of columns) {
    const th = document.createElement("th");
    const button = document.createElement("button");
    button.type = "button";
    button.textContent = label;
    button.dataset.sort = key;
    button.addEventListener("click", () => {
      if (sortKey === key) ascending = !ascending;
      else {
        sortKey = key;
        ascending = true;
      }
      fill();
    });
    th.append(button);
    headRow.append(th);
  }
  head.append(headRow);
  table.append(head, body);
  fill();

  const disputed = document.createElement("p");
  disputed.id = "top-disputed";
  disputed.textContent = summary.top_disputed.length
    ? `Most contested: ${summary.top_disputed.join(", ")}`
    : "No contested harms in this round.";
  container.append(table, disputed);
}

const SVG_NS = "http://www.w3.org/2000/svg";

export function renderTrend(container: HTMLElement, trend: TrendDoc): void {
  container.innerHTML = "";
  if (trend.points.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "No closed rounds yet — the trend appears after the first round closes.";
    container.append(empty);
    return;
  }
  const width = 640;
  const height = 220;
  const pad = 30;
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("id", "trend-chart");
  svg.setAttribute("role", "img");
  svg.setAttribute("aria-label", "mean agreement per round");

  const axis = document.createElementNS(SVG_NS, "line");
  axis.setAttribute("x1", String(pad));
  axis.setAttribute("y1", String(height - pad));
  axis.setAttribute("x2", String(width - pad));
  axis.setAttribute("y2", String(height - pad));
  axis.setAttribute("class", "axis");
  svg.append(axis);

  const step =
    trend.points.length > 1 ? (width - 2 * pad) / (trend.points.length - 1) : 0;
  const scaleY = (alpha: number) => height - pad - alpha * (height - 2 * pad);

  const coordinates: Array<[number, number]> = [];
  trend.points.forEach((point, index) => {
    if (point.mean_alpha === null) return;
    coordinates.push([pad + index * step, scaleY(point.mean_alpha)]);
  });
  if (coordinates.length > 1) {
    const line = document.createElementNS(SVG_NS, "polyline");
    line.setAttribute("points", coordinates.map(([x, y]) => `${x},${y}`).join(" "));
    line.setAttribute("class", "trend-line");
    svg.append(line);
  }
  trend.points.forEach((point, index) => {
    if (point.mean_alpha === null) return;
    const circle = document.createElementNS(SVG_NS, "circle");
    circle.setAttribute("cx", String(pad + index * step));
    circle.setAttribute("cy", String(scaleY(point.mean_alpha)));
    circle.setAttribute("r", "4");
    circle.setAttribute("class", "trend-point");
    circle.setAttribute("data-round", point.round);
    circle.setAttribute("data-alpha", String(point.mean_alpha));
    const title = document.createElementNS(SVG_NS, "title");
    title.textContent = `${point.round}: ${String(point.mean_alpha)} over ${point.incident_count} incidents`;
    circle.append(title);
    svg.append(circle);
  });
  container.append(svg);
}

export interface DashboardDeps {
  client: ApiClient;
  reviewerMode?: boolean;
}

export async function renderDashboard(
  container: HTMLElement,
  deps: DashboardDeps,
): Promise<void> {
  container.innerHTML = "";
  const rounds = (await deps.client.rounds()).value;
  if (rounds.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.id = "dashboard-empty";
    empty.textContent = "No rounds exist yet.";
    container.append(empty);
    return;
  }

  const picker = document.createElement("select");
  picker.id = "round-picker";
  for (const round of rounds) {
    const option = document.createElement("option");
    option.value = round.round_id;
    option.textContent = `${round.label}${round.closed_at === null ? " (open)" : ""}`;
    picker.append(option);
  }
  const tableBox = document.createElement("div");
  tableBox.id = "alpha-table-box";
  const sankeyBox = document.createElement("div");
  sankeyBox.id = "sankey-box";
  const trendBox = document.createElement("div");
  trendBox.id = "trend-box";
  container.append(picker, tableBox, sankeyBox, trendBox);

  async function showRound(round: RoundDoc) {
    tableBox.innerHTML = "";
    sankeyBox.innerHTML = "";
    if (round.closed_at === null && !deps.reviewerMode) {
      const blind = document.createElement("p");
      blind.className = "empty-state";
      blind.id = "blind-notice";
      blind.textContent =
        "This round is still open. Results stay hidden until it closes (blind mode).";
      tableBox.append(blind);
      return;
    }
    const summary = (await deps.client.summary(round.round_id)).value;
    if (summary.totals.annotations === 0) {
      const empty = document.createElement("p");
      empty.className = "empty-state";
      empty.id = "round-empty";
      empty.textContent = "This round has no annotations.";
      tableBox.append(empty);
      return;
    }
    renderAlphaTable(tableBox, summary);
    tableBox.querySelectorAll("tbody tr").forEach((tr) => {
      tr.addEventListener("click", async () => {
        const incident = (tr as HTMLTableRowElement).dataset.incident;
        if (!incident) return;
        sankeyBox.innerHTML = "";
        const sankey = (await deps.client.sankey(round.round_id, incident)).value;
        renderSankey(sankeyBox, sankey);
      });
    });
  }

  picker.addEventListener("change", async () => {
    const round = rounds.find((r) => r.round_id === picker.value);
    if (round) await showRound(round);
  });

  await showRound(rounds[0]);
  renderTrend(trendBox, (await deps.client.trend()).value);
}
