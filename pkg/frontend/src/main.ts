import { ApiClient } from "./api";
import { renderDashboard } from "./dashboard";
import { renderAnnotationForm } from "./form";
import type { RoundDoc } from "./types";

// Single-page entry: an "Annotate" tab (live round work) and a "Dashboard"
// tab (post-round disagreement review). Served by `harmtax serve --static`.

function byId(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

async function startAnnotateTab(client: ApiClient) {
  const view = byId("annotate-view");
  view.innerHTML = "";
  const rounds = (await client.rounds()).value.filter((r: RoundDoc) => r.closed_at === null);
  if (rounds.length === 0) {
    view.textContent = "No open round. Ask the operator to open one.";
    return;
  }
  const round = rounds[rounds.length - 1];

  const incidentPicker = document.createElement("select");
  incidentPicker.id = "incident-picker";
  for (const incidentId of round.incident_ids) {
    const option = document.createElement("option");
    option.value = incidentId;
    option.textContent = incidentId;
    incidentPicker.append(option);
  }
  const incidentCard = document.createElement("article");
  incidentCard.id = "incident-card";
  const formBox = document.createElement("div");
  formBox.id = "form-box";
  view.append(incidentPicker, incidentCard, formBox);

  const taxonomy = (await client.taxonomy()).value;

  async function showIncident(incidentId: string) {
    const incident = (await client.incident(incidentId)).value;
    incidentCard.innerHTML = "";
    const title = document.createElement("h2");
    title.textContent = `${incident.id}: ${incident.title}`;
    const description = document.createElement("p");
    description.textContent = incident.description;
    incidentCard.append(title, description);
    for (const link of incident.source_links) {
      const anchor = document.createElement("a");
      anchor.href = link;
      anchor.textContent = link;
      anchor.target = "_blank";
      anchor.rel = "noreferrer";
      incidentCard.append(anchor, document.createElement("br"));
    }
    formBox.innerHTML = "";
    renderAnnotationForm(formBox, {
      taxonomy,
      roundId: round.round_id,
      incidentId,
      client,
    });
  }

  incidentPicker.addEventListener("change", () => showIncident(incidentPicker.value));
  await showIncident(round.incident_ids[0]);
}

export async function start(): Promise<void> {
  const tokenInput = byId("token-input") as HTMLInputElement;
  tokenInput.value = localStorage.getItem("harmtax-token") ?? "";
  const client = new ApiClient("", tokenInput.value || null);
  tokenInput.addEventListener("change", () => {
    localStorage.setItem("harmtax-token", tokenInput.value);
    client.token = tokenInput.value || null;
  });

  const tabs = {
    annotate: byId("tab-annotate"),
    dashboard: byId("tab-dashboard"),
  };
  const views = {
    annotate: byId("annotate-view"),
    dashboard: byId("dashboard-view"),
  };

  async function activate(name: keyof typeof tabs) {
    for (const key of Object.keys(tabs) as Array<keyof typeof tabs>) {
      tabs[key].setAttribute("aria-selected", String(key === name));
      views[key].hidden = key !== name;
    }
    try {
      if (name === "annotate") await startAnnotateTab(client);
      else await renderDashboard(views.dashboard, { client });
    } catch (error) {
      views[name].textContent = `failed to load: ${String(error)}`;
    }
  }

  tabs.annotate.addEventListener("click", () => void activate("annotate"));
  tabs.dashboard.addEventListener("click", () => void activate("dashboard"));
  await activate("annotate");
}

if (typeof document !== "undefined" && document.getElementById("tab-annotate")) {
  void start();
}
