import { ApiClient, ApiError } from "./api";
import { childrenOf, definitionFor } from "./taxonomy";
import type {
  AnnotationDoc,
  AnnotationPayload,
  HarmStatus,
  Selection,
  TaxonomyDoc,
} from "./types";

/** Pure form state: what is confirmed, what is pending, what may be submitted. */
export class FormState {
  selections: Selection[] = [];
  pendingHarmType = "";
  pendingSpecificHarm = "";
  pendingStatus: HarmStatus = "actual";
  noHarmConfirmed = false;
  comment = "";

  constructor(public taxonomy: TaxonomyDoc) {}

  specificHarmOptions() {
    return this.pendingHarmType ? childrenOf(this.taxonomy, this.pendingHarmType) : [];
  }

  /** A picker someone started filling but has not confirmed as a selection. */
  hasPendingPicker(): boolean {
    return this.pendingHarmType !== "" || this.pendingSpecificHarm !== "";
  }

  canConfirm(): boolean {
    return this.pendingHarmType !== "" && this.pendingSpecificHarm !== "";
  }

  /**
   * Submission needs every picker resolved and an explicit statement: either
   * at least one confirmed harm, or the "no harm identified" confirmation.
   */
  canSubmit(): boolean {
    if (this.hasPendingPicker()) return false;
    return this.selections.length > 0 || this.noHarmConfirmed;
  }

  /** Returns an error string, or null after confirming the pending pick. */
  confirmPending(): string | null {
    if (!this.canConfirm()) return "pick a harm type and a specific harm first";
    const children = childrenOf(this.taxonomy, this.pendingHarmType);
    if (!children.some((sh) => sh.id === this.pendingSpecificHarm)) {
      return `'${this.pendingSpecificHarm}' is not a specific harm of '${this.pendingHarmType}'`;
    }
    const duplicate = this.selections.find(
      (s) =>
        s.harm_type_id === this.pendingHarmType &&
        s.specific_harm_id === this.pendingSpecificHarm,
    );
    if (duplicate && duplicate.status === this.pendingStatus) {
      return "that harm is already in the list";
    }
    if (duplicate) {
      return `already listed as ${duplicate.status}; one status per identified harm`;
    }
    this.selections.push({
      harm_type_id: this.pendingHarmType,
      specific_harm_id: this.pendingSpecificHarm,
      status: this.pendingStatus,
    });
    this.noHarmConfirmed = false;
    this.pendingHarmType = "";
    this.pendingSpecificHarm = "";
    this.pendingStatus = "actual";
    return null;
  }

  removeSelection(index: number) {
    this.selections.splice(index, 1);
  }

  payload(roundId: string, incidentId: string): AnnotationPayload {
    return {
      round_id: roundId,
      incident_id: incidentId,
      selections: [...this.selections],
      comment: this.comment.trim() === "" ? null : this.comment,
    };
  }
}

export interface FormDeps {
  taxonomy: TaxonomyDoc;
  roundId: string;
  incidentId: string;
  client: ApiClient;
  onSubmitted?: (annotation: AnnotationDoc, rawText: string) => void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  if (text) node.textContent = text;
  return node;
}

export function renderAnnotationForm(container: HTMLElement, deps: FormDeps): FormState {
  const state = new FormState(deps.taxonomy);
  container.innerHTML = "";

  const form = el("form", { id: "annotation-form", "aria-label": "annotation form" });
  form.addEventListener("submit", (event) => event.preventDefault());

  const pickerRow = el("div", { class: "picker-row" });

  const harmTypeLabel = el("label", { for: "harm-type-picker" }, "Harm type");
  const harmTypePicker = el("select", { id: "harm-type-picker" });
  harmTypePicker.append(el("option", { value: "" }, "— choose a harm type —"));
  for (const ht of deps.taxonomy.harm_types) {
    harmTypePicker.append(el("option", { value: ht.id }, ht.name));
  }

  const specificLabel = el("label", { for: "specific-harm-picker" }, "Specific harm");
  const specificPicker = el("select", { id: "specific-harm-picker", disabled: "" });

  const statusFieldset = el("fieldset", { id: "status-toggle" });
  statusFieldset.append(el("legend", {}, "Status"));
  for (const status of ["actual", "potential"] as HarmStatus[]) {
    const label = el("label", {}, "");
    const radio = el("input", {
      type: "radio",
      name: "status",
      value: status,
    }) as HTMLInputElement;
    if (status === "actual") radio.checked = true;
    radio.addEventListener("change", () => {
      if (radio.checked) state.pendingStatus = status;
    });
    label.append(radio, document.createTextNode(" " + status));
    statusFieldset.append(label);
  }

  const confirmButton = el(
    "button",
    { id: "confirm-selection", type: "button", disabled: "" },
    "Add harm",
  );

  const definitionPanel = el("aside", {
    id: "definition-panel",
    "aria-live": "polite",
  });
  definitionPanel.append(
    el("h3", { id: "definition-name" }, ""),
    el("p", { id: "definition-text" }, "Pick a harm to see its definition."),
  );

  const workingList = el("ul", { id: "working-selections" });
  const noHarmLabel = el("label", { id: "no-harm-label" });
  const noHarmCheckbox = el("input", {
    type: "checkbox",
    id: "no-harm-checkbox",
  }) as HTMLInputElement;
  noHarmLabel.append(
    noHarmCheckbox,
    document.createTextNode(" No harm identified in this incident"),
  );

  const commentLabel = el("label", { for: "comment" }, "Comment");
  const commentBox = el("textarea", { id: "comment", rows: "3" }) as HTMLTextAreaElement;

  const submitButton = el(
    "button",
    { id: "submit-annotation", type: "button", disabled: "" },
    "Submit annotation",
  );
  const errorBox = el("div", { id: "form-errors", role: "alert" });
  const statusLine = el("p", { id: "submission-status" }, "");

  const overviewToggle = el(
    "button",
    { id: "overview-toggle", type: "button", "aria-expanded": "false" },
    "Taxonomy overview",
  );
  const overview = el("section", { id: "taxonomy-overview", hidden: "" });
  for (const ht of deps.taxonomy.harm_types) {
    const heading = el("h4", {}, ht.name);
    const blurb = el("p", {}, ht.definition);
    const list = el("ul", {});
    for (const sh of ht.specific_harms) {
      const item = el("li", { tabindex: "0", "data-path": `${ht.id}/${sh.id}` });
      item.append(el("strong", {}, sh.name), document.createTextNode(` — ${sh.definition}`));
      list.append(item);
    }
    overview.append(heading, blurb, list);
  }
  overviewToggle.addEventListener("click", () => {
    const hidden = overview.hasAttribute("hidden");
    if (hidden) overview.removeAttribute("hidden");
    else overview.setAttribute("hidden", "");
    overviewToggle.setAttribute("aria-expanded", String(hidden));
  });

  function showDefinition(harmTypeId: string, specificHarmId?: string) {
    const record = definitionFor(deps.taxonomy, harmTypeId, specificHarmId);
    if (!record) return;
    (definitionPanel.querySelector("#definition-name") as HTMLElement).textContent =
      record.name;
    (definitionPanel.querySelector("#definition-text") as HTMLElement).textContent =
      record.definition;
  }

  function refreshSpecificOptions() {
    specificPicker.innerHTML = "";
    const options = state.specificHarmOptions();
    if (options.length === 0) {
      specificPicker.setAttribute("disabled", "");
      return;
    }
    specificPicker.removeAttribute("disabled");
    specificPicker.append(el("option", { value: "" }, "— choose a specific harm —"));
    for (const sh of options) {
      specificPicker.append(el("option", { value: sh.id }, sh.name));
    }
  }

  function refreshWorkingList() {
    workingList.innerHTML = "";
    state.selections.forEach((selection, index) => {
      const record = definitionFor(
        deps.taxonomy,
        selection.harm_type_id,
        selection.specific_harm_id,
      );
      const item = el("li", { "data-index": String(index), tabindex: "0" });
      item.append(
        el(
          "span",
          { class: "selection-label" },
          `${record?.name ?? selection.specific_harm_id} (${selection.status})`,
        ),
      );
      item.addEventListener("focus", () =>
        showDefinition(selection.harm_type_id, selection.specific_harm_id),
      );
      item.addEventListener("mouseenter", () =>
        showDefinition(selection.harm_type_id, selection.specific_harm_id),
      );
      const remove = el("button", { type: "button", class: "remove" }, "remove");
      remove.addEventListener("click", () => {
        state.removeSelection(index);
        refreshWorkingList();
        refreshControls();
      });
      item.append(remove);
      workingList.append(item);
    });
  }

  function refreshControls() {
    if (state.canConfirm()) confirmButton.removeAttribute("disabled");
    else confirmButton.setAttribute("disabled", "");
    if (state.canSubmit()) submitButton.removeAttribute("disabled");
    else submitButton.setAttribute("disabled", "");
  }

  harmTypePicker.addEventListener("change", () => {
    state.pendingHarmType = harmTypePicker.value;
    state.pendingSpecificHarm = "";
    refreshSpecificOptions();
    if (state.pendingHarmType) showDefinition(state.pendingHarmType);
    refreshControls();
  });

  specificPicker.addEventListener("change", () => {
    state.pendingSpecificHarm = specificPicker.value;
    if (state.pendingHarmType && state.pendingSpecificHarm) {
      showDefinition(state.pendingHarmType, state.pendingSpecificHarm);
    }
    refreshControls();
  });

  confirmButton.addEventListener("click", () => {
    errorBox.textContent = "";
    const error = state.confirmPending();
    if (error) {
      errorBox.textContent = error;
    } else {
      harmTypePicker.value = "";
      refreshSpecificOptions();
      noHarmCheckbox.checked = false;
      refreshWorkingList();
    }
    refreshControls();
  });

  noHarmCheckbox.addEventListener("change", () => {
    state.noHarmConfirmed = noHarmCheckbox.checked;
    refreshControls();
  });

  commentBox.addEventListener("input", () => {
    state.comment = commentBox.value;
  });

  submitButton.addEventListener("click", async () => {
    if (!state.canSubmit()) return;
    errorBox.textContent = "";
    statusLine.textContent = "submitting…";
    submitButton.setAttribute("disabled", "");
    try {
      const result = await deps.client.submitAnnotation(
        state.payload(deps.roundId, deps.incidentId),
      );
      statusLine.textContent = `saved at ${result.value.submitted_at}`;
      deps.onSubmitted?.(result.value, result.text);
    } catch (error) {
      if (error instanceof ApiError) {
        errorBox.textContent = `${error.code}: ${error.message}`;
      } else {
        errorBox.textContent = `request failed: ${String(error)} — retry`;
      }
      statusLine.textContent = "";
    } finally {
      refreshControls();
    }
  });

  pickerRow.append(
    harmTypeLabel,
    harmTypePicker,
    specificLabel,
    specificPicker,
    statusFieldset,
    confirmButton,
  );
  form.append(
    pickerRow,
    workingList,
    noHarmLabel,
    commentLabel,
    commentBox,
    submitButton,
    errorBox,
    statusLine,
    overviewToggle,
    overview,
  );
  const layout = el("div", { class: "form-layout" });
  layout.append(form, definitionPanel);
  container.append(layout);

  refreshSpecificOptions();
  refreshControls();
  return state;
}
