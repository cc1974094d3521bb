import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api";
import { FormState, renderAnnotationForm } from "../src/form";
import type { AnnotationDoc, TaxonomyDoc } from "../src/types";
import { fixture, select, setSelectValue, settle } from "./helpers";

const taxonomy = fixture<TaxonomyDoc>("taxonomy.json");

const EXPECTED_CHILD_COUNTS: Record<string, number> = {
  autonomy: 4,
  physical: 4,
  psychological: 11,
  reputational: 2,
  "financial-business": 7,
  "human-rights-civil-liberties": 11,
  "societal-cultural": 15,
  "political-economic": 7,
  environmental: 8,
};

function stubClient(overrides: Partial<ApiClient> = {}): ApiClient {
  return {
    submitAnnotation: async () => {
      throw new Error("not wired in this test");
    },
    ...overrides,
  } as unknown as ApiClient;
}

function mount(client = stubClient()) {
  const container = document.createElement("div");
  document.body.append(container);
  const state = renderAnnotationForm(container, {
    taxonomy,
    roundId: "round-1",
    incidentId: "inc-001",
    client,
  });
  return { container, state };
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("harm pickers", () => {
  it("offers exactly the seed harm types", () => {
    const { container } = mount();
    const options = [...select(container, "#harm-type-picker").querySelectorAll("option")];
    expect(options).toHaveLength(1 + 9); // placeholder + nine harm types
    expect(options.slice(1).map((o) => o.value)).toEqual(
      taxonomy.harm_types.map((ht) => ht.id),
    );
  });

  it("dependent picker offers exactly the children of the chosen type", () => {
    const { container } = mount();
    const harmTypePicker = select(container, "#harm-type-picker");
    for (const [htId, count] of Object.entries(EXPECTED_CHILD_COUNTS)) {
      setSelectValue(harmTypePicker, htId);
      const options = [
        ...select(container, "#specific-harm-picker").querySelectorAll("option"),
      ].slice(1); // drop placeholder
      expect(options, htId).toHaveLength(count);
      const childIds = taxonomy.harm_types
        .find((ht) => ht.id === htId)!
        .specific_harms.map((sh) => sh.id);
      expect(options.map((o) => o.value)).toEqual(childIds);
    }
  });

  it("picking Psychological lists exactly 11 entries", () => {
    const { container } = mount();
    setSelectValue(select(container, "#harm-type-picker"), "psychological");
    const options = select(container, "#specific-harm-picker").querySelectorAll("option");
    expect(options.length - 1).toBe(11);
  });

  it("the state machine rejects a harm that is not a child of the picked type", () => {
    const state = new FormState(taxonomy);
    state.pendingHarmType = "physical";
    state.pendingSpecificHarm = "addiction"; // lives under psychological
    const error = state.confirmPending();
    expect(error).toMatch(/not a specific harm of 'physical'/);
    expect(state.selections).toHaveLength(0);
  });
});

describe("definition panel", () => {
  it("shows the harm-type definition when a type is highlighted", () => {
    const { container } = mount();
    setSelectValue(select(container, "#harm-type-picker"), "environmental");
    expect(select(container, "#definition-text").textContent).toBe(
      taxonomy.harm_types.find((ht) => ht.id === "environmental")!.definition,
    );
  });

  it("shows the specific-harm definition when one is highlighted", () => {
    const { container } = mount();
    setSelectValue(select(container, "#harm-type-picker"), "psychological");
    setSelectValue(select(container, "#specific-harm-picker"), "addiction");
    expect(select(container, "#definition-text").textContent).toBe(
      "Emotional or material dependence on technology or a technology system.",
    );
    expect(select(container, "#definition-name").textContent).toBe("Addiction");
  });
});

describe("submit gating", () => {
  it("starts disabled and stays disabled with an unconfirmed picker", () => {
    const { container } = mount();
    const submit = select(container, "#submit-annotation");
    expect(submit.hasAttribute("disabled")).toBe(true);

    setSelectValue(select(container, "#harm-type-picker"), "psychological");
    setSelectValue(select(container, "#specific-harm-picker"), "addiction");
    // picked but not confirmed -> still blocked
    expect(submit.hasAttribute("disabled")).toBe(true);
  });

  it("pending picker blocks even the explicit no-harm path", () => {
    const { container } = mount();
    const noHarm = select(container, "#no-harm-checkbox") as HTMLInputElement;
    noHarm.checked = true;
    noHarm.dispatchEvent(new Event("change"));
    expect(select(container, "#submit-annotation").hasAttribute("disabled")).toBe(false);

    setSelectValue(select(container, "#harm-type-picker"), "physical");
    expect(select(container, "#submit-annotation").hasAttribute("disabled")).toBe(true);
  });

  it("an empty selection set requires the explicit confirmation", () => {
    const { container } = mount();
    const submit = select(container, "#submit-annotation");
    expect(submit.hasAttribute("disabled")).toBe(true);
    const noHarm = select(container, "#no-harm-checkbox") as HTMLInputElement;
    noHarm.checked = true;
    noHarm.dispatchEvent(new Event("change"));
    expect(submit.hasAttribute("disabled")).toBe(false);
  });

  it("a confirmed selection enables submission", () => {
    const { container } = mount();
    setSelectValue(select(container, "#harm-type-picker"), "psychological");
    setSelectValue(select(container, "#specific-harm-picker"), "addiction");
    select(container, "#confirm-selection").click();
    expect(select(container, "#submit-annotation").hasAttribute("disabled")).toBe(false);
    expect(container.querySelectorAll("#working-selections li")).toHaveLength(1);
  });
});

describe("selection legality", () => {
  it("blocks the same harm under two statuses", () => {
    const { container } = mount();
    setSelectValue(select(container, "#harm-type-picker"), "psychological");
    setSelectValue(select(container, "#specific-harm-picker"), "addiction");
    select(container, "#confirm-selection").click();

    setSelectValue(select(container, "#harm-type-picker"), "psychological");
    setSelectValue(select(container, "#specific-harm-picker"), "addiction");
    const potential = container.querySelector(
      'input[name="status"][value="potential"]',
    ) as HTMLInputElement;
    potential.checked = true;
    potential.dispatchEvent(new Event("change"));
    select(container, "#confirm-selection").click();

    expect(select(container, "#form-errors").textContent).toMatch(
      /one status per identified harm/,
    );
    expect(container.querySelectorAll("#working-selections li")).toHaveLength(1);
  });

  it("blocks exact duplicates", () => {
    const { container } = mount();
    for (let i = 0; i < 2; i += 1) {
      setSelectValue(select(container, "#harm-type-picker"), "physical");
      setSelectValue(select(container, "#specific-harm-picker"), "bodily-injury");
      select(container, "#confirm-selection").click();
    }
    expect(select(container, "#form-errors").textContent).toMatch(/already in the list/);
    expect(container.querySelectorAll("#working-selections li")).toHaveLength(1);
  });

  it("builds the exact annotation payload shape", () => {
    const state = new FormState(taxonomy);
    state.pendingHarmType = "societal-cultural";
    state.pendingSpecificHarm = "damage-to-public-health";
    state.pendingStatus = "potential";
    expect(state.confirmPending()).toBeNull();
    state.comment = "  ";
    expect(state.payload("round-1", "inc-001")).toEqual({
      round_id: "round-1",
      incident_id: "inc-001",
      selections: [
        {
          harm_type_id: "societal-cultural",
          specific_harm_id: "damage-to-public-health",
          status: "potential",
        },
      ],
      comment: null,
    });
  });
});

describe("server interaction", () => {
  it("shows server validation errors inline", async () => {
    const client = stubClient({
      submitAnnotation: async () => {
        throw new ApiError(422, "UNKNOWN_SELECTION", "does not resolve", "x/y");
      },
    } as Partial<ApiClient>);
    const { container } = mount(client);
    setSelectValue(select(container, "#harm-type-picker"), "psychological");
    setSelectValue(select(container, "#specific-harm-picker"), "addiction");
    select(container, "#confirm-selection").click();
    select(container, "#submit-annotation").click();
    await settle();
    expect(select(container, "#form-errors").textContent).toBe(
      "UNKNOWN_SELECTION: does not resolve",
    );
  });

  it("reports success with the stored timestamp", async () => {
    const stored: AnnotationDoc = {
      incident_id: "inc-001",
      annotator_id: "a1",
      round_id: "round-1",
      selections: [],
      comment: null,
      submitted_at: "2026-08-10T12:00:00+00:00",
      taxonomy_version: "1.0.0",
    };
    const client = stubClient({
      submitAnnotation: async () => ({ value: stored, text: JSON.stringify(stored) }),
    } as Partial<ApiClient>);
    const { container } = mount(client);
    const noHarm = select(container, "#no-harm-checkbox") as HTMLInputElement;
    noHarm.checked = true;
    noHarm.dispatchEvent(new Event("change"));
    select(container, "#submit-annotation").click();
    await settle();
    expect(select(container, "#submission-status").textContent).toBe(
      "saved at 2026-08-10T12:00:00+00:00",
    );
  });
});

describe("taxonomy overview", () => {
  it("is reachable from the form and lists all 69 specific harms", () => {
    const { container } = mount();
    const overview = select(container, "#taxonomy-overview");
    expect(overview.hasAttribute("hidden")).toBe(true);
    select(container, "#overview-toggle").click();
    expect(overview.hasAttribute("hidden")).toBe(false);
    expect(overview.querySelectorAll("li")).toHaveLength(69);
    expect(overview.querySelectorAll("h4")).toHaveLength(9);
  });
});
