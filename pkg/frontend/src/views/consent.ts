/** Consent form and the three study surveys, all localized. */

import { h, VNode } from "../dom.js";
import { I18n } from "../i18n.js";
import { localeMenu } from "./shell.js";

export interface ConsentFormState {
  study: boolean;
  location: boolean;
}

export interface ConsentHandlers {
  onChange: (patch: Partial<ConsentFormState>) => void;
  onLocaleChange: (locale: string) => void;
  onSubmit: () => void;
}

export function consentView(
  i18n: I18n,
  form: ConsentFormState,
  locales: string[],
  handlers: ConsentHandlers,
): VNode {
  return h("section", { class: "consent-flow" }, [
    h("h1", {}, [i18n.t("consent.heading")]),
    localeMenu(i18n, locales, handlers.onLocaleChange),
    h("p", {}, [i18n.t("consent.intro")]),
    h("label", { class: "toggle" }, [
      h("input", { type: "checkbox", "data-field": "study", ...(form.study ? { checked: "checked" } : {}) }, [], {
        change: (ev) => handlers.onChange({ study: (ev.target as HTMLInputElement).checked }),
      }),
      i18n.t("consent.study_label"),
    ]),
    h("label", { class: "toggle" }, [
      h(
        "input",
        { type: "checkbox", "data-field": "location", ...(form.location ? { checked: "checked" } : {}) },
        [],
        { change: (ev) => handlers.onChange({ location: (ev.target as HTMLInputElement).checked }) },
      ),
      i18n.t("consent.location_label"),
    ]),
    h("button", { class: "primary", "data-role": "submit-consent" }, [i18n.t("consent.submit")], {
      click: () => handlers.onSubmit(),
    }),
  ]);
}

// --- surveys ---------------------------------------------------------------

const LSNS_ITEM_KEYS = [1, 2, 3, 4, 5, 6].map((n) => `survey.lsns.item${n}`);
const LSNS_ANCHOR_KEYS = [0, 1, 2, 3, 4, 5].map((n) => `survey.lsns.anchor${n}`);
const SUS_ITEM_KEYS = Array.from({ length: 10 }, (_, i) => `survey.sus.item${String(i + 1).padStart(2, "0")}`);
const AGREEMENT_KEYS = [
  "survey.scale_strongly_disagree",
  "survey.scale_disagree",
  "survey.scale_neutral",
  "survey.scale_agree",
  "survey.scale_strongly_agree",
];
export const USEFULNESS_DIMENSIONS = [
  "increased_contact",
  "contact_with_strangers",
  "solidarity",
  "reliability",
  "trust",
  "community",
  "new_friendships",
  "network_size",
  "reduced_isolation",
] as const;

export interface SurveyHandlers {
  onPick: (index: number, value: number) => void;
  onSubmit: () => void;
}

function itemRow(
  i18n: I18n,
  index: number,
  itemKey: string,
  anchors: { value: number; key: string }[],
  picked: number | null,
  handlers: SurveyHandlers,
): VNode {
  return h("li", { class: "survey-item", "data-item": String(index) }, [
    h("p", {}, [i18n.t(itemKey)]),
    h(
      "div",
      { class: "anchors" },
      anchors.map(({ value, key }) =>
        h(
          "button",
          { class: picked === value ? "anchor active" : "anchor", "data-value": String(value) },
          [i18n.t(key)],
          { click: () => handlers.onPick(index, value) },
        ),
      ),
    ),
  ]);
}

export function lsnsSurvey(i18n: I18n, answers: (number | null)[], handlers: SurveyHandlers): VNode {
  const anchors = LSNS_ANCHOR_KEYS.map((key, value) => ({ value, key }));
  return h("section", { class: "survey", "data-instrument": "lsns6" }, [
    h("h1", {}, [i18n.t("survey.lsns.heading")]),
    h("ol", {}, LSNS_ITEM_KEYS.map((key, i) => itemRow(i18n, i, key, anchors, answers[i], handlers))),
    h("button", { class: "primary", "data-role": "submit-survey" }, [i18n.t("common.save")], {
      click: () => handlers.onSubmit(),
    }),
  ]);
}

export function susSurvey(i18n: I18n, answers: (number | null)[], handlers: SurveyHandlers): VNode {
  const anchors = AGREEMENT_KEYS.map((key, i) => ({ value: i + 1, key }));
  return h("section", { class: "survey", "data-instrument": "sus" }, [
    h("h1", {}, [i18n.t("survey.sus.heading")]),
    h("ol", {}, SUS_ITEM_KEYS.map((key, i) => itemRow(i18n, i, key, anchors, answers[i], handlers))),
    h("button", { class: "primary", "data-role": "submit-survey" }, [i18n.t("common.save")], {
      click: () => handlers.onSubmit(),
    }),
  ]);
}

export function usefulnessSurvey(i18n: I18n, answers: (number | null)[], handlers: SurveyHandlers): VNode {
  const anchors = AGREEMENT_KEYS.map((key, i) => ({ value: i + 1, key }));
  return h("section", { class: "survey", "data-instrument": "usefulness" }, [
    h("h1", {}, [i18n.t("survey.usefulness.heading")]),
    h(
      "ol",
      {},
      USEFULNESS_DIMENSIONS.map((dim, i) =>
        itemRow(i18n, i, `survey.usefulness.${dim}`, anchors, answers[i], handlers),
      ),
    ),
    h("button", { class: "primary", "data-role": "submit-survey" }, [i18n.t("common.save")], {
      click: () => handlers.onSubmit(),
    }),
  ]);
}

export interface DemographicsFormState {
  ageRange: string;
  gender: string;
  origin: string;
  group: string;
}

export interface DemographicsHandlers {
  onChange: (patch: Partial<DemographicsFormState>) => void;
  onSubmit: () => void;
}

export function demographicsSurvey(
  i18n: I18n,
  form: DemographicsFormState,
  handlers: DemographicsHandlers,
): VNode {
  const groups: [string, string][] = [
    ["forced_migrant", "survey.demographics.group_forced_migrant"],
    ["local_freecycler", "survey.demographics.group_local_freecycler"],
    ["unspecified", "survey.demographics.group_unspecified"],
  ];
  return h("section", { class: "survey", "data-instrument": "demographics" }, [
    h("h1", {}, [i18n.t("survey.demographics.heading")]),
    h("label", {}, [
      i18n.t("survey.demographics.age"),
      h("input", { value: form.ageRange, "data-field": "age" }, [], {
        input: (ev) => handlers.onChange({ ageRange: (ev.target as HTMLInputElement).value }),
      }),
    ]),
    h("label", {}, [
      i18n.t("survey.demographics.gender"),
      h("input", { value: form.gender, "data-field": "gender" }, [], {
        input: (ev) => handlers.onChange({ gender: (ev.target as HTMLInputElement).value }),
      }),
    ]),
    h("label", {}, [
      i18n.t("survey.demographics.origin"),
      h("input", { value: form.origin, "data-field": "origin" }, [], {
        input: (ev) => handlers.onChange({ origin: (ev.target as HTMLInputElement).value }),
      }),
    ]),
    h("label", {}, [
      i18n.t("survey.demographics.group"),
      h(
        "select",
        { "data-field": "group" },
        groups.map(([value, key]) =>
          h("option", value === form.group ? { value, selected: "selected" } : { value }, [i18n.t(key)]),
        ),
        { change: (ev) => handlers.onChange({ group: (ev.target as HTMLSelectElement).value }) },
      ),
    ]),
    h("button", { class: "primary", "data-role": "submit-survey" }, [i18n.t("common.save")], {
      click: () => handlers.onSubmit(),
    }),
  ]);
}
