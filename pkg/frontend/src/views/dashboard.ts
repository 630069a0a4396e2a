/** Dashboard: the onboarding ladder for restricted users, pending reviews
 * for everyone else. While restricted, the next missing step is the single
 * actionable element on the screen.
 */

import { h, VNode } from "../dom.js";
import { I18n } from "../i18n.js";
import { PendingTask } from "../api.js";
import { GateState, GateStep, nextStep } from "../state.js";

const STEP_LABEL: Record<GateStep, string> = {
  consent: "gate.step_consent",
  demographics: "gate.step_demographics",
  lsns: "gate.step_lsns",
};

export interface DashboardHandlers {
  onStartStep: (step: GateStep) => void;
  onOpenReview: (task: PendingTask) => void;
  onDismissReview: (task: PendingTask) => void;
}

export function dashboard(
  i18n: I18n,
  gate: GateState,
  tasks: PendingTask[],
  handlers: DashboardHandlers,
): VNode {
  if (!gate.full) {
    const step = nextStep(gate)!;
    return h("section", { class: "dashboard restricted" }, [
      h("h1", {}, [i18n.t("dashboard.heading")]),
      h("p", { "data-role": "gate-hint" }, [i18n.t("gate.next_step_hint")]),
      h(
        "button",
        { class: "primary", "data-role": "next-step", "data-step": step },
        [i18n.t(STEP_LABEL[step])],
        { click: () => handlers.onStartStep(step) },
      ),
    ]);
  }

  const taskList = tasks.length
    ? tasks.map((task) =>
        h("li", { class: "task", "data-task": task.task_id }, [
          h("span", { class: "task-title" }, [task.offer_title ?? task.offer_id]),
          h("button", { "data-role": "open-review" }, [i18n.t("review.heading")], {
            click: () => handlers.onOpenReview(task),
          }),
          h("button", { "data-role": "dismiss-review" }, [i18n.t("review.dismiss")], {
            click: () => handlers.onDismissReview(task),
          }),
        ]),
      )
    : [h("li", { class: "empty" }, [i18n.t("dashboard.no_tasks")])];

  return h("section", { class: "dashboard full" }, [
    h("h1", {}, [i18n.t("dashboard.heading")]),
    h("h2", {}, [i18n.t("dashboard.pending_reviews")]),
    h("ul", { class: "tasks" }, taskList),
  ]);
}

export interface ReviewFormState {
  task: PendingTask;
  counterparty: string;
  place: string;
  placeCategory: string;
  channel: string;
  satisfaction: number;
  likelyRepeat: number;
}

export interface ReviewHandlers {
  onChange: (patch: Partial<ReviewFormState>) => void;
  onSubmit: () => void;
  onCancel: () => void;
}

const PLACE_OPTIONS: [string, string][] = [
  ["my_home", "review.place_my_home"],
  ["their_home", "review.place_their_home"],
  ["public_place", "review.place_public"],
  ["other", "review.place_other"],
];

const CHANNEL_OPTIONS: [string, string][] = [
  ["email", "settings.channel_email"],
  ["facebook", "settings.channel_facebook"],
  ["phone", "settings.channel_phone"],
  ["whatsapp", "settings.channel_whatsapp"],
  ["other", "review.channel_other"],
];

function scale(i18n: I18n, name: string, value: number, onPick: (v: number) => void): VNode {
  return h(
    "div",
    { class: "scale", "data-role": name },
    [1, 2, 3, 4, 5].map((v) =>
      h("button", { class: v === value ? "dot active" : "dot", "data-value": String(v) }, [String(v)], {
        click: () => onPick(v),
      }),
    ),
  );
}

/** The hand-over review: with whom, where, how, plus two quality ratings. */
export function reviewForm(i18n: I18n, form: ReviewFormState, handlers: ReviewHandlers): VNode {
  return h("section", { class: "review-form" }, [
    h("h1", {}, [i18n.t("review.heading")]),
    h("label", {}, [
      i18n.t("review.with_whom"),
      h("input", { value: form.counterparty, "data-field": "with-whom" }, [], {
        input: (ev) => handlers.onChange({ counterparty: (ev.target as HTMLInputElement).value }),
      }),
    ]),
    h("label", {}, [
      i18n.t("review.where"),
      h("input", { value: form.place, "data-field": "where" }, [], {
        input: (ev) => handlers.onChange({ place: (ev.target as HTMLInputElement).value }),
      }),
    ]),
    h(
      "select",
      { "data-field": "place-category" },
      PLACE_OPTIONS.map(([value, key]) =>
        h("option", value === form.placeCategory ? { value, selected: "selected" } : { value }, [i18n.t(key)]),
      ),
      { change: (ev) => handlers.onChange({ placeCategory: (ev.target as HTMLSelectElement).value }) },
    ),
    h("label", {}, [
      i18n.t("review.how_contacted"),
      h(
        "select",
        { "data-field": "how-contacted" },
        CHANNEL_OPTIONS.map(([value, key]) =>
          h("option", value === form.channel ? { value, selected: "selected" } : { value }, [i18n.t(key)]),
        ),
        { change: (ev) => handlers.onChange({ channel: (ev.target as HTMLSelectElement).value }) },
      ),
    ]),
    h("label", {}, [i18n.t("review.satisfaction")]),
    scale(i18n, "satisfaction", form.satisfaction, (v) => handlers.onChange({ satisfaction: v })),
    h("label", {}, [i18n.t("review.likely_repeat")]),
    scale(i18n, "likely-repeat", form.likelyRepeat, (v) => handlers.onChange({ likelyRepeat: v })),
    h("button", { class: "primary", "data-role": "submit-review" }, [i18n.t("review.submit")], {
      click: () => handlers.onSubmit(),
    }),
    h("button", { "data-role": "cancel-review" }, [i18n.t("common.cancel")], {
      click: () => handlers.onCancel(),
    }),
  ]);
}
