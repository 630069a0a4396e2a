/** Client view state and the client-side mirror of the server access gate.
 *
 * The mirror exists so the UI can route without a round trip; the server
 * stays authoritative and the integration tests compare both verdicts.
 */

export type View =
  | "dashboard"
  | "map"
  | "list"
  | "offer_form"
  | "settings"
  | "help"
  | "consent_flow"
  | "survey";

export interface ConsentInfo {
  study_consent: boolean;
  location_logging_consent: boolean;
  demographics_done: boolean;
  lsns_done: boolean;
  consented_at?: string | null;
  locale_shown?: string;
}

export interface GateState {
  full: boolean;
  missing: GateStep[];
}

export type GateStep = "consent" | "demographics" | "lsns";

const GATE_ORDER: [GateStep, (c: ConsentInfo) => boolean][] = [
  ["consent", (c) => c.study_consent],
  ["demographics", (c) => c.demographics_done],
  ["lsns", (c) => c.lsns_done],
];

/** Same rule the server applies: consent, then both onboarding surveys. */
export function gateFromConsent(consent: ConsentInfo): GateState {
  const missing = GATE_ORDER.filter(([, done]) => !done(consent)).map(([step]) => step);
  return { full: missing.length === 0, missing };
}

export function nextStep(gate: GateState): GateStep | null {
  return gate.full ? null : gate.missing[0];
}

/** Views that require the full gate; the rest work while restricted. */
const GATED_VIEWS: ReadonlySet<View> = new Set(["map", "list", "offer_form", "survey"]);
const SESSION_VIEWS: ReadonlySet<View> = new Set([
  "dashboard",
  "map",
  "list",
  "offer_form",
  "settings",
  "consent_flow",
  "survey",
]);

export function viewReachable(view: View, gate: GateState, hasSession: boolean): boolean {
  if (!hasSession) return !SESSION_VIEWS.has(view); // only help is public
  if (GATED_VIEWS.has(view)) return gate.full;
  return true;
}

export interface ClientViewState {
  activeView: View;
  locale: string;
  direction: "ltr" | "rtl";
  hasSession: boolean;
  dataVersion: number | null;
  pendingReviewCount: number;
  gate: GateState;
}

export function initialState(): ClientViewState {
  return {
    activeView: "help",
    locale: "en",
    direction: "ltr",
    hasSession: false,
    dataVersion: null,
    pendingReviewCount: 0,
    gate: { full: false, missing: ["consent", "demographics", "lsns"] },
  };
}

/** Route a navigation request through the gate; restricted users land on
 * the dashboard, which shows exactly the next onboarding step. */
export function navigate(state: ClientViewState, view: View): ClientViewState {
  const target = viewReachable(view, state.gate, state.hasSession)
    ? view
    : state.hasSession
      ? "dashboard"
      : "help";
  return { ...state, activeView: target };
}
