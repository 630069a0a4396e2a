/** Sign-in / sign-up forms and the await-approval notice. */

import { h, VNode } from "../dom.js";
import { I18n } from "../i18n.js";

export interface AuthFormState {
  mode: "login" | "signup";
  displayName: string;
  email: string;
  password: string;
  error: string | null;
  awaitingApproval: boolean;
}

export interface AuthHandlers {
  onChange: (patch: Partial<AuthFormState>) => void;
  onSubmit: () => void;
  onSwitchMode: (mode: "login" | "signup") => void;
}

export function authView(i18n: I18n, form: AuthFormState, handlers: AuthHandlers): VNode {
  if (form.awaitingApproval) {
    return h("section", { class: "auth waiting", "data-role": "await-approval" }, [
      h("h1", {}, [i18n.t("auth.await_approval_title")]),
      h("p", {}, [i18n.t("auth.await_approval_body")]),
    ]);
  }
  const error = form.error ? [h("p", { class: "banner error", "data-role": "form-error" }, [form.error])] : [];
  const nameField =
    form.mode === "signup"
      ? [
          h("label", {}, [
            i18n.t("auth.display_name"),
            h("input", { value: form.displayName, "data-field": "display-name" }, [], {
              input: (ev) => handlers.onChange({ displayName: (ev.target as HTMLInputElement).value }),
            }),
          ]),
        ]
      : [];
  return h("section", { class: "auth" }, [
    h("h1", {}, [i18n.t(form.mode === "signup" ? "auth.sign_up" : "auth.sign_in")]),
    ...error,
    ...nameField,
    h("label", {}, [
      i18n.t("auth.email"),
      h("input", { value: form.email, type: "email", "data-field": "email" }, [], {
        input: (ev) => handlers.onChange({ email: (ev.target as HTMLInputElement).value }),
      }),
    ]),
    h("label", {}, [
      i18n.t("auth.password"),
      h("input", { value: form.password, type: "password", "data-field": "password" }, [], {
        input: (ev) => handlers.onChange({ password: (ev.target as HTMLInputElement).value }),
      }),
    ]),
    h("button", { class: "primary", "data-role": "submit-auth" }, [
      i18n.t(form.mode === "signup" ? "auth.sign_up" : "auth.sign_in"),
    ], { click: () => handlers.onSubmit() }),
    h(
      "button",
      { class: "link", "data-role": "switch-mode" },
      [i18n.t(form.mode === "signup" ? "nav.login" : "nav.signup")],
      { click: () => handlers.onSwitchMode(form.mode === "signup" ? "login" : "signup") },
    ),
  ]);
}
