/** App chrome: navigation bar (refresh top-right), locale menu, view switch. */

import { Child, h, VNode } from "../dom.js";
import { I18n } from "../i18n.js";
import { ClientViewState, View, viewReachable } from "../state.js";
import { REFRESH_ARROW } from "../symbols.js";

export interface ShellHandlers {
  onNavigate: (view: View) => void;
  onRefresh: () => void;
  onLocaleChange: (locale: string) => void;
  onLogout: () => void;
}

const NAV_ITEMS: [View, string][] = [
  ["dashboard", "nav.dashboard"],
  ["map", "nav.map"],
  ["list", "nav.list"],
  ["offer_form", "nav.offer_form"],
  ["settings", "nav.settings"],
  ["help", "nav.help"],
];

export function localeMenu(i18n: I18n, locales: string[], onChange: (locale: string) => void): VNode {
  return h(
    "select",
    { class: "locale-menu", "data-role": "locale-menu", "aria-label": i18n.t("settings.language_label") },
    locales.map((code) =>
      h("option", code === i18n.locale ? { value: code, selected: "selected" } : { value: code }, [code]),
    ),
    {
      change: (ev) => onChange((ev.target as HTMLSelectElement).value),
    },
  );
}

export function shell(
  i18n: I18n,
  state: ClientViewState,
  locales: string[],
  content: Child,
  handlers: ShellHandlers,
  staleData: boolean,
): VNode {
  const navButtons = NAV_ITEMS.filter(([view]) => viewReachable(view, state.gate, state.hasSession)).map(
    ([view, key]) =>
      h(
        "button",
        {
          class: state.activeView === view ? "nav-item active" : "nav-item",
          "data-view": view,
        },
        [i18n.t(key)],
        { click: () => handlers.onNavigate(view) },
      ),
  );

  const badge =
    state.pendingReviewCount > 0
      ? [h("span", { class: "badge", "data-role": "review-badge" }, [String(state.pendingReviewCount)])]
      : [];

  const refresh = h(
    "button",
    {
      class: staleData ? "refresh stale" : "refresh",
      "data-role": "refresh",
      title: staleData ? i18n.t("dashboard.refresh_hint") : i18n.t("nav.refresh"),
    },
    [REFRESH_ARROW],
    { click: () => handlers.onRefresh() },
  );

  const session = state.hasSession
    ? h("button", { class: "nav-item", "data-role": "logout" }, [i18n.t("nav.logout")], {
        click: () => handlers.onLogout(),
      })
    : h("span", {}, []);

  return h("div", { class: "app", dir: i18n.direction }, [
    h("nav", { class: "topbar" }, [
      h("span", { class: "brand" }, [i18n.t("app.title")]),
      ...navButtons,
      ...badge,
      session,
      localeMenu(i18n, locales, handlers.onLocaleChange),
      refresh, // stays in the top-right corner of the bar
    ]),
    h("main", { class: "content" }, [content]),
  ]);
}
