/** Settings: contact-channel toggles with reveal-on-enable detail fields,
 * language menu, and the home-location picker.
 */

import { ChannelSetting } from "../api.js";
import { Child, h, VNode } from "../dom.js";
import { I18n } from "../i18n.js";
import { localeMenu } from "./shell.js";

export const CHANNELS = ["email", "facebook", "phone", "whatsapp"] as const;
export type Channel = (typeof CHANNELS)[number];

const CHANNEL_LABEL: Record<Channel, string> = {
  email: "settings.channel_email",
  facebook: "settings.channel_facebook",
  phone: "settings.channel_phone",
  whatsapp: "settings.channel_whatsapp",
};

const DETAIL_LABEL: Record<Channel, string> = {
  email: "settings.detail_email",
  facebook: "settings.detail_facebook",
  phone: "settings.detail_phone",
  whatsapp: "settings.detail_whatsapp",
};

export interface SettingsFormState {
  contact: Record<Channel, ChannelSetting>;
  locale: string;
  homeLat: string;
  homeLon: string;
  savedFlash: boolean;
  error: string | null;
}

export interface SettingsHandlers {
  onToggle: (channel: Channel, enabled: boolean) => void;
  onDetail: (channel: Channel, detail: string) => void;
  onLocale: (locale: string) => void;
  onHome: (lat: string, lon: string) => void;
  onSave: () => void;
}

export function channelRow(
  i18n: I18n,
  channel: Channel,
  setting: ChannelSetting,
  handlers: SettingsHandlers,
): VNode {
  const toggle = h(
    "input",
    {
      type: "checkbox",
      "data-toggle": channel,
      ...(setting.enabled ? { checked: "checked" } : {}),
    },
    [],
    {
      change: (ev) => handlers.onToggle(channel, (ev.target as HTMLInputElement).checked),
    },
  );
  const children: Child[] = [
    h("label", { class: "toggle" }, [toggle, i18n.t(CHANNEL_LABEL[channel])]),
  ];
  if (setting.enabled) {
    // The detail field only exists while its channel is switched on.
    children.push(
      h("label", { class: "detail" }, [
        i18n.t(DETAIL_LABEL[channel]),
        h("input", { value: setting.detail, "data-detail": channel }, [], {
          input: (ev) => handlers.onDetail(channel, (ev.target as HTMLInputElement).value),
        }),
      ]),
    );
  }
  return h("div", { class: "channel-row", "data-channel": channel }, children);
}

export function settingsView(
  i18n: I18n,
  form: SettingsFormState,
  locales: string[],
  handlers: SettingsHandlers,
): VNode {
  const flash = form.savedFlash ? [h("p", { class: "flash" }, [i18n.t("settings.saved")])] : [];
  const error = form.error ? [h("p", { class: "banner error", "data-role": "form-error" }, [form.error])] : [];
  const anyEnabled = CHANNELS.some((c) => form.contact[c].enabled);
  const warning = anyEnabled
    ? []
    : [h("p", { class: "banner", "data-role": "no-channel-warning" }, [i18n.t("settings.no_channel_warning")])];

  return h("section", { class: "settings" }, [
    h("h1", {}, [i18n.t("settings.heading")]),
    ...flash,
    ...error,
    h("h2", {}, [i18n.t("settings.contact_question")]),
    ...warning,
    ...CHANNELS.map((channel) => channelRow(i18n, channel, form.contact[channel], handlers)),
    h("h2", {}, [i18n.t("settings.language_label")]),
    localeMenu(i18n, locales, handlers.onLocale),
    h("h2", {}, [i18n.t("settings.home_label")]),
    h("fieldset", { class: "position" }, [
      h("input", { value: form.homeLat, "data-field": "home-lat", inputmode: "decimal" }, [], {
        input: (ev) => handlers.onHome((ev.target as HTMLInputElement).value, form.homeLon),
      }),
      h("input", { value: form.homeLon, "data-field": "home-lon", inputmode: "decimal" }, [], {
        input: (ev) => handlers.onHome(form.homeLat, (ev.target as HTMLInputElement).value),
      }),
    ]),
    h("button", { class: "primary", "data-role": "save-settings" }, [i18n.t("settings.save")], {
      click: () => handlers.onSave(),
    }),
  ]);
}
