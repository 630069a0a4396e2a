/** Help page: exactly five localized sections, with the stored consent and
 * a revoke control inside the consent section.
 */

import { Child, h, VNode } from "../dom.js";
import { I18n } from "../i18n.js";
import { ConsentInfo } from "../state.js";
import { localeMenu } from "./shell.js";

export const HELP_SECTIONS = ["help", "rules", "contact", "privacy", "consent"] as const;
export type HelpSection = (typeof HELP_SECTIONS)[number];

export interface HelpHandlers {
  onLocaleChange: (locale: string) => void;
  onRevokeConsent: () => void;
}

export function helpView(
  i18n: I18n,
  locales: string[],
  consent: ConsentInfo | null,
  handlers: HelpHandlers,
): VNode {
  const sections = HELP_SECTIONS.map((section) => {
    const body: Child[] = [
      h("h2", {}, [i18n.t(`help.section_${section}`)]),
      h("p", {}, [i18n.t(`help.body_${section}`)]),
    ];
    if (section === "consent" && consent) {
      body.push(
        h("dl", { class: "consent-state", "data-role": "stored-consent" }, [
          h("dt", {}, [i18n.t("consent.study_label")]),
          h("dd", { "data-flag": "study" }, [i18n.t(consent.study_consent ? "common.yes" : "common.no")]),
          h("dt", {}, [i18n.t("consent.location_label")]),
          h("dd", { "data-flag": "location" }, [
            i18n.t(consent.location_logging_consent ? "common.yes" : "common.no"),
          ]),
        ]),
        h("button", { "data-role": "revoke-consent" }, [i18n.t("consent.revoke")], {
          click: () => handlers.onRevokeConsent(),
        }),
      );
    }
    return h("section", { class: "help-section", "data-section": section }, body);
  });

  return h("section", { class: "help" }, [
    h("h1", {}, [i18n.t("help.heading")]),
    localeMenu(i18n, locales, handlers.onLocaleChange),
    ...sections,
  ]);
}
