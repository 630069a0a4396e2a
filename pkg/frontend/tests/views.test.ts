import { beforeAll, describe, expect, test } from "vitest";
import { readFileSync } from "node:fs";

import { findAll, textOf, VNode } from "../src/dom.js";
import { Bundle, I18n } from "../src/i18n.js";
import { gateFromConsent, initialState } from "../src/state.js";
import { dashboard, reviewForm } from "../src/views/dashboard.js";
import { helpView, HELP_SECTIONS } from "../src/views/help.js";
import { listView, mapView, offerCard } from "../src/views/offers.js";
import { channelRow, settingsView, SettingsFormState } from "../src/views/settings.js";
import { shell } from "../src/views/shell.js";
import type { OfferCard, PendingTask } from "../src/api.js";

// The real shipped bundles, straight from the backend package.
const LOCALE_DIR = new URL("../../src/geogive/data/locales/", import.meta.url).pathname;

function loadBundle(locale: string): Bundle {
  return JSON.parse(readFileSync(`${LOCALE_DIR}${locale}.json`, "utf-8")) as Bundle;
}

let en: I18n;
let ar: I18n;

beforeAll(() => {
  en = new I18n(loadBundle("en"));
  ar = new I18n(loadBundle("ar"));
});

const noHandlers = {
  onStartStep: () => {},
  onOpenReview: () => {},
  onDismissReview: () => {},
};

function consent(study: boolean, demo: boolean, lsns: boolean) {
  return {
    study_consent: study,
    location_logging_consent: false,
    demographics_done: demo,
    lsns_done: lsns,
  };
}

describe("i18n", () => {
  test("missing keys render a visible marker, never empty text", () => {
    expect(en.t("nav.map")).toBe("Map");
    expect(en.t("does.not.exist")).toContain("does.not.exist");
  });

  test("arabic bundle is right-to-left", () => {
    expect(ar.direction).toBe("rtl");
    expect(en.direction).toBe("ltr");
  });
});

describe("shell", () => {
  const handlers = {
    onNavigate: () => {},
    onRefresh: () => {},
    onLocaleChange: () => {},
    onLogout: () => {},
  };

  test("locale switch to arabic flips the layout direction", () => {
    const state = { ...initialState(), hasSession: true, gate: gateFromConsent(consent(true, true, true)) };
    const english = shell(en, state, ["ar", "de", "en"], "x", handlers, false);
    expect(english.attrs.dir).toBe("ltr");
    const arabic = shell(ar, { ...state, direction: "rtl" }, ["ar", "de", "en"], "x", handlers, false);
    expect(arabic.attrs.dir).toBe("rtl");
  });

  test("refresh control is the last element of the navigation bar", () => {
    const state = { ...initialState(), hasSession: true, gate: gateFromConsent(consent(true, true, true)) };
    const tree = shell(en, state, ["en"], "x", handlers, false);
    const nav = findAll(tree, (v) => v.tag === "nav")[0];
    const last = nav.children[nav.children.length - 1] as VNode;
    expect(last.attrs["data-role"]).toBe("refresh");
  });

  test("gated nav entries disappear while restricted", () => {
    const restricted = {
      ...initialState(),
      hasSession: true,
      gate: gateFromConsent(consent(true, false, false)),
    };
    const tree = shell(en, restricted, ["en"], "x", handlers, false);
    const views = findAll(tree, (v) => v.attrs["data-view"] !== undefined).map((v) => v.attrs["data-view"]);
    expect(views).toEqual(["dashboard", "settings", "help"]);
  });
});

describe("dashboard gate mirror", () => {
  test.each([
    [consent(false, false, false), "consent"],
    [consent(true, false, false), "demographics"],
    [consent(true, true, false), "lsns"],
    [consent(false, true, true), "consent"],
  ])("restricted state renders exactly one actionable step", (c, step) => {
    const tree = dashboard(en, gateFromConsent(c), [], noHandlers);
    const buttons = findAll(tree, (v) => v.tag === "button");
    expect(buttons).toHaveLength(1);
    expect(buttons[0].attrs["data-step"]).toBe(step);
  });

  test("full gate renders the pending review feed instead", () => {
    const tasks: PendingTask[] = [
      { task_id: "t1", offer_id: "o1", offer_title: "Lamp", created_at: "", state: "pending" },
    ];
    const tree = dashboard(en, gateFromConsent(consent(true, true, true)), tasks, noHandlers);
    expect(findAll(tree, (v) => v.attrs["data-step"] !== undefined)).toHaveLength(0);
    expect(findAll(tree, (v) => v.attrs["data-task"] === "t1")).toHaveLength(1);
    expect(findAll(tree, (v) => v.attrs["data-role"] === "open-review")).toHaveLength(1);
    expect(findAll(tree, (v) => v.attrs["data-role"] === "dismiss-review")).toHaveLength(1);
  });

  test("review form carries the with-whom/where/how and rating fields", () => {
    const form = {
      task: { task_id: "t1", offer_id: "o1", offer_title: null, created_at: "", state: "pending" },
      counterparty: "",
      place: "",
      placeCategory: "other",
      channel: "whatsapp",
      satisfaction: 3,
      likelyRepeat: 3,
    };
    const tree = reviewForm(en, form, { onChange: () => {}, onSubmit: () => {}, onCancel: () => {} });
    for (const field of ["with-whom", "where", "how-contacted"]) {
      expect(findAll(tree, (v) => v.attrs["data-field"] === field)).toHaveLength(1);
    }
    for (const scale of ["satisfaction", "likely-repeat"]) {
      const dots = findAll(tree, (v) => v.attrs["data-role"] === scale);
      expect(dots).toHaveLength(1);
      expect(findAll(dots[0], (v) => v.attrs["data-value"] !== undefined)).toHaveLength(5);
    }
  });
});

describe("help page", () => {
  test("exposes exactly the five sections", () => {
    const tree = helpView(en, ["en"], null, { onLocaleChange: () => {}, onRevokeConsent: () => {} });
    const sections = findAll(tree, (v) => v.attrs["data-section"] !== undefined).map(
      (v) => v.attrs["data-section"],
    );
    expect(sections).toEqual([...HELP_SECTIONS]);
    expect(sections).toEqual(["help", "rules", "contact", "privacy", "consent"]);
  });

  test("consent section re-displays stored consent with a revoke control", () => {
    const tree = helpView(en, ["en"], consent(true, false, true), {
      onLocaleChange: () => {},
      onRevokeConsent: () => {},
    });
    expect(findAll(tree, (v) => v.attrs["data-role"] === "stored-consent")).toHaveLength(1);
    expect(findAll(tree, (v) => v.attrs["data-role"] === "revoke-consent")).toHaveLength(1);
    const flags = findAll(tree, (v) => v.attrs["data-flag"] !== undefined);
    expect(textOf(flags.find((v) => v.attrs["data-flag"] === "study")!)).toBe(en.t("common.yes"));
    expect(textOf(flags.find((v) => v.attrs["data-flag"] === "location")!)).toBe(en.t("common.no"));
  });

  test("locale menu is present on the help page", () => {
    const tree = helpView(en, ["ar", "de", "en"], null, { onLocaleChange: () => {}, onRevokeConsent: () => {} });
    expect(findAll(tree, (v) => v.attrs["data-role"] === "locale-menu")).toHaveLength(1);
  });
});

describe("settings", () => {
  const handlers = {
    onToggle: () => {},
    onDetail: () => {},
    onLocale: () => {},
    onHome: () => {},
    onSave: () => {},
  };

  test("enabling a toggle reveals its detail field, disabling hides it", () => {
    const off = channelRow(en, "phone", { enabled: false, detail: "" }, handlers);
    expect(findAll(off, (v) => v.attrs["data-detail"] === "phone")).toHaveLength(0);
    const on = channelRow(en, "phone", { enabled: true, detail: "+49" }, handlers);
    expect(findAll(on, (v) => v.attrs["data-detail"] === "phone")).toHaveLength(1);
  });

  test("warns when every channel is disabled", () => {
    const form: SettingsFormState = {
      contact: {
        email: { enabled: false, detail: "" },
        facebook: { enabled: false, detail: "" },
        phone: { enabled: false, detail: "" },
        whatsapp: { enabled: false, detail: "" },
      },
      locale: "en",
      homeLat: "",
      homeLon: "",
      savedFlash: false,
      error: null,
    };
    const tree = settingsView(en, form, ["en"], handlers);
    expect(findAll(tree, (v) => v.attrs["data-role"] === "no-channel-warning")).toHaveLength(1);
    form.contact.whatsapp = { enabled: true, detail: "+49151" };
    const fixed = settingsView(en, form, ["en"], handlers);
    expect(findAll(fixed, (v) => v.attrs["data-role"] === "no-channel-warning")).toHaveLength(0);
  });
});

describe("offers", () => {
  const offer: OfferCard = {
    offer_id: "o1",
    title: "Blue bike",
    description: "",
    photo_ref: null,
    pickup_position: { lat: 51.955, lon: 7.625, recorded_at: "" },
    created_at: "",
    distance_km: 0.4,
    owner: {
      user_id: "u1",
      display_name: "Ada",
      star_count: 2,
      contact_links: [{ channel: "whatsapp", label: "+4915112345678", uri: "https://wa.me/4915112345678" }],
    },
  };

  test("offer card shows star count and channel links from the server", () => {
    const card = offerCard(en, offer, null);
    const star = findAll(card, (v) => v.attrs.class === "star")[0];
    expect(textOf(star)).toContain("2");
    const links = findAll(card, (v) => v.tag === "a");
    expect(links).toHaveLength(1);
    expect(links[0].attrs.href).toBe("https://wa.me/4915112345678");
    expect(links[0].attrs["data-channel"]).toBe("whatsapp");
  });

  test("map renders one pin per offer and opens the tapped card", () => {
    const viewer = { lat: 51.96, lon: 7.62 };
    const offers = [offer, { ...offer, offer_id: "o2", title: "Lamp" }];
    const closed = mapView(en, offers, viewer, null, () => null, { onSelect: () => {} }, { tileTemplate: "{z}/{x}/{y}" });
    expect(findAll(closed, (v) => v.attrs.class?.startsWith("pin"))).toHaveLength(2);
    expect(findAll(closed, (v) => v.attrs.class === "offer-card")).toHaveLength(0);
    const open = mapView(en, offers, viewer, offers[0], () => null, { onSelect: () => {} }, { tileTemplate: "{z}/{x}/{y}" });
    expect(findAll(open, (v) => v.attrs["data-offer"] === "o1" && v.attrs.class === "offer-card")).toHaveLength(1);
    expect(findAll(open, (v) => v.tag === "img" && v.attrs.class === "tile").length).toBeGreaterThan(0);
  });

  test("missing device position shows the manual-position banner", () => {
    const tree = mapView(en, [], null, null, () => null, { onSelect: () => {} });
    expect(findAll(tree, (v) => v.attrs["data-role"] === "position-banner")).toHaveLength(1);
  });

  test("empty list view explains itself", () => {
    const tree = listView(en, [], () => null);
    expect(textOf(tree)).toBe(en.t("offer.none_visible"));
  });
});
