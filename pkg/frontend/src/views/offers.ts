/** Map and list browsing plus the offer card and posting form. */

import { OfferCard } from "../api.js";
import { Child, h, VNode } from "../dom.js";
import { I18n } from "../i18n.js";
import { DEFAULT_TILE_TEMPLATE, viewportLayout } from "../tiles.js";
import { PIN, SEPARATOR, STAR, WARNING } from "../symbols.js";

export interface OfferHandlers {
  onSelect: (offer: OfferCard | null) => void;
}

export function offerCard(i18n: I18n, offer: OfferCard, photoUrl: string | null): VNode {
  const photo = photoUrl ? [h("img", { src: photoUrl, class: "photo", alt: offer.title })] : [];
  return h("article", { class: "offer-card", "data-offer": offer.offer_id }, [
    ...photo,
    h("h3", { class: "title" }, [offer.title]),
    h("p", { class: "distance" }, [String(offer.distance_km), SEPARATOR.trim(), i18n.t("offer.distance_km")]),
    h("p", { class: "owner" }, [
      h("span", { class: "owner-name" }, [offer.owner.display_name]),
      h("span", { class: "star", title: i18n.t("offer.star_label") }, [
        STAR,
        String(offer.owner.star_count),
      ]),
    ]),
    h("h4", {}, [i18n.t("offer.contact_heading")]),
    h(
      "ul",
      { class: "contact-links" },
      offer.owner.contact_links.map((link) =>
        h("li", {}, [
          h("a", { href: link.uri, "data-channel": link.channel, rel: "noopener" }, [link.label]),
        ]),
      ),
    ),
  ]);
}

export function listView(
  i18n: I18n,
  offers: OfferCard[],
  photoUrlFor: (offer: OfferCard) => string | null,
): VNode {
  if (!offers.length) {
    return h("section", { class: "offer-list empty" }, [h("p", {}, [i18n.t("offer.none_visible")])]);
  }
  return h(
    "section",
    { class: "offer-list" },
    offers.map((offer) => offerCard(i18n, offer, photoUrlFor(offer))),
  );
}

export interface MapOptions {
  tileTemplate?: string;
  width?: number;
  height?: number;
  zoom?: number;
}

export function mapView(
  i18n: I18n,
  offers: OfferCard[],
  viewer: { lat: number; lon: number } | null,
  selected: OfferCard | null,
  photoUrlFor: (offer: OfferCard) => string | null,
  handlers: OfferHandlers,
  options: MapOptions = {},
): VNode {
  if (!viewer) {
    // No device position and no manual override yet.
    return h("section", { class: "map-view" }, [
      h("p", { class: "banner", "data-role": "position-banner" }, [
        WARNING,
        " ",
        i18n.t("error.position_unavailable"),
      ]),
    ]);
  }
  const width = options.width ?? 640;
  const height = options.height ?? 480;
  const zoom = options.zoom ?? 14;
  const layout = viewportLayout(
    viewer.lat,
    viewer.lon,
    zoom,
    width,
    height,
    options.tileTemplate ?? DEFAULT_TILE_TEMPLATE,
  );

  const tiles = layout.tiles.map((tile) =>
    h("img", {
      src: tile.url,
      class: "tile",
      style: `left:${tile.left}px;top:${tile.top}px;width:256px;height:256px`,
      alt: "",
    }),
  );
  const pins = offers.map((offer) => {
    const point = layout.project(offer.pickup_position.lat, offer.pickup_position.lon);
    return h(
      "button",
      {
        class: selected?.offer_id === offer.offer_id ? "pin selected" : "pin",
        "data-offer": offer.offer_id,
        style: `left:${point.x.toFixed(1)}px;top:${point.y.toFixed(1)}px`,
        title: offer.title,
      },
      [PIN],
      { click: () => handlers.onSelect(offer) },
    );
  });

  const children: Child[] = [
    h("div", { class: "viewport", style: `width:${width}px;height:${height}px` }, [...tiles, ...pins]),
  ];
  if (selected) {
    children.push(offerCard(i18n, selected, photoUrlFor(selected)));
  }
  return h("section", { class: "map-view" }, children);
}

export interface OfferFormState {
  title: string;
  description: string;
  lat: string;
  lon: string;
  photoName: string | null;
}

export interface OfferFormHandlers {
  onChange: (patch: Partial<OfferFormState>) => void;
  onPhoto: (file: File) => void;
  onSubmit: () => void;
}

export function offerForm(i18n: I18n, form: OfferFormState, error: string | null, handlers: OfferFormHandlers): VNode {
  const banner = error ? [h("p", { class: "banner error", "data-role": "form-error" }, [error])] : [];
  return h("section", { class: "offer-form" }, [
    h("h1", {}, [i18n.t("offer.post_heading")]),
    ...banner,
    h("label", {}, [
      i18n.t("offer.title_label"),
      h("input", { value: form.title, "data-field": "title", maxlength: "120" }, [], {
        input: (ev) => handlers.onChange({ title: (ev.target as HTMLInputElement).value }),
      }),
    ]),
    h("label", {}, [
      i18n.t("offer.description_label"),
      h("textarea", { "data-field": "description" }, [form.description], {
        input: (ev) => handlers.onChange({ description: (ev.target as HTMLTextAreaElement).value }),
      }),
    ]),
    h("label", {}, [
      i18n.t("offer.photo_label"),
      h("input", { type: "file", accept: "image/*", "data-field": "photo" }, [], {
        change: (ev) => {
          const file = (ev.target as HTMLInputElement).files?.[0];
          if (file) handlers.onPhoto(file);
        },
      }),
    ]),
    h("fieldset", { class: "position" }, [
      h("legend", {}, [i18n.t("offer.pickup_label")]),
      h("input", { value: form.lat, "data-field": "lat", inputmode: "decimal" }, [], {
        input: (ev) => handlers.onChange({ lat: (ev.target as HTMLInputElement).value }),
      }),
      h("input", { value: form.lon, "data-field": "lon", inputmode: "decimal" }, [], {
        input: (ev) => handlers.onChange({ lon: (ev.target as HTMLInputElement).value }),
      }),
    ]),
    h("button", { class: "primary", "data-role": "submit-offer" }, [i18n.t("offer.submit")], {
      click: () => handlers.onSubmit(),
    }),
  ]);
}
