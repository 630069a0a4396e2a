/** Browser entry point: wires the API client, i18n, and views together.
 *
 * The session token lives in sessionStorage only; offer data (including
 * other users' contact links) is kept in memory and dies with the tab.
 */

import { ApiClient, ApiFailure, OfferCard, PendingTask, Profile } from "./api.js";
import { h, toDom, VNode } from "./dom.js";
import { Bundle, I18n } from "./i18n.js";
import {
  ClientViewState,
  GateStep,
  gateFromConsent,
  initialState,
  navigate,
  View,
} from "./state.js";
import { authView, AuthFormState } from "./views/auth.js";
import {
  consentView,
  demographicsSurvey,
  lsnsSurvey,
  susSurvey,
  usefulnessSurvey,
  USEFULNESS_DIMENSIONS,
} from "./views/consent.js";
import { dashboard, reviewForm, ReviewFormState } from "./views/dashboard.js";
import { helpView } from "./views/help.js";
import { listView, mapView, offerForm, OfferFormState } from "./views/offers.js";
import { CHANNELS, settingsView, SettingsFormState } from "./views/settings.js";
import { shell } from "./views/shell.js";

const LOCALE_KEY = "geogive.locale";
const TOKEN_KEY = "geogive.session";

class App {
  api = new ApiClient("");
  i18n = new I18n({ locale: "en", name: "", direction: "ltr", strings: {} });
  locales: string[] = ["en"];
  state: ClientViewState = initialState();
  profile: Profile | null = null;
  offers: OfferCard[] = [];
  tasks: PendingTask[] = [];
  selectedOffer: OfferCard | null = null;
  activeReview: ReviewFormState | null = null;
  activeSurvey: "demographics" | "lsns6" | "sus" | "usefulness" | null = null;
  surveyAnswers: (number | null)[] = [];
  demographics = { ageRange: "", gender: "", origin: "", group: "unspecified" };
  authForm: AuthFormState = {
    mode: "login",
    displayName: "",
    email: "",
    password: "",
    error: null,
    awaitingApproval: false,
  };
  offerFormState: OfferFormState = { title: "", description: "", lat: "", lon: "", photoName: null };
  offerFormError: string | null = null;
  pendingPhotoRef: string | null = null;
  settingsForm: SettingsFormState | null = null;
  viewerPosition: { lat: number; lon: number } | null = null;
  staleData = false;

  async boot(): Promise<void> {
    await this.loadLocale(localStorage.getItem(LOCALE_KEY) ?? navigator.language.slice(0, 2));
    const token = sessionStorage.getItem(TOKEN_KEY);
    if (token) {
      this.api.token = token;
      try {
        await this.refreshProfile();
        this.state = { ...this.state, hasSession: true, activeView: "dashboard" };
      } catch {
        this.api.token = null;
        sessionStorage.removeItem(TOKEN_KEY);
      }
    }
    window.addEventListener("hashchange", () => this.route());
    setInterval(() => this.pollVersion(), 15_000);
    this.route();
  }

  // -- i18n -------------------------------------------------------------

  async loadLocale(locale: string): Promise<void> {
    const bundle: Bundle = await this.api.localization(locale);
    this.i18n = new I18n(bundle);
    this.locales = bundle.available ?? [bundle.locale];
    this.state = { ...this.state, locale: bundle.locale, direction: bundle.direction };
    document.documentElement.dir = bundle.direction;
    document.documentElement.lang = bundle.locale;
    localStorage.setItem(LOCALE_KEY, locale);
  }

  async changeLocale(locale: string): Promise<void> {
    await this.loadLocale(locale);
    if (this.state.hasSession) {
      // Persist the preference; the locale-only PATCH works pre-consent.
      try {
        this.profile = await this.api.updateMe({ locale });
      } catch {
        // Offline or restricted: the UI language switched anyway.
      }
    }
    this.render();
  }

  // -- session / profile ---------------------------------------------------

  async refreshProfile(): Promise<void> {
    this.profile = await this.api.me();
    this.state = {
      ...this.state,
      hasSession: true,
      gate: gateFromConsent(this.profile.consent),
    };
    if (this.state.gate.full) {
      const pending = await this.api.pendingReviews();
      this.tasks = pending.tasks;
      this.state = { ...this.state, pendingReviewCount: pending.tasks.length };
    }
  }

  async submitAuth(): Promise<void> {
    const { mode, displayName, email, password } = this.authForm;
    try {
      if (mode === "signup") {
        await this.api.signup({ display_name: displayName, locale: this.i18n.locale, method: "email", email, password });
        this.authForm = { ...this.authForm, awaitingApproval: true, error: null };
      } else {
        const session = await this.api.login({ method: "email", email, password });
        sessionStorage.setItem(TOKEN_KEY, session.token);
        await this.refreshProfile();
        this.state = navigate({ ...this.state, hasSession: true }, "dashboard");
      }
    } catch (err) {
      this.authForm = { ...this.authForm, error: this.describe(err) };
    }
    this.render();
  }

  async logout(): Promise<void> {
    try {
      await this.api.logout();
    } finally {
      sessionStorage.removeItem(TOKEN_KEY);
      this.profile = null;
      this.state = initialState();
      this.state = { ...this.state, locale: this.i18n.locale, direction: this.i18n.direction };
      this.render();
    }
  }

  describe(err: unknown): string {
    if (err instanceof ApiFailure) {
      const code = err.body.code;
      const keyed: Record<string, string> = {
        consent_incomplete: "error.consent_required",
        no_contact_method: "error.no_contact_method",
        not_authorized: "error.not_authorized",
        trial_closed: "error.trial_closed",
        unknown_locale: "error.unknown_locale",
      };
      if (keyed[code]) return this.i18n.t(keyed[code]);
      if (code === "validation_failed" || code === "invalid_detail" || code === "invalid_position") {
        return this.i18n.t("error.validation");
      }
      return this.i18n.t("common.error");
    }
    return this.i18n.t("error.generic");
  }

  // -- data -------------------------------------------------------------------

  async loadOffers(view: "map" | "list", refresh = false): Promise<void> {
    const params: Record<string, string> = { view };
    if (refresh) params.refresh = "true";
    if (!this.profile?.last_position && this.viewerPosition) {
      params.lat = String(this.viewerPosition.lat);
      params.lon = String(this.viewerPosition.lon);
    }
    try {
      const data = await this.api.offers(params);
      this.offers = data.offers;
      this.state = { ...this.state, dataVersion: data.data_version };
      this.staleData = false;
    } catch (err) {
      if (err instanceof ApiFailure && err.body.code === "no_viewer_position") {
        this.offers = [];
        this.viewerPosition = null;
        this.requestGeolocation(view);
        return;
      }
      throw err;
    }
  }

  requestGeolocation(view: "map" | "list"): void {
    navigator.geolocation?.getCurrentPosition(async (pos) => {
      this.viewerPosition = { lat: pos.coords.latitude, lon: pos.coords.longitude };
      try {
        await this.api.updateLocation(pos.coords.latitude, pos.coords.longitude);
      } catch {
        // Manual override via query params still works.
      }
      await this.loadOffers(view);
      this.render();
    });
  }

  async pollVersion(): Promise<void> {
    if (!this.state.hasSession || !this.state.gate.full || this.state.dataVersion === null) return;
    try {
      const { stamp } = await this.api.versionStamp();
      if (stamp !== this.state.dataVersion && !this.staleData) {
        this.staleData = true; // light refresh hint; the button does the fetch
        this.render();
      }
    } catch {
      // Polling is best effort.
    }
  }

  async onRefresh(): Promise<void> {
    if (this.state.activeView === "map" || this.state.activeView === "list") {
      await this.loadOffers(this.state.activeView, true);
    } else if (this.state.hasSession) {
      await this.refreshProfile();
      this.staleData = false;
    }
    this.render();
  }

  // -- consent and surveys ------------------------------------------------------

  consentForm = { study: false, location: false };

  async submitConsent(): Promise<void> {
    try {
      await this.api.recordConsent(this.consentForm.study, this.consentForm.location, this.i18n.locale);
      await this.refreshProfile();
      this.state = navigate(this.state, "dashboard");
    } catch (err) {
      this.offerFormError = this.describe(err);
    }
    this.render();
  }

  startStep(step: GateStep): void {
    if (step === "consent") {
      this.state = { ...this.state, activeView: "consent_flow" };
    } else {
      this.activeSurvey = step === "demographics" ? "demographics" : "lsns6";
      this.surveyAnswers = new Array(step === "demographics" ? 0 : 6).fill(null);
      this.state = { ...this.state, activeView: "survey" };
    }
    this.render();
  }

  async submitSurvey(): Promise<void> {
    try {
      if (this.activeSurvey === "demographics") {
        await this.api.submitSurvey("demographics", {
          age_range: this.demographics.ageRange || null,
          gender: this.demographics.gender || null,
          origin_country: this.demographics.origin || null,
          user_group: this.demographics.group,
        });
      } else if (this.activeSurvey === "lsns6") {
        if (this.surveyAnswers.some((a) => a === null)) return;
        await this.api.submitSurvey("lsns6", { items: this.surveyAnswers });
      } else if (this.activeSurvey === "sus") {
        if (this.surveyAnswers.some((a) => a === null)) return;
        await this.api.submitSurvey("sus", { items: this.surveyAnswers });
      } else if (this.activeSurvey === "usefulness") {
        if (this.surveyAnswers.some((a) => a === null)) return;
        const ratings: Record<string, number> = {};
        USEFULNESS_DIMENSIONS.forEach((dim, i) => (ratings[dim] = this.surveyAnswers[i]!));
        await this.api.submitSurvey("usefulness", { ratings });
      }
      this.activeSurvey = null;
      await this.refreshProfile();
      this.state = navigate(this.state, "dashboard");
    } catch (err) {
      this.offerFormError = this.describe(err);
    }
    this.render();
  }

  // -- reviews ---------------------------------------------------------------

  openReview(task: PendingTask): void {
    this.activeReview = {
      task,
      counterparty: "",
      place: "",
      placeCategory: "other",
      channel: "whatsapp",
      satisfaction: 3,
      likelyRepeat: 3,
    };
    this.render();
  }

  async submitReview(): Promise<void> {
    const form = this.activeReview;
    if (!form) return;
    try {
      await this.api.submitReview({
        task_id: form.task.task_id,
        place: form.place,
        place_category: form.placeCategory,
        contact_channel: form.channel,
        satisfaction: form.satisfaction,
        likely_repeat: form.likelyRepeat,
        counterparty_id: form.counterparty || null,
      });
      this.activeReview = null;
      await this.refreshProfile();
    } catch (err) {
      this.offerFormError = this.describe(err);
    }
    this.render();
  }

  // -- offers ---------------------------------------------------------------

  async submitOffer(): Promise<void> {
    const form = this.offerFormState;
    try {
      await this.api.createOffer({
        title: form.title,
        description: form.description,
        photo_ref: this.pendingPhotoRef,
        pickup_position: { lat: Number(form.lat), lon: Number(form.lon) },
      });
      this.offerFormState = { title: "", description: "", lat: "", lon: "", photoName: null };
      this.pendingPhotoRef = null;
      this.offerFormError = null;
      this.state = navigate(this.state, "list");
      await this.loadOffers("list");
    } catch (err) {
      this.offerFormError = this.describe(err);
    }
    this.render();
  }

  async uploadPhoto(file: File): Promise<void> {
    try {
      const { blob_id } = await this.api.uploadBlob(file, file.type);
      this.pendingPhotoRef = blob_id;
      this.offerFormState = { ...this.offerFormState, photoName: file.name };
    } catch (err) {
      this.offerFormError = this.describe(err);
    }
    this.render();
  }

  // -- settings ----------------------------------------------------------------

  ensureSettingsForm(): SettingsFormState {
    if (!this.settingsForm && this.profile) {
      const contact = Object.fromEntries(
        CHANNELS.map((c) => [c, { ...(this.profile!.contact_methods[c] ?? { enabled: false, detail: "" }) }]),
      ) as SettingsFormState["contact"];
      this.settingsForm = {
        contact,
        locale: this.profile.locale,
        homeLat: this.profile.home_position ? String(this.profile.home_position.lat) : "",
        homeLon: this.profile.home_position ? String(this.profile.home_position.lon) : "",
        savedFlash: false,
        error: null,
      };
    }
    return this.settingsForm!;
  }

  async saveSettings(): Promise<void> {
    const form = this.ensureSettingsForm();
    const body: Record<string, unknown> = { contact_methods: form.contact };
    if (form.homeLat && form.homeLon) {
      body.home_position = { lat: Number(form.homeLat), lon: Number(form.homeLon) };
    }
    try {
      this.profile = await this.api.updateMe(body);
      this.settingsForm = { ...form, savedFlash: true, error: null };
    } catch (err) {
      this.settingsForm = { ...form, savedFlash: false, error: this.describe(err) };
    }
    this.render();
  }

  // -- routing / rendering -----------------------------------------------------

  route(): void {
    const view = (location.hash.replace(/^#\//, "") || this.state.activeView) as View;
    this.state = navigate(this.state, view);
    if (this.state.activeView === "map" || this.state.activeView === "list") {
      void this.loadOffers(this.state.activeView).then(() => this.render());
    }
    this.render();
  }

  content(): VNode {
    const i18n = this.i18n;
    if (!this.state.hasSession && this.state.activeView !== "help") {
      return authView(i18n, this.authForm, {
        onChange: (patch) => {
          this.authForm = { ...this.authForm, ...patch };
          this.render();
        },
        onSubmit: () => void this.submitAuth(),
        onSwitchMode: (mode) => {
          this.authForm = { ...this.authForm, mode, error: null };
          this.render();
        },
      });
    }
    if (this.activeReview) {
      return reviewForm(i18n, this.activeReview, {
        onChange: (patch) => {
          this.activeReview = { ...this.activeReview!, ...patch };
          this.render();
        },
        onSubmit: () => void this.submitReview(),
        onCancel: () => {
          this.activeReview = null;
          this.render();
        },
      });
    }
    switch (this.state.activeView) {
      case "dashboard":
        return dashboard(i18n, this.state.gate, this.tasks, {
          onStartStep: (step) => this.startStep(step),
          onOpenReview: (task) => this.openReview(task),
          onDismissReview: (task) =>
            void this.api.dismissReview(task.task_id).then(() => this.refreshProfile().then(() => this.render())),
        });
      case "map":
        return mapView(
          i18n,
          this.offers,
          this.profile?.last_position ?? this.viewerPosition,
          this.selectedOffer,
          (offer) => (offer.photo_ref ? this.api.blobUrl(offer.photo_ref) : null),
          {
            onSelect: (offer) => {
              this.selectedOffer = offer;
              this.render();
            },
          },
        );
      case "list":
        return listView(i18n, this.offers, (offer) =>
          offer.photo_ref ? this.api.blobUrl(offer.photo_ref) : null,
        );
      case "offer_form":
        return offerForm(i18n, this.offerFormState, this.offerFormError, {
          onChange: (patch) => {
            this.offerFormState = { ...this.offerFormState, ...patch };
            this.render();
          },
          onPhoto: (file) => void this.uploadPhoto(file),
          onSubmit: () => void this.submitOffer(),
        });
      case "settings":
        return settingsView(i18n, this.ensureSettingsForm(), this.locales, {
          onToggle: (channel, enabled) => {
            const form = this.ensureSettingsForm();
            form.contact[channel] = { ...form.contact[channel], enabled };
            this.settingsForm = { ...form, savedFlash: false };
            this.render();
          },
          onDetail: (channel, detail) => {
            const form = this.ensureSettingsForm();
            form.contact[channel] = { ...form.contact[channel], detail };
            this.settingsForm = { ...form, savedFlash: false };
          },
          onLocale: (locale) => void this.changeLocale(locale),
          onHome: (lat, lon) => {
            this.settingsForm = { ...this.ensureSettingsForm(), homeLat: lat, homeLon: lon };
          },
          onSave: () => void this.saveSettings(),
        });
      case "help":
        return helpView(i18n, this.locales, this.profile?.consent ?? null, {
          onLocaleChange: (locale) => void this.changeLocale(locale),
          onRevokeConsent: () =>
            void this.api
              .recordConsent(false, false, this.i18n.locale)
              .then(() => this.refreshProfile())
              .then(() => this.render()),
        });
      case "consent_flow":
        return consentView(i18n, this.consentForm, this.locales, {
          onChange: (patch) => {
            this.consentForm = { ...this.consentForm, ...patch };
            this.render();
          },
          onLocaleChange: (locale) => void this.changeLocale(locale),
          onSubmit: () => void this.submitConsent(),
        });
      case "survey": {
        const handlers = {
          onPick: (index: number, value: number) => {
            this.surveyAnswers[index] = value;
            this.render();
          },
          onSubmit: () => void this.submitSurvey(),
        };
        if (this.activeSurvey === "demographics") {
          return demographicsSurvey(i18n, this.demographics, {
            onChange: (patch) => {
              this.demographics = { ...this.demographics, ...patch };
              this.render();
            },
            onSubmit: () => void this.submitSurvey(),
          });
        }
        if (this.activeSurvey === "sus") return susSurvey(i18n, this.surveyAnswers, handlers);
        if (this.activeSurvey === "usefulness") return usefulnessSurvey(i18n, this.surveyAnswers, handlers);
        return lsnsSurvey(i18n, this.surveyAnswers, handlers);
      }
    }
  }

  render(): void {
    const root = document.getElementById("app");
    if (!root) return;
    const tree = shell(this.i18n, this.state, this.locales, this.content(), {
      onNavigate: (view) => {
        location.hash = `#/${view}`;
      },
      onRefresh: () => void this.onRefresh(),
      onLocaleChange: (locale) => void this.changeLocale(locale),
      onLogout: () => void this.logout(),
    }, this.staleData);
    root.replaceChildren(toDom(tree));
  }
}

const app = new App();
void app.boot();
// expose for manual poking from the devtools console
(window as unknown as Record<string, unknown>).geogive = app;

export { h }; // keeps the module shape stable for the static build
