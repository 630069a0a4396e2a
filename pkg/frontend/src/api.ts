/** Typed client for the /v1 JSON API. */

export interface ApiError {
  code: string;
  message: string;
  details?: Record<string, unknown>;
}

export class ApiFailure extends Error {
  constructor(public status: number, public body: ApiError) {
    super(`${body.code}: ${body.message}`);
  }
}

export interface ContactLink {
  channel: string;
  label: string;
  uri: string;
}

export interface OfferCard {
  offer_id: string;
  title: string;
  description: string;
  photo_ref: string | null;
  pickup_position: { lat: number; lon: number; recorded_at: string };
  created_at: string;
  distance_km: number;
  owner: {
    user_id: string;
    display_name: string;
    star_count: number;
    contact_links: ContactLink[];
  };
}

export interface PendingTask {
  task_id: string;
  offer_id: string;
  offer_title: string | null;
  created_at: string;
  state: string;
}

export interface ChannelSetting {
  enabled: boolean;
  detail: string;
}

export interface Profile {
  user_id: string;
  display_name: string;
  locale: string;
  user_group: string;
  moderator: boolean;
  contact_methods: Record<string, ChannelSetting>;
  home_position: { lat: number; lon: number } | null;
  last_position: { lat: number; lon: number } | null;
  approval: { status: string; reason: string | null };
  star_count: number;
  blocked_ids: string[];
  consent: {
    study_consent: boolean;
    location_logging_consent: boolean;
    demographics_done: boolean;
    lsns_done: boolean;
    consented_at: string | null;
    locale_shown: string;
  };
  gate: { full: boolean; missing: string[] };
  available: boolean;
}

export class ApiClient {
  token: string | null = null;

  constructor(public base: string = "") {}

  private async request<T>(method: string, path: string, body?: unknown, raw?: BodyInit, contentType?: string): Promise<T> {
    const headers: Record<string, string> = {};
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    let payload: BodyInit | undefined;
    if (raw !== undefined) {
      payload = raw;
      if (contentType) headers["Content-Type"] = contentType;
    } else if (body !== undefined) {
      payload = JSON.stringify(body);
      headers["Content-Type"] = "application/json";
    }
    const response = await fetch(this.base + path, { method, headers, body: payload });
    if (!response.ok) {
      let parsed: ApiError;
      try {
        parsed = (await response.json()) as ApiError;
      } catch {
        parsed = { code: "http_error", message: String(response.status) };
      }
      throw new ApiFailure(response.status, parsed);
    }
    return (await response.json()) as T;
  }

  localization(locale: string) {
    return this.request<import("./i18n.js").Bundle>("GET", `/v1/localizations/${locale}`);
  }

  versionStamp() {
    return this.request<{ stamp: number }>("GET", "/v1/version-stamp");
  }

  signup(body: Record<string, unknown>) {
    return this.request<{ user_id: string; state: string }>("POST", "/v1/users", body);
  }

  async login(body: Record<string, unknown>) {
    const session = await this.request<{ token: string; user_id: string; expires_at: string }>(
      "POST",
      "/v1/sessions",
      body,
    );
    this.token = session.token;
    return session;
  }

  async logout() {
    await this.request("DELETE", "/v1/sessions/current");
    this.token = null;
  }

  me() {
    return this.request<Profile>("GET", "/v1/users/me");
  }

  updateMe(body: Record<string, unknown>) {
    return this.request<Profile>("PATCH", "/v1/users/me", body);
  }

  updateLocation(lat: number, lon: number) {
    return this.request<{ available: boolean }>("PATCH", "/v1/users/me/location", { lat, lon });
  }

  gate() {
    return this.request<{ full: boolean; missing: string[]; consent: Profile["consent"] }>(
      "GET",
      "/v1/study/gate",
    );
  }

  recordConsent(study: boolean, location: boolean, localeShown: string) {
    return this.request("POST", "/v1/study/consent", {
      study_consent: study,
      location_logging_consent: location,
      locale_shown: localeShown,
    });
  }

  submitSurvey(instrument: string, body: Record<string, unknown>) {
    return this.request("POST", `/v1/study/surveys/${instrument}`, body);
  }

  offers(params: Record<string, string> = {}) {
    const query = new URLSearchParams(params).toString();
    return this.request<{ data_version: number; region: string; offers: OfferCard[] }>(
      "GET",
      `/v1/offers${query ? "?" + query : ""}`,
    );
  }

  createOffer(body: Record<string, unknown>) {
    return this.request<{ offer_id: string }>("POST", "/v1/offers", body);
  }

  pendingReviews() {
    return this.request<{ tasks: PendingTask[] }>("GET", "/v1/reviews/pending");
  }

  submitReview(body: Record<string, unknown>) {
    return this.request("POST", "/v1/reviews", body);
  }

  dismissReview(taskId: string) {
    return this.request("POST", `/v1/reviews/${taskId}/dismiss`);
  }

  uploadBlob(data: Blob, contentType: string) {
    return this.request<{ blob_id: string }>("POST", "/v1/blobs", undefined, data, contentType);
  }

  blobUrl(blobId: string): string {
    return `${this.base}/v1/blobs/${blobId}`;
  }
}
