/** Localization bundles fetched from the server; every rendered string
 * resolves through `I18n.t` (enforced by scripts/lint-strings.mjs).
 */

export interface Bundle {
  locale: string;
  name: string;
  direction: "ltr" | "rtl";
  strings: Record<string, string>;
  fallback?: boolean;
  requested?: string;
  available?: string[];
}

export class I18n {
  constructor(public bundle: Bundle) {}

  t(key: string): string {
    const value = this.bundle.strings[key];
    // A visible marker beats silently rendering nothing.
    return value !== undefined ? value : `⟦${key}⟧`;
  }

  get direction(): "ltr" | "rtl" {
    return this.bundle.direction;
  }

  get locale(): string {
    return this.bundle.locale;
  }

  /** True when the server substituted English for an unknown locale. */
  get usedFallback(): boolean {
    return this.bundle.fallback === true;
  }
}
