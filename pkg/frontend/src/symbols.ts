/** Language-neutral glyphs. Everything linguistic lives in the bundles;
 * this file is the only place raw display characters are allowed
 * (scripts/lint-strings.mjs skips it).
 */

export const STAR = "★"; // delivery-count badge
export const REFRESH_ARROW = "↻"; // refresh control glyph
export const PIN = "●"; // map marker dot
export const WARNING = "⚠"; // banner prefix
export const SEPARATOR = " · ";
