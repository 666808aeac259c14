/**
 * Mirror of the daemon's endpoint detection table. The extension only decides
 * *whether* to forward a response; all schema knowledge stays in the daemon,
 * so endpoint drift is fixed by editing patterns, not by shipping a release.
 *
 * Must stay in sync with config/patterns.json at the repository root
 * (enforced by test/patterns.test.ts).
 */
import type { EndpointKind, PatternRule } from "./types.js";

export const DEFAULT_PATTERNS: PatternRule[] = [
  { pattern: "^https://[^/]+/api/v1/feed/reels_tray/", kind: "story_tray" },
  { pattern: "^https://[^/]+/api/v1/feed/reels_media/", kind: "reel_media" },
  { pattern: "^https://[^/]+/api/v1/highlights/.*", kind: "highlight" },
];

/** First matching rule wins; null means unrelated (do not forward). */
export function classify(url: string, rules: PatternRule[] = DEFAULT_PATTERNS): EndpointKind | null {
  for (const rule of rules) {
    if (new RegExp(rule.pattern).test(url)) {
      return rule.kind;
    }
  }
  return null;
}

/** Parse a patterns JSON document (same shape as config/patterns.json). */
export function parsePatternsDocument(text: string): PatternRule[] {
  const doc = JSON.parse(text) as { patterns: PatternRule[] };
  if (!Array.isArray(doc.patterns) || doc.patterns.length === 0) {
    throw new Error("patterns document needs a non-empty patterns array");
  }
  for (const rule of doc.patterns) {
    new RegExp(rule.pattern); // throws on an invalid pattern
  }
  return doc.patterns;
}
