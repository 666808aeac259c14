export const DEFAULT_PATTERNS = [
    { pattern: "^https://[^/]+/api/v1/feed/reels_tray/", kind: "story_tray" },
    { pattern: "^https://[^/]+/api/v1/feed/reels_media/", kind: "reel_media" },
    { pattern: "^https://[^/]+/api/v1/highlights/.*", kind: "highlight" },
];
/** First matching rule wins; null means unrelated (do not forward). */
export function classify(url, rules = DEFAULT_PATTERNS) {
    for (const rule of rules) {
        if (new RegExp(rule.pattern).test(url)) {
            return rule.kind;
        }
    }
    return null;
}
/** Parse a patterns JSON document (same shape as config/patterns.json). */
export function parsePatternsDocument(text) {
    const doc = JSON.parse(text);
    if (!Array.isArray(doc.patterns) || doc.patterns.length === 0) {
        throw new Error("patterns document needs a non-empty patterns array");
    }
    for (const rule of doc.patterns) {
        new RegExp(rule.pattern); // throws on an invalid pattern
    }
    return doc.patterns;
}
