/** Settings live in extension-local storage; the background script is the
 * only writer of counters, the options/popup pages write settings. */
import { DEFAULT_PATTERNS } from "./patterns.js";
export const DEFAULT_SETTINGS = {
    enabled: false,
    daemonUrl: "http://127.0.0.1:8089",
    token: "",
    sessionLabel: "",
    patterns: DEFAULT_PATTERNS,
};
export async function loadSettings() {
    const stored = await browser.storage.local.get("settings");
    const settings = (stored.settings ?? {});
    return { ...DEFAULT_SETTINGS, ...settings };
}
export async function saveSettings(settings) {
    await browser.storage.local.set({ settings });
}
