/** Options page: daemon URL, token, session label, and the pattern mirror. */
import { DEFAULT_PATTERNS, parsePatternsDocument } from "./patterns.js";
import { loadSettings, saveSettings } from "./settings.js";
function el(id) {
    const node = document.getElementById(id);
    if (!node) {
        throw new Error(`options page is missing #${id}`);
    }
    return node;
}
document.addEventListener("DOMContentLoaded", () => {
    void (async () => {
        const settings = await loadSettings();
        el("daemon-url").value = settings.daemonUrl;
        el("token").value = settings.token;
        el("session-label").value = settings.sessionLabel;
        el("patterns").value = JSON.stringify({ patterns: settings.patterns }, null, 2);
    })();
    el("save").addEventListener("click", () => {
        void (async () => {
            const status = el("status");
            try {
                const patterns = parsePatternsDocument(el("patterns").value);
                const current = await loadSettings();
                await saveSettings({
                    ...current,
                    daemonUrl: el("daemon-url").value.trim(),
                    token: el("token").value.trim(),
                    sessionLabel: el("session-label").value.trim(),
                    patterns,
                });
                status.textContent = "saved";
                status.className = "status ok";
            }
            catch (error) {
                status.textContent = `not saved: ${error.message}`;
                status.className = "status error";
            }
        })();
    });
    el("reset-patterns").addEventListener("click", () => {
        el("patterns").value = JSON.stringify({ patterns: DEFAULT_PATTERNS }, null, 2);
    });
});
