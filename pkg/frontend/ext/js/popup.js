/** Popup: live collection state, polled from the background every 2 s. */
import { exportCsvUrl } from "./daemon.js";
const POLL_MS = 2000;
function el(id) {
    const node = document.getElementById(id);
    if (!node) {
        throw new Error(`popup is missing #${id}`);
    }
    return node;
}
function render(state) {
    el("enabled").checked = state.settings.enabled;
    const health = el("health");
    health.textContent = state.healthy ? "daemon ok" : "daemon unreachable";
    health.className = state.healthy ? "health ok" : "health down";
    const label = el("session-label");
    if (document.activeElement !== label) {
        label.value = state.settings.sessionLabel;
    }
    const stats = state.stats;
    el("stat-items").textContent = stats ? String(stats.items) : "–";
    el("stat-observations").textContent = stats ? String(stats.observations) : "–";
    el("stat-sessions").textContent = stats ? String(stats.sessions) : "–";
    el("stat-pending").textContent = stats ? String(stats.pending_media) : "–";
    const c = state.counters;
    el("ctr-sent").textContent = String(c.envelopesSent);
    el("ctr-new").textContent = String(c.itemsNew);
    el("ctr-errors").textContent = String(c.errors);
    el("ctr-buffered").textContent = String(c.buffered);
}
async function refresh() {
    const state = (await browser.runtime.sendMessage({ type: "get_state" }));
    render(state);
}
document.addEventListener("DOMContentLoaded", () => {
    void refresh();
    setInterval(() => void refresh(), POLL_MS);
    el("enabled").addEventListener("change", (event) => {
        const enabled = event.target.checked;
        void browser.runtime.sendMessage({ type: "set_enabled", enabled }).then(refresh);
    });
    el("session-label").addEventListener("change", (event) => {
        const label = event.target.value.trim();
        void browser.runtime.sendMessage({ type: "set_session_label", label });
    });
    el("new-session").addEventListener("click", () => {
        const label = el("session-label").value.trim();
        void browser.runtime.sendMessage({ type: "new_session", label }).then(refresh);
    });
    el("export-csv").addEventListener("click", () => {
        void (async () => {
            const state = (await browser.runtime.sendMessage({ type: "get_state" }));
            const stored = await browser.storage.local.get("settings");
            const token = (stored.settings ?? {}).token ?? "";
            const url = exportCsvUrl({
                enabled: state.settings.enabled,
                daemonUrl: state.settings.daemonUrl,
                sessionLabel: state.settings.sessionLabel,
                token,
                patterns: [],
            }, false);
            await browser.tabs.create({ url });
        })();
    });
    el("open-options").addEventListener("click", () => {
        void browser.runtime.openOptionsPage();
    });
});
