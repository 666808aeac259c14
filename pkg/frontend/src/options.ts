/** Options page: daemon URL, token, session label, and the pattern mirror. */
import { DEFAULT_PATTERNS, parsePatternsDocument } from "./patterns.js";
import { loadSettings, saveSettings } from "./settings.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`options page is missing #${id}`);
  }
  return node as T;
}

document.addEventListener("DOMContentLoaded", () => {
  void (async () => {
    const settings = await loadSettings();
    el<HTMLInputElement>("daemon-url").value = settings.daemonUrl;
    el<HTMLInputElement>("token").value = settings.token;
    el<HTMLInputElement>("session-label").value = settings.sessionLabel;
    el<HTMLTextAreaElement>("patterns").value = JSON.stringify(
      { patterns: settings.patterns },
      null,
      2,
    );
  })();

  el("save").addEventListener("click", () => {
    void (async () => {
      const status = el("status");
      try {
        const patterns = parsePatternsDocument(el<HTMLTextAreaElement>("patterns").value);
        const current = await loadSettings();
        await saveSettings({
          ...current,
          daemonUrl: el<HTMLInputElement>("daemon-url").value.trim(),
          token: el<HTMLInputElement>("token").value.trim(),
          sessionLabel: el<HTMLInputElement>("session-label").value.trim(),
          patterns,
        });
        status.textContent = "saved";
        status.className = "status ok";
      } catch (error) {
        status.textContent = `not saved: ${(error as Error).message}`;
        status.className = "status error";
      }
    })();
  });

  el("reset-patterns").addEventListener("click", () => {
    el<HTMLTextAreaElement>("patterns").value = JSON.stringify(
      { patterns: DEFAULT_PATTERNS },
      null,
      2,
    );
  });
});
