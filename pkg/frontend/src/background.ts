/**
 * Background page: the single forwarder. Tees story-related response bodies
 * out of the network stack without altering what the page receives, builds
 * envelopes, and delivers them to the daemon.
 */
import { createSession, fetchHealth, fetchStats } from "./daemon.js";
import { Forwarder } from "./forwarder.js";
import { classify } from "./patterns.js";
import { loadSettings, saveSettings } from "./settings.js";
import type { CaptureSettings } from "./types.js";

const FLUSH_INTERVAL_MS = 15000;

async function init(): Promise<void> {
  let settings = await loadSettings();
  const forwarder = new Forwarder(settings);
  const statusByRequest = new Map<string, number>();

  browser.storage.onChanged.addListener((changes, area) => {
    if (area === "local" && changes.settings) {
      settings = { ...settings, ...(changes.settings.newValue as Partial<CaptureSettings>) };
      forwarder.updateSettings(settings);
    }
  });

  browser.webRequest.onHeadersReceived.addListener(
    (details) => {
      if (settings.enabled && classify(details.url, settings.patterns) !== null) {
        statusByRequest.set(details.requestId, details.statusCode ?? 200);
      }
    },
    { urls: ["<all_urls>"], types: ["xmlhttprequest"] },
  );

  browser.webRequest.onBeforeRequest.addListener(
    (details) => {
      if (!settings.enabled || classify(details.url, settings.patterns) === null) {
        return {};
      }
      const filter = browser.webRequest.filterResponseData(details.requestId);
      const decoder = new TextDecoder("utf-8");
      const pieces: string[] = [];
      filter.ondata = (event) => {
        pieces.push(decoder.decode(event.data, { stream: true }));
        filter.write(event.data); // pass through unmodified
      };
      filter.onstop = () => {
        pieces.push(decoder.decode());
        filter.close();
        const status = statusByRequest.get(details.requestId) ?? 200;
        statusByRequest.delete(details.requestId);
        void forwarder.handleResponse(details.url, details.method, status, pieces.join(""));
      };
      filter.onerror = () => {
        try {
          filter.disconnect();
        } catch {
          // request already gone
        }
      };
      return {};
    },
    { urls: ["<all_urls>"], types: ["xmlhttprequest"] },
    ["blocking"],
  );

  setInterval(() => void forwarder.flush(), FLUSH_INTERVAL_MS);

  browser.runtime.onMessage.addListener((message) => {
    const msg = message as { type: string; label?: string; enabled?: boolean };
    switch (msg.type) {
      case "get_state":
        return (async () => ({
          settings: {
            enabled: settings.enabled,
            daemonUrl: settings.daemonUrl,
            sessionLabel: settings.sessionLabel,
          },
          counters: forwarder.counters,
          healthy: await fetchHealth(settings),
          stats: await fetchStats(settings),
        }))();
      case "set_enabled":
        return (async () => {
          settings = { ...settings, enabled: Boolean(msg.enabled) };
          forwarder.updateSettings(settings);
          await saveSettings(settings);
          return { ok: true };
        })();
      case "set_session_label":
        return (async () => {
          settings = { ...settings, sessionLabel: msg.label ?? "" };
          forwarder.updateSettings(settings);
          await saveSettings(settings);
          return { ok: true };
        })();
      case "new_session":
        return (async () => {
          const label = msg.label || settings.sessionLabel || `session-${Date.now()}`;
          const ok = await createSession(settings, label);
          if (ok) {
            settings = { ...settings, sessionLabel: label };
            forwarder.updateSettings(settings);
            await saveSettings(settings);
          }
          return { ok };
        })();
      case "flush":
        return forwarder.flush().then((n) => ({ delivered: n }));
      default:
        return;
    }
  });
}

void init();
