/** Small client for the daemon's read endpoints used by the popup. */
import type { HttpClient } from "./forwarder.js";
import type { CaptureSettings, DaemonStats } from "./types.js";

function base(settings: CaptureSettings): string {
  return settings.daemonUrl.replace(/\/+$/, "");
}

export async function fetchHealth(
  settings: CaptureSettings,
  http: HttpClient = (url, init) => fetch(url, init),
): Promise<boolean> {
  try {
    const response = await http(`${base(settings)}/api/v1/health`);
    return response.status === 200;
  } catch {
    return false;
  }
}

export async function fetchStats(
  settings: CaptureSettings,
  http: HttpClient = (url, init) => fetch(url, init),
): Promise<DaemonStats | null> {
  try {
    const response = await http(`${base(settings)}/api/v1/stats`, {
      headers: { Authorization: `Bearer ${settings.token}` },
    });
    if (response.status !== 200) {
      return null;
    }
    return JSON.parse(await response.text()) as DaemonStats;
  } catch {
    return null;
  }
}

export async function createSession(
  settings: CaptureSettings,
  label: string,
  http: HttpClient = (url, init) => fetch(url, init),
): Promise<boolean> {
  try {
    const response = await http(`${base(settings)}/api/v1/sessions`, {
      method: "POST",
      headers: {
        "Content-Type": "application/json",
        Authorization: `Bearer ${settings.token}`,
      },
      body: JSON.stringify({ label }),
    });
    return response.status === 201;
  } catch {
    return false;
  }
}

/** Download link for the CSV; the token travels as a query parameter so a
 * plain browser navigation can carry it. */
export function exportCsvUrl(settings: CaptureSettings, pseudonymize = false): string {
  const url = new URL(`${base(settings)}/api/v1/export.csv`);
  url.searchParams.set("token", settings.token);
  if (pseudonymize) {
    url.searchParams.set("pseudonymize", "true");
  }
  return url.toString();
}
