function base(settings) {
    return settings.daemonUrl.replace(/\/+$/, "");
}
export async function fetchHealth(settings, http = (url, init) => fetch(url, init)) {
    try {
        const response = await http(`${base(settings)}/api/v1/health`);
        return response.status === 200;
    }
    catch {
        return false;
    }
}
export async function fetchStats(settings, http = (url, init) => fetch(url, init)) {
    try {
        const response = await http(`${base(settings)}/api/v1/stats`, {
            headers: { Authorization: `Bearer ${settings.token}` },
        });
        if (response.status !== 200) {
            return null;
        }
        return JSON.parse(await response.text());
    }
    catch {
        return null;
    }
}
export async function createSession(settings, label, http = (url, init) => fetch(url, init)) {
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
    }
    catch {
        return false;
    }
}
/** Download link for the CSV; the token travels as a query parameter so a
 * plain browser navigation can carry it. */
export function exportCsvUrl(settings, pseudonymize = false) {
    const url = new URL(`${base(settings)}/api/v1/export.csv`);
    url.searchParams.set("token", settings.token);
    if (pseudonymize) {
        url.searchParams.set("pseudonymize", "true");
    }
    return url.toString();
}
