/**
 * Delivery engine: turns intercepted responses into envelopes and posts them
 * to the daemon, with a bounded retry buffer when the daemon is unreachable.
 *
 * Accounting invariant (checked by tests and verifiable against the daemon):
 * envelopesSent === delivered + buffered + dropped whenever no delivery is
 * in flight. 422 responses count as delivered (the daemon kept the raw body
 * in quarantine) and are never retried.
 */
import { classify } from "./patterns.js";
import { BoundedQueue } from "./queue.js";
import { zeroCounters } from "./types.js";
const BUFFER_CAPACITY = 100;
function defaultHttp() {
    return (url, init) => fetch(url, init);
}
function randomId() {
    if (typeof crypto !== "undefined" && "randomUUID" in crypto) {
        return crypto.randomUUID();
    }
    return `${Date.now().toString(16)}-${Math.random().toString(16).slice(2)}`;
}
export class Forwarder {
    constructor(settings, http = defaultHttp(), now = () => Math.floor(Date.now() / 1000), mintId = randomId) {
        this.settings = settings;
        this.http = http;
        this.now = now;
        this.mintId = mintId;
        this.counters = zeroCounters();
        this.buffer = new BoundedQueue(BUFFER_CAPACITY);
    }
    updateSettings(settings) {
        this.settings = settings;
    }
    get currentSettings() {
        return this.settings;
    }
    get bufferedEnvelopes() {
        return this.buffer.toArray();
    }
    /**
     * Entry point for intercepted traffic. Returns true when the response was
     * story-related and an envelope was produced (not necessarily delivered).
     */
    async handleResponse(url, method, status, body) {
        if (!this.settings.enabled) {
            return false;
        }
        if (classify(url, this.settings.patterns) === null) {
            return false;
        }
        const envelope = {
            envelope_id: `webext-${this.mintId()}`,
            source_url: url,
            method,
            status,
            captured_at: this.now(),
            session_id: this.settings.sessionLabel || null,
            body,
        };
        this.counters.envelopesSent += 1;
        await this.deliver(envelope);
        return true;
    }
    /** Retry everything in the buffer once; failures go back to the buffer. */
    async flush() {
        const waiting = this.buffer.drain();
        this.counters.buffered = this.buffer.length;
        let deliveredNow = 0;
        for (const envelope of waiting) {
            if (await this.deliver(envelope)) {
                deliveredNow += 1;
            }
        }
        return deliveredNow;
    }
    async deliver(envelope) {
        const base = this.settings.daemonUrl.replace(/\/+$/, "");
        try {
            const response = await this.http(`${base}/api/v1/envelopes`, {
                method: "POST",
                headers: {
                    "Content-Type": "application/json",
                    Authorization: `Bearer ${this.settings.token}`,
                },
                body: JSON.stringify(envelope),
            });
            if (response.status === 200) {
                const receipt = JSON.parse(await response.text());
                this.counters.delivered += 1;
                this.counters.itemsNew += receipt.items_new;
                this.counters.lastReceiptAt = this.now();
                return true;
            }
            if (response.status === 422) {
                // Delivered but unparsed; the daemon quarantined the raw body.
                this.counters.delivered += 1;
                this.counters.quarantined += 1;
                this.counters.lastReceiptAt = this.now();
                return true;
            }
            this.recordFailure(envelope);
            return false;
        }
        catch {
            this.recordFailure(envelope);
            return false;
        }
    }
    recordFailure(envelope) {
        this.counters.errors += 1;
        this.buffer.push(envelope);
        this.counters.buffered = this.buffer.length;
        this.counters.dropped = this.buffer.dropped;
    }
}
