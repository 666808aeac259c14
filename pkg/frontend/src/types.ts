/** Shared types for the capture client. */

export type EndpointKind = "story_tray" | "reel_media" | "highlight";

export interface PatternRule {
  pattern: string;
  kind: EndpointKind;
}

/** One intercepted response, in the daemon's envelope wire format. */
export interface EnvelopeDoc {
  envelope_id: string;
  source_url: string;
  method: string;
  status: number;
  captured_at: number;
  session_id: string | null;
  body: string;
}

export interface IngestReceipt {
  envelope_id: string;
  kind: string;
  items_parsed: number;
  items_new: number;
}

export interface DaemonStats {
  items: number;
  observations: number;
  sessions: number;
  pending_media: number;
  last_ingest_at: number | null;
}

export interface CaptureSettings {
  enabled: boolean;
  daemonUrl: string;
  token: string;
  sessionLabel: string;
  patterns: PatternRule[];
}

export interface Counters {
  /** envelopes produced from intercepted responses */
  envelopesSent: number;
  /** accepted by the daemon: 200 receipts plus 422 quarantines */
  delivered: number;
  /** 422s: delivered but unparsed; never retried */
  quarantined: number;
  itemsNew: number;
  /** delivery failures (network, 5xx, bad token) */
  errors: number;
  /** currently waiting in the retry buffer */
  buffered: number;
  /** pushed out of the bounded buffer, oldest first */
  dropped: number;
  lastReceiptAt: number | null;
}

export function zeroCounters(): Counters {
  return {
    envelopesSent: 0,
    delivered: 0,
    quarantined: 0,
    itemsNew: 0,
    errors: 0,
    buffered: 0,
    dropped: 0,
    lastReceiptAt: null,
  };
}
