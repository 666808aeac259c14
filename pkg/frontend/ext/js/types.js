/** Shared types for the capture client. */
export function zeroCounters() {
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
