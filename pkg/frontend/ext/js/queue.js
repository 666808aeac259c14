/** Bounded FIFO retry buffer: when full, the oldest entry is dropped. */
export class BoundedQueue {
    constructor(capacity = 100) {
        this.capacity = capacity;
        this.items = [];
        this.droppedTotal = 0;
        if (capacity < 1) {
            throw new Error("capacity must be at least 1");
        }
    }
    /** Returns the entry that was dropped to make room, if any. */
    push(item) {
        let dropped;
        if (this.items.length >= this.capacity) {
            dropped = this.items.shift();
            this.droppedTotal += 1;
        }
        this.items.push(item);
        return dropped;
    }
    /** Empties the queue and returns its contents in arrival order. */
    drain() {
        const out = this.items;
        this.items = [];
        return out;
    }
    get length() {
        return this.items.length;
    }
    get dropped() {
        return this.droppedTotal;
    }
    toArray() {
        return [...this.items];
    }
}
