/** Bounded FIFO retry buffer: when full, the oldest entry is dropped. */
export class BoundedQueue<T> {
  private items: T[] = [];
  private droppedTotal = 0;

  constructor(readonly capacity: number = 100) {
    if (capacity < 1) {
      throw new Error("capacity must be at least 1");
    }
  }

  /** Returns the entry that was dropped to make room, if any. */
  push(item: T): T | undefined {
    let dropped: T | undefined;
    if (this.items.length >= this.capacity) {
      dropped = this.items.shift();
      this.droppedTotal += 1;
    }
    this.items.push(item);
    return dropped;
  }

  /** Empties the queue and returns its contents in arrival order. */
  drain(): T[] {
    const out = this.items;
    this.items = [];
    return out;
  }

  get length(): number {
    return this.items.length;
  }

  get dropped(): number {
    return this.droppedTotal;
  }

  toArray(): T[] {
    return [...this.items];
  }
}
