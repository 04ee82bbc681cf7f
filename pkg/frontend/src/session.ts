// Session conveniences: the operator sticks across page loads and the
// work time-span auto-advances, so repeated cataloging steps cost one
// click each. Both can be overridden per submission.

const OPERATOR_KEY = "tapecat.operator";

export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

export class Session {
  private storage: StorageLike;
  private clock: () => Date;
  operator: string;
  timespanOverride: string | null = null;

  constructor(storage?: StorageLike, clock?: () => Date) {
    this.storage = storage ?? window.localStorage;
    this.clock = clock ?? (() => new Date());
    this.operator = this.storage.getItem(OPERATOR_KEY) ?? "";
  }

  setOperator(iri: string): void {
    this.operator = iri;
    this.storage.setItem(OPERATOR_KEY, iri);
  }

  /** Point interval at the current UTC minute, unless overridden. */
  timespan(): string {
    if (this.timespanOverride) {
      return this.timespanOverride;
    }
    const stamp = this.clock().toISOString().slice(0, 16);
    return `${stamp}/${stamp}`;
  }
}
