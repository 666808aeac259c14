/**
 * Minimal typings for the Firefox WebExtensions APIs this extension touches.
 * Kept by hand (instead of pulling a full typings package) so the surface we
 * rely on is explicit.
 */

interface WebExtEvent<T extends (...args: never[]) => unknown> {
  addListener(callback: T, ...extra: unknown[]): void;
  removeListener(callback: T): void;
}

interface StreamFilterDataEvent {
  data: ArrayBuffer;
}

interface StreamFilter {
  ondata: ((event: StreamFilterDataEvent) => void) | null;
  onstop: (() => void) | null;
  onerror: (() => void) | null;
  write(data: ArrayBuffer | Uint8Array): void;
  close(): void;
  disconnect(): void;
}

interface WebRequestDetails {
  requestId: string;
  url: string;
  method: string;
  type: string;
  statusCode?: number;
}

declare namespace browser {
  namespace storage {
    interface StorageArea {
      get(keys?: string | string[] | null): Promise<Record<string, unknown>>;
      set(items: Record<string, unknown>): Promise<void>;
    }
    const local: StorageArea;
    const onChanged: WebExtEvent<
      (changes: Record<string, { newValue?: unknown; oldValue?: unknown }>, areaName: string) => void
    >;
  }

  namespace webRequest {
    interface RequestFilter {
      urls: string[];
      types?: string[];
    }
    function filterResponseData(requestId: string): StreamFilter;
    const onBeforeRequest: {
      addListener(
        callback: (details: WebRequestDetails) => object | void,
        filter: RequestFilter,
        extraInfoSpec?: string[],
      ): void;
    };
    const onHeadersReceived: {
      addListener(
        callback: (details: WebRequestDetails) => object | void,
        filter: RequestFilter,
        extraInfoSpec?: string[],
      ): void;
    };
  }

  namespace runtime {
    const onMessage: WebExtEvent<
      (message: unknown, sender: unknown) => Promise<unknown> | void
    >;
    function sendMessage(message: unknown): Promise<unknown>;
    function openOptionsPage(): Promise<void>;
  }

  namespace tabs {
    function create(options: { url: string }): Promise<unknown>;
  }
}
