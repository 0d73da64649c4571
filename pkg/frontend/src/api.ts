import type { HealthResponse, MessageResponse } from "./types.js";

export class GatewayUnavailableError extends Error {
  constructor() {
    super("gateway is not ready");
    this.name = "GatewayUnavailableError";
  }
}

export class GatewayError extends Error {
  constructor(public status: number) {
    super(`gateway returned HTTP ${status}`);
    this.name = "GatewayError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** What the chat engine needs from a backend; GatewayClient is the real one. */
export interface ChatBackend {
  sendMessage(senderId: string, text: string): Promise<MessageResponse>;
}

/** Thin client over the gateway's two endpoints. */
export class GatewayClient implements ChatBackend {
  private fetchFn: FetchLike;

  constructor(private baseUrl = "", fetchFn?: FetchLike) {
    this.fetchFn = fetchFn ?? ((input, init) => globalThis.fetch(input, init));
  }

  async sendMessage(senderId: string, text: string): Promise<MessageResponse> {
    const resp = await this.fetchFn(`${this.baseUrl}/api/v1/messages`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ sender_id: senderId, text }),
    });
    if (resp.status === 503) throw new GatewayUnavailableError();
    if (!resp.ok) throw new GatewayError(resp.status);
    return (await resp.json()) as MessageResponse;
  }

  async health(): Promise<HealthResponse> {
    const resp = await this.fetchFn(`${this.baseUrl}/api/v1/health`);
    if (resp.status === 503) throw new GatewayUnavailableError();
    if (!resp.ok) throw new GatewayError(resp.status);
    return (await resp.json()) as HealthResponse;
  }
}
