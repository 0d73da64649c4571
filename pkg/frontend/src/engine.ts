import { ChatBackend, GatewayUnavailableError } from "./api.js";
import { KeyValueStore, randomSessionId } from "./session.js";
import { AWAITING_SATISFACTION, BotTurnKind, ChatTurn, MessageResponse } from "./types.js";

const SESSION_KEY = "kccbot.session_id";

export type EngineListener = () => void;

/**
 * Framework-free chat state: the transcript, the single in-flight request,
 * and the quick-reply/banner flags the UI renders from.
 *
 * Bot turns are exactly the gateway's replies array, in order — the client
 * never synthesizes bot text.
 */
export class ChatEngine {
  turns: ChatTurn[] = [];
  pending = false;
  warmingUp = false;
  lastError: string | null = null;
  sessionId: string;

  private retryText: string | null = null;
  private listeners: EngineListener[] = [];

  constructor(
    private client: ChatBackend,
    private store: KeyValueStore,
    private now: () => number = Date.now,
  ) {
    const existing = store.get(SESSION_KEY);
    this.sessionId = existing ?? randomSessionId();
    if (!existing) store.set(SESSION_KEY, this.sessionId);
  }

  onChange(listener: EngineListener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  get quickRepliesVisible(): boolean {
    const lastBot = [...this.turns].reverse().find((t) => t.speaker === "bot");
    return lastBot?.kind === "SatisfactionPrompt";
  }

  get canRetry(): boolean {
    return this.retryText !== null && !this.pending;
  }

  async send(text: string): Promise<void> {
    const trimmed = text.trim();
    if (!trimmed || this.pending) return;
    this.turns.push({ speaker: "user", text: trimmed, timestamp: this.now() });
    await this.dispatch(trimmed);
  }

  /** Re-send the last failed message without duplicating its user turn. */
  async retry(): Promise<void> {
    if (!this.canRetry) return;
    const text = this.retryText as string;
    await this.dispatch(text);
  }

  private async dispatch(text: string): Promise<void> {
    this.pending = true;
    this.lastError = null;
    this.warmingUp = false;
    this.emit();
    try {
      const response = await this.client.sendMessage(this.sessionId, text);
      this.appendBotTurns(response);
      this.retryText = null;
    } catch (error) {
      if (error instanceof GatewayUnavailableError) {
        this.warmingUp = true;
      } else {
        this.lastError = error instanceof Error ? error.message : String(error);
      }
      this.retryText = text;
    } finally {
      this.pending = false;
      this.emit();
    }
  }

  private appendBotTurns(response: MessageResponse): void {
    const last = response.replies.length - 1;
    response.replies.forEach((text, i) => {
      let kind: BotTurnKind = "Message";
      let confidence: number | undefined;
      if (response.state === AWAITING_SATISFACTION) {
        // a bundle leaving the user in the satisfaction check always ends
        // with the yes/no prompt; the answer (if any) leads it
        if (i === last) kind = "SatisfactionPrompt";
        else if (i === 0 && response.confidence !== undefined) {
          kind = "Answer";
          confidence = response.confidence;
        }
      }
      this.turns.push({ speaker: "bot", text, kind, confidence, timestamp: this.now() });
    });
  }

  /** Fresh session id and an empty transcript. */
  reset(): void {
    this.sessionId = randomSessionId();
    this.store.set(SESSION_KEY, this.sessionId);
    this.turns = [];
    this.retryText = null;
    this.lastError = null;
    this.warmingUp = false;
    this.emit();
  }
}
