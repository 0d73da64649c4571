/** Wire format of the gateway, consumed as-is. */
export interface MessageResponse {
  replies: string[];
  state: string;
  confidence?: number;
}

export interface HealthResponse {
  status: string;
  corpus_docs: number;
  threshold: number;
}

/**
 * Presentation kind of a bot turn. The wire format carries no kind labels,
 * so these are derived: a bundle arriving in state AwaitingSatisfaction ends
 * with the satisfaction prompt and (when confidence is present) starts with
 * the answer; everything else renders as a plain message.
 */
export type BotTurnKind = "Answer" | "SatisfactionPrompt" | "Message";

export interface ChatTurn {
  speaker: "user" | "bot";
  text: string;
  kind?: BotTurnKind;
  confidence?: number;
  timestamp: number;
}

export const AWAITING_SATISFACTION = "AwaitingSatisfaction";
