import { ChatEngine } from "./engine.js";

/** Wire the engine to the static chat shell; full re-render per change. */
export function mountChat(engine: ChatEngine, root: Document = document): void {
  const transcript = root.getElementById("transcript") as HTMLElement;
  const form = root.getElementById("composer") as HTMLFormElement;
  const input = root.getElementById("message-input") as HTMLInputElement;
  const sendButton = root.getElementById("send-button") as HTMLButtonElement;
  const quickReplies = root.getElementById("quick-replies") as HTMLElement;
  const banner = root.getElementById("banner") as HTMLElement;
  const resetButton = root.getElementById("reset-button") as HTMLButtonElement;

  function render(): void {
    transcript.replaceChildren(
      ...engine.turns.map((turn) => {
        const bubble = root.createElement("div");
        bubble.className = `turn ${turn.speaker}${turn.kind ? ` kind-${turn.kind}` : ""}`;
        const text = root.createElement("span");
        text.textContent = turn.text;
        bubble.appendChild(text);
        if (turn.confidence !== undefined) {
          const badge = root.createElement("span");
          badge.className = "confidence-badge";
          badge.textContent = `${Math.round(turn.confidence * 100)}%`;
          bubble.appendChild(badge);
        }
        return bubble;
      }),
    );
    transcript.scrollTop = transcript.scrollHeight;

    sendButton.disabled = engine.pending;
    input.disabled = engine.pending;
    quickReplies.hidden = !engine.quickRepliesVisible || engine.pending;

    banner.replaceChildren();
    banner.hidden = !engine.warmingUp && engine.lastError === null;
    if (engine.warmingUp) {
      banner.textContent = "Service warming up, please retry shortly. ";
    } else if (engine.lastError !== null) {
      banner.textContent = "Could not reach the service. ";
    }
    if (!banner.hidden && engine.canRetry) {
      const retry = root.createElement("button");
      retry.type = "button";
      retry.textContent = "Retry";
      retry.addEventListener("click", () => void engine.retry());
      banner.appendChild(retry);
    }
  }

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const text = input.value;
    input.value = "";
    void engine.send(text);
  });

  quickReplies.querySelectorAll("button[data-reply]").forEach((button) => {
    button.addEventListener("click", () => {
      void engine.send((button as HTMLButtonElement).dataset.reply as string);
    });
  });

  resetButton.addEventListener("click", () => {
    engine.reset();
    input.focus();
  });

  engine.onChange(render);
  render();
}
