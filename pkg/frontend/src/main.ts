import { GatewayClient } from "./api.js";
import { ChatEngine } from "./engine.js";
import { browserStore } from "./session.js";
import { mountChat } from "./ui.js";

const engine = new ChatEngine(new GatewayClient(""), browserStore());
mountChat(engine);
