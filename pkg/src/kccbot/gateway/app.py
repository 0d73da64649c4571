"""HTTP chat gateway: the webhook-shaped API any channel adapter can front."""

from __future__ import annotations

import os

from fastapi import Body, FastAPI, HTTPException

from kccbot.errors import ServiceUnready
from kccbot.gateway.service import ChatService, InboundMessage


def create_app(service: ChatService, webchat_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="kccbot gateway", version="1")

    @app.post("/api/v1/messages")
    def post_message(payload: dict = Body(...)):
        sender_id = payload.get("sender_id")
        text = payload.get("text")
        if not isinstance(sender_id, str) or not sender_id.strip():
            raise HTTPException(status_code=400, detail="sender_id is required")
        if not isinstance(text, str):
            raise HTTPException(status_code=400, detail="text is required (may be empty)")
        try:
            bundle = service.handle_message(InboundMessage(sender_id=sender_id, text=text))
        except ServiceUnready as exc:
            raise HTTPException(status_code=503, detail=str(exc))
        body = {"replies": bundle.replies, "state": bundle.state_after}
        if bundle.confidence is not None:
            body["confidence"] = bundle.confidence
        return body

    @app.get("/api/v1/health")
    def health():
        if not service.ready:
            raise HTTPException(status_code=503, detail="index not loaded")
        return {
            "status": "ok",
            "corpus_docs": service.corpus_docs,
            "threshold": service.policy.confidence_threshold,
        }

    if webchat_dir and os.path.isdir(webchat_dir):
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=webchat_dir, html=True), name="webchat")

    return app
