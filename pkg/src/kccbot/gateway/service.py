"""Channel-agnostic chat service: session lookup, routing, GC, persistence.

One service instance owns all sessions. Turns for one sender are serialized
with a per-sender lock; distinct senders run concurrently against the shared
immutable index and policy.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field

from kccbot.dialogue import (
    DialoguePolicy,
    DialogueSession,
    SessionState,
    new_session,
    step,
)
from kccbot.errors import ServiceUnready
from kccbot.retrieval.index import Match, TfIdfIndex


@dataclass
class InboundMessage:
    sender_id: str
    text: str
    timestamp: float = field(default_factory=time.time)


@dataclass
class OutboundBundle:
    sender_id: str
    replies: list[str]
    state_after: str
    confidence: float | None = None


@dataclass
class _SessionEntry:
    session: DialogueSession
    lock: threading.Lock = field(default_factory=threading.Lock)
    last_active: float = 0.0


class ChatService:
    def __init__(
        self,
        index: TfIdfIndex | None,
        policy: DialoguePolicy,
        *,
        idle_limit: float = float("inf"),
        clock=time.time,
    ):
        self._index = index
        self._policy = policy
        self._idle_limit = idle_limit
        self._clock = clock
        self._entries: dict[str, _SessionEntry] = {}
        self._store_lock = threading.Lock()

    @property
    def ready(self) -> bool:
        return self._index is not None

    @property
    def policy(self) -> DialoguePolicy:
        return self._policy

    @property
    def corpus_docs(self) -> int:
        return self._index.n_docs if self._index is not None else 0

    def session_count(self) -> int:
        with self._store_lock:
            return len(self._entries)

    def _get_or_create(self, sender_id: str) -> _SessionEntry:
        with self._store_lock:
            entry = self._entries.get(sender_id)
            if entry is None:
                entry = _SessionEntry(session=new_session(sender_id))
                self._entries[sender_id] = entry
            entry.last_active = self._clock()
            return entry

    def handle_message(self, msg: InboundMessage) -> OutboundBundle:
        """Run one turn for the sender, creating the session on first contact.

        Empty text does not advance the dialogue; it reprompts with whatever
        the current state is waiting for.
        """
        if self._index is None:
            raise ServiceUnready("no index loaded")
        if not msg.sender_id:
            raise ValueError("sender_id must be non-empty")
        self.session_gc(self._idle_limit)
        entry = self._get_or_create(msg.sender_id)
        with entry.lock:
            entry.last_active = self._clock()
            session = entry.session
            if not msg.text.strip():
                if session.state is SessionState.AWAITING_SATISFACTION:
                    prompt = self._policy.satisfaction_prompt
                else:
                    prompt = self._policy.reprompt_message
                return OutboundBundle(msg.sender_id, [prompt], session.state.value)
            session, reply = step(session, msg.text, self._index, self._policy)
            entry.session = session
            return OutboundBundle(
                msg.sender_id, list(reply.texts), session.state.value, reply.confidence
            )

    def session_gc(self, max_idle: float | None = None) -> int:
        """Evict sessions idle longer than max_idle seconds; returns the count."""
        limit = self._idle_limit if max_idle is None else max_idle
        if limit == float("inf"):
            return 0
        now = self._clock()
        evicted = 0
        with self._store_lock:
            for sender_id in list(self._entries):
                entry = self._entries[sender_id]
                if now - entry.last_active > limit and not entry.lock.locked():
                    del self._entries[sender_id]
                    evicted += 1
        return evicted

    # -- persistence ---------------------------------------------------

    def save_sessions(self, path) -> None:
        with self._store_lock:
            payload = {
                sender_id: _session_to_dict(entry.session, entry.last_active)
                for sender_id, entry in self._entries.items()
            }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, ensure_ascii=False)

    def load_sessions(self, path) -> int:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        with self._store_lock:
            for sender_id, raw in payload.items():
                session, last_active = _session_from_dict(sender_id, raw)
                self._entries[sender_id] = _SessionEntry(
                    session=session, last_active=last_active
                )
        return len(payload)


def _session_to_dict(session: DialogueSession, last_active: float) -> dict:
    match = session.last_match
    return {
        "state": session.state.value,
        "turn_count": session.turn_count,
        "transcript": [list(pair) for pair in session.transcript],
        "last_match": None
        if match is None
        else {
            "doc_id": match.doc_id,
            "score": match.score,
            "query_type": match.query_type,
            "answer": match.answer,
        },
        "last_active": last_active,
    }


def _session_from_dict(sender_id: str, raw: dict) -> tuple[DialogueSession, float]:
    match = raw.get("last_match")
    session = DialogueSession(
        session_id=sender_id,
        state=SessionState(raw["state"]),
        last_match=None if match is None else Match(**match),
        turn_count=raw["turn_count"],
        transcript=[tuple(pair) for pair in raw["transcript"]],
    )
    return session, raw.get("last_active", 0.0)
