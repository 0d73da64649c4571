"""Conversation state machine: greeting, answer, satisfaction check, fallback.

The policy is deliberately transparent: greeting and satisfaction detection
are exact-match lexicons over normalized text, and the answer/fallback choice
is a single inclusive threshold on the top match's cosine confidence. A score
exactly at the threshold is answered.
"""

from __future__ import annotations

import enum
import json
import string
from dataclasses import dataclass, field

from kccbot.corpus import normalize_text
from kccbot.errors import SessionCorrupt
from kccbot.retrieval.index import Match, TfIdfIndex, retrieve_top_k

DEFAULT_GREETINGS = frozenset(
    {"hi", "hello", "hey", "namaste", "good morning", "good afternoon", "good evening"}
)
DEFAULT_AFFIRMATIVES = frozenset({"yes", "y", "ok", "thanks", "satisfied"})
DEFAULT_NEGATIVES = frozenset({"no", "n", "wrong", "not"})

DEFAULT_GREETING_MESSAGE = (
    "Namaste! I am an automated farming assistant trained on past Kisan Call "
    "Center queries. Ask me about crops, weather, pests or schemes."
)
DEFAULT_SATISFACTION_PROMPT = "Did this answer your question? (yes/no)"
DEFAULT_FALLBACK_MESSAGE = (
    "Sorry, I could not find a confident answer for that. Please call the "
    "Kisan Call Center at {call_center_number} during working hours."
)
DEFAULT_REFERRAL_MESSAGE = (
    "I apologise that the answer did not help. Please contact the Kisan Call "
    "Center at {call_center_number} during working hours for expert advice."
)
DEFAULT_FAREWELL_MESSAGE = "Glad it helped! Feel free to ask me another question."
DEFAULT_REPROMPT_MESSAGE = "Please type your farming question."


class SessionState(enum.Enum):
    GREETING = "Greeting"
    AWAITING_QUERY = "AwaitingQuery"
    AWAITING_SATISFACTION = "AwaitingSatisfaction"


class ReplyKind(enum.Enum):
    GREETING = "Greeting"
    ANSWER = "Answer"
    SATISFACTION_PROMPT = "SatisfactionPrompt"
    FALLBACK = "Fallback"
    CALL_CENTER_REFERRAL = "CallCenterReferral"
    FAREWELL = "Farewell"


class Satisfaction(enum.Enum):
    AFFIRMATIVE = "Affirmative"
    NEGATIVE = "Negative"
    OTHER = "Other"


@dataclass(frozen=True)
class DialoguePolicy:
    """Thresholds, lexicons and message templates driving the conversation.

    ``call_center_number`` has no default on purpose: referral texts must
    carry a real contact, so the operator has to supply one.
    """

    call_center_number: str
    confidence_threshold: float = 0.7
    greeting_message: str = DEFAULT_GREETING_MESSAGE
    satisfaction_prompt: str = DEFAULT_SATISFACTION_PROMPT
    fallback_message: str = DEFAULT_FALLBACK_MESSAGE
    referral_message: str = DEFAULT_REFERRAL_MESSAGE
    farewell_message: str = DEFAULT_FAREWELL_MESSAGE
    reprompt_message: str = DEFAULT_REPROMPT_MESSAGE
    greeting_lexicon: frozenset[str] = DEFAULT_GREETINGS
    affirmative_lexicon: frozenset[str] = DEFAULT_AFFIRMATIVES
    negative_lexicon: frozenset[str] = DEFAULT_NEGATIVES

    def __post_init__(self):
        if not self.call_center_number or not str(self.call_center_number).strip():
            raise ValueError("call_center_number is required")
        if not 0.0 <= self.confidence_threshold <= 1.0:
            raise ValueError(f"confidence_threshold {self.confidence_threshold} outside [0, 1]")
        for name in ("fallback_message", "referral_message"):
            if "{call_center_number}" not in getattr(self, name):
                raise ValueError(f"{name} must contain the {{call_center_number}} placeholder")

    @property
    def fallback_text(self) -> str:
        return self.fallback_message.format(call_center_number=self.call_center_number)

    @property
    def referral_text(self) -> str:
        return self.referral_message.format(call_center_number=self.call_center_number)


def policy_from_file(path) -> DialoguePolicy:
    """Load a policy from JSON; missing keys fall back to the defaults."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    kwargs = dict(raw)
    for key in ("greeting_lexicon", "affirmative_lexicon", "negative_lexicon"):
        if key in kwargs:
            kwargs[key] = frozenset(str(w).lower() for w in kwargs[key])
    return DialoguePolicy(**kwargs)


@dataclass
class BotReply:
    """One turn's bot output: texts in send order plus the primary kind."""

    texts: list[str]
    kind: ReplyKind
    confidence: float | None = None


@dataclass
class DialogueSession:
    session_id: str
    state: SessionState = SessionState.GREETING
    last_match: Match | None = None
    turn_count: int = 0
    transcript: list[tuple[str, str]] = field(default_factory=list)


def new_session(session_id: str) -> DialogueSession:
    return DialogueSession(session_id=session_id)


def _squash(text: str) -> str:
    """Lowercase, strip punctuation, collapse whitespace."""
    table = str.maketrans("", "", string.punctuation)
    return " ".join(text.lower().translate(table).split())


def detect_greeting(text: str, lexicon: frozenset[str] = DEFAULT_GREETINGS) -> bool:
    """True iff the whole normalized message is a greeting phrase."""
    return _squash(text) in lexicon


def parse_satisfaction(
    text: str,
    affirmatives: frozenset[str] = DEFAULT_AFFIRMATIVES,
    negatives: frozenset[str] = DEFAULT_NEGATIVES,
) -> Satisfaction:
    """Exact lexicon match on the normalized message; anything else is Other."""
    squashed = _squash(text)
    if squashed in affirmatives:
        return Satisfaction.AFFIRMATIVE
    if squashed in negatives:
        return Satisfaction.NEGATIVE
    return Satisfaction.OTHER


def _check_session(session: DialogueSession) -> None:
    if session.state is SessionState.AWAITING_SATISFACTION and session.last_match is None:
        raise SessionCorrupt(
            f"session {session.session_id}: AwaitingSatisfaction without a last match"
        )


def _answer_or_fallback(
    session: DialogueSession, user_text: str, index: TfIdfIndex, policy: DialoguePolicy
) -> BotReply:
    tokens = normalize_text(user_text, index.norm_config)
    matches = retrieve_top_k(tokens, index, 1)
    if matches and matches[0].score >= policy.confidence_threshold:
        match = matches[0]
        session.last_match = match
        session.state = SessionState.AWAITING_SATISFACTION
        return BotReply(
            texts=[match.answer, policy.satisfaction_prompt],
            kind=ReplyKind.ANSWER,
            confidence=match.score,
        )
    session.last_match = None
    session.state = SessionState.AWAITING_QUERY
    return BotReply(texts=[policy.fallback_text], kind=ReplyKind.FALLBACK)


def step(
    session: DialogueSession, user_text: str, index: TfIdfIndex, policy: DialoguePolicy
) -> tuple[DialogueSession, BotReply]:
    """Advance the session one turn.

    Transitions:
      any state, greeting          -> Greeting reply, AwaitingQuery
      query, top score >= threshold -> Answer + satisfaction prompt, AwaitingSatisfaction
      query, below threshold/empty  -> Fallback with call-center details, AwaitingQuery
      AwaitingSatisfaction, yes     -> Farewell, AwaitingQuery
      AwaitingSatisfaction, no      -> apology + referral, AwaitingQuery
      AwaitingSatisfaction, other   -> treated as a new query
    """
    _check_session(session)
    session.turn_count += 1
    session.transcript.append(("user", user_text))

    if detect_greeting(user_text, policy.greeting_lexicon):
        session.state = SessionState.AWAITING_QUERY
        session.last_match = None
        reply = BotReply(texts=[policy.greeting_message], kind=ReplyKind.GREETING)
    elif session.state is SessionState.AWAITING_SATISFACTION:
        verdict = parse_satisfaction(
            user_text, policy.affirmative_lexicon, policy.negative_lexicon
        )
        if verdict is Satisfaction.AFFIRMATIVE:
            session.state = SessionState.AWAITING_QUERY
            session.last_match = None
            reply = BotReply(texts=[policy.farewell_message], kind=ReplyKind.FAREWELL)
        elif verdict is Satisfaction.NEGATIVE:
            session.state = SessionState.AWAITING_QUERY
            session.last_match = None
            reply = BotReply(texts=[policy.referral_text], kind=ReplyKind.CALL_CENTER_REFERRAL)
        else:
            reply = _answer_or_fallback(session, user_text, index, policy)
    else:
        reply = _answer_or_fallback(session, user_text, index, policy)

    for text in reply.texts:
        session.transcript.append(("bot", text))
    return session, reply
