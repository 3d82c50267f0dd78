"""Pairwise agent conversations with busy-aware pausing and throttling.

Each agent belongs to at most one live session. Queued chat drains FIFO,
one message per interval; the interval stretches when a member is busy and
delivery stops entirely while both are. Control notices (already-in-
conversation, ended-with-message) bypass throttling.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .core import CommandError

SLOW_INTERVAL = 30  # ticks between deliveries while one member is busy
MIN_INTERVAL = 10   # ticks between deliveries while both are idle

ALREADY_IN_CONVERSATION = (
    "You are already in conversation with {name}. Don't use this command to talk to them."
)


@dataclass
class Envelope:
    sender: str
    receiver: str
    body: str
    enqueued_tick: int


@dataclass
class Session:
    pair: frozenset
    status: str = "active"  # active | paused | slowed | ended
    queue: deque = field(default_factory=deque)
    last_delivery_tick: int = -(10 ** 9)

    def other(self, name: str) -> str:
        (a, b) = sorted(self.pair)
        return b if name == a else a


class ConversationManager:
    """Owns all sessions; hands deliveries to a sink.

    The sink must provide deliver_chat(tick, sender, receiver, status, body)
    and deliver_notice(tick, agent, text).
    """

    def __init__(self, agent_names, sink):
        self.agent_names = set(agent_names)
        self.sink = sink
        self.sessions: dict[frozenset, Session] = {}

    def partner_of(self, name: str) -> str | None:
        for session in self.sessions.values():
            if name in session.pair:
                return session.other(name)
        return None

    def session_of(self, name: str) -> Session | None:
        for pair, session in self.sessions.items():
            if name in pair:
                return session
        return None

    def start(self, a: str, b: str, first_message: str, tick: int,
              switch_final: str | None = None) -> bool:
        """Open (a, b), enqueueing first_message. Returns False when a was
        already talking to b (notice sent, nothing else changes)."""
        if b not in self.agent_names:
            raise CommandError("UnknownAgent", f"Could not find player {b}.")
        if a == b:
            raise CommandError("SelfConversation", "You cannot start a conversation with yourself.")
        current = self.partner_of(a)
        if current == b:
            self.sink.deliver_notice(tick, a, ALREADY_IN_CONVERSATION.format(name=b))
            return False
        if current is not None:
            self._end_session(a, current, switch_final, tick)
        if self.partner_of(b) is not None:
            # the callee transitions too: its old session closes silently
            self._end_session(b, self.partner_of(b), None, tick)
        session = Session(pair=frozenset((a, b)))
        self.sessions[session.pair] = session
        self.enqueue(a, first_message, tick)
        return True

    def end(self, a: str, b: str, final_message: str | None, tick: int) -> None:
        if frozenset((a, b)) not in self.sessions:
            raise CommandError("NoSuchConversation", f"You are not in a conversation with {b}.")
        self._end_session(a, b, final_message, tick)

    def _end_session(self, a: str, b: str, final_message: str | None, tick: int) -> None:
        session = self.sessions.pop(frozenset((a, b)))
        session.status = "ended"
        while session.queue:  # never drop queued chat
            env = session.queue.popleft()
            self.sink.deliver_chat(tick, env.sender, env.receiver, "ended", env.body)
        if final_message is not None:
            text = f'Conversation with {a} ended with message: "(FROM OTHER BOT){final_message}"'
        else:
            text = f"Conversation with {a} ended."
        self.sink.deliver_notice(tick, b, text)

    def enqueue(self, sender: str, body: str, tick: int) -> bool:
        session = self.session_of(sender)
        if session is None:
            return False
        session.queue.append(Envelope(sender, session.other(sender), body, tick))
        return True

    def pump(self, busy_of, tick: int) -> list[Envelope]:
        """Deliver due messages for this tick. busy_of maps name -> bool."""
        delivered = []
        for pair in sorted(self.sessions, key=sorted):
            session = self.sessions[pair]
            a, b = sorted(pair)
            busy_count = int(busy_of(a)) + int(busy_of(b))
            if busy_count == 2:
                session.status = "paused"
                continue
            session.status = "slowed" if busy_count == 1 else "active"
            interval = SLOW_INTERVAL if busy_count == 1 else MIN_INTERVAL
            if session.queue and tick - session.last_delivery_tick >= interval:
                env = session.queue.popleft()
                session.last_delivery_tick = tick
                self.sink.deliver_chat(tick, env.sender, env.receiver, session.status, env.body)
                delivered.append(env)
        return delivered
