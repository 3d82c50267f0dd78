"""NDJSON wire protocol for external agents.

One line per message, each a JSON object:

    {"id": n, "kind": k, "episode_id": e, "agent": a, "payload": {...}}

ids are strictly increasing per connection and direction. The server is
fully synchronous: it never contacts a client except to hand over queued
deliveries and then a poll, and every poll must be answered by exactly one
agent_text (empty text is a legal "thinking" reply). See PROTOCOL.md for
schemas and a sample session.
"""

from __future__ import annotations

import json
import socket

from .commands import render_command_docs
from .taskgen import TaskSpec, goal_for_agent

PROTOCOL_VERSION = 1
POLL_TIMEOUT = 10.0  # seconds of wall clock before a silent agent is dead

CLIENT_KINDS = {"hello", "agent_text"}
SERVER_KINDS = {"task_brief", "poll", "system_text", "chat_delivery",
                "command_result", "episode_end"}


class ProtocolViolation(Exception):
    pass


class AgentDisconnected(Exception):
    pass


class Connection:
    """One NDJSON stream with id bookkeeping in both directions."""

    def __init__(self, sock: socket.socket, episode_id: str):
        self.sock = sock
        self.episode_id = episode_id
        self.reader = sock.makefile("r", encoding="utf-8", newline="\n")
        self.writer = sock.makefile("w", encoding="utf-8", newline="\n")
        self.send_seq = 0
        self.last_recv_id = 0
        self.agent: str | None = None

    def send(self, kind: str, payload: dict) -> None:
        self.send_seq += 1
        line = json.dumps({
            "id": self.send_seq, "kind": kind, "episode_id": self.episode_id,
            "agent": self.agent, "payload": payload,
        }, sort_keys=True)
        try:
            self.writer.write(line + "\n")
            self.writer.flush()
        except OSError as exc:
            raise AgentDisconnected(str(exc)) from exc

    def recv(self, expect: set | None = None, timeout: float = POLL_TIMEOUT) -> dict:
        self.sock.settimeout(timeout)
        try:
            line = self.reader.readline()
        except (OSError, socket.timeout) as exc:
            raise AgentDisconnected(str(exc)) from exc
        if not line:
            raise AgentDisconnected("connection closed")
        try:
            msg = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProtocolViolation(f"bad json: {exc}") from exc
        if not isinstance(msg, dict) or "kind" not in msg or "id" not in msg:
            raise ProtocolViolation("message missing id/kind")
        if not isinstance(msg["id"], int) or msg["id"] <= self.last_recv_id:
            raise ProtocolViolation("message ids must be strictly increasing")
        self.last_recv_id = msg["id"]
        if msg["kind"] not in CLIENT_KINDS:
            raise ProtocolViolation(f"unexpected kind: {msg['kind']}")
        if expect and msg["kind"] not in expect:
            raise ProtocolViolation(f"expected {sorted(expect)}, got {msg['kind']}")
        return msg

    def close(self) -> None:
        for stream in (self.reader, self.writer):
            try:
                stream.close()
            except OSError:
                pass
        try:
            self.sock.close()
        except OSError:
            pass


class RemoteEndpoint:
    """Runner-facing endpoint backed by one protocol connection."""

    def __init__(self, conn: Connection, name: str):
        self.conn = conn
        self.name = name

    def deliver(self, role: str, content: str) -> None:
        if role == "user":
            kind = "chat_delivery"
        elif content.startswith("Code output:") or content.startswith("\n"):
            kind = "command_result"
        else:
            kind = "system_text"
        self.conn.send(kind, {"role": role, "content": content})

    def poll(self, tick: int) -> str:
        self.conn.send("poll", {"tick": tick})
        msg = self.conn.recv(expect={"agent_text"})
        text = msg.get("payload", {}).get("text")
        if not isinstance(text, str):
            raise ProtocolViolation("agent_text payload must carry text")
        return text

    def close(self, score, reason: str) -> None:
        try:
            self.conn.send("episode_end", {"score": score, "reason": reason})
        except AgentDisconnected:
            pass
        self.conn.close()


class GatewayServer:
    """Accepts agent connections for one episode and hands the runner a
    RemoteEndpoint per connected agent."""

    def __init__(self, task: TaskSpec, seed: int, address=("127.0.0.1", 0)):
        self.task = task
        self.episode_id = f"{task.task_name}:{seed}"
        self.listener = socket.create_server(address)
        self.address = self.listener.getsockname()

    def accept_agents(self, names: list, timeout: float = 60.0) -> dict:
        """Block until every name is claimed by a handshaken connection."""
        endpoints: dict[str, RemoteEndpoint] = {}
        unclaimed = list(names)
        self.listener.settimeout(timeout)
        while unclaimed:
            try:
                sock, _addr = self.listener.accept()
            except socket.timeout as exc:
                raise AgentDisconnected("no agent connected in time") from exc
            conn = Connection(sock, self.episode_id)
            try:
                hello = conn.recv(expect={"hello"})
            except (ProtocolViolation, AgentDisconnected):
                conn.close()
                continue
            payload = hello.get("payload", {})
            if payload.get("version") != PROTOCOL_VERSION:
                conn.close()
                continue
            wanted = payload.get("name")
            name = wanted if wanted in unclaimed else unclaimed[0]
            unclaimed.remove(name)
            conn.agent = name
            conn.send("task_brief", self.brief_for(name))
            endpoints[name] = RemoteEndpoint(conn, name)
        return endpoints

    def brief_for(self, name: str) -> dict:
        task = self.task
        return {
            "task_name": task.task_name,
            "task_type": task.task_type,
            "agent": name,
            "agent_names": list(task.agent_names),
            "goal": goal_for_agent(task, name),
            "initial_inventory": dict(task.initial_inventories.get(name, {})),
            "timeout_seconds": task.timeout_seconds,
            "command_docs": render_command_docs(),
        }

    def close(self) -> None:
        try:
            self.listener.close()
        except OSError:
            pass


def serve(task: TaskSpec, seed: int, address=("127.0.0.1", 0)) -> GatewayServer:
    """Bind a gateway for one episode; returns the listening server."""
    return GatewayServer(task, seed, address)
