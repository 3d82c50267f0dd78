"""Shared result/error types for command execution."""

from __future__ import annotations

from dataclasses import dataclass


class CommandError(Exception):
    """Raised when a command cannot run; carries a stable error code and
    the exact display text delivered to the agent."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


@dataclass
class CommandResult:
    status: str  # "ok" | "error"
    message: str
    world_delta: str | None = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def ok(message: str, delta: str | None = None) -> CommandResult:
    return CommandResult("ok", message, delta)


def err(code_or_exc, message: str | None = None) -> CommandResult:
    if isinstance(code_or_exc, CommandError):
        return CommandResult("error", code_or_exc.message)
    return CommandResult("error", message if message is not None else str(code_or_exc))
