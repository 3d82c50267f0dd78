"""Filter episode logs into a supervised fine-tuning dataset of
per-assistant-turn transitions, plus summary statistics."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .runner import EpisodeLog


class EmptyInput(ValueError):
    pass


@dataclass
class FilterPolicy:
    mode: str               # "success_only" | "top_fraction"
    fraction: float = 0.25

    @classmethod
    def parse(cls, text: str) -> "FilterPolicy":
        if text in ("success", "success_only"):
            return cls("success_only")
        if text in ("top25", "top_fraction"):
            return cls("top_fraction", 0.25)
        if text.startswith("top"):
            return cls("top_fraction", float(text[3:]) / 100.0)
        raise ValueError(f"unknown filter policy: {text}")


@dataclass
class Transition:
    agent: str
    tick: int
    context: list           # role-tagged messages before the response
    response: str
    task_name: str
    score: float


@dataclass
class DatasetStats:
    domain: str
    trials: int
    successes: int
    kept_runs: int
    transitions: int
    avg_trajectory_length: float
    train: int = 0
    test: int = 0


def filter_runs(logs: list, policy: FilterPolicy) -> list:
    """Keep the runs a policy admits. success_only keeps score-1 runs;
    top_fraction keeps runs at or above the (1-fraction) score quantile,
    ties included."""
    if not logs:
        raise EmptyInput("no episode logs to filter")
    if policy.mode == "success_only":
        return [log for log in logs if log.final_score == 1.0]
    scores = sorted(log.final_score for log in logs)
    idx = max(0, math.ceil((1.0 - policy.fraction) * len(scores)) - 1)
    threshold = scores[idx]
    return [log for log in logs if log.final_score >= threshold]


def emit_transitions(log: EpisodeLog) -> list:
    """One training example per non-empty assistant turn; the context is
    everything that agent had seen before responding."""
    task_name = log.header["task"]["task_name"]
    score = log.final_score
    contexts: dict[str, list] = {}
    out = []
    for turn in log.turns:
        agent = turn["agent"]
        ctx = contexts.setdefault(agent, [])
        ctx.extend({"role": role, "content": content}
                   for role, content in turn["new_messages"])
        if turn["response"]:
            out.append(Transition(agent, turn["tick"], list(ctx),
                                  turn["response"], task_name, score))
            ctx.append({"role": "assistant", "content": turn["response"]})
    return out


def transition_to_example(t: Transition) -> dict:
    return {
        "memory": "",
        "turns": t.context + [{"role": "assistant", "content": t.response}],
        "task": t.task_name,
        "score": t.score,
    }


def stats(logs: list, kept: list, domain: str = "",
          split_sizes: tuple = (0, 0)) -> DatasetStats:
    transitions = sum(len(emit_transitions(log)) for log in kept)
    return DatasetStats(
        domain=domain,
        trials=len(logs),
        successes=sum(1 for log in logs if log.final_score == 1.0),
        kept_runs=len(kept),
        transitions=transitions,
        avg_trajectory_length=(transitions / len(kept) if kept else 0.0),
        train=split_sizes[0],
        test=split_sizes[1],
    )


STATS_COLUMNS = ("Task", "Train", "Test", "Trials", "Success",
                 "Transitions", "Avg Traj. Len.")


def render_stats_table(rows: list) -> str:
    """Rows of DatasetStats rendered in the benchmark's summary-table shape."""
    cells = [STATS_COLUMNS]
    for s in rows:
        cells.append((s.domain, str(s.train), str(s.test), str(s.trials),
                      str(s.successes), str(s.transitions),
                      f"{s.avg_trajectory_length:.1f}"))
    widths = [max(len(row[i]) for row in cells) for i in range(len(STATS_COLUMNS))]
    lines = []
    for row in cells:
        lines.append("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())
    return "\n".join(lines)


def build_dataset(log_paths: list, policy: FilterPolicy, out_path: str,
                  domain: str = "") -> DatasetStats:
    logs = [EpisodeLog.load(p) for p in log_paths]
    kept = filter_runs(logs, policy)
    with open(out_path, "w") as fh:
        for log in kept:
            for t in emit_transitions(log):
                fh.write(json.dumps(transition_to_example(t), sort_keys=True) + "\n")
    return stats(logs, kept, domain)
