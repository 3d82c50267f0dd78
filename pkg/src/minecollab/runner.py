"""Episode orchestration: provisioning, agent polling, conversation
pumping, scoring, timeout, logging, and replay.

The scheduler is strictly deterministic: agents are polled round-robin in
name order, one message per poll, only while idle; all world mutation goes
through the tick queue. Two runs with the same config and scripted
endpoints produce byte-identical logs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import commands, evaluator
from .conversation import ConversationManager
from .core import CommandError
from .materials import ALL_CLASSES
from .oracle import OraclePolicy
from .taskgen import TaskSpec
from .world import AgentBody, World, spawn_positions, spawn_world_from_spec

INITIAL_MESSAGE = ("Immediately start a conversation with other agents and "
                   "collaborate together to complete the task. Share resources "
                   "and skill sets.")


class OracleEndpoint:
    def __init__(self, task: TaskSpec, name: str):
        self.policy = OraclePolicy(task, name)

    def deliver(self, role: str, content: str) -> None:
        self.policy.deliver(role, content)

    def poll(self, tick: int) -> str:
        return self.policy.poll()

    def close(self, score, reason: str) -> None:
        pass


class PlaybackEndpoint:
    """Replays the responses recorded in an episode log."""

    def __init__(self, turns: list):
        # (tick, response) in original order
        self.turns = [(t["tick"], t["response"]) for t in turns]
        self.i = 0

    def deliver(self, role: str, content: str) -> None:
        pass

    def poll(self, tick: int) -> str:
        if self.i < len(self.turns) and self.turns[self.i][0] == tick:
            response = self.turns[self.i][1]
            self.i += 1
            return response
        return ""

    def close(self, score, reason: str) -> None:
        pass


class SilentEndpoint:
    def deliver(self, role: str, content: str) -> None:
        pass

    def poll(self, tick: int) -> str:
        return ""

    def close(self, score, reason: str) -> None:
        pass


def make_endpoint(kind: str, task: TaskSpec, name: str):
    if kind == "oracle":
        return OracleEndpoint(task, name)
    if kind == "silent":
        return SilentEndpoint()
    raise ValueError(f"Unknown endpoint kind: {kind}")


@dataclass
class EpisodeLog:
    records: list = field(default_factory=list)

    @property
    def header(self) -> dict:
        return self.records[0]

    @property
    def turns(self) -> list:
        return [r for r in self.records if r["kind"] == "turn"]

    def turns_for(self, agent: str) -> list:
        return [r for r in self.turns if r["agent"] == agent]

    @property
    def end(self) -> dict:
        return self.records[-1]

    @property
    def final_score(self) -> float:
        return self.end["score"]

    @property
    def end_reason(self) -> str:
        return self.end["reason"]

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.records)

    def save(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_jsonl())

    @classmethod
    def load(cls, path: str) -> "EpisodeLog":
        with open(path) as fh:
            return cls([json.loads(line) for line in fh if line.strip()])

    def context_before(self, agent: str, turn_index: int) -> list:
        """Reconstruct the role-tagged message context an agent saw before
        its turn_index-th recorded turn."""
        context = []
        seen = 0
        for rec in self.turns:
            if rec["agent"] != agent:
                continue
            if seen == turn_index:
                context.extend({"role": role, "content": content}
                               for role, content in rec["new_messages"])
                return context
            context.extend({"role": role, "content": content}
                           for role, content in rec["new_messages"])
            if rec["response"]:
                context.append({"role": "assistant", "content": rec["response"]})
            seen += 1
        raise IndexError(f"{agent} has no turn {turn_index}")


class EpisodeRunner:
    """Drives one episode to completion."""

    def __init__(self, task: TaskSpec, endpoints: dict, seed: int,
                 progress_path: str | None = None):
        self.task = task
        self.seed = seed
        self.endpoints = endpoints
        self.world = build_world(task, seed)
        self.convo = ConversationManager(task.agent_names, sink=self)
        self.progress = evaluator.ProgressStore(progress_path)
        self.inboxes: dict[str, list] = {n: [] for n in task.agent_names}
        self.records: list[dict] = []
        self.done = False
        self._score_cache: tuple[int, evaluator.Score] | None = None

    # conversation sink ------------------------------------------------------

    def deliver_chat(self, tick, sender, receiver, status, body):
        self.inboxes[receiver].append(("user", f"{sender}: (FROM OTHER BOT){body}"))
        self.records.append({"kind": "chat", "tick": tick, "from": sender,
                             "to": receiver, "status": status, "body": body})

    def deliver_notice(self, tick, agent, text):
        self.inboxes[agent].append(("system", text))
        self.records.append({"kind": "notice", "tick": tick, "agent": agent,
                             "body": text})

    # scoring ------------------------------------------------------------------

    def check_score(self) -> evaluator.Score:
        task = self.task
        if task.task_type == "cooking":
            return evaluator.score_cooking(self.world, task, self.progress)
        if task.task_type in ("crafting", "techtree"):
            return evaluator.score_crafting(self.world, task)
        if task.task_type == "construction":
            # cell-by-cell scoring is pricey; grid mutations invalidate
            if self._score_cache and self._score_cache[0] == self.world.version:
                return self._score_cache[1]
            score = evaluator.score_blueprint(self.world, task.blueprint)
            self._score_cache = (self.world.version, score)
            return score
        return evaluator.Score(0.0, "binary", {})

    # main loop ------------------------------------------------------------------

    def run(self) -> EpisodeLog:
        task = self.task
        self.records.append({
            "kind": "header", "task": task.to_dict(), "seed": self.seed,
            "agents": list(task.agent_names), "max_ticks": task.max_ticks,
        })
        for name in task.agent_names:
            self.inboxes[name].append(("system", INITIAL_MESSAGE))

        end_reason = "timeout"
        score = self.check_score()
        while self.world.tick < task.max_ticks:
            completions = self.world.advance_tick()
            tick = self.world.tick
            for agent, command_name, outcome in completions:
                if isinstance(outcome, CommandError):
                    message = outcome.message
                    status = "error"
                else:
                    message = outcome
                    status = "ok"
                self.records.append({"kind": "result", "tick": tick, "agent": agent,
                                     "command": command_name, "status": status,
                                     "message": message})
                self.inboxes[agent].append(("system", f"Code output:\n{message}\n"))
            self.convo.pump(lambda n: self.world.agents[n].busy, tick)
            agent_failure = None
            for name in sorted(task.agent_names):
                if self.world.agents[name].busy:
                    continue
                new_messages = self.inboxes[name]
                self.inboxes[name] = []
                endpoint = self.endpoints[name]
                try:
                    for role, content in new_messages:
                        endpoint.deliver(role, content)
                    response = endpoint.poll(tick)
                except Exception as exc:
                    agent_failure = (name, str(exc))
                    break
                if new_messages or response:
                    self.records.append({
                        "kind": "turn", "tick": tick, "agent": name,
                        "new_messages": [[r, c] for r, c in new_messages],
                        "response": response,
                    })
                if response:
                    self._process_response(name, response, tick)
            if agent_failure:
                end_reason = "agent_error"
                self.records.append({"kind": "agent_error", "tick": tick,
                                     "agent": agent_failure[0],
                                     "error": agent_failure[1]})
                score = self.check_score()
                break
            score = self.check_score()
            self.records.append({"kind": "score", "tick": tick,
                                 "value": score.value})
            if score.value >= 1.0:
                end_reason = "completed"
                break

        self.world.frozen = True
        final_tick = self.world.tick
        shown = int(score.value) if score.kind == "binary" else score.value
        for name in task.agent_names:
            self.endpoints[name].deliver("system", f"Task ended with score : {shown}")
            self.records.append({"kind": "notice", "tick": final_tick, "agent": name,
                                 "body": f"Task ended with score : {shown}"})
        self.records.append({"kind": "end", "tick": final_tick, "reason": end_reason,
                             "score": score.value, "score_kind": score.kind})
        for name in task.agent_names:
            self.endpoints[name].close(score.value, end_reason)
        return EpisodeLog(self.records)

    def _process_response(self, name: str, text: str, tick: int) -> None:
        ctx = commands.ExecContext(
            world=self.world, convo=self.convo, task=self.task,
            blueprint=self.task.blueprint, progress=self.progress, full_text=text,
        )
        cmd = None
        try:
            cmd = commands.parse_first_command(text)
        except CommandError as exc:
            self.records.append({"kind": "command", "tick": tick, "agent": name,
                                 "command": None, "args": [], "status": "parse_error"})
            self.inboxes[name].append(("system", f"Code output:\n{exc.message}\n"))
        if cmd is not None:
            result = commands.execute(ctx, name, cmd)
            status = "deferred" if result is None else result.status
            self.records.append({"kind": "command", "tick": tick, "agent": name,
                                 "command": cmd.name, "args": cmd.args,
                                 "status": status})
            if result is not None and result.message:
                self.inboxes[name].append(
                    ("system", commands.result_content(cmd.name, result)))
        # chat: the whole message reaches the current partner, except when the
        # first command already moved it through the conversation manager
        if cmd is None or cmd.name not in ("startConversation", "endConversation"):
            if self.convo.partner_of(name) is not None:
                self.convo.enqueue(name, text, tick)


def build_world(task: TaskSpec, seed: int) -> World:
    world = spawn_world_from_spec(task.world_spec, seed)
    positions = spawn_positions(world, len(task.agent_names), seed)
    for name, pos in zip(task.agent_names, positions):
        caps = task.capabilities.get(name)
        capabilities = frozenset(caps) if caps else frozenset({ALL_CLASSES})
        world.agents[name] = AgentBody(
            name, pos, inventory=dict(task.initial_inventories.get(name, {})),
            capabilities=capabilities,
        )
    return world


def reset(world: World, task: TaskSpec, seed: int | None = None) -> World:
    """Re-provision the world and return agents to a fresh start."""
    fresh = build_world(task, seed if seed is not None else task.seed)
    fresh.rng_seed = world.rng_seed if seed is None else seed
    return fresh


def run_episode(task: TaskSpec, agent_kinds, seed: int,
                progress_path: str | None = None,
                address=None, accept_timeout: float = 60.0) -> EpisodeLog:
    """Convenience wrapper: endpoint kinds by position (e.g. ['oracle', 'oracle']).

    Kind 'external' listens on `address` (host, port) and waits for a wire
    protocol agent to claim the slot.
    """
    if isinstance(agent_kinds, dict):
        return EpisodeRunner(task, agent_kinds, seed, progress_path).run()
    if isinstance(agent_kinds, str):
        agent_kinds = agent_kinds.split(",")
    if len(agent_kinds) != len(task.agent_names):
        raise ValueError("need one endpoint kind per agent")
    external = [name for name, kind in zip(task.agent_names, agent_kinds)
                if kind == "external"]
    endpoints = {name: make_endpoint(kind, task, name)
                 for name, kind in zip(task.agent_names, agent_kinds)
                 if kind != "external"}
    server = None
    if external:
        from .gateway import serve

        server = serve(task, seed, address or ("127.0.0.1", 0))
        print(f"gateway listening on {server.address[0]}:{server.address[1]}")
        endpoints.update(server.accept_agents(external, accept_timeout))
    try:
        return EpisodeRunner(task, endpoints, seed, progress_path).run()
    finally:
        if server is not None:
            server.close()


def replay_episode(log: EpisodeLog) -> EpisodeLog:
    """Re-run an episode feeding back its recorded responses; the result
    must reproduce the original final score."""
    task = TaskSpec.from_dict(log.header["task"])
    seed = log.header["seed"]
    endpoints = {name: PlaybackEndpoint(log.turns_for(name))
                 for name in task.agent_names}
    return EpisodeRunner(task, endpoints, seed).run()


def run_suite(tasks, agent_kinds, seeds=None, group_keys=("task_type",)) -> dict:
    """Run a batch, aggregating mean scores by grouping keys."""
    seeds = seeds or [task.seed for task in tasks]
    episodes = []
    for task, seed in zip(tasks, seeds):
        try:
            log = run_episode(task, agent_kinds, seed)
            episodes.append((task, log.final_score, log.end_reason))
        except Exception as exc:  # recorded, not fatal
            episodes.append((task, 0.0, f"agent_error: {exc}"))
    groups: dict[str, list] = {}
    for task, score, _reason in episodes:
        key = ",".join(f"{k}={_group_value(task, k)}" for k in group_keys)
        groups.setdefault(key, []).append(score)
    report = {
        "episodes": len(episodes),
        "overall_mean": (sum(s for _, s, _ in episodes) / len(episodes)
                         if episodes else 0.0),
        "groups": {key: {"mean_score": sum(vals) / len(vals), "episodes": len(vals)}
                   for key, vals in sorted(groups.items())},
        "results": [{"task": t.task_name, "score": s, "end": r}
                    for t, s, r in episodes],
    }
    return report


def _group_value(task: TaskSpec, key: str):
    if key == "agent_count":
        return task.agent_count
    if key == "plan_blocked":
        blocked = sum(1 for v in task.plan_access.values() if not v)
        return {0: "none", len(task.plan_access): "both"}.get(blocked, "one")
    if key in ("m", "r", "w", "c") and task.blueprint is not None:
        return getattr(task.blueprint.config, key)
    if key == "task_type":
        return task.task_type
    return getattr(task, key, "?")
