"""Task scoring, blueprint diffing, and shared cooking progress."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .blueprint import AIR, Blueprint
from .core import CommandError
from .materials import is_station
from .world import Block, World


@dataclass
class Score:
    value: float
    kind: str                    # "binary" | "edit_distance"
    detail: dict = field(default_factory=dict)


class ProgressStore:
    """Monotone per-agent completion of ordered target indices.

    Optionally write-ahead persists marks to a JSONL file so separate agent
    processes can share progress across restarts.
    """

    def __init__(self, path: str | None = None):
        self.per_agent_done: dict[str, set[int]] = {}
        self.path = path
        if path:
            try:
                with open(path) as fh:
                    for line in fh:
                        rec = json.loads(line)
                        self.per_agent_done.setdefault(rec["agent"], set()).add(rec["index"])
            except FileNotFoundError:
                pass

    def mark(self, agent: str, index: int) -> None:
        done = self.per_agent_done.setdefault(agent, set())
        if index in done:
            return
        done.add(index)
        if self.path:
            with open(self.path, "a") as fh:
                fh.write(json.dumps({"agent": agent, "index": index}) + "\n")

    def done(self, agent: str) -> set:
        return self.per_agent_done.get(agent, set())


def hells_kitchen_assignment(task) -> dict[str, list[int]]:
    """Target indices each agent must end up holding (round-robin by order)."""
    names = task.agent_names
    out: dict[str, list[int]] = {name: [] for name in names}
    for idx in range(len(task.target_items)):
        out[names[idx % len(names)]].append(idx)
    return out


def update_progress(world: World, task, progress: ProgressStore) -> None:
    assignment = hells_kitchen_assignment(task)
    for name, indices in assignment.items():
        body = world.agents.get(name)
        if body is None:
            continue
        for idx in indices:
            item, count = task.target_items[idx]
            if body.count(item) >= count:
                progress.mark(name, idx)


def score_cooking(world: World, task, progress: ProgressStore | None = None) -> Score:
    if task.hells_kitchen:
        progress = progress or ProgressStore()
        update_progress(world, task, progress)
        assignment = hells_kitchen_assignment(task)
        complete = all(set(idx for idx in indices) <= progress.done(name)
                       for name, indices in assignment.items())
        detail = {"completed": {name: sorted(progress.done(name))
                                for name in task.agent_names}}
        return Score(1.0 if complete else 0.0, "binary", detail)
    for name in task.agent_names:
        body = world.agents.get(name)
        if body and all(body.count(item) >= count for item, count in task.target_items):
            return Score(1.0, "binary", {"holder": name})
    return Score(0.0, "binary", {})


def score_crafting(world: World, task) -> Score:
    item, count = task.target_items[0]
    for name in task.agent_names:
        body = world.agents.get(name)
        if body and body.count(item) >= count:
            return Score(1.0, "binary", {"holder": name})
    return Score(0.0, "binary", {})


def score_blueprint(world: World, bp: Blueprint) -> Score:
    matched = total = 0
    per_level = {}
    extras = []
    for k in range(len(bp.levels)):
        lvl_matched = lvl_total = 0
        for pos, mat in bp.level_cells(k):
            blk = world.grid.get(pos)
            if mat == AIR:
                if blk is not None:
                    extras.append([list(pos), blk.material])
                continue
            lvl_total += 1
            if blk is not None and blk.material == mat:
                lvl_matched += 1
        per_level[k] = [lvl_matched, lvl_total]
        matched += lvl_matched
        total += lvl_total
    value = matched / total if total else 1.0
    return Score(value, "edit_distance",
                 {"matched": matched, "total": total,
                  "per_level": per_level, "extras": extras})


def _level_fixes(world: World, bp: Blueprint, k: int) -> list[str]:
    fixes = []
    for (x, y, z), mat in bp.level_cells(k):
        blk = world.grid.get((x, y, z))
        if mat == AIR:
            if blk is not None:
                fixes.append(f"Remove the {blk.material} at coordinates X: {x}, Y: {y}, Z: {z}")
        elif blk is None or blk.material != mat:
            fixes.append(f"Place {mat} at coordinates X: {x}, Y: {y}, Z: {z}")
    return fixes


def blueprint_diff(world: World, bp: Blueprint, level: int | None = None) -> str:
    """Fix text for one level (or all levels joined with newlines)."""
    if level is not None and not 0 <= level < len(bp.levels):
        raise CommandError("InvalidLevel", f"Level {level} does not exist in the blueprint.")
    ks = range(len(bp.levels)) if level is None else [level]
    blocks = []
    for k in ks:
        fixes = _level_fixes(world, bp, k)
        if fixes:
            blocks.append(f"Level {k} requires the following fixes:\n" + "\n".join(fixes))
        else:
            blocks.append(f"Level {k} is complete")
    return "\n".join(blocks)


FIX_RE = re.compile(
    r"^(Place|Remove the) (\S+) at coordinates X: (-?\d+), Y: (-?\d+), Z: (-?\d+)$"
)


def parse_fix_line(line: str):
    """-> (op, material, (x, y, z)) where op is 'place' or 'remove'."""
    match = FIX_RE.match(line.strip())
    if not match:
        return None
    op = "place" if match.group(1) == "Place" else "remove"
    return op, match.group(2), (int(match.group(3)), int(match.group(4)), int(match.group(5)))


def apply_fixes(world: World, fixes_text: str) -> int:
    """Apply every fix line directly to the grid (verification tool: skips
    agent inventory/capability checks). Returns the number of edits."""
    edits = 0
    for line in fixes_text.splitlines():
        parsed = parse_fix_line(line)
        if parsed is None:
            continue
        op, mat, pos = parsed
        if op == "place":
            world.grid[pos] = Block(mat, mat if is_station(mat) else None)
        else:
            world.grid.pop(pos, None)
        world.version += 1
        edits += 1
    return edits
