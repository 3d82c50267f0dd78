"""Tick-based voxel world: blocks, agents, inventories, stations, entities.

All mutation flows through command actions that are advanced one tick at a
time in sorted agent order, which keeps every run bit-reproducible. The
world itself never consults wall-clock time or unseeded randomness.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import dataclass, field

from .core import CommandError
from .materials import (
    AIR,
    ALL_CLASSES,
    LIVESTOCK_DROPS,
    allows,
    drop_item,
    gives_support,
    is_door,
    is_passable,
    is_station,
)
from .pathfind import plan_path

SPEED = 2           # blocks advanced per tick while walking
TICKS_PER_SECOND = 10
INTERACT_RADIUS = 3
FULL_FUEL = 64      # smelt charges in a freshly fueled furnace/smoker
PICKUP_RADIUS_SQ = 1
SEARCH_RADIUS = 64  # default reach of station lookup for chest/furnace use

Vec = tuple[int, int, int]


def dist_sq(a: Vec, b: Vec) -> int:
    return (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2 + (a[2] - b[2]) ** 2


@dataclass
class Block:
    material: str
    station_kind: str | None = None


@dataclass
class Entity:
    kind: str                 # livestock kind or "item"
    pos: Vec
    payload: tuple[str, int] | None = None

    @property
    def is_drop(self) -> bool:
        return self.kind == "item"


class PendingAction:
    """In-flight multi-tick action: a generator that yields once per tick
    and returns its completion message."""

    def __init__(self, command_name: str, gen):
        self.command_name = command_name
        self.gen = gen


@dataclass
class AgentBody:
    name: str
    pos: Vec
    inventory: dict[str, int] = field(default_factory=dict)
    capabilities: frozenset = frozenset({ALL_CLASSES})
    saved_places: dict[str, Vec] = field(default_factory=dict)
    action: PendingAction | None = None

    @property
    def busy(self) -> bool:
        return self.action is not None

    def count(self, item: str) -> int:
        return self.inventory.get(item, 0)


@dataclass
class ScanResult:
    blocks: list       # (material, pos)
    agents: list       # (name, pos)
    entities: list     # (kind, payload_item, pos)


class World:
    def __init__(self, bounds: tuple, ground_y: int, rng_seed: int):
        # bounds are inclusive: (x0, x1, y0, y1, z0, z1)
        self.bounds = bounds
        self.ground_y = ground_y
        self.rng_seed = rng_seed
        self.grid: dict[Vec, Block] = {}
        self.agents: dict[str, AgentBody] = {}
        self.entities: list[Entity] = []
        self.chest_contents: dict[Vec, dict[str, int]] = {}
        self.furnace_fuel: dict[Vec, int] = {}
        self.tick = 0
        self.frozen = False
        self.version = 0  # bumped on grid mutation; lets scorers cache

    # -- geometry ----------------------------------------------------------

    def in_bounds(self, pos: Vec) -> bool:
        x0, x1, y0, y1, z0, z1 = self.bounds
        return x0 <= pos[0] <= x1 and y0 <= pos[1] <= y1 and z0 <= pos[2] <= z1

    def block_at(self, pos: Vec) -> Block | None:
        return self.grid.get(pos)

    def passable(self, pos: Vec) -> bool:
        blk = self.grid.get(pos)
        return blk is None or is_passable(blk.material)

    def solid(self, pos: Vec) -> bool:
        blk = self.grid.get(pos)
        if blk is None:
            return False
        return not is_passable(blk.material)

    def standable(self, pos: Vec) -> bool:
        if not self.in_bounds(pos) or not self.passable(pos):
            return False
        if pos[1] == self.ground_y:
            return True
        below = self.grid.get((pos[0], pos[1] - 1, pos[2]))
        return below is not None and gives_support(below.material)

    def drop_to_ground(self, pos: Vec) -> Vec:
        x, y, z = pos
        while y > self.ground_y and not self.solid((x, y - 1, z)):
            y -= 1
        return (x, y, z)

    # -- inventories -------------------------------------------------------

    def add_item(self, agent: AgentBody, item: str, n: int) -> None:
        if n <= 0:
            return
        agent.inventory[item] = agent.inventory.get(item, 0) + n

    def remove_item(self, agent: AgentBody, item: str, n: int) -> None:
        have = agent.inventory.get(item, 0)
        if have < n:
            raise CommandError("MissingItem", f"You do not have enough {item}.")
        if have == n:
            del agent.inventory[item]
        else:
            agent.inventory[item] = have - n

    def spawn_drop(self, pos: Vec, item: str, n: int) -> Entity:
        ent = Entity("item", self.drop_to_ground(pos), (item, n))
        self.entities.append(ent)
        return ent

    def pickup_drops(self, agent: AgentBody) -> list[tuple[str, int]]:
        """Transfer drops lying within reach of the agent's position."""
        picked = []
        remaining = []
        for ent in self.entities:
            if ent.is_drop and dist_sq(ent.pos, agent.pos) <= PICKUP_RADIUS_SQ:
                item, n = ent.payload
                self.add_item(agent, item, n)
                picked.append((item, n))
            else:
                remaining.append(ent)
        if picked:
            self.entities = remaining
        return picked

    # -- block mutation ----------------------------------------------------

    def set_block(self, pos: Vec, material: str, actor: str) -> None:
        """Place (or, with material='air', remove) a block as an agent."""
        agent = self.agents[actor]
        if not self.in_bounds(pos):
            raise CommandError("OutOfRange", f"({pos[0]}, {pos[1]}, {pos[2]}) is out of bounds.")
        if dist_sq(agent.pos, pos) > INTERACT_RADIUS ** 2:
            raise CommandError(
                "OutOfRange",
                f"({pos[0]}, {pos[1]}, {pos[2]}) is too far away to reach.",
            )
        if material == AIR:
            blk = self.grid.get(pos)
            if blk is None:
                raise CommandError("MissingItem", "There is no block there to remove.")
            if not allows(agent.capabilities, blk.material):
                raise CommandError(
                    "CapabilityDenied",
                    f"You are not able to manipulate {blk.material} ({_class_name(blk.material)} blocks).",
                )
            self._remove_block(pos, blk)
            return
        if agent.count(material) < 1:
            raise CommandError("MissingItem", f"You do not have any {material} to place.")
        if not allows(agent.capabilities, material):
            raise CommandError(
                "CapabilityDenied",
                f"You are not able to manipulate {material} ({_class_name(material)} blocks).",
            )
        cells = [pos]
        if is_door(material):
            cells.append((pos[0], pos[1] + 1, pos[2]))
        for cell in cells:
            if not self.in_bounds(cell):
                raise CommandError("OutOfRange", f"({cell[0]}, {cell[1]}, {cell[2]}) is out of bounds.")
            if cell in self.grid:
                blk = self.grid[cell]
                raise CommandError(
                    "Occupied",
                    f"There is already {blk.material} at ({cell[0]}, {cell[1]}, {cell[2]}).",
                )
        self.remove_item(agent, material, 1)
        self.version += 1
        for cell in cells:
            self.grid[cell] = Block(material, material if is_station(material) else None)
        if is_station(material):
            if material in ("furnace", "smoker"):
                self.furnace_fuel[pos] = 0
            elif material == "chest":
                self.chest_contents.setdefault(pos, {})
        # anyone standing in the filled cell is lifted onto the new block
        for body in self.agents.values():
            if body.pos in cells:
                self.agents[body.name].pos = (body.pos[0], pos[1] + len(cells), body.pos[2])

    def _remove_block(self, pos: Vec, blk: Block) -> None:
        self.version += 1
        cells = [pos]
        if is_door(blk.material):
            below = (pos[0], pos[1] - 1, pos[2])
            above = (pos[0], pos[1] + 1, pos[2])
            if self.grid.get(below) and self.grid[below].material == blk.material:
                cells = [below, pos]
            elif self.grid.get(above) and self.grid[above].material == blk.material:
                cells = [pos, above]
        for cell in cells:
            self.grid.pop(cell, None)
        self.furnace_fuel.pop(pos, None)
        self.chest_contents.pop(pos, None)
        self.spawn_drop(pos, drop_item(blk.material), 1)

    # -- observation -------------------------------------------------------

    def scan_nearby(self, actor: str, radius: int) -> ScanResult:
        center = self.agents[actor].pos
        rsq = radius * radius
        blocks = sorted(
            ((blk.material, pos) for pos, blk in self.grid.items()
             if dist_sq(pos, center) <= rsq),
            key=lambda it: (dist_sq(it[1], center), it[0], it[1]),
        )
        agents = sorted(
            ((name, body.pos) for name, body in self.agents.items()
             if name != actor and dist_sq(body.pos, center) <= rsq),
            key=lambda it: (dist_sq(it[1], center), it[0]),
        )
        entities = sorted(
            ((ent.kind, ent.payload[0] if ent.payload else None, ent.pos)
             for ent in self.entities if dist_sq(ent.pos, center) <= rsq),
            key=lambda it: (dist_sq(it[2], center), it[0], it[1] or "", it[2]),
        )
        return ScanResult(blocks, agents, entities)

    def find_blocks(self, center: Vec, material: str, radius: int) -> list[Vec]:
        rsq = radius * radius
        return sorted(
            (pos for pos, blk in self.grid.items()
             if blk.material == material and dist_sq(pos, center) <= rsq),
            key=lambda pos: (dist_sq(pos, center), pos),
        )

    def nearest_station(self, center: Vec, kind: str, radius: int = SEARCH_RADIUS) -> Vec | None:
        found = self.find_blocks(center, kind, radius)
        return found[0] if found else None

    def find_entities(self, center: Vec, kind: str, radius: int) -> list[Entity]:
        rsq = radius * radius
        return sorted(
            (ent for ent in self.entities
             if ent.kind == kind and dist_sq(ent.pos, center) <= rsq),
            key=lambda ent: (dist_sq(ent.pos, center), ent.pos),
        )

    def kill_entity(self, ent: Entity) -> tuple[str, int]:
        self.entities.remove(ent)
        return (LIVESTOCK_DROPS[ent.kind], 1)

    # -- actions and time --------------------------------------------------

    def submit_action(self, actor: str, command_name: str, gen) -> None:
        agent = self.agents[actor]
        if agent.busy:
            raise CommandError("AlreadyBusy", "You are already executing an action.")
        agent.action = PendingAction(command_name, gen)

    def cancel_action(self, actor: str) -> bool:
        agent = self.agents[actor]
        if agent.action is None:
            return False
        agent.action.gen.close()
        agent.action = None
        return True

    def advance_tick(self) -> list[tuple[str, str, object]]:
        """Advance one tick; returns (agent, command_name, outcome) for every
        action that completed, where outcome is a message str or CommandError."""
        self.tick += 1
        completions = []
        for name in sorted(self.agents):
            agent = self.agents[name]
            if agent.action is None:
                continue
            act = agent.action
            try:
                next(act.gen)
            except StopIteration as stop:
                agent.action = None
                completions.append((name, act.command_name, stop.value or ""))
            except CommandError as exc:
                agent.action = None
                completions.append((name, act.command_name, exc))
        return completions

    def walk_steps(self, actor: str, path: list[Vec]):
        """Generator advancing an agent along a path at SPEED cells/tick,
        picking up drops at each tick's end position."""
        agent = self.agents[actor]
        i = 0
        while i < len(path) - 1:
            i = min(i + SPEED, len(path) - 1)
            agent.pos = path[i]
            self.pickup_drops(agent)
            yield

    def path_to(self, actor: str, target: Vec, closeness: float) -> list[Vec] | None:
        return plan_path(self, self.agents[actor].pos, target, closeness)

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        def key(pos):
            return f"{pos[0]},{pos[1]},{pos[2]}"

        return {
            "tick": self.tick,
            "rng_seed": self.rng_seed,
            "ground_y": self.ground_y,
            "bounds": list(self.bounds),
            "grid": {
                key(pos): {"material": blk.material, "station_kind": blk.station_kind}
                for pos, blk in sorted(self.grid.items())
            },
            "agents": {
                name: {
                    "pos": list(body.pos),
                    "inventory": dict(sorted(body.inventory.items())),
                    "busy": body.busy,
                    "capabilities": sorted(body.capabilities),
                    "saved_places": {k: list(v) for k, v in sorted(body.saved_places.items())},
                }
                for name, body in sorted(self.agents.items())
            },
            "entities": [
                {"kind": ent.kind, "pos": list(ent.pos),
                 "payload": list(ent.payload) if ent.payload else None}
                for ent in self.entities
            ],
            "chests": {key(pos): dict(sorted(inv.items()))
                       for pos, inv in sorted(self.chest_contents.items())},
            "furnace_fuel": {key(pos): n for pos, n in sorted(self.furnace_fuel.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def state_hash(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()

    def census(self) -> dict[str, int]:
        """Total items in play, with placed blocks counted as the item they
        would drop (door pairs count once)."""
        totals: dict[str, int] = {}

        def bump(item, n):
            totals[item] = totals.get(item, 0) + n

        for body in self.agents.values():
            for item, n in body.inventory.items():
                bump(item, n)
        for inv in self.chest_contents.values():
            for item, n in inv.items():
                bump(item, n)
        for ent in self.entities:
            if ent.is_drop:
                bump(ent.payload[0], ent.payload[1])
        for pos, blk in self.grid.items():
            if is_door(blk.material):
                below = (pos[0], pos[1] - 1, pos[2])
                if self.grid.get(below) and self.grid[below].material == blk.material:
                    continue  # count door pairs at their base cell only
            bump(drop_item(blk.material), 1)
        return totals


def _class_name(material: str) -> str:
    from .materials import material_class

    return material_class(material)


# -- provisioning -----------------------------------------------------------

FARM_CROPS = ("wheat", "carrots", "potatoes", "beetroots", "pumpkin",
              "brown_mushroom", "red_mushroom", "sugar_cane", "dandelion")
FARM_LIVESTOCK = ("cow", "pig", "sheep", "chicken", "rabbit")
FARM_CHEST_BASE = {"bowl": 1, "apple": 1, "gold_ingot": 8, "gold_nugget": 8,
                   "milk_bucket": 1, "egg": 1, "cocoa_beans": 1}

DEFAULT_HALF_EXTENT = 40


def spawn_world_from_spec(spec: dict, seed: int) -> World:
    """Build a deterministic world for a provision spec.

    spec kinds: cooking-farm, crafting-forest, construction-superflat.
    Optional fields override the baseline stock: origin, half_extent,
    chest (item->count), crops (block->count), livestock (kind->count),
    blocks (material->count).
    """
    kind = spec.get("kind")
    if kind not in ("cooking-farm", "crafting-forest", "construction-superflat"):
        raise CommandError("InvalidSpec", f"Unknown world spec kind: {kind!r}")
    origin = tuple(spec.get("origin", (0, -60, 0)))
    half = spec.get("half_extent", DEFAULT_HALF_EXTENT)
    ox, oy, oz = origin
    bounds = (ox - half, ox + half, oy, oy + 24, oz - half, oz + half)
    world = World(bounds, ground_y=oy, rng_seed=seed)
    rng = random.Random(seed)

    def scatter_positions():
        cells = [(ox + dx, oy, oz + dz)
                 for dx in range(-24, 25) for dz in range(-24, 25)
                 if 4 <= abs(dx) + abs(dz) <= 44]
        rng.shuffle(cells)
        return cells

    def place(cells, material):
        while cells:
            pos = cells.pop()
            if pos not in world.grid and world.in_bounds(pos):
                world.grid[pos] = Block(material, material if is_station(material) else None)
                return pos
        raise CommandError("InvalidSpec", "world provisioning ran out of free cells")

    if kind == "construction-superflat":
        return world

    cells = scatter_positions()
    stations = {"furnace": (ox + 3, oy, oz), "smoker": (ox + 3, oy, oz + 2),
                "crafting_table": (ox + 3, oy, oz - 2), "chest": (ox + 5, oy, oz)}
    if kind == "cooking-farm":
        for station, pos in stations.items():
            world.grid[pos] = Block(station, station)
        world.furnace_fuel[stations["furnace"]] = FULL_FUEL
        world.furnace_fuel[stations["smoker"]] = FULL_FUEL
        chest = dict(FARM_CHEST_BASE)
        for item, n in spec.get("chest", {}).items():
            chest[item] = chest.get(item, 0) + n
        world.chest_contents[stations["chest"]] = {k: v for k, v in chest.items() if v > 0}
        crops = {c: 1 for c in FARM_CROPS}
        for block, n in spec.get("crops", {}).items():
            crops[block] = crops.get(block, 0) + n
        for block in FARM_CROPS:
            for _ in range(crops.get(block, 0)):
                place(cells, block)
        livestock = {k: 1 for k in FARM_LIVESTOCK}
        for animal, n in spec.get("livestock", {}).items():
            livestock[animal] = livestock.get(animal, 0) + n
        for animal in FARM_LIVESTOCK:
            for _ in range(livestock.get(animal, 0)):
                while cells:
                    pos = cells.pop()
                    if pos not in world.grid:
                        world.entities.append(Entity(animal, pos))
                        break
    else:  # crafting-forest
        world.grid[stations["crafting_table"]] = Block("crafting_table", "crafting_table")
        blocks = {"oak_log": 2, "stone": 4, "sugar_cane": 2}
        for material, n in spec.get("blocks", {}).items():
            blocks[material] = blocks.get(material, 0) + n
        for material in sorted(blocks):
            for _ in range(blocks[material]):
                place(cells, material)
    return world


def spawn_positions(world: World, n: int, seed: int) -> list[Vec]:
    """Deterministic standable spawn cells near the world origin."""
    rng = random.Random(seed)
    x0, x1, _, _, z0, z1 = world.bounds
    cx, cz = (x0 + x1) // 2, (z0 + z1) // 2
    cells = [(cx + dx, world.ground_y, cz + dz)
             for dx in range(-8, 9) for dz in range(-8, 9)]
    rng.shuffle(cells)
    out = []
    for pos in cells:
        if world.standable(pos) and pos not in out:
            out.append(pos)
            if len(out) == n:
                return out
    raise CommandError("InvalidSpec", "not enough free spawn cells")
