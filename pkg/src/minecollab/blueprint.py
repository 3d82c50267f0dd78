"""Procedural building blueprints: layered material grids with rooms,
doors, windows, carpets, and staircases.

Complexity knobs (each 0-2): m unique structural materials, r rooms and
stories, w window style, c carpet style; v picks the variant instance.
Identical (config, seed) always yields an identical blueprint.

Every non-air cell rests on another non-air cell or on the ground, so a
build order that goes level by level never needs scaffolding.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field

AIR = "air"

STRUCTURAL_POOL = ("stone", "terracotta", "bricks", "oak_planks", "cobblestone")
CARPET_POOL = ("light_blue_carpet", "cyan_carpet", "lime_carpet", "blue_carpet", "red_carpet")
DOOR_POOL = ("oak_door", "dark_oak_door")

ROOM_RANGE = {0: (1, 2), 1: (3, 4), 2: (5, 6)}
STORY_RANGE = {0: (1, 1), 1: (1, 2), 2: (2, 3)}
MATERIAL_RANGE = {0: (1, 1), 1: (2, 3), 2: (4, 5)}
STORY_HEIGHT = 3


@dataclass
class BlueprintConfig:
    m: int
    r: int
    w: int
    c: int
    v: int = 0

    def __post_init__(self):
        for knob in (self.m, self.r, self.w, self.c):
            if knob not in (0, 1, 2):
                raise ValueError("complexity levels must be in 0..2")

    @property
    def name(self) -> str:
        return (f"materials_{self.m}_rooms_{self.r}_window_{self.w}"
                f"_carpet_{self.c}_variant_{self.v}")


@dataclass
class Blueprint:
    config: BlueprintConfig
    origin: tuple            # world position of level 0, row 0, col 0
    levels: list             # bottom-up list of [rows][cols] material grids
    materials_used: set = field(default_factory=set)
    room_count: int = 0
    story_count: int = 1

    def cell_material(self, level: int, row: int, col: int) -> str:
        return self.levels[level][row][col]

    def cells(self):
        """Yield (world_pos, material) for non-air cells in scoring order."""
        ox, oy, oz = self.origin
        for k, grid in enumerate(self.levels):
            for i, row in enumerate(grid):
                for j, mat in enumerate(row):
                    if mat != AIR:
                        yield (ox + j, oy + k, oz + i), mat

    def level_cells(self, level: int):
        ox, oy, oz = self.origin
        for i, row in enumerate(self.levels[level]):
            for j, mat in enumerate(row):
                yield (ox + j, oy + level, oz + i), mat

    def bill_of_materials(self) -> dict[str, int]:
        """Item counts needed to build every cell (door pairs cost one door)."""
        bill: dict[str, int] = {}
        for (x, y, z), mat in self.cells():
            if mat.endswith("_door"):
                level = y - self.origin[1]
                if level > 0 and self.cell_material(
                        level - 1, z - self.origin[2], x - self.origin[0]) == mat:
                    continue  # top half of a door pair
            bill[mat] = bill.get(mat, 0) + 1
        return bill

    def to_dict(self) -> dict:
        return {
            "config": {"m": self.config.m, "r": self.config.r, "w": self.config.w,
                       "c": self.config.c, "v": self.config.v},
            "origin": list(self.origin),
            "levels": self.levels,
            "materials": sorted(self.materials_used),
            "room_count": self.room_count,
            "story_count": self.story_count,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Blueprint":
        cfg = BlueprintConfig(**data["config"])
        return cls(cfg, tuple(data["origin"]), data["levels"],
                   set(data["materials"]), data["room_count"], data["story_count"])

    def content_hash(self) -> str:
        payload = json.dumps({"origin": list(self.origin), "levels": self.levels},
                             sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()

    def render(self, level: int | None = None) -> str:
        ks = range(len(self.levels)) if level is None else [level]
        out = []
        for k in ks:
            rows = ["|".join(row) for row in self.levels[k]]
            out.append(f"Level {k}:\n" + "\n".join(rows))
        return "\n".join(out)


def _split_rooms(rng, x0, z0, x1, z1, count):
    """Partition an interior rectangle into `count` rooms via seeded BSP.

    Returns (rooms, walls): rooms are (x0, z0, x1, z1) inclusive, walls are
    ("x"|"z", line, lo, hi) separators one cell thick.
    """
    rooms = [(x0, z0, x1, z1)]
    walls = []
    while len(rooms) < count:
        rooms.sort(key=lambda r: ((r[2] - r[0] + 1) * (r[3] - r[1] + 1), r))
        rx0, rz0, rx1, rz1 = rooms.pop()
        width, depth = rx1 - rx0 + 1, rz1 - rz0 + 1
        if max(width, depth) < 7:  # cannot split further: 3 + wall + 3
            rooms.append((rx0, rz0, rx1, rz1))
            break
        if width >= depth:
            line = rng.randint(rx0 + 3, rx1 - 3)
            rooms.append((rx0, rz0, line - 1, rz1))
            rooms.append((line + 1, rz0, rx1, rz1))
            walls.append(("x", line, rz0, rz1))
        else:
            line = rng.randint(rz0 + 3, rz1 - 3)
            rooms.append((rx0, rz0, rx1, line - 1))
            rooms.append((rx0, line + 1, rx1, rz1))
            walls.append(("z", line, rx0, rx1))
    return rooms, walls


def generate_blueprint(config: BlueprintConfig, seed: int,
                       origin: tuple = (0, -60, 0)) -> Blueprint:
    rng = random.Random(f"blueprint:{seed}:{config.name}")
    rooms_n = rng.randint(*ROOM_RANGE[config.r])
    stories = rng.randint(*STORY_RANGE[config.r])
    side = 9 + 2 * max(0, rooms_n - 2)
    w = d = side

    interior = (1, 1, w - 2, d - 2)
    rooms, walls = _split_rooms(rng, *interior, rooms_n)
    rooms_n = len(rooms)

    n_struct = rng.randint(*MATERIAL_RANGE[config.m])
    segments = 4 * stories + len(walls) + (1 if stories > 1 else 0)
    n_struct = min(n_struct, max(1, segments))
    structurals = rng.sample(STRUCTURAL_POOL, n_struct)
    door_mat = rng.choice(DOOR_POOL)
    carpet_colors = (rng.sample(CARPET_POOL, 1) if config.c == 1
                     else rng.sample(CARPET_POOL, 3) if config.c == 2 else [])

    height = stories * STORY_HEIGHT
    levels = [[[AIR] * w for _ in range(d)] for _ in range(height)]

    def paint(level, col, row, mat):
        levels[level][row][col] = mat

    seg = 0

    def next_mat():
        nonlocal seg
        mat = structurals[seg % n_struct]
        seg += 1
        return mat

    # perimeter walls, one material segment per side per story
    for s in range(stories):
        base = s * STORY_HEIGHT
        for side_id, cells in enumerate((
            [(x, 0) for x in range(w)],
            [(x, d - 1) for x in range(w)],
            [(0, z) for z in range(1, d - 1)],
            [(w - 1, z) for z in range(1, d - 1)],
        )):
            mat = next_mat()
            for (x, z) in cells:
                for dy in range(STORY_HEIGHT):
                    paint(base + dy, x, z, mat)

    # interior partition walls on the ground story
    wall_cells = []
    for axis, line, lo, hi in walls:
        mat = next_mat()
        cells = ([(line, z) for z in range(lo, hi + 1)] if axis == "x"
                 else [(x, line) for x in range(lo, hi + 1)])
        wall_cells.append(cells)
        for (x, z) in cells:
            for dy in range(STORY_HEIGHT):
                paint(dy, x, z, mat)

    # one exterior door, plus one door per partition wall
    front_x = rng.randint(2, w - 3)
    paint(0, front_x, 0, door_mat)
    paint(1, front_x, 0, door_mat)
    for cells in wall_cells:
        x, z = cells[rng.randrange(1, len(cells) - 1)] if len(cells) > 2 else cells[0]
        paint(0, x, z, door_mat)
        paint(1, x, z, door_mat)

    # windows at eye level in the perimeter
    if config.w > 0:
        for s in range(stories):
            eye = s * STORY_HEIGHT + 1
            ring = ([(x, 0) for x in range(2, w - 2)]
                    + [(x, d - 1) for x in range(2, w - 2)]
                    + [(0, z) for z in range(2, d - 2)]
                    + [(w - 1, z) for z in range(2, d - 2)])
            step = 3 if config.w == 1 else 1
            for idx, (x, z) in enumerate(ring):
                if idx % step == 0 and levels[eye][z][x] not in (door_mat,):
                    paint(eye, x, z, "glass")

    # carpets on room floors
    if carpet_colors:
        for ri, (rx0, rz0, rx1, rz1) in enumerate(sorted(rooms)):
            for x in range(rx0 + 1, rx1):
                for z in range(rz0 + 1, rz1):
                    if levels[0][z][x] != AIR:
                        continue
                    if config.c == 1 and (x + z) % 3 == 0:
                        paint(0, x, z, carpet_colors[0])
                    elif config.c == 2 and (x + z) % 2 == 0:
                        paint(0, x, z, carpet_colors[(x + z + ri) % len(carpet_colors)])

    # staircase: solid step columns hugging the perimeter's inner ring, one
    # block higher per cell, so the top of every story stays mountable
    if stories > 1:
        stair_mat = structurals[0]
        ring = ([(x, 1) for x in range(1, w - 1)]
                + [(w - 2, z) for z in range(2, d - 1)]
                + [(x, d - 2) for x in range(w - 3, 0, -1)]
                + [(1, z) for z in range(d - 3, 1, -1)])
        steps_needed = min(STORY_HEIGHT * (stories - 1), len(ring))

        def stair_ok(x, z):
            if levels[0][z][x] != AIR and not levels[0][z][x].endswith("_carpet"):
                return False  # a partition wall crosses here
            for dx, dz in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                nx, nz = x + dx, z + dz
                if 0 <= nx < w and 0 <= nz < d and levels[0][nz][nx] == door_mat:
                    return False  # would block a doorway
            return True

        offset = 0
        for candidate in range(len(ring)):
            cells = [ring[(candidate + i) % len(ring)] for i in range(steps_needed)]
            if all(stair_ok(x, z) for x, z in cells):
                offset = candidate
                break
        for step in range(steps_needed):
            x, z = ring[(offset + step) % len(ring)]
            for dy in range(step + 1):
                paint(dy, x, z, stair_mat)

    used = set()
    for grid in levels:
        for row in grid:
            used.update(mat for mat in row if mat != AIR)

    return Blueprint(config, origin, levels, used, rooms_n, stories)
