"""Procedural task generation for cooking, crafting, and construction,
with collaboration-forcing resource partitions and train/test splits."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .blueprint import Blueprint, BlueprintConfig, generate_blueprint
from .core import CommandError
from .materials import material_class
from .recipes import BOOK, compute_crafting_plan

AGENT_NAME_POOL = ("Andy_0", "Jill_0", "Bob_0", "Sally_0", "Randy_0")

COOKING_TRAIN_ITEMS = (
    "cooked_beef", "cooked_porkchop", "cooked_chicken", "cooked_rabbit",
    "beetroot_soup", "rabbit_stew", "suspicious_stew", "cookie",
    "pumpkin_pie", "golden_apple",
)
COOKING_TEST_ITEMS = (
    "cooked_mutton", "baked_potato", "cake", "golden_carrot",
    "mushroom_stew", "bread",
)

CRAFTING_TRAIN_ITEMS = (
    "campfire", "bow", "shield", "iron_pickaxe", "torch",
    "wooden_pickaxe", "wooden_axe", "chest", "gold_ingot", "golden_carrot",
)
CRAFTING_TEST_ITEMS = (
    "stone_pickaxe", "compass", "carrot_on_a_stick", "bookshelf",
    "fishing_rod", "book",
)

TECHTREE_TARGETS = {"stone_pickaxe", "wooden_pickaxe", "wooden_axe", "iron_pickaxe"}

# cooking-world sourcing tables
CHEST_ITEMS = {"bowl", "apple", "gold_ingot", "gold_nugget", "milk_bucket",
               "egg", "cocoa_beans"}
CROP_BLOCK_FOR_ITEM = {
    "wheat": "wheat", "carrot": "carrots", "potato": "potatoes",
    "beetroot": "beetroots", "pumpkin": "pumpkin",
    "brown_mushroom": "brown_mushroom", "red_mushroom": "red_mushroom",
    "sugar_cane": "sugar_cane", "dandelion": "dandelion",
}
ANIMAL_FOR_MEAT = {"beef": "cow", "porkchop": "pig", "mutton": "sheep",
                   "chicken": "chicken", "rabbit": "rabbit"}
SMELT_RAW_FOR = {out: raw for raw, out in BOOK.smelts.items()}

# crafting-forest collectable raws: item -> block to provision
FOREST_BLOCK_FOR_ITEM = {"oak_log": "oak_log", "sugar_cane": "sugar_cane",
                         "cobblestone": "stone"}

DEFAULT_SPLIT_SIZES = {"cooking": (280, 90), "crafting": (1200, 100),
                       "construction": (2000, 30)}


@dataclass
class TaskSpec:
    task_name: str
    task_type: str
    goal: str
    agent_names: list
    initial_inventories: dict
    target_items: list  # ordered (item, count) pairs
    plan_access: dict
    recipe_access: dict  # agent -> target indices whose recipe text it sees
    hells_kitchen: bool
    timeout_seconds: int
    world_spec: dict
    seed: int
    blueprint: Blueprint | None = None
    capabilities: dict = field(default_factory=dict)
    cheats: bool = False

    @property
    def agent_count(self) -> int:
        return len(self.agent_names)

    @property
    def max_ticks(self) -> int:
        return self.timeout_seconds * 10

    def to_dict(self) -> dict:
        return {
            "task_name": self.task_name,
            "task_type": self.task_type,
            "goal": self.goal,
            "agent_names": list(self.agent_names),
            "agent_count": self.agent_count,
            "initial_inventories": self.initial_inventories,
            "target_items": [list(t) for t in self.target_items],
            "plan_access": self.plan_access,
            "recipe_access": self.recipe_access,
            "hells_kitchen": self.hells_kitchen,
            "timeout_seconds": self.timeout_seconds,
            "world_spec": self.world_spec,
            "seed": self.seed,
            "blueprint": self.blueprint.to_dict() if self.blueprint else None,
            "capabilities": self.capabilities,
            "cheats": self.cheats,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "TaskSpec":
        bp = Blueprint.from_dict(data["blueprint"]) if data.get("blueprint") else None
        return cls(
            task_name=data["task_name"],
            task_type=data["task_type"],
            goal=data["goal"],
            agent_names=list(data["agent_names"]),
            initial_inventories={k: dict(v) for k, v in data["initial_inventories"].items()},
            target_items=[tuple(t) for t in data["target_items"]],
            plan_access=dict(data["plan_access"]),
            recipe_access={k: list(v) for k, v in data.get("recipe_access", {}).items()},
            hells_kitchen=data.get("hells_kitchen", False),
            timeout_seconds=data["timeout_seconds"],
            world_spec=data["world_spec"],
            seed=data["seed"],
            blueprint=bp,
            capabilities={k: list(v) for k, v in data.get("capabilities", {}).items()},
            cheats=data.get("cheats", False),
        )

    @classmethod
    def load(cls, path: str) -> "TaskSpec":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def save(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json() + "\n")


# -- cooking -----------------------------------------------------------------

COOKING_STOPS = frozenset(CHEST_ITEMS) | frozenset(CROP_BLOCK_FOR_ITEM) \
    | frozenset(ANIMAL_FOR_MEAT) | frozenset(SMELT_RAW_FOR)


def cooking_bill(targets) -> dict[str, int]:
    """World-sourced ingredient totals for a cooking goal, with smelted
    intermediates expanded down to their raw meat/crop."""
    needs: dict[str, int] = {}
    for item, count in targets:
        plan = compute_crafting_plan(item, count, {}, treat_as_raw=COOKING_STOPS)
        for missing_item, n in (plan.missing or {item: count}).items():
            needs[missing_item] = needs.get(missing_item, 0) + n
    # resolve smelt outputs (cooked_*, baked_potato) to their raw input
    resolved: dict[str, int] = {}
    for item, n in needs.items():
        item = SMELT_RAW_FOR.get(item, item)
        resolved[item] = resolved.get(item, 0) + n
    return resolved


def recipe_steps_text(item: str) -> str:
    """Human-readable preparation steps for one cooking target."""
    bill_stops = COOKING_STOPS
    plan = compute_crafting_plan(item, 1, {}, treat_as_raw=bill_stops)
    needs = plan.missing or {item: 1}
    steps = []
    farm, chest, animals, smelts = [], [], [], []
    for need, n in needs.items():
        raw = SMELT_RAW_FOR.get(need, need)
        if need in SMELT_RAW_FOR:
            smelts.append(raw)
        if raw in ANIMAL_FOR_MEAT:
            animals.append((ANIMAL_FOR_MEAT[raw], raw, n))
        elif raw in CROP_BLOCK_FOR_ITEM:
            note = " (search for 'potatoes' (not 'potato')" if raw == "potato" else ""
            farm.append(f"{n} {raw.replace('_', ' ')}{note}")
        elif raw in CHEST_ITEMS:
            chest.append(f"{n} {raw.replace('_', ' ')}{'s' if n > 1 else ''}")
    if farm:
        steps.append(f"Go to the farm and collect {', '.join(farm)}.")
    if chest:
        steps.append(f"Go to the chest and collect {' and '.join(chest)}.")
    for kind, raw, n in animals:
        steps.append(f"Kill a {kind} and pick up {n} {raw.replace('_', ' ')} that is dropped.")
    for raw in smelts:
        verb = "bake" if raw == "potato" else "cook"
        steps.append(f"Go to the furnace and {verb} the {raw.replace('_', ' ')}.")
    for line in plan.steps:
        inputs, _, output = line[len("Craft "):].partition(" -> ")
        out_name = output.split(" ", 1)[1].replace("_", " ")
        recipe = BOOK.recipes[output.split(" ", 1)[1]]
        where = ("Go to the crafting table and combine"
                 if recipe.station == "crafting_table" else "Combine")
        steps.append(f"{where} {inputs.replace('_', ' ')} to make {out_name}.")
    numbered = [f"Step {i + 1}: {text}" for i, text in enumerate(steps)]
    return f"Recipe for {item}:\n" + "\n".join(numbered)


def _targets_text(targets) -> str:
    return ", ".join(f"{n} {item}" for item, n in targets)


def _collab_clause(agent: str, names) -> str:
    others = ", ".join(n for n in names if n != agent)
    return (f"You have to collaborate with other agents/bots, namely {others} "
            "to complete the task as soon as possible by dividing the work "
            "among yourselves.")


def goal_for_agent(task: TaskSpec, agent: str) -> str:
    """Per-agent goal text: base goal, recipe steps the agent may see, and
    the collaboration clause."""
    if task.task_type == "construction":
        return task.goal + "\n" + _collab_clause(agent, task.agent_names)
    if task.task_type in ("crafting", "techtree"):
        return task.goal + "\n" + _collab_clause(agent, task.agent_names)
    parts = [f"Collaborate with agents around you to make {_targets_text(task.target_items)}. "]
    recipe_idx = task.recipe_access.get(agent, [])
    if recipe_idx:
        for idx in recipe_idx:
            parts.append("\n\n" + recipe_steps_text(task.target_items[idx][0]))
        parts.append("\n")
    if task.hells_kitchen:
        from .evaluator import hells_kitchen_assignment

        mine = hells_kitchen_assignment(task)[agent]
        mine_text = ", ".join(task.target_items[i][0] for i in mine)
        parts.append(
            f"\nIn the end, you must personally be holding: {mine_text}. "
            "Your teammates hold the recipes for your items, so ask them for the "
            "recipe instructions and share the recipes you have when asked."
        )
    else:
        parts.append("\nIn the end, all the food items should be given to one single bot.")
    parts.append(_collab_clause(agent, task.agent_names))
    return "".join(parts)


def generate_cooking_task(seed: int, agent_count: int = 2, item_count: int = 2,
                          hells_kitchen: bool = False, blocked_agents: int = 0,
                          split: str = "test") -> TaskSpec:
    if not 2 <= agent_count <= 5:
        raise CommandError("InvalidSpec", "agent_count must be in 2..5")
    pool = COOKING_TEST_ITEMS if split == "test" else COOKING_TRAIN_ITEMS
    if item_count > len(pool):
        raise CommandError("InsufficientPool",
                           f"The {split} pool has only {len(pool)} items.")
    rng = random.Random(f"cooking:{seed}:{agent_count}:{item_count}:"
                        f"{hells_kitchen}:{blocked_agents}:{split}")
    items = rng.sample(list(pool), item_count)
    targets = [(item, 1) for item in items]
    names = list(AGENT_NAME_POOL[:agent_count])

    recipe_access: dict[str, list] = {}
    plan_access: dict[str, bool] = {}
    if hells_kitchen:
        for i, name in enumerate(names):
            recipe_access[name] = [j for j in range(len(targets))
                                   if j % agent_count == (i + 1) % agent_count]
            plan_access[name] = False
    else:
        blocked = set(names[len(names) - blocked_agents:]) if blocked_agents else set()
        for name in names:
            has_access = name not in blocked
            recipe_access[name] = list(range(len(targets))) if has_access else []
            plan_access[name] = has_access

    bill = cooking_bill(targets)
    chest_extra, crops_extra, livestock_extra = {}, {}, {}
    for item, n in sorted(bill.items()):
        if item in ANIMAL_FOR_MEAT:
            animal = ANIMAL_FOR_MEAT[item]
            livestock_extra[animal] = livestock_extra.get(animal, 0) + n
        elif item in CROP_BLOCK_FOR_ITEM:
            block = CROP_BLOCK_FOR_ITEM[item]
            crops_extra[block] = crops_extra.get(block, 0) + n
        elif item in CHEST_ITEMS:
            chest_extra[item] = chest_extra.get(item, 0) + n

    name = (f"multiagent_cooking_{agent_count}_"
            + "_".join(f"{n}_{item}" for item, n in targets))
    if hells_kitchen:
        name += "_hells_kitchen"
    if blocked_agents:
        name += f"_blocked_access_{blocked_agents}"

    task = TaskSpec(
        task_name=name,
        task_type="cooking",
        goal=f"Collaborate with agents around you to make {_targets_text(targets)}.",
        agent_names=names,
        initial_inventories={n: {} for n in names},
        target_items=targets,
        plan_access=plan_access,
        recipe_access=recipe_access,
        hells_kitchen=hells_kitchen,
        timeout_seconds=300 * max(1, item_count),
        world_spec={"kind": "cooking-farm", "chest": chest_extra,
                    "crops": crops_extra, "livestock": livestock_extra},
        seed=seed,
    )
    return task


# -- crafting ----------------------------------------------------------------

def generate_crafting_task(seed: int, agent_count: int = 2,
                           target: str = "stone_pickaxe",
                           plan_blocked: str = "none") -> TaskSpec:
    if not 2 <= agent_count <= 5:
        raise CommandError("InvalidSpec", "agent_count must be in 2..5")
    if target not in BOOK.recipes:
        raise CommandError("UnknownTarget", f"There is no crafting plan for {target}.")
    rng = random.Random(f"crafting:{seed}:{agent_count}:{target}:{plan_blocked}")
    names = list(AGENT_NAME_POOL[:agent_count])

    raws = compute_crafting_plan(target, 1, {}).missing
    units = []
    for item in sorted(raws):
        units.extend([item] * raws[item])
    if len(units) < 2:
        raise CommandError("InvalidSpec",
                           f"{target} needs too few raw items to force collaboration.")
    offset = rng.randrange(agent_count)
    inventories: dict[str, dict] = {n: {} for n in names}
    for i, item in enumerate(units):
        holder = names[(i + offset) % agent_count]
        inventories[holder][item] = inventories[holder].get(item, 0) + 1

    # flavor tools, mirroring the canonical two-agent tech-tree setup
    if target in TECHTREE_TARGETS and agent_count >= 2:
        inventories[names[0]]["wooden_pickaxe"] = \
            inventories[names[0]].get("wooden_pickaxe", 0) + 1
        inventories[names[1]]["wooden_axe"] = \
            inventories[names[1]].get("wooden_axe", 0) + 1

    for inv_name in names:
        check = compute_crafting_plan(target, 1, inventories[inv_name])
        assert check.missing, "a single agent's inventory must not suffice"
    union: dict[str, int] = {}
    for inv in inventories.values():
        for item, n in inv.items():
            union[item] = union.get(item, 0) + n
    assert not compute_crafting_plan(target, 1, union).missing

    forest_blocks: dict[str, int] = {}
    for item, n in sorted(raws.items()):
        block = FOREST_BLOCK_FOR_ITEM.get(item)
        if block:
            forest_blocks[block] = forest_blocks.get(block, 0) + n + 2

    if plan_blocked == "none":
        plan_access = {n: True for n in names}
    elif plan_blocked == "one":
        plan_access = {n: (i != 0) for i, n in enumerate(names)}
    elif plan_blocked == "both":
        plan_access = {n: False for n in names}
    else:
        raise CommandError("InvalidSpec", "plan_blocked must be none, one, or both")

    task_type = "techtree" if target in TECHTREE_TARGETS else "crafting"
    name = f"multiagent_{task_type}_1_{target}"
    if plan_blocked != "none":
        name += f"_blocked_{plan_blocked}"
    if agent_count != 2:
        name += f"_agents_{agent_count}"

    return TaskSpec(
        task_name=name,
        task_type=task_type,
        goal=f"Collaborate with other agents to build a {target.replace('_', ' ')}",
        agent_names=names,
        initial_inventories=inventories,
        target_items=[(target, 1)],
        plan_access=plan_access,
        recipe_access={n: [] for n in names},
        hells_kitchen=False,
        timeout_seconds=300,
        world_spec={"kind": "crafting-forest", "blocks": forest_blocks},
        seed=seed,
    )


# -- construction --------------------------------------------------------------

def generate_construction_task(config: BlueprintConfig, seed: int,
                               agent_count: int = 2) -> TaskSpec:
    bp = generate_blueprint(config, seed, origin=(4, -60, 4))
    bill = bp.bill_of_materials()
    classes = sorted({material_class(mat) for mat in bill})
    names = list(AGENT_NAME_POOL[:agent_count])
    assert len(classes) >= 2, "blueprints always mix at least two material classes"
    capabilities: dict[str, list] = {n: [] for n in names}
    for i, cls in enumerate(classes):
        capabilities[names[i % agent_count]].append(cls)
    inventories: dict[str, dict] = {n: {} for n in names}
    for mat, n in sorted(bill.items()):
        for agent in names:
            if material_class(mat) in capabilities[agent]:
                inventories[agent][mat] = n + 1
                break
    return TaskSpec(
        task_name=config.name,
        task_type="construction",
        goal=("Collaborate with other agents to build the house described by the "
              "blueprint. Use !checkBlueprintLevel to see the remaining fixes and "
              "place only the materials you are able to manipulate."),
        agent_names=names,
        initial_inventories=inventories,
        target_items=[],
        plan_access={n: True for n in names},
        recipe_access={n: [] for n in names},
        hells_kitchen=False,
        timeout_seconds=600 + 300 * config.r,
        world_spec={"kind": "construction-superflat"},
        seed=seed,
        blueprint=bp,
        capabilities={n: sorted(c) for n, c in capabilities.items()},
    )


# -- splits ----------------------------------------------------------------------

def split_train_test(domain: str, sizes: tuple | None = None):
    """Deterministic train/test task sets with disjoint goal material."""
    n_train, n_test = sizes or DEFAULT_SPLIT_SIZES[domain]
    if domain == "cooking":
        train = [generate_cooking_task(
            seed=i, agent_count=2 + i % 4, item_count=1 + i % 4,
            hells_kitchen=(i % 7 == 6), blocked_agents=(i % 5 == 4) + (i % 11 == 10),
            split="train") for i in range(n_train)]
        test = [generate_cooking_task(
            seed=10000 + i, agent_count=2 + i % 4, item_count=1 + i % 4,
            hells_kitchen=(i % 7 == 6), blocked_agents=(i % 5 == 4) + (i % 11 == 10),
            split="test") for i in range(n_test)]
        return train, test
    if domain == "crafting":
        train = [generate_crafting_task(
            seed=i, agent_count=2 + i % 4,
            target=CRAFTING_TRAIN_ITEMS[i % len(CRAFTING_TRAIN_ITEMS)],
            plan_blocked=("none", "one", "both")[i % 3]) for i in range(n_train)]
        test = [generate_crafting_task(
            seed=10000 + i, agent_count=2 + i % 4,
            target=CRAFTING_TEST_ITEMS[i % len(CRAFTING_TEST_ITEMS)],
            plan_blocked=("none", "one", "both")[i % 3]) for i in range(n_test)]
        return train, test
    if domain == "construction":
        train = [generate_construction_task(_construction_config(i), seed=i)
                 for i in range(n_train)]
        test = [generate_construction_task(_construction_config(i), seed=100000 + i)
                for i in range(n_test)]
        return train, test
    raise CommandError("InvalidSpec", f"Unknown domain: {domain}")


def _construction_config(i: int) -> BlueprintConfig:
    return BlueprintConfig(m=i % 3, r=(i // 3) % 3, w=(i // 9) % 3,
                           c=(i // 27) % 3, v=i)


def construction_split_hashes(sizes: tuple | None = None):
    """Blueprint content hashes for the construction split (cheap: skips
    full task assembly)."""
    n_train, n_test = sizes or DEFAULT_SPLIT_SIZES["construction"]
    train = [generate_blueprint(_construction_config(i), i).content_hash()
             for i in range(n_train)]
    test = [generate_blueprint(_construction_config(i), 100000 + i).content_hash()
            for i in range(n_test)]
    return train, test
