"""Recipe book, craft/smelt execution, and the recursive plan solver."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources

from .core import CommandError
from .world import INTERACT_RADIUS, World, dist_sq


@dataclass
class Recipe:
    output: str
    count: int
    inputs: list  # ordered (item, count) pairs; order drives message text
    station: str | None


@dataclass
class CraftingPlan:
    missing: dict[str, int]  # raw items only, in first-need order
    steps: list[str]         # "Craft {inputs} -> {n} {output}" lines, bottom-up


class RecipeBook:
    def __init__(self, recipes: list[Recipe], smelts: dict[str, str], version: int = 1):
        self.version = version
        self.recipes = {r.output: r for r in recipes}
        self.smelts = dict(smelts)
        self._check_acyclic()
        referenced = set()
        for r in self.recipes.values():
            referenced.update(item for item, _ in r.inputs)
        referenced.update(self.smelts)
        produced = set(self.recipes) | set(self.smelts.values())
        self.raw_items = frozenset(referenced - produced)

    def _check_acyclic(self):
        state: dict[str, int] = {}

        def visit(item):
            if state.get(item) == 1:
                raise ValueError(f"recipe cycle through {item}")
            if state.get(item) == 2 or item not in self.recipes:
                return
            state[item] = 1
            for inp, _ in self.recipes[item].inputs:
                visit(inp)
            state[item] = 2

        for output in self.recipes:
            visit(output)

    def reachable(self, item: str) -> bool:
        return item in self.recipes or item in self.smelts.values()


def load_book() -> RecipeBook:
    raw = json.loads(resources.files("minecollab.data").joinpath("recipes.json").read_text())
    recipes = [
        Recipe(r["output"], r["count"], [tuple(p) for p in r["inputs"]], r["station"])
        for r in raw["recipes"]
    ]
    smelts = {s["input"]: s["output"] for s in raw["smelts"]}
    return RecipeBook(recipes, smelts, raw.get("version", 1))


BOOK = load_book()


def craftable(inventory: dict[str, int], book: RecipeBook = BOOK) -> list[str]:
    """Recipe outputs whose one-batch inputs are fully covered, sorted."""
    out = []
    for output, recipe in book.recipes.items():
        if all(inventory.get(item, 0) >= n for item, n in recipe.inputs):
            out.append(output)
    return sorted(out)


def compute_crafting_plan(target: str, quantity: int, inventory: dict[str, int],
                          book: RecipeBook = BOOK,
                          treat_as_raw: frozenset = frozenset()) -> CraftingPlan:
    """Expand unmet inputs down to raw items, reusing held items greedily and
    rounding batch counts up; steps come out bottom-up."""
    if target not in book.recipes and target not in treat_as_raw:
        raise CommandError("UnknownTarget", f"There is no crafting plan for {target}.")
    inv = dict(inventory)
    missing: dict[str, int] = {}
    steps: list[str] = []

    def acquire(item: str, n: int):
        held = inv.get(item, 0)
        take = min(held, n)
        if take:
            inv[item] = held - take
            n -= take
        if n == 0:
            return
        recipe = book.recipes.get(item)
        if recipe is None or item in treat_as_raw:
            missing[item] = missing.get(item, 0) + n
            return
        batches = math.ceil(n / recipe.count)
        for inp, cnt in recipe.inputs:
            acquire(inp, cnt * batches)
        produced = batches * recipe.count
        parts = " + ".join(f"{cnt * batches} {inp}" for inp, cnt in recipe.inputs)
        steps.append(f"Craft {parts} -> {produced} {item}")
        if produced > n:
            inv[item] = inv.get(item, 0) + produced - n

    acquire(target, quantity)
    return CraftingPlan(missing, steps)


def render_plan(target: str, quantity: int, plan: CraftingPlan) -> str:
    if not plan.steps and not plan.missing:
        return f"You already have enough {target}, no crafting needed."
    if not plan.missing:
        return (
            f"You have all the items required to craft {quantity} {target}!\n"
            "Here's your crafting plan:\n\n" + "\n".join(plan.steps)
        )
    lines = [f"- {n} {item}" for item, n in plan.missing.items()]
    return (
        "You are missing the following items:\n"
        + "\n".join(lines)
        + "\n\nOnce you have these items, here's your crafting plan:\n\n"
        + "\n".join(plan.steps)
    )


def _requires_text(recipe: Recipe) -> str:
    return ", ".join(f"{item}: {n}" for item, n in recipe.inputs)


def _station_near(world: World, pos, kind: str) -> bool:
    if kind == "furnace":
        kinds = ("furnace", "smoker")
    else:
        kinds = (kind,)
    for gpos, blk in world.grid.items():
        if blk.station_kind in kinds and dist_sq(gpos, pos) <= INTERACT_RADIUS ** 2:
            return True
    return False


def craft(world: World, actor: str, output_item: str, times: int,
          book: RecipeBook = BOOK) -> str:
    agent = world.agents[actor]
    recipe = book.recipes.get(output_item)
    if recipe is None:
        raise CommandError("UnknownRecipe", f"You do not know a recipe for a {output_item}.")
    if recipe.station and not _station_near(world, agent.pos, recipe.station):
        raise CommandError(
            "NoStationNearby",
            f"You need a {recipe.station} nearby to craft a {output_item}.",
        )
    for item, n in recipe.inputs:
        if agent.count(item) < n * times:
            raise CommandError(
                "MissingResources",
                f"You do not have the resources to craft a {output_item}. "
                f"It requires: {_requires_text(recipe)}.",
            )
    for item, n in recipe.inputs:
        world.remove_item(agent, item, n * times)
    world.add_item(agent, output_item, recipe.count * times)
    have = agent.count(output_item)
    return f"Successfully crafted {output_item}, you now have {have} {output_item}."


def smelt(world: World, actor: str, input_item: str, times: int,
          book: RecipeBook = BOOK) -> str:
    agent = world.agents[actor]
    output = book.smelts.get(input_item)
    if output is None:
        raise CommandError(
            "NotSmeltable",
            f"Cannot smelt {input_item}. Hint: make sure you are smelting the raw item.",
        )
    stations = [
        pos for pos, blk in world.grid.items()
        if blk.station_kind in ("furnace", "smoker")
        and dist_sq(pos, agent.pos) <= INTERACT_RADIUS ** 2
    ]
    if not stations:
        raise CommandError("NoFurnaceNearby", "There is no furnace or smoker nearby.")
    if agent.count(input_item) < times:
        raise CommandError("MissingItem", f"You do not have any {input_item} to smelt.")
    stations.sort(key=lambda pos: (-world.furnace_fuel.get(pos, 0), pos))
    station = stations[0]
    if world.furnace_fuel.get(station, 0) < times:
        raise CommandError("OutOfFuel", "The furnace is out of fuel.")
    world.furnace_fuel[station] -= times
    world.remove_item(agent, input_item, times)
    world.add_item(agent, output, times)
    have = agent.count(output)
    return f"Successfully smelted {input_item}, you now have {have} {output}."
