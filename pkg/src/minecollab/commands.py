"""Tool-call command surface: parsing `!name(args)` out of agent text and
dispatching to world/recipe/conversation/blueprint handlers.

Message templates here are part of the wire contract and are golden-tested
byte for byte; change them only together with the tests.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import evaluator, recipes
from .core import CommandError, CommandResult, err, ok
from .materials import LIVESTOCK_DROPS, allows, drop_item, is_passable
from .world import INTERACT_RADIUS, SEARCH_RADIUS, World, dist_sq


@dataclass
class Command:
    name: str
    args: list

    def render(self) -> str:
        if not self.args:
            return f"!{self.name}"
        parts = []
        for arg in self.args:
            if isinstance(arg, str):
                escaped = arg.replace("\\", "\\\\").replace('"', '\\"')
                parts.append(f'"{escaped}"')
            elif isinstance(arg, bool):
                parts.append("true" if arg else "false")
            elif isinstance(arg, float) and arg == int(arg):
                parts.append(str(arg))
            else:
                parts.append(str(arg))
        return f"!{self.name}(" + ", ".join(parts) + ")"


@dataclass
class Param:
    name: str
    type: str  # "string" | "number"
    desc: str


@dataclass
class Spec:
    name: str
    desc: str
    params: list
    kind: str  # "query" | "action" | "control"


@dataclass
class ExecContext:
    """Everything a command handler may touch besides the world."""

    world: World
    convo: object | None = None
    task: object | None = None
    blueprint: object | None = None
    progress: object | None = None
    full_text: str = ""  # the whole agent message the command came from
    extra: dict = field(default_factory=dict)


REGISTRY: dict[str, Spec] = {}
_HANDLERS: dict[str, object] = {}


def register(name, desc, params, kind):
    def deco(fn):
        REGISTRY[name] = Spec(name, desc, params, kind)
        _HANDLERS[name] = fn
        return fn

    return deco


# -- parsing -----------------------------------------------------------------

_NAME_RE = re.compile(r"!([A-Za-z_][A-Za-z0-9_]*)")
_NUM_RE = re.compile(r"-?\d+(\.\d+)?")


def _parse_args(text: str, start: int):
    """Parse '(arg, ...)' starting at `start`; returns (args, end_index)."""
    args = []
    i = start + 1
    expect_value = True
    while True:
        if i >= len(text):
            raise CommandError("SyntaxError",
                               "Command is incomplete: unbalanced parentheses or quotes.")
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch == ")":
            if expect_value and args:
                raise CommandError("SyntaxError", "Command has a trailing comma.")
            return args, i + 1
        elif ch == ",":
            if expect_value:
                raise CommandError("SyntaxError", "Command has an empty argument.")
            expect_value = True
            i += 1
        elif not expect_value:
            raise CommandError("SyntaxError",
                               "Command is incomplete: unbalanced parentheses or quotes.")
        elif ch == '"':
            out = []
            i += 1
            while True:
                if i >= len(text):
                    raise CommandError("SyntaxError",
                                       "Command is incomplete: unbalanced parentheses or quotes.")
                if text[i] == "\\" and i + 1 < len(text):
                    esc = text[i + 1]
                    out.append({"n": "\n", "t": "\t"}.get(esc, esc))
                    i += 2
                elif text[i] == '"':
                    i += 1
                    break
                else:
                    out.append(text[i])
                    i += 1
            args.append("".join(out))
            expect_value = False
        elif ch in "truefals" and text[i:i + 4] in ("true", "fals"):
            if text[i:i + 4] == "true":
                args.append(True)
                i += 4
            else:
                if text[i:i + 5] != "false":
                    raise CommandError("SyntaxError", f"Unrecognized argument at: {text[i:i+8]!r}")
                args.append(False)
                i += 5
            expect_value = False
        else:
            match = _NUM_RE.match(text, i)
            if not match:
                raise CommandError("SyntaxError", f"Unrecognized argument at: {text[i:i+8]!r}")
            token = match.group(0)
            args.append(float(token) if "." in token else int(token))
            i = match.end()
            expect_value = False


def parse_first_command(text: str) -> Command | None:
    """Extract the first `!name(arg, ...)` occurrence; None when no command
    token is present. Only this first command is ever executed."""
    for match in _NAME_RE.finditer(text):
        name = match.group(1)
        end = match.end()
        if end < len(text) and text[end] == "(":
            args, _ = _parse_args(text, end)
        else:
            args = []
        spec = REGISTRY.get(name)
        if spec is None:
            raise CommandError("UnknownCommand",
                               f"Unknown command: !{name}. Use !help to see available commands.")
        if len(args) != len(spec.params):
            raise CommandError(
                "ArityMismatch",
                f"Command !{name} takes {len(spec.params)} arguments, got {len(args)}.",
            )
        coerced = []
        for param, arg in zip(spec.params, args):
            if param.type == "string" and not isinstance(arg, str):
                raise CommandError(
                    "ArityMismatch",
                    f"Argument {param.name} of !{name} must be a string.",
                )
            if param.type == "number" and not isinstance(arg, (int, float)):
                raise CommandError(
                    "ArityMismatch",
                    f"Argument {param.name} of !{name} must be a number.",
                )
            coerced.append(arg)
        return Command(name, coerced)
    return None


# -- execution ---------------------------------------------------------------

def execute(ctx: ExecContext, actor: str, cmd: Command) -> CommandResult | None:
    """Run a parsed command. Returns the result, or None when a multi-tick
    action was submitted (result arrives on completion)."""
    world = ctx.world
    if world.frozen:
        return err(None, "The episode has ended.")
    if actor not in world.agents:
        return err(None, f"Could not find player {actor}.")
    try:
        handler = _HANDLERS[cmd.name]
        return handler(ctx, actor, *cmd.args)
    except CommandError as exc:
        return err(exc)


def result_content(name: str, result: CommandResult) -> str:
    """Wrap a result message the way it is shown to the agent."""
    spec = REGISTRY[name]
    if spec.kind == "query":
        return f"\n{result.message}\n"
    if spec.kind == "control":
        return result.message
    return f"Code output:\n{result.message}\n"


def render_command_docs() -> str:
    lines = [
        "COMMAND DOCS",
        "You can use the following commands to perform actions and get information "
        "about the world. Use the commands with the syntax: !commandName or "
        '!commandName("arg1", 1.2, ...).',
        "",
    ]
    for spec in REGISTRY.values():
        lines.append(f"!{spec.name}: {spec.desc}")
        for param in spec.params:
            lines.append(f"    {param.name}: ({param.type}) {param.desc}")
    return "\n".join(lines)


def _require_positive(n, what: str) -> int:
    if not isinstance(n, (int, float)) or n <= 0 or int(n) != n:
        raise CommandError("ArityMismatch", f"{what} must be a positive whole number.")
    return int(n)


def _pos_text(pos) -> str:
    return f"{pos[0]}, {pos[1]}, {pos[2]}"


def _travel(world: World, actor: str, target, closeness: float):
    """Path to target; returns (path, None) or raises Unreachable."""
    path = world.path_to(actor, target, closeness)
    if path is None:
        raise CommandError(
            "Unreachable",
            f"Could not find a path to ({target[0]}, {target[1]}, {target[2]}).",
        )
    return path


# -- observation queries ------------------------------------------------------

@register("stats", "Get your bot's location, health, hunger, and time of day.", [], "query")
def _stats(ctx, actor):
    body = ctx.world.agents[actor]
    x, y, z = body.pos
    return ok(
        "STATS\n"
        f"- Position: x: {x}, y: {y}, z: {z}\n"
        "- Gamemode: survival\n"
        "- Health: 20 / 20\n"
        "- Hunger: 20 / 20\n"
        f"- Time: tick {ctx.world.tick}"
    )


@register("inventory", "Get your bot's inventory.", [], "query")
def _inventory(ctx, actor):
    inv = ctx.world.agents[actor].inventory
    if not inv:
        return ok("INVENTORY: none\nWEARING: Nothing")
    lines = [f"- {item}: {n}" for item, n in sorted(inv.items())]
    return ok("INVENTORY\n" + "\n".join(lines) + "\nWEARING: Nothing")


@register("nearbyBlocks", "Get the blocks near the bot.", [], "query")
def _nearby_blocks(ctx, actor):
    scan = ctx.world.scan_nearby(actor, 16)
    seen = []
    for material, _pos in scan.blocks:
        if material not in seen:
            seen.append(material)
    if not seen:
        return ok("NEARBY_BLOCKS: none")
    return ok("NEARBY_BLOCKS\n" + "\n".join(f"- {m}" for m in seen))


@register("craftable", "Get the craftable items with the bot's inventory.", [], "query")
def _craftable(ctx, actor):
    items = recipes.craftable(ctx.world.agents[actor].inventory)
    if not items:
        return ok("CRAFTABLE_ITEMS: none")
    return ok("CRAFTABLE_ITEMS\n" + "\n".join(f"- {i}" for i in items))


@register("entities", "Get the nearby players and entities.", [], "query")
def _entities(ctx, actor):
    scan = ctx.world.scan_nearby(actor, 16)
    lines = [f"- bot: {name}" for name, _ in scan.agents]
    for kind, payload, _pos in scan.entities:
        lines.append(f"- item: {payload}" if kind == "item" else f"- {kind}")
    if not lines:
        return ok("NEARBY_ENTITIES: none")
    return ok("NEARBY_ENTITIES\n" + "\n".join(lines))


@register("help", "Lists all available commands and their descriptions.", [], "query")
def _help(ctx, actor):
    return ok(render_command_docs())


@register(
    "getCraftingPlan",
    "Provides a comprehensive crafting plan for a specified item. This includes a "
    "breakdown of required ingredients, the exact quantities needed, and an analysis "
    "of missing ingredients or extra items needed based on the bot's current inventory.",
    [Param("targetItem", "string", "The item that we are trying to craft"),
     Param("quantity", "number", "The quantity of the item that we are trying to craft")],
    "query",
)
def _get_crafting_plan(ctx, actor, target, quantity):
    quantity = _require_positive(quantity, "quantity")
    if ctx.task is not None and not ctx.task.plan_access.get(actor, True):
        raise CommandError("PlanBlocked",
                           "You do not have access to the crafting plan for this task.")
    plan = recipes.compute_crafting_plan(target, quantity,
                                         ctx.world.agents[actor].inventory)
    return ok(recipes.render_plan(target, quantity, plan))


@register("savedPlaces", "List all saved locations.", [], "query")
def _saved_places(ctx, actor):
    places = ctx.world.agents[actor].saved_places
    if not places:
        return ok("SAVED_PLACES: none")
    lines = [f'- "{name}": ({_pos_text(pos)})' for name, pos in sorted(places.items())]
    return ok("SAVED_PLACES\n" + "\n".join(lines))


# -- movement ------------------------------------------------------------------

@register(
    "goToCoordinates", "Go to the given x, y, z location.",
    [Param("x", "number", "The x coordinate."),
     Param("y", "number", "The y coordinate."),
     Param("z", "number", "The z coordinate."),
     Param("closeness", "number", "How close to get to the location.")],
    "action",
)
def _go_to_coordinates(ctx, actor, x, y, z, closeness):
    world = ctx.world
    target = (int(x), int(y), int(z))
    if not world.in_bounds(target):
        raise CommandError("OutOfRange", f"({_pos_text(target)}) is out of bounds.")
    path = _travel(world, actor, target, float(closeness))
    if len(path) == 1:
        return ok(f"You have reached at {_pos_text(world.agents[actor].pos)}.")

    def gen():
        yield from world.walk_steps(actor, path)
        return f"You have reached at {_pos_text(world.agents[actor].pos)}."

    world.submit_action(actor, "goToCoordinates", gen())
    return None


@register(
    "goToPlayer", "Go to the given player.",
    [Param("player_name", "string", "The name of the player to go to."),
     Param("closeness", "number", "How close to get to the player.")],
    "action",
)
def _go_to_player(ctx, actor, player_name, closeness):
    world = ctx.world
    other = world.agents.get(player_name)
    if other is None:
        raise CommandError("UnknownAgent", f"Could not find player {player_name}.")
    path = _travel(world, actor, other.pos, max(float(closeness), 1.0))
    if len(path) == 1:
        return ok(f"You have reached {player_name}.")

    def gen():
        yield from world.walk_steps(actor, path)
        return f"You have reached {player_name}."

    world.submit_action(actor, "goToPlayer", gen())
    return None


@register(
    "searchForBlock", "Find and go to the nearest block of a given type in a given range.",
    [Param("type", "string", "The block type to go to."),
     Param("search_range", "number", "The range to search for the block.")],
    "action",
)
def _search_for_block(ctx, actor, block_type, search_range):
    world = ctx.world
    radius = int(search_range)
    found = world.find_blocks(world.agents[actor].pos, block_type, radius)
    if not found:
        return ok(f"Could not find any {block_type} in {radius} blocks.")
    target = found[0]
    closeness = 0.5 if is_passable(block_type) else 1.0
    found_line = f"Found {block_type} at ({_pos_text(target)})."
    path = _travel(world, actor, target, closeness)
    if len(path) == 1:
        here = world.agents[actor].pos
        return ok(found_line + f"\nYou have reached at {_pos_text(here)}.")

    def gen():
        yield from world.walk_steps(actor, path)
        return found_line + f"\nYou have reached at {_pos_text(world.agents[actor].pos)}."

    world.submit_action(actor, "searchForBlock", gen())
    return None


@register(
    "rememberHere", "Save the current location with a given name.",
    [Param("name", "string", "The name to remember the location as.")],
    "action",
)
def _remember_here(ctx, actor, name):
    body = ctx.world.agents[actor]
    body.saved_places[name] = body.pos
    return ok(f'Saved location "{name}" at ({_pos_text(body.pos)}).')


@register(
    "goToRememberedPlace", "Go to a saved location.",
    [Param("name", "string", "The name of the location to go to.")],
    "action",
)
def _go_to_remembered(ctx, actor, name):
    world = ctx.world
    body = world.agents[actor]
    if name not in body.saved_places:
        raise CommandError("UnknownTarget", f'No location named "{name}" is saved.')
    target = body.saved_places[name]
    path = _travel(world, actor, target, 1.0)
    if len(path) == 1:
        return ok(f"You have reached at {_pos_text(body.pos)}.")

    def gen():
        yield from world.walk_steps(actor, path)
        return f"You have reached at {_pos_text(world.agents[actor].pos)}."

    world.submit_action(actor, "goToRememberedPlace", gen())
    return None


# -- gathering and block work ---------------------------------------------------

@register(
    "collectBlocks", "Collect the nearest blocks of a given type.",
    [Param("type", "string", "The block type to collect."),
     Param("num", "number", "The number of blocks to collect.")],
    "action",
)
def _collect_blocks(ctx, actor, block_type, num):
    world = ctx.world
    num = _require_positive(num, "num")
    body = world.agents[actor]
    if not allows(body.capabilities, block_type):
        raise CommandError(
            "CapabilityDenied",
            f"You are not able to manipulate {block_type} blocks.",
        )
    if not world.find_blocks(body.pos, block_type, SEARCH_RADIUS):
        return ok(f"Could not find any {block_type} to collect nearby.")

    def gen():
        collected = 0
        reach_line = None
        closeness = 0.5 if is_passable(block_type) else 1.0
        while collected < num:
            found = world.find_blocks(world.agents[actor].pos, block_type, SEARCH_RADIUS)
            if not found:
                break
            target = found[0]
            path = world.path_to(actor, target, closeness)
            if path is None:
                break
            if len(path) > 1:
                yield from world.walk_steps(actor, path)
                if reach_line is None:
                    reach_line = f"You have reached at {_pos_text(world.agents[actor].pos)}."
            yield  # breaking the block takes a tick
            if world.grid.get(target) and world.grid[target].material == block_type:
                del world.grid[target]
                world.version += 1
                world.add_item(world.agents[actor], drop_item(block_type), 1)
                collected += 1
        if collected == 0:
            return f"Could not find any {block_type} to collect nearby."
        lines = [] if reach_line is None else [reach_line]
        lines.append(f"Picked up {collected} items.")
        lines.append(f"Collected {collected} {block_type}.")
        return "\n".join(lines)

    world.submit_action(actor, "collectBlocks", gen())
    return None


@register(
    "placeHere",
    "Place a given block in the current location. Do NOT use to build structures, "
    "only use for single blocks/torches.",
    [Param("type", "string", "The block type to place.")],
    "action",
)
def _place_here(ctx, actor, block_type):
    world = ctx.world

    def gen():
        yield  # placement takes a tick
        pos = world.agents[actor].pos
        world.set_block(pos, block_type, actor)
        return f"Placed {block_type} at ({_pos_text(pos)})."

    world.submit_action(actor, "placeHere", gen())
    return None


@register(
    "attack", "Attack and kill the nearest entity of a given type.",
    [Param("type", "string", "The type of entity to attack.")],
    "action",
)
def _attack(ctx, actor, kind):
    world = ctx.world
    if kind not in LIVESTOCK_DROPS:
        raise CommandError("CapabilityDenied", f"You cannot attack {kind}.")
    found = world.find_entities(world.agents[actor].pos, kind, SEARCH_RADIUS)
    if not found:
        return ok(f"Could not find any {kind} to attack.")
    target = found[0]

    def gen():
        path = world.path_to(actor, target.pos, 1.0)
        if path is None:
            raise CommandError("Unreachable",
                               f"Could not find a path to ({_pos_text(target.pos)}).")
        if len(path) > 1:
            yield from world.walk_steps(actor, path)
        yield  # the kill takes a tick
        if target not in world.entities:
            return f"Could not find any {kind} to attack."
        item, n = world.kill_entity(target)
        world.add_item(world.agents[actor], item, n)
        return f"Successfully killed {kind}.\nPicked up {n} items."

    world.submit_action(actor, "attack", gen())
    return None


# -- crafting and smelting -------------------------------------------------------

@register(
    "craftRecipe", "Craft the given recipe a given number of times.",
    [Param("recipe_name", "string", "The name of the output item to craft."),
     Param("num", "number",
           "The number of times to craft the recipe. This is NOT the number of output "
           "items, as it may craft many more items depending on the recipe.")],
    "action",
)
def _craft_recipe(ctx, actor, recipe_name, num):
    num = _require_positive(num, "num")
    return ok(recipes.craft(ctx.world, actor, recipe_name, num))


@register(
    "smeltItem", "Smelt the given item the given number of times.",
    [Param("item_name", "string", "The name of the input item to smelt."),
     Param("num", "number", "The number of times to smelt the item.")],
    "action",
)
def _smelt_item(ctx, actor, item_name, num):
    num = _require_positive(num, "num")
    return ok(recipes.smelt(ctx.world, actor, item_name, num))


@register("clearFurnace", "Take all items out of the nearest furnace.", [], "action")
def _clear_furnace(ctx, actor):
    world = ctx.world
    body = world.agents[actor]
    near = [
        pos for pos, blk in world.grid.items()
        if blk.station_kind in ("furnace", "smoker")
        and dist_sq(pos, body.pos) <= INTERACT_RADIUS ** 2
    ]
    if not near:
        raise CommandError("NoFurnaceNearby", "There is no furnace or smoker nearby.")
    return ok("The furnace is empty.")


# -- item transfer ----------------------------------------------------------------

@register(
    "givePlayer", "Give the specified item to the given player.",
    [Param("player_name", "string", "The name of the player to give the item to."),
     Param("item_name", "string", "The name of the item to give."),
     Param("num", "number", "The number of items to give.")],
    "action",
)
def _give_player(ctx, actor, player_name, item_name, num):
    world = ctx.world
    num = _require_positive(num, "num")
    receiver = world.agents.get(player_name)
    if receiver is None:
        raise CommandError("UnknownAgent", f"Could not find player {player_name}.")
    if player_name == actor:
        raise CommandError("SelfConversation", "You cannot give items to yourself.")
    if world.agents[actor].count(item_name) < num:
        raise CommandError("MissingItem", f"You do not have enough {item_name}.")
    path = _travel(world, actor, receiver.pos, float(INTERACT_RADIUS))

    def gen():
        if len(path) > 1:
            yield from world.walk_steps(actor, path)
        yield  # the handoff takes a tick
        sender = world.agents[actor]
        lines = [f"You have reached {player_name}."]
        if sender.count(item_name) < num:
            raise CommandError("MissingItem", f"You do not have enough {item_name}.")
        world.remove_item(sender, item_name, num)
        lines.append(f"Discarded {num} {item_name}.")
        target = world.agents.get(player_name)
        if target is not None and dist_sq(sender.pos, target.pos) <= INTERACT_RADIUS ** 2:
            world.add_item(target, item_name, num)
            lines.append(f"{player_name} received {item_name}.")
        else:
            world.spawn_drop(sender.pos, item_name, num)
            lines.append(f"Failed to give {item_name} to {player_name}, it was never received.")
        return "\n".join(lines)

    world.submit_action(actor, "givePlayer", gen())
    return None


def _nearest_chest(world: World, actor: str):
    pos = world.nearest_station(world.agents[actor].pos, "chest")
    if pos is None:
        raise CommandError("UnknownTarget", "Could not find a chest nearby.")
    return pos


def _chest_action(ctx, actor, command_name, body_fn):
    world = ctx.world
    chest = _nearest_chest(world, actor)
    path = _travel(world, actor, chest, float(INTERACT_RADIUS))

    def gen():
        if len(path) > 1:
            yield from world.walk_steps(actor, path)
        yield
        return body_fn(chest)

    world.submit_action(actor, command_name, gen())
    return None


@register(
    "putInChest", "Put the given item in the nearest chest.",
    [Param("item_name", "string", "The name of the item to put in the chest."),
     Param("num", "number", "The number of items to put in the chest.")],
    "action",
)
def _put_in_chest(ctx, actor, item_name, num):
    world = ctx.world
    num = _require_positive(num, "num")

    def body(chest):
        world.remove_item(world.agents[actor], item_name, num)
        inv = world.chest_contents.setdefault(chest, {})
        inv[item_name] = inv.get(item_name, 0) + num
        return f"Successfully put {num} {item_name} in the chest."

    return _chest_action(ctx, actor, "putInChest", body)


@register(
    "takeFromChest", "Take the given items from the nearest chest.",
    [Param("item_name", "string", "The name of the item to take."),
     Param("num", "number", "The number of items to take.")],
    "action",
)
def _take_from_chest(ctx, actor, item_name, num):
    world = ctx.world
    num = _require_positive(num, "num")

    def body(chest):
        inv = world.chest_contents.setdefault(chest, {})
        have = inv.get(item_name, 0)
        if have == 0:
            return f"The chest does not contain {item_name}."
        take = min(num, have)
        if have == take:
            del inv[item_name]
        else:
            inv[item_name] = have - take
        world.add_item(world.agents[actor], item_name, take)
        return f"Successfully took {take} {item_name} from the chest."

    return _chest_action(ctx, actor, "takeFromChest", body)


@register("viewChest", "View the items/counts of the nearest chest.", [], "action")
def _view_chest(ctx, actor):
    world = ctx.world

    def body(chest):
        inv = world.chest_contents.get(chest, {})
        if not inv:
            return "The chest is empty."
        lines = [f"- {n} {item}" for item, n in sorted(inv.items())]
        return "The chest contains:\n" + "\n".join(lines)

    return _chest_action(ctx, actor, "viewChest", body)


@register(
    "discard", "Discard the given item from the inventory.",
    [Param("item_name", "string", "The name of the item to discard."),
     Param("num", "number", "The number of items to discard.")],
    "action",
)
def _discard(ctx, actor, item_name, num):
    world = ctx.world
    num = _require_positive(num, "num")
    body = world.agents[actor]
    if body.count(item_name) < num:
        raise CommandError("MissingItem", f"You do not have enough {item_name} to discard.")
    world.remove_item(body, item_name, num)
    # toss clear of the thrower so the pile is not immediately re-collected
    x, y, z = body.pos
    for dx, dz in ((2, 0), (-2, 0), (0, 2), (0, -2), (2, 2), (-2, -2), (2, -2), (-2, 2)):
        spot = (x + dx, y, z + dz)
        if world.in_bounds(spot) and world.passable(spot):
            world.spawn_drop(spot, item_name, num)
            break
    else:
        world.spawn_drop(body.pos, item_name, num)
    return ok(f"Discarded {num} {item_name}.")


# -- conversations -----------------------------------------------------------------

@register(
    "startConversation", "Start a conversation with a player. Use for bots only.",
    [Param("player_name", "string", "The name of the player to send the message to."),
     Param("message", "string", "The message to send.")],
    "control",
)
def _start_conversation(ctx, actor, player_name, message):
    if ctx.convo is None:
        raise CommandError("UnknownAgent", "There is no conversation channel in this world.")
    ctx.convo.start(actor, player_name, message, ctx.world.tick,
                    switch_final=ctx.full_text or None)
    return ok("")


@register("endConversation", "End the conversation with the given player.",
          [Param("player_name", "string", "The name of the player.")], "control")
def _end_conversation(ctx, actor, player_name):
    if ctx.convo is None:
        raise CommandError("NoSuchConversation",
                           f"You are not in a conversation with {player_name}.")
    ctx.convo.end(actor, player_name, ctx.full_text or None, ctx.world.tick)
    return ok("")


@register("stop", "Force stop all actions and commands that are currently executing.",
          [], "action")
def _stop(ctx, actor):
    if ctx.world.cancel_action(actor):
        return ok("Stopped the current action.")
    return ok("No action is currently executing.")


# -- blueprints ---------------------------------------------------------------------

def _need_blueprint(ctx):
    if ctx.blueprint is None:
        raise CommandError("UnknownTarget", "There is no blueprint for this task.")
    return ctx.blueprint


@register("checkBlueprint", "Check what blocks still need to be placed for the blueprint",
          [], "query")
def _check_blueprint(ctx, actor):
    bp = _need_blueprint(ctx)
    return ok(evaluator.blueprint_diff(ctx.world, bp))


@register(
    "checkBlueprintLevel",
    "Check if the level is complete and what blocks still need to be placed for the blueprint",
    [Param("levelNum", "number", "The level number to check.")],
    "query",
)
def _check_blueprint_level(ctx, actor, level_num):
    bp = _need_blueprint(ctx)
    return ok(evaluator.blueprint_diff(ctx.world, bp, int(level_num)))


@register("getBlueprint", "Get the blueprint for the building", [], "query")
def _get_blueprint(ctx, actor):
    bp = _need_blueprint(ctx)
    return ok(bp.render())


@register("getBlueprintLevel", "Get the blueprint for the building",
          [Param("levelNum", "number", "The level number to check.")], "query")
def _get_blueprint_level(ctx, actor, level_num):
    bp = _need_blueprint(ctx)
    level = int(level_num)
    if not 0 <= level < len(bp.levels):
        raise CommandError("InvalidLevel", f"Level {level} does not exist in the blueprint.")
    return ok(bp.render(level))
