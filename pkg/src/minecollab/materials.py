"""Material taxonomy: passability, drops, stations, and capability classes."""

from __future__ import annotations

AIR = "air"

STATION_KINDS = ("crafting_table", "furnace", "smoker", "chest")

# Thin plants: never block movement, never give support.
PLANT_MATERIALS = {
    "wheat",
    "carrots",
    "potatoes",
    "beetroots",
    "brown_mushroom",
    "red_mushroom",
    "sugar_cane",
    "dandelion",
    "pumpkin",
}

# Block type -> item minted when the block is collected.
BLOCK_DROPS = {
    "stone": "cobblestone",
    "wheat": "wheat",
    "carrots": "carrot",
    "potatoes": "potato",
    "beetroots": "beetroot",
}

# Livestock kind -> item minted when the animal is killed.
LIVESTOCK_DROPS = {
    "cow": "beef",
    "pig": "porkchop",
    "sheep": "mutton",
    "chicken": "chicken",
    "rabbit": "rabbit",
}


def is_door(material: str) -> bool:
    return material.endswith("_door")


def is_station(material: str) -> bool:
    return material in STATION_KINDS


def is_passable(material: str) -> bool:
    """True when an agent can occupy the cell holding this material."""
    return material == AIR or material in PLANT_MATERIALS or is_door(material)


def gives_support(material: str) -> bool:
    """True when an agent can stand on top of this material. Doors count:
    they are walked through at foot level but carry weight above."""
    return not is_passable(material) or is_door(material)


def drop_item(material: str) -> str:
    """Item identifier obtained by collecting a block of this material."""
    return BLOCK_DROPS.get(material, material)


def material_class(material: str) -> str:
    """Coarse class used for agent placement/collection capabilities."""
    if is_door(material):
        return "door"
    if material.endswith("_carpet"):
        return "carpet"
    if material in ("glass", "glass_pane"):
        return "glass"
    if material in PLANT_MATERIALS:
        return "plant"
    if material.endswith(("_log", "_planks")) or material.startswith("stripped_"):
        return "wood"
    if material in ("stone", "cobblestone", "terracotta", "bricks", "smooth_stone"):
        return "stone"
    return "other"


# Sentinel capability that admits every material class.
ALL_CLASSES = "*"


def allows(capabilities: frozenset[str], material: str) -> bool:
    return ALL_CLASSES in capabilities or material_class(material) in capabilities
