"""Grid path planning over a world region.

Builds a compact occupancy volume around the endpoints and hands it to the
active search kernel. The compiled kernel is preferred; the pure-Python one
is selected when the extension is missing or MINECOLLAB_PURE_PATHFIND is
set. Both produce identical paths by construction.
"""

from __future__ import annotations

import os

import numpy as np

from .materials import is_door, is_passable

if os.environ.get("MINECOLLAB_PURE_PATHFIND"):
    from ._pathfind_py import KERNEL_NAME, bfs_kernel
else:
    try:
        from ._pathfind_cy import KERNEL_NAME, bfs_kernel  # type: ignore
    except ImportError:  # pragma: no cover - build-env dependent
        from ._pathfind_py import KERNEL_NAME, bfs_kernel

__all__ = ["KERNEL_NAME", "plan_path", "build_volume"]

# Extra cells around the start/goal bounding box searched before giving up
# and retrying over the full world bounds.
REGION_MARGIN = 12


def build_volume(world, x0, y0, z0, nx, ny, nz):
    """Flat uint8 occupancy volume: 0 air, 1 solid, 2 passable non-support."""
    vol = np.zeros(nx * ny * nz, dtype=np.uint8)
    for (bx, by, bz), block in world.grid.items():
        if x0 <= bx < x0 + nx and y0 <= by < y0 + ny and z0 <= bz < z0 + nz:
            if is_passable(block.material):
                code = 2 if is_door(block.material) else 0
            else:
                code = 1
            if code:
                vol[((bx - x0) * ny + (by - y0)) * nz + (bz - z0)] = code
    return vol


def _search(world, start, goal, closeness_sq, margin):
    bounds = world.bounds
    x0 = max(bounds[0], min(start[0], goal[0]) - margin)
    x1 = min(bounds[1], max(start[0], goal[0]) + margin)
    z0 = max(bounds[4], min(start[2], goal[2]) - margin)
    z1 = min(bounds[5], max(start[2], goal[2]) + margin)
    y0 = world.ground_y
    y1 = min(bounds[3], max(start[1], goal[1]) + 4)
    nx, ny, nz = x1 - x0 + 1, y1 - y0 + 1, z1 - z0 + 1
    if start[1] < y0 or start[1] > y1:
        return None
    vol = build_volume(world, x0, y0, z0, nx, ny, nz)
    flat = bfs_kernel(
        vol, nx, ny, nz, 1,
        start[0] - x0, start[1] - y0, start[2] - z0,
        goal[0] - x0, goal[1] - y0, goal[2] - z0,
        closeness_sq,
    )
    if flat is None:
        return None
    path = []
    for idx in flat:
        idx = int(idx)
        z = idx % nz
        y = (idx // nz) % ny
        x = idx // (nz * ny)
        path.append((x + x0, y + y0, z + z0))
    return path


def plan_path(world, start, goal, closeness=0.5):
    """Shortest walk from start to within `closeness` blocks of goal.

    Returns the cell sequence including the start, or None when unreachable.
    """
    closeness_sq = int(closeness * closeness)
    path = _search(world, start, goal, closeness_sq, REGION_MARGIN)
    if path is None:
        # the local window may have clipped a detour; retry over full bounds
        path = _search(world, start, goal, closeness_sq, 10 ** 9)
    return path
