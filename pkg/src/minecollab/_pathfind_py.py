"""Pure-Python grid path search kernel.

Fallback implementation used when the compiled extension is unavailable.
Both kernels implement the exact same walk rules and tie-breaking so that
episode logs are byte-identical regardless of which one is active:

* 4-neighbor horizontal movement, fixed expansion order +x, -x, +z, -z
* 1-block step-up when the destination column is solid at foot level
* unlimited step-down (walking off an edge lands on the first support)
* cells with value 1 are solid (block movement, give support), value 2
  is walk-through but still supports standing on top (doors), 0 is air
* the bottom slice of the volume may sit on implicit ground

Volume is a flat C-order uint8 buffer indexed as ``(x * ny + y) * nz + z``.
"""

KERNEL_NAME = "python"

_DIRS = ((1, 0), (-1, 0), (0, 1), (0, -1))


def bfs_kernel(vol, nx, ny, nz, ground, sx, sy, sz, gx, gy, gz, closeness_sq):
    """Breadth-first search for the nearest standable cell within
    ``closeness_sq`` (squared euclidean) of the goal.

    Returns a list of flat cell indices from start to the accepted cell
    (inclusive), or None when no such cell is reachable.
    """
    size = nx * ny * nz
    parent = [-1] * size

    def flat(x, y, z):
        return (x * ny + y) * nz + z

    def supported(x, y, z):
        if y == 0:
            return bool(ground)
        return vol[flat(x, y - 1, z)] != 0

    def accepts(x, y, z):
        dx = x - gx
        dy = y - gy
        dz = z - gz
        return dx * dx + dy * dy + dz * dz <= closeness_sq

    start = flat(sx, sy, sz)
    parent[start] = start
    if accepts(sx, sy, sz):
        return [start]

    queue = [start]
    head = 0
    while head < len(queue):
        cur = queue[head]
        head += 1
        cz = cur % nz
        cy = (cur // nz) % ny
        cx = cur // (nz * ny)
        for dx, dz in _DIRS:
            tx = cx + dx
            tz = cz + dz
            if tx < 0 or tx >= nx or tz < 0 or tz >= nz:
                continue
            ty = cy
            if vol[flat(tx, ty, tz)] == 1:
                # blocked at foot level: try a single step up
                ty = cy + 1
                if ty >= ny:
                    continue
                if vol[flat(cx, ty, cz)] == 1 or vol[flat(tx, ty, tz)] == 1:
                    continue
                # support is the solid cell we just stepped onto
            else:
                # walk forward, then fall until supported
                while not supported(tx, ty, tz):
                    ty -= 1
                    if ty < 0:
                        break
                if ty < 0:
                    continue
            nxt = flat(tx, ty, tz)
            if parent[nxt] != -1:
                continue
            parent[nxt] = cur
            if accepts(tx, ty, tz):
                path = [nxt]
                while nxt != start:
                    nxt = parent[nxt]
                    path.append(nxt)
                path.reverse()
                return path
            queue.append(nxt)
    return None
