# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled grid path search kernel.

Mirrors _pathfind_py.bfs_kernel exactly (same walk rules, same expansion
order, same tie-breaking); see that module for the rule summary. Kept in
lockstep by the kernel-equivalence property test.
"""

import numpy as np

cimport numpy as cnp

KERNEL_NAME = "cython"


def bfs_kernel(cnp.uint8_t[::1] vol, int nx, int ny, int nz, int ground,
               int sx, int sy, int sz, int gx, int gy, int gz,
               long closeness_sq):
    cdef int size = nx * ny * nz
    cdef cnp.int32_t[::1] parent = np.full(size, -1, dtype=np.int32)
    cdef cnp.int32_t[::1] queue = np.empty(size, dtype=np.int32)
    cdef int head = 0, tail = 0
    cdef int cur, cx, cy, cz, tx, ty, tz, nxt, d
    cdef long ddx, ddy, ddz
    cdef int start = (sx * ny + sy) * nz + sz
    cdef int[4] dirx
    cdef int[4] dirz

    dirx[0] = 1; dirz[0] = 0
    dirx[1] = -1; dirz[1] = 0
    dirx[2] = 0; dirz[2] = 1
    dirx[3] = 0; dirz[3] = -1

    parent[start] = start
    ddx = sx - gx; ddy = sy - gy; ddz = sz - gz
    if ddx * ddx + ddy * ddy + ddz * ddz <= closeness_sq:
        return [start]

    queue[tail] = start
    tail += 1
    while head < tail:
        cur = queue[head]
        head += 1
        cz = cur % nz
        cy = (cur // nz) % ny
        cx = cur // (nz * ny)
        for d in range(4):
            tx = cx + dirx[d]
            tz = cz + dirz[d]
            if tx < 0 or tx >= nx or tz < 0 or tz >= nz:
                continue
            ty = cy
            if vol[(tx * ny + ty) * nz + tz] == 1:
                ty = cy + 1
                if ty >= ny:
                    continue
                if vol[(cx * ny + ty) * nz + cz] == 1:
                    continue
                if vol[(tx * ny + ty) * nz + tz] == 1:
                    continue
            else:
                while True:
                    if ty == 0:
                        if ground:
                            break
                        ty = -1
                        break
                    if vol[(tx * ny + (ty - 1)) * nz + tz] != 0:
                        break
                    ty -= 1
                if ty < 0:
                    continue
            nxt = (tx * ny + ty) * nz + tz
            if parent[nxt] != -1:
                continue
            parent[nxt] = cur
            ddx = tx - gx; ddy = ty - gy; ddz = tz - gz
            if ddx * ddx + ddy * ddy + ddz * ddz <= closeness_sq:
                path = [nxt]
                while nxt != start:
                    nxt = parent[nxt]
                    path.append(nxt)
                path.reverse()
                return path
            queue[tail] = nxt
            tail += 1
    return None
