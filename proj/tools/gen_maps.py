#!/usr/bin/env python3
"""Regenerates the bundled maps under maps/."""

import argparse
from collections import deque
from pathlib import Path

TRAVERSABLE = set(".heioad")


def amazon_half():
    width, height = 41, 24
    g = [["." for _ in range(width)] for _ in range(height)]
    for r in range(height):
        g[r][0] = g[r][1] = "h"
    for shelf_row in (3, 7, 11, 15, 19):
        for start in (5, 17, 29):
            for c in range(start, start + 10):
                g[shelf_row][c] = "@"
                g[shelf_row - 1][c] = "e"
                g[shelf_row + 1][c] = "e"
    return g


def symbotic():
    width, height = 32, 20
    g = [["@" for _ in range(width)] for _ in range(height)]
    for c in range(width):
        g[0][c] = "@"
        for r in (1, 2, 3):
            g[r][c] = "d"
    for c in range(2, width - 2, 4):
        g[0][c] = "i"
        g[0][c + 2] = "o"
    for c in range(1, width, 3):
        for r in range(4, height - 1):
            g[r][c] = "."
        for r in (7, 12, height - 2):
            g[r][c] = "a"
    return g


def desk():
    rows = [
        "hh........",
        "h.@ee.@ee.",
        "h.@@..@@..",
        "h.........",
        "h..ee..ee.",
        "h..@@..@@.",
        "h.........",
        "h.@ee.@ee.",
        "h.@@..@@..",
        "hh........",
    ]
    return [list(r) for r in rows]


def desk_congested():
    rows = [
        "h.e.e.e.h",
        ".@.@.@.@.",
        "e.......e",
        ".@@.@.@@.",
        "e.......e",
        ".@@.@.@@.",
        "e.......e",
        ".@.@.@.@.",
        "h.e.e.e.h",
    ]
    return [list(r) for r in rows]


MAPS = {
    "amazon_half.map": amazon_half,
    "symbotic.map": symbotic,
    "desk_10x10.map": desk,
    "desk_congested.map": desk_congested,
}


def density(g):
    cells = [ch for row in g for ch in row]
    return sum(ch == "@" for ch in cells) / len(cells)


def connected(g):
    free = [(r, c) for r, row in enumerate(g) for c, ch in enumerate(row) if ch in TRAVERSABLE]
    seen = {free[0]}
    q = deque([free[0]])
    while q:
        r, c = q.popleft()
        for dr, dc in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            n = (r + dr, c + dc)
            if 0 <= n[0] < len(g) and 0 <= n[1] < len(g[0]) and g[n[0]][n[1]] in TRAVERSABLE and n not in seen:
                seen.add(n)
                q.append(n)
    return len(seen) == len(free)


def render(g):
    out = [f"height {len(g)}", f"width {len(g[0])}", "map"]
    out += ["".join(row) for row in g]
    return "\n".join(out) + "\n"


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "maps")
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name, build in MAPS.items():
        g = build()
        if not connected(g):
            raise SystemExit(f"{name}: free space is not connected")
        (args.out / name).write_text(render(g))
        print(f"{name}: {len(g[0])}x{len(g)} density {density(g):.4f}")


if __name__ == "__main__":
    main()
