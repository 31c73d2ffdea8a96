#!/usr/bin/env python3
"""Regenerates the trace fixtures. Output is deterministic for a given seed."""

import math
import random
import sys
from pathlib import Path

WIDTH, HEIGHT = 1024, 768
U = min(WIDTH, HEIGHT)
HEADER = '{"format":"touchcore-trace/1","viewport":{"width":%d,"height":%d}}' % (WIDTH, HEIGHT)

# Shape centers of the demo scene, as viewport fractions.
TARGETS = [(0.18, 0.22), (0.45, 0.25), (0.78, 0.2), (0.2, 0.7), (0.5, 0.55), (0.8, 0.72), (0.5, 0.82)]
BACKGROUND = [(0.05, 0.45), (0.95, 0.45), (0.6, 0.04)]


def num(x):
    x = round(x, 3)
    if x == int(x):
        return str(int(x))
    return repr(x)


def line(t, src, cur, phase, x, y):
    return '{"t":%d,"src":"%s","cur":%d,"phase":"%s","x":%s,"y":%s}' % (t, src, cur, phase, num(x), num(y))


class Builder:
    def __init__(self, rng):
        self.rng = rng
        self.records = []  # (t, seq, text)
        self.next_cur = {"tuio": 1, "pointer": 1}

    def cursor(self, src):
        cur = self.next_cur[src]
        self.next_cur[src] += 1
        return cur

    def add(self, t, src, cur, phase, x, y):
        self.records.append((t, len(self.records), line(t, src, cur, phase, x, y)))

    def path(self, src, t, points, end="up"):
        """One cursor along `points` with 8..20 ms between samples."""
        cur = self.cursor(src)
        x, y = points[0]
        self.add(t, src, cur, "down", x, y)
        for x, y in points[1:]:
            t += self.rng.randint(8000, 20000)
            self.add(t, src, cur, "move", x, y)
        t += self.rng.randint(8000, 20000)
        self.add(t, src, cur, end, x, y)
        return len(points) + 1

    def pair(self, src, t, center, radius, phi0, turn, ratio, steps, there_and_back=False):
        """Two cursors on opposite ends of a diameter, turning and stretching."""
        a, b = self.cursor(src), self.cursor(src)
        cx, cy = center

        def ends(k):
            f = k / steps
            r = radius * (ratio ** math.sin(math.pi * f) if there_and_back else ratio ** f)
            phi = phi0 + turn * f
            return (cx + r * math.cos(phi), cy + r * math.sin(phi)), (cx - r * math.cos(phi), cy - r * math.sin(phi))

        pa, pb = ends(0)
        self.add(t, src, a, "down", *pa)
        t += self.rng.randint(0, 15000)
        self.add(t, src, b, "down", *pb)
        for k in range(1, steps + 1):
            pa, pb = ends(k)
            t += self.rng.randint(8000, 20000)
            self.add(t, src, a, "move", *pa)
            t += self.rng.randint(0, 3000)
            self.add(t, src, b, "move", *pb)
        t += self.rng.randint(8000, 20000)
        self.add(t, src, a, "up", *pa)
        t += self.rng.randint(0, 30000)
        self.add(t, src, b, "up", *pb)
        return 2 * steps + 4

    def text(self):
        body = [text for _, _, text in sorted(self.records)]
        return HEADER + "\n" + "\n".join(body) + "\n"


def loop(rng, start, n, radius):
    """A closed wobbly loop, so a drag leaves its shape where it found it."""
    x0, y0 = start
    phase = rng.uniform(0, 2 * math.pi)
    pts = [start]
    for k in range(1, n + 1):
        a = 2 * math.pi * k / (n + 1)
        r = radius * (1 + 0.3 * math.sin(3 * a))
        pts.append((x0 + r * (math.cos(a + phase) - math.cos(phase)),
                    y0 + r * (math.sin(a + phase) - math.sin(phase))))
    return pts


def determinism_trace(total=1000, seed=20240601):
    rng = random.Random(seed)
    b = Builder(rng)
    t = 1_000_000
    count = 0
    while total - count > 40:
        src = rng.choice(["tuio", "pointer"])
        fx, fy = rng.choice(TARGETS)
        center = (fx * WIDTH + rng.uniform(-10, 10), fy * HEIGHT + rng.uniform(-10, 10))
        kind = rng.random()
        if kind < 0.3:
            count += b.path(src, t, loop(rng, center, rng.randint(5, 25), 12))
        elif kind < 0.45:
            count += b.path(src, t, loop(rng, center, rng.randint(3, 10), 8), end="cancel")
        elif kind < 0.6:
            count += b.path(src, t, loop(rng, center, rng.randint(0, 2), 1))
        elif kind < 0.9:
            steps = rng.randint(4, 14)
            count += b.pair(src, t, center, rng.uniform(15, 45), rng.uniform(0, math.pi),
                            rng.uniform(-1.5, 1.5), rng.uniform(0.6, 1.6), steps)
        else:
            bx, by = rng.choice(BACKGROUND)
            steps = rng.randint(4, 12)
            count += b.pair(src, t, (bx * WIDTH, by * HEIGHT), rng.uniform(15, 30), 0.0,
                            0.0, rng.uniform(0.7, 1.4), steps, there_and_back=True)
        t += rng.randint(60_000, 450_000)
    # Top up to the exact total with one last drag.
    fx, fy = TARGETS[0]
    b.path("pointer", t, loop(rng, (fx * WIDTH, fy * HEIGHT), total - count - 2, 10))
    assert len(b.records) == total, len(b.records)
    return b.text()


def rotate90_trace(steps=64):
    """Two cursors 80 units apart over the first demo rectangle, turned a
    quarter circle about its center, both cursors moving once per tick."""
    cx, cy = 0.18 * WIDTH, 0.22 * HEIGHT
    r = 40.0
    lines = [HEADER]
    t = 1_000_000
    period = 16_667
    lines.append(line(t, "tuio", 1, "down", cx + r, cy))
    lines.append(line(t, "tuio", 2, "down", cx - r, cy))
    for k in range(1, steps + 1):
        t += period
        phi = math.pi / 2 * k / steps
        lines.append(line(t, "tuio", 1, "move", cx + r * math.cos(phi), cy + r * math.sin(phi)))
        lines.append(line(t, "tuio", 2, "move", cx - r * math.cos(phi), cy - r * math.sin(phi)))
    t += period
    lines.append(line(t, "tuio", 1, "up", cx, cy + r))
    lines.append(line(t, "tuio", 2, "up", cx, cy - r))
    return "\n".join(lines) + "\n"


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent
    (out / "determinism_1000.trace").write_text(determinism_trace())
    (out / "rotate90.trace").write_text(rotate90_trace())


if __name__ == "__main__":
    main()
