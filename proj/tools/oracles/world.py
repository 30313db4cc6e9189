#!/usr/bin/env python3
# Canonical serialization of a freshly built room, derived without the C++
# code: codebook draws first, then toy placement on the same stream.
import math
import sys

sys.path.insert(0, __file__.rsplit("/", 1)[0])
from codebook import Rng, floyd, fnv  # noqa: E402


def uniform(rng, lo, hi):
    return lo + (hi - lo) * ((rng.next() >> 11) * 2.0**-53)


def f6(v):
    s = "%.6f" % v
    return "0.000000" if s == "-0.000000" else s


def room(seed):
    rng = Rng(seed)
    for _ in range(26):
        floyd(10, 512, rng)
    crib, post, water, milk = (4.0, 4.0), (10.0, 4.0), (10.5, 3.0), (10.5, 5.0)
    ents = [
        (0, "agent", "BABY", crib, 0.0, 1),
        (1, "caregiver", "MOTHER", post, math.atan2(crib[1] - post[1], crib[0] - post[0]), 2),
        (2, "crib", "CRIB", crib, 0.0, 3),
        (3, "wall", "WALL", (10.0, 0.0), 0.0, 4),
        (4, "wall", "WALL", (20.0, 10.0), math.pi / 2, 4),
        (5, "wall", "WALL", (10.0, 20.0), 0.0, 4),
        (6, "wall", "WALL", (0.0, 10.0), math.pi / 2, 4),
        (7, "bottle_water", "WATER", water, 0.0, 5),
        (8, "bottle_milk", "MILK", milk, 0.0, 6),
    ]
    taken = [crib, post, water, milk]
    for i, name in enumerate(["BALL", "DUCK", "BEAR", "BLOCK"]):
        while True:
            p = (uniform(rng, 2.0, 18.0), uniform(rng, 2.0, 18.0))
            if all(math.dist(p, q) >= 1.5 for q in taken):
                break
        taken.append(p)
        ents.append((9 + i, "toy", name, p, 0.0, 7 + i))
    out = "step=0\nroom=20.000000\n"
    for eid, kind, name, (x, y), facing, color in ents:
        out += f"entity id={eid} kind={kind} name={name} x={f6(x)} y={f6(y)} facing={f6(facing)} color={color} held_by=- present=1\n"
    out += "hand x=4.100000 y=4.000000\n"
    out += "rng=" + "".join("%016x" % w for w in rng.s) + "\n"
    return out


if __name__ == "__main__":
    for seed in (7, 42):
        text = room(seed)
        print(f"seed {seed} hash {fnv(text.encode()):#018x}")
        print(text)
