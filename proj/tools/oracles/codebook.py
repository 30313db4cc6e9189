#!/usr/bin/env python3
# Independent re-implementation of the PRNG, codebook draw and FNV-1a.
# Prints the values the C++ unit tests freeze.
import itertools
import json
import sys

M = (1 << 64) - 1


def splitmix(state):
    state = (state + 0x9E3779B97F4A7C15) & M
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M
    return state, z ^ (z >> 31)


def rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & M


class Rng:
    def __init__(self, seed):
        self.s = []
        st = seed
        for _ in range(4):
            st, v = splitmix(st)
            self.s.append(v)

    def next(self):
        s = self.s
        r = (rotl((s[1] * 5) & M, 7) * 9) & M
        t = (s[1] << 17) & M
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = rotl(s[3], 45)
        return r

    def below(self, n):
        thr = ((1 << 64) - n) % n
        while True:
            r = self.next()
            if r >= thr:
                return r % n


def floyd(count, n, rng):
    out = []
    for j in range(n - count, n):
        t = rng.below(j + 1)
        out.append(j if t in out else t)
    return out


def codebook(seed, dim=512, k=10):
    rng = Rng(seed)
    return [sorted(floyd(k, dim, rng)) for _ in range(26)]


def fnv(data):
    h = 0xCBF29CE484222325
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) & M
    return h


def table_text(book):
    return ";".join(chr(65 + i) + ":" + ",".join(map(str, row)) for i, row in enumerate(book))


def main():
    out = {}
    for seed in (0, 7):
        r = Rng(seed)
        out[f"rng{seed}"] = [hex(r.next()) for _ in range(4)]
    out["fnv"] = {s: hex(fnv(s.encode())) for s in ("", "a", "foobar")}
    for seed in (1, 7):
        book = codebook(seed)
        shared = max(len(set(a) & set(b)) for a, b in itertools.combinations(book, 2))
        out[f"book{seed}"] = {
            "A": book[0],
            "Z": book[25],
            "table_fnv": hex(fnv(table_text(book).encode())),
            "max_pair_overlap": shared,
        }
    # Two toggles over 512 positions: exact mean overlap with the clean code.
    # Removed bits follow a hypergeometric draw of 2 positions among 10 active.
    from fractions import Fraction
    from math import comb
    mean = sum(Fraction(comb(10, r) * comb(502, 2 - r), comb(512, 2)) * (10 - r) for r in range(3))
    out["mean_overlap_2flips"] = float(mean)
    json.dump(out, sys.stdout, indent=1)
    print()


if __name__ == "__main__":
    main()
