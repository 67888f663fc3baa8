"""Splittable counter-based random generator.

Every random draw in the package flows from one 64-bit seed through this
generator.  The algorithm is fixed so that other implementations can
reproduce the same streams:

* ``mix(z)`` is the SplitMix64 finaliser::

      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9   (mod 2^64)
      z = (z ^ (z >> 27)) * 0x94D049BB133111EB   (mod 2^64)
      z =  z ^ (z >> 31)

* the i-th output (i = 0, 1, ...) of a stream with key ``k`` is
  ``mix(k + (i + 1) * 0x9E3779B97F4A7C15 mod 2^64)``;
* ``split(label)`` derives the child key ``mix(k ^ mix(label))``, where
  string labels are first folded to 64 bits by ``fold`` (FNV-1a);
* ``below(n)`` rejects outputs ``>= 2^64 - (2^64 mod n)`` and returns the
  remainder mod ``n`` of the first accepted one.
"""

from __future__ import annotations

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix(z: int) -> int:
    z &= MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def fold(label: str | int) -> int:
    if isinstance(label, int):
        return label & MASK
    h = 0xCBF29CE484222325
    for b in label.encode():
        h = ((h ^ b) * 0x100000001B3) & MASK
    return h


class SplitRng:
    def __init__(self, seed: int):
        self.key = seed & MASK
        self.counter = 0

    def split(self, label: str | int) -> "SplitRng":
        return SplitRng(mix(self.key ^ mix(fold(label))))

    def next64(self) -> int:
        self.counter += 1
        return mix(self.key + self.counter * GOLDEN)

    def below(self, n: int) -> int:
        if n <= 0:
            raise ValueError("below() needs a positive bound")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            v = self.next64()
            if v < limit:
                return v % n

    def choice(self, seq):
        return seq[self.below(len(seq))]
