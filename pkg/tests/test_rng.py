from __future__ import annotations

from collections import Counter

from hsboot.rng import MASK, SplitRng, fold, mix


def _splitmix_reference(seed: int, n: int) -> list[int]:
    """The classic sequential SplitMix64 generator."""
    out, state = [], seed
    for _ in range(n):
        state = (state + 0x9E3779B97F4A7C15) & MASK
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        out.append(z ^ (z >> 31))
    return out


def test_stream_equals_splitmix64():
    rng = SplitRng(1234567)
    assert [rng.next64() for _ in range(10)] == _splitmix_reference(1234567, 10)


def test_known_splitmix_value():
    # first output of SplitMix64 seeded with 0
    assert SplitRng(0).next64() == 0xE220A8397B1DCDAF


def test_split_is_deterministic_and_independent():
    a, b = SplitRng(7).split("pit"), SplitRng(7).split("pit")
    assert [a.next64() for _ in range(5)] == [b.next64() for _ in range(5)]
    c = SplitRng(7).split("other")
    assert SplitRng(7).split("pit").next64() != c.next64()
    assert SplitRng(7).split(3).key == mix(7 ^ mix(3))


def test_fold_is_fnv1a():
    assert fold("") == 0xCBF29CE484222325
    assert fold("a") == 0xAF63DC4C8601EC8C


def test_below_range_and_rough_uniformity():
    rng = SplitRng(99)
    counts = Counter(rng.below(5) for _ in range(5000))
    assert set(counts) == set(range(5))
    assert all(800 < v < 1200 for v in counts.values())
