"""Default size budgets, overridable through environment variables.

Each budget is read at call time so tests and the CLI can adjust them
with ``HSBOOT_<NAME>`` (for example ``HSBOOT_EXPAND_TERMS=500000``) or,
within a block, with :func:`overrides`.  Block overrides win over the
environment.
"""

from __future__ import annotations

import os
from contextlib import contextmanager
from typing import Iterator, Mapping

from .errors import ParameterError

DEFAULTS = {
    "expand_terms": 2_000_000,
    "points": 1_000_000,
    "enumeration": 50_000_000,
    "linear_system": 20_000,
    "design_universe": 1 << 24,
    "design_family": 1 << 20,
    "ki_dense": 1_000_000,
    "assignment_search": 1_000_000,
}

_scoped: list[dict[str, int]] = []


def budget(name: str) -> int:
    for layer in reversed(_scoped):
        if name in layer:
            return layer[name]
    env = os.environ.get("HSBOOT_" + name.upper())
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ParameterError(f"HSBOOT_{name.upper()}: expected an integer, got {env!r}") from None
    return DEFAULTS[name]


@contextmanager
def overrides(values: Mapping[str, int]) -> Iterator[None]:
    layer = {}
    for k, v in values.items():
        if k not in DEFAULTS:
            raise ParameterError(f"budgets.{k}: unknown budget (known: {', '.join(sorted(DEFAULTS))})")
        if isinstance(v, bool) or not isinstance(v, int) or v < 0:
            raise ParameterError(f"budgets.{k}: expected a non-negative integer")
        layer[k] = v
    _scoped.append(layer)
    try:
        yield
    finally:
        _scoped.pop()
