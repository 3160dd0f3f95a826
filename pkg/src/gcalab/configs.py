"""Configurations ``x: G -> A`` over a finite group and the shift action on them.

Configurations of ``A^G`` are numbered lexicographically: position 0 is the most
significant digit, so config #0 is all zeros and ``itertools.product`` order is
preserved. Bulk operations work on these indices through :class:`ConfigSpace`.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import BudgetExceeded, StructureError
from .groups import FiniteGroup, is_subgroup

__all__ = [
    "Alphabet",
    "Config",
    "Pattern",
    "ConfigSpace",
    "shift",
    "restrict",
    "in_neighborhood",
    "fix_subgroup",
    "indicator_config",
    "enumerate_configs",
    "configs_to_csv",
    "space_for",
]

CONFIG_BUDGET = 2**20


@dataclass(frozen=True)
class Alphabet:
    size: int = 2

    def __post_init__(self):
        if self.size < 2:
            raise StructureError("alphabet needs at least the two symbols 0 and 1")


def _q(alphabet) -> int:
    return alphabet.size if isinstance(alphabet, Alphabet) else Alphabet(int(alphabet)).size


@dataclass(frozen=True, eq=False)
class Config:
    group: FiniteGroup
    symbols: tuple[int, ...]
    q: int = 2

    def __post_init__(self):
        sym = tuple(int(s) for s in self.symbols)
        object.__setattr__(self, "symbols", sym)
        if len(sym) != self.group.order:
            raise StructureError("config length must equal the group order")
        if any(s < 0 or s >= self.q for s in sym):
            raise StructureError(f"config symbols must lie in 0..{self.q - 1}")

    def __getitem__(self, g: int) -> int:
        return self.symbols[g]

    def __eq__(self, other):
        if not isinstance(other, Config):
            return NotImplemented
        return self.symbols == other.symbols and self.q == other.q and self.group.same_as(other.group)

    def __hash__(self):
        return hash((self.symbols, self.q))

    def __repr__(self):
        return f"Config({self.group.label}, {self.symbols})"

    def to_json(self) -> dict:
        return {"group": self.group.label, "symbols": list(self.symbols)}


@dataclass(frozen=True)
class Pattern:
    support: tuple[int, ...]
    symbols: tuple[int, ...]

    def __post_init__(self):
        if len(self.support) != len(self.symbols):
            raise StructureError("pattern support and symbols differ in length")
        if list(self.support) != sorted(set(self.support)):
            raise StructureError("pattern support must be sorted and distinct")


def _check_support(G: FiniteGroup, S: Iterable[int]) -> tuple[int, ...]:
    S = tuple(sorted(set(int(s) for s in S)))
    if S and (S[0] < 0 or S[-1] >= G.order):
        raise StructureError(f"support {S} not contained in {G.label}")
    return S


def shift(g: int, x: Config) -> Config:
    """``(g . x)(h) = x(g^-1 h)``."""
    G = x.group
    if not 0 <= g < G.order:
        raise StructureError(f"element {g} not in {G.label}")
    ginv = G.inv[g]
    return Config(G, tuple(x.symbols[G.mul[ginv, h]] for h in range(G.order)), x.q)


def restrict(x: Config, S: Iterable[int]) -> Pattern:
    S = _check_support(x.group, S)
    return Pattern(S, tuple(x.symbols[s] for s in S))


def in_neighborhood(y: Config, x: Config, S: Iterable[int]) -> bool:
    """True iff ``y`` lies in the basic neighbourhood ``V(x, S)``."""
    if not x.group.same_as(y.group) or x.q != y.q:
        raise StructureError("configs live over different groups or alphabets")
    return restrict(x, S) == restrict(y, S)


def indicator_config(G: FiniteGroup, alphabet, g: int) -> Config:
    if not 0 <= g < G.order:
        raise StructureError(f"element {g} not in {G.label}")
    return Config(G, tuple(int(h == g) for h in range(G.order)), _q(alphabet))


def enumerate_configs(G: FiniteGroup, alphabet, budget: int = CONFIG_BUDGET) -> Iterator[Config]:
    space = space_for(G, _q(alphabet), budget)
    for row in space.configs:
        yield Config(G, tuple(row), space.q)


def fix_subgroup(G: FiniteGroup, alphabet, K: Iterable[int], budget: int = CONFIG_BUDGET) -> list[Config]:
    """All ``K``-periodic configurations, in lexicographic order."""
    K = tuple(sorted(set(int(k) for k in K)))
    if not is_subgroup(G, K):
        raise StructureError(f"{K} is not a subgroup of {G.label}")
    space = space_for(G, _q(alphabet), budget)
    return [space.config(i) for i in space.fixed_indices(K)]


def configs_to_csv(configs: Sequence[Config]) -> str:
    """One configuration per row; header names the cells ``g0..g{n-1}``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if configs:
        w.writerow([f"g{h}" for h in range(configs[0].group.order)])
    for c in configs:
        w.writerow(c.symbols)
    return buf.getvalue()


class ConfigSpace:
    """Indexed view of ``A^G`` used by every exhaustive computation."""

    def __init__(self, group: FiniteGroup, q: int = 2, budget: int = CONFIG_BUDGET):
        q = _q(q)
        self.group = group
        self.q = q
        self.n = group.order
        self.size = q**self.n
        if self.size > budget:
            raise BudgetExceeded(f"|A^{group.label}| with q={q}", self.size, budget)
        self.weights = q ** np.arange(self.n - 1, -1, -1, dtype=np.int64)

    def __repr__(self):
        return f"ConfigSpace({self.group.label}, q={self.q})"

    @cached_property
    def configs(self) -> np.ndarray:
        """``(q^n, n)`` array; row ``i`` holds the symbols of config ``i``."""
        idx = np.arange(self.size, dtype=np.int64)
        rows = (idx[:, None] // self.weights[None, :]) % self.q
        rows.setflags(write=False)
        return rows

    def encode(self, rows: np.ndarray) -> np.ndarray:
        """Config indices for an array whose last axis is a configuration."""
        return np.asarray(rows, dtype=np.int64) @ self.weights

    def index(self, x: Config | Sequence[int]) -> int:
        sym = x.symbols if isinstance(x, Config) else x
        if len(sym) != self.n:
            raise StructureError("config length does not match this space")
        return int(self.encode(np.asarray(sym)))

    def config(self, i: int) -> Config:
        return Config(self.group, tuple(int(v) for v in self.configs[i]), self.q)

    @cached_property
    def shift_perms(self) -> np.ndarray:
        """``shift_perms[g][i]`` is the index of ``g . x_i``."""
        G = self.group
        out = np.empty((self.n, self.size), dtype=np.int64)
        for g in range(self.n):
            cols = G.mul[G.inv[g], :]
            out[g] = self.encode(self.configs[:, cols])
        out.setflags(write=False)
        return out

    def fixed_mask(self, K: Iterable[int]) -> np.ndarray:
        mask = np.ones(self.size, dtype=bool)
        ids = np.arange(self.size)
        for k in K:
            mask &= self.shift_perms[k] == ids
        return mask

    def fixed_indices(self, K: Iterable[int]) -> np.ndarray:
        return np.flatnonzero(self.fixed_mask(K))

    def constant_indices(self) -> np.ndarray:
        return np.array([c * int(self.weights.sum()) for c in range(self.q)], dtype=np.int64)


@lru_cache(maxsize=64)
def space_for(group: FiniteGroup, q: int, budget: int = CONFIG_BUDGET) -> ConfigSpace:
    """Shared :class:`ConfigSpace` so shift tables are built once per (group, q)."""
    return ConfigSpace(group, q, budget)
