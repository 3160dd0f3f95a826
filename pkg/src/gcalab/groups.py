"""Finite groups as Cayley tables, and homomorphisms between them.

Elements are the integers ``0..n-1`` with the identity pinned at ``0``.
A homomorphism ``H -> G`` is a length-``|H|`` tuple of ``G`` indices.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import BudgetExceeded, StructureError

__all__ = [
    "FiniteGroup",
    "GroupHom",
    "build_cyclic",
    "build_direct_product",
    "build_dihedral",
    "build_symmetric",
    "enumerate_homs",
    "enumerate_homs_naive",
    "enumerate_end",
    "enumerate_aut",
    "find_isomorphism",
    "identity_hom",
    "kernel",
    "image",
    "center",
    "is_subgroup",
    "compose_hom",
    "op_product",
    "parse_group",
]

HOM_BUDGET = 10**7
NAIVE_BUDGET = 10**6


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A finite group given by its multiplication table.

    ``mul[a, b]`` is the index of ``a*b``. The table is checked on construction:
    identity at 0, inverses, and associativity over all triples.
    """

    mul: np.ndarray
    label: str = "G"
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        mul = np.array(self.mul, dtype=np.int64)
        if mul.ndim != 2 or mul.shape[0] != mul.shape[1] or mul.shape[0] < 1:
            raise StructureError("multiplication table must be a non-empty square matrix")
        n = mul.shape[0]
        if mul.min() < 0 or mul.max() >= n:
            raise StructureError("multiplication table entries out of range")
        mul.setflags(write=False)
        object.__setattr__(self, "mul", mul)
        if self.validate:
            self._check_axioms()

    def _check_axioms(self):
        mul, n = self.mul, self.order
        rng = np.arange(n)
        if not (np.array_equal(mul[0], rng) and np.array_equal(mul[:, 0], rng)):
            raise StructureError(f"{self.label}: element 0 is not the identity")
        if not all(np.any(mul[g] == 0) for g in range(n)):
            raise StructureError(f"{self.label}: some element has no inverse")
        # (ab)c == a(bc) for every triple
        left = mul[mul[:, :, None], rng[None, None, :]]
        right = mul[rng[:, None, None], mul[None, :, :]]
        if not np.array_equal(left, right):
            a, b, c = np.argwhere(left != right)[0]
            raise StructureError(f"{self.label}: not associative at ({a}, {b}, {c})")
        inv = self.inv
        if not (np.all(mul[rng, inv] == 0) and np.all(mul[inv, rng] == 0)):
            raise StructureError(f"{self.label}: inverses are not two-sided")

    @property
    def order(self) -> int:
        return self.mul.shape[0]

    @property
    def identity(self) -> int:
        return 0

    @cached_property
    def inv(self) -> np.ndarray:
        inv = np.argmax(self.mul == 0, axis=1)
        inv.setflags(write=False)
        return inv

    def __len__(self):
        return self.order

    def __repr__(self):
        return f"FiniteGroup({self.label!r}, order={self.order})"

    def same_as(self, other: "FiniteGroup") -> bool:
        """Identical Cayley tables (not just isomorphic)."""
        return self is other or np.array_equal(self.mul, other.mul)

    def element_order(self, g: int) -> int:
        k, x = 1, g
        while x != 0:
            x = self.mul[x, g]
            k += 1
        return k

    @cached_property
    def element_orders(self) -> tuple[int, ...]:
        return tuple(self.element_order(g) for g in range(self.order))

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    def closure(self, gens: Iterable[int]) -> frozenset[int]:
        """Subgroup generated by ``gens``."""
        gens = list(gens)
        seen = {0}
        frontier = [0]
        while frontier:
            h = frontier.pop()
            for g in gens:
                k = int(self.mul[h, g])
                if k not in seen:
                    seen.add(k)
                    frontier.append(k)
        return frozenset(seen)

    @cached_property
    def generators(self) -> tuple[int, ...]:
        """Greedy generating set: repeatedly add the least element not yet generated."""
        gens: list[int] = []
        sub = frozenset({0})
        for g in range(self.order):
            if g not in sub:
                gens.append(g)
                sub = self.closure(gens)
        return tuple(gens)

    def to_json(self) -> dict:
        return {"order": self.order, "mul": self.mul.tolist(), "label": self.label}

    @classmethod
    def from_json(cls, data: dict | str) -> "FiniteGroup":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            mul = data["mul"]
        except (KeyError, TypeError):
            raise StructureError("group JSON needs a 'mul' table") from None
        if "order" in data and data["order"] != len(mul):
            raise StructureError("group JSON 'order' disagrees with the table size")
        return cls(mul, label=data.get("label", "G"))


@dataclass(frozen=True, eq=False)
class GroupHom:
    """A homomorphism ``domain -> codomain``, verified on all pairs at construction."""

    domain: FiniteGroup
    codomain: FiniteGroup
    map: tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(v) for v in self.map)
        object.__setattr__(self, "map", m)
        if len(m) != self.domain.order:
            raise StructureError("hom map length must equal the domain order")
        if any(v < 0 or v >= self.codomain.order for v in m):
            raise StructureError("hom map values out of codomain range")
        if m[0] != 0:
            raise StructureError("hom must send identity to identity")
        arr = self.array
        if not np.array_equal(arr[self.domain.mul], self.codomain.mul[arr[:, None], arr[None, :]]):
            raise StructureError(f"map {m} is not a homomorphism")

    @cached_property
    def array(self) -> np.ndarray:
        a = np.array(self.map, dtype=np.int64)
        a.setflags(write=False)
        return a

    def __call__(self, h: int) -> int:
        return self.map[h]

    def __eq__(self, other):
        if not isinstance(other, GroupHom):
            return NotImplemented
        return (
            self.map == other.map
            and self.domain.same_as(other.domain)
            and self.codomain.same_as(other.codomain)
        )

    def __hash__(self):
        return hash((self.map, self.domain.order, self.codomain.order))

    def __repr__(self):
        return f"GroupHom({self.domain.label}->{self.codomain.label}, {list(self.map)})"

    def is_injective(self) -> bool:
        return len(set(self.map)) == self.domain.order

    def is_surjective(self) -> bool:
        return len(set(self.map)) == self.codomain.order

    def is_bijective(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def inverse(self) -> "GroupHom":
        if not self.is_bijective():
            raise StructureError(f"{self!r} is not bijective")
        inv = [0] * len(self.map)
        for h, g in enumerate(self.map):
            inv[g] = h
        return GroupHom(self.codomain, self.domain, tuple(inv))

    def to_json(self) -> dict:
        return {"domain": self.domain.label, "codomain": self.codomain.label, "map": list(self.map)}

    @classmethod
    def from_json(cls, data: dict, domain: FiniteGroup, codomain: FiniteGroup) -> "GroupHom":
        return cls(domain, codomain, tuple(data["map"]))


# --- constructors -----------------------------------------------------------


def build_cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise StructureError("cyclic group order must be >= 1")
    r = np.arange(n)
    return FiniteGroup((r[:, None] + r[None, :]) % n, label=f"Z{n}")


def build_direct_product(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    """``G x H`` with pair ``(i, j)`` stored at index ``i*|H| + j``."""
    m, n = G.order, H.order
    i = np.repeat(np.arange(m), n)
    j = np.tile(np.arange(n), m)
    mul = G.mul[i[:, None], i[None, :]] * n + H.mul[j[:, None], j[None, :]]
    return FiniteGroup(mul, label=f"{G.label}x{H.label}")


def build_dihedral(n: int) -> FiniteGroup:
    """Symmetries of the n-gon, order 2n; ``r^a s^f`` is stored at ``a + n*f``."""
    if n < 1:
        raise StructureError("dihedral parameter must be >= 1")
    if n > 60:
        raise StructureError("dihedral parameter too large (order bound 120)")
    size = 2 * n
    mul = np.empty((size, size), dtype=np.int64)
    for x in range(size):
        a, f = x % n, x // n
        for y in range(size):
            b, g = y % n, y // n
            mul[x, y] = (a + (b if f == 0 else -b)) % n + n * ((f + g) % 2)
    return FiniteGroup(mul, label=f"D{n}")


def build_symmetric(n: int) -> FiniteGroup:
    """All permutations of ``range(n)`` in lexicographic order; ``(p*q)(i) = p[q[i]]``."""
    if n < 1:
        raise StructureError("symmetric degree must be >= 1")
    if n > 5:
        raise StructureError("symmetric degree > 5 exceeds the order bound of 120")
    perms = list(itertools.permutations(range(n)))
    index = {p: k for k, p in enumerate(perms)}
    mul = [[index[tuple(p[q[i]] for i in range(n))] for q in perms] for p in perms]
    return FiniteGroup(mul, label=f"S{n}")


# --- homomorphisms ----------------------------------------------------------


def identity_hom(G: FiniteGroup) -> GroupHom:
    return GroupHom(G, G, tuple(range(G.order)))


def _extend(H: FiniteGroup, G: FiniteGroup, gens, images):
    """Propagate generator images over the Cayley graph; None on conflict."""
    m = np.full(H.order, -1, dtype=np.int64)
    m[0] = 0
    stack = [0]
    while stack:
        h = stack.pop()
        mh = m[h]
        for g, a in zip(gens, images):
            k = H.mul[h, g]
            v = G.mul[mh, a]
            if m[k] < 0:
                m[k] = v
                stack.append(k)
            elif m[k] != v:
                return None
    return m


def enumerate_homs(H: FiniteGroup, G: FiniteGroup, budget: int = HOM_BUDGET) -> list[GroupHom]:
    """All homomorphisms ``H -> G``, sorted lexicographically by map.

    Backtracks over images of a generating set of ``H``; an image must have order
    dividing its generator's order, and each partial assignment is propagated
    over the Cayley graph of the generated subgroup before going deeper.
    """
    gens = H.generators
    choices = [
        [a for a in range(G.order) if H.element_orders[g] % G.element_orders[a] == 0]
        for g in gens
    ]
    worst = int(np.prod([len(c) for c in choices], dtype=object)) if choices else 1
    if worst > budget:
        raise BudgetExceeded(f"Hom({H.label},{G.label}) search", worst, budget)

    found: list[tuple[int, ...]] = []

    def search(depth, images):
        m = _extend(H, G, gens[:depth], images)
        if m is None:
            return
        if depth == len(gens):
            found.append(tuple(int(v) for v in m))
            return
        for a in choices[depth]:
            search(depth + 1, images + [a])

    search(0, [])
    return [GroupHom(H, G, m) for m in sorted(found)]


def enumerate_homs_naive(H: FiniteGroup, G: FiniteGroup, budget: int = NAIVE_BUDGET) -> list[GroupHom]:
    """Reference enumeration: filter every map ``H -> G``. Only for tiny instances."""
    total = G.order ** H.order
    if total > budget:
        raise BudgetExceeded(f"naive Hom({H.label},{G.label})", total, budget)
    out = []
    for m in itertools.product(range(G.order), repeat=H.order):
        a = np.array(m)
        if np.array_equal(a[H.mul], G.mul[a[:, None], a[None, :]]):
            out.append(GroupHom(H, G, m))
    return out


def enumerate_end(G: FiniteGroup, budget: int = HOM_BUDGET) -> list[GroupHom]:
    return enumerate_homs(G, G, budget)


def enumerate_aut(G: FiniteGroup, budget: int = HOM_BUDGET) -> list[GroupHom]:
    return [f for f in enumerate_end(G, budget) if f.is_bijective()]


def find_isomorphism(H: FiniteGroup, G: FiniteGroup, budget: int = HOM_BUDGET) -> GroupHom | None:
    if H.order != G.order:
        return None
    for f in enumerate_homs(H, G, budget):
        if f.is_bijective():
            return f
    return None


# --- structure ---------------------------------------------------------------


def is_subgroup(G: FiniteGroup, K: Iterable[int]) -> bool:
    K = set(int(k) for k in K)
    if 0 not in K or any(k < 0 or k >= G.order for k in K):
        return False
    return all(int(G.inv[a]) in K and all(int(G.mul[a, b]) in K for b in K) for a in K)


def _verified(G: FiniteGroup, elems) -> tuple[int, ...]:
    out = tuple(sorted(set(int(e) for e in elems)))
    if not is_subgroup(G, out):
        raise StructureError(f"{out} is not a subgroup of {G.label}")
    return out


def kernel(phi: GroupHom) -> tuple[int, ...]:
    return _verified(phi.domain, (h for h, g in enumerate(phi.map) if g == 0))


def image(phi: GroupHom) -> tuple[int, ...]:
    return _verified(phi.codomain, phi.map)


def center(G: FiniteGroup) -> tuple[int, ...]:
    commutes = np.all(G.mul == G.mul.T, axis=1)
    return _verified(G, np.flatnonzero(commutes))


def compose_hom(phi: GroupHom, psi: GroupHom) -> GroupHom:
    """``phi o psi`` for ``psi: K -> H`` and ``phi: H -> G``."""
    if not psi.codomain.same_as(phi.domain):
        raise StructureError(f"cannot compose {phi!r} after {psi!r}")
    return GroupHom(psi.domain, phi.codomain, tuple(phi.map[k] for k in psi.map))


def op_product(phi: GroupHom, psi: GroupHom) -> GroupHom:
    """Product in End(G)^op: ``phi (.) psi = psi o phi``."""
    return compose_hom(psi, phi)


def parse_group(spec: str) -> FiniteGroup:
    """Parse names like ``Z6``, ``Z2xZ3``, ``Z2 x Z2``, ``D4``, ``S3`` or inline Cayley JSON."""
    spec = spec.strip()
    if spec.startswith("{"):
        return FiniteGroup.from_json(spec)
    parts = [p.strip() for p in spec.replace("×", "x").split("x") if p.strip()]
    if not parts:
        raise StructureError(f"empty group spec {spec!r}")
    groups = [_parse_atom(p) for p in parts]
    out = groups[0]
    for g in groups[1:]:
        out = build_direct_product(out, g)
    return out


def _parse_atom(token: str) -> FiniteGroup:
    kind, num = token[:1].upper(), token[1:]
    if not num.isdigit():
        raise StructureError(f"cannot parse group {token!r}")
    n = int(num)
    builders = {"Z": build_cyclic, "C": build_cyclic, "D": build_dihedral, "S": build_symmetric}
    if kind not in builders:
        raise StructureError(f"unknown group family {kind!r} in {token!r}")
    return builders[kind](n)


def hom_from_map(H: FiniteGroup, G: FiniteGroup, values: Sequence[int]) -> GroupHom:
    return GroupHom(H, G, tuple(values))
