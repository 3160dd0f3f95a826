"""Generalized cellular automata ``tau: A^G -> A^H`` over a hom ``phi: H -> G``.

A :class:`Gca` is the finite presentation (phi, memory set, local rule); a
:class:`FunctionTable` is the extensional form, one output config index per
input config index. Tables are the ground truth for equality.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable

import numpy as np

from .configs import CONFIG_BUDGET, Config, space_for
from .errors import BudgetExceeded, NotBijective, NotEquivariant, StructureError, TheoremViolation
from .groups import FiniteGroup, GroupHom, compose_hom, identity_hom, kernel

__all__ = [
    "Gca",
    "FunctionTable",
    "EquivarianceResult",
    "apply",
    "phi_star",
    "identity_ca",
    "to_table",
    "is_phi_equivariant",
    "equivariant_mask",
    "recognize",
    "minimize_memory",
    "lemma_constant_criterion",
    "compose",
    "is_bijective",
    "invert",
    "bijection_witness",
    "image_subset_fix",
    "phi_star_image_equals_fix",
    "fix_preimages",
    "all_function_tables",
    "refusal_report",
]


@dataclass(frozen=True, eq=False)
class Gca:
    """``tau(x)(h) = rule[(phi(h^-1) . x)|_memory]`` with patterns numbered lexicographically."""

    phi: GroupHom
    memory: tuple[int, ...]
    rule: tuple[int, ...]
    q: int = 2

    def __post_init__(self):
        mem = tuple(int(s) for s in self.memory)
        rule = tuple(int(r) for r in self.rule)
        object.__setattr__(self, "memory", mem)
        object.__setattr__(self, "rule", rule)
        if self.q < 2:
            raise StructureError("alphabet needs at least two symbols")
        if list(mem) != sorted(set(mem)) or (mem and (mem[0] < 0 or mem[-1] >= self.G.order)):
            raise StructureError(f"memory set {mem} must be sorted, distinct and inside {self.G.label}")
        if len(rule) != self.q ** len(mem):
            raise StructureError(f"rule table needs {self.q ** len(mem)} entries, got {len(rule)}")
        if any(r < 0 or r >= self.q for r in rule):
            raise StructureError("rule outputs out of alphabet range")

    @property
    def G(self) -> FiniteGroup:
        """Group of the input configurations."""
        return self.phi.codomain

    @property
    def H(self) -> FiniteGroup:
        """Group of the output configurations."""
        return self.phi.domain

    @cached_property
    def rule_array(self) -> np.ndarray:
        return np.array(self.rule, dtype=np.int64)

    def __call__(self, x: Config) -> Config:
        return apply(self, x)

    def __repr__(self):
        return f"Gca(phi={list(self.phi.map)}, memory={list(self.memory)}, q={self.q})"

    def evaluate(self, rows: np.ndarray) -> np.ndarray:
        """Vectorized evaluation: ``(B, |G|)`` symbol rows to ``(B, |H|)``."""
        S = np.array(self.memory, dtype=np.int64)
        w = self.q ** np.arange(len(S) - 1, -1, -1, dtype=np.int64)
        # (phi(h)^-1)^-1 s = phi(h) s
        cells = self.G.mul[self.phi.array[:, None], S[None, :]]
        pats = np.asarray(rows, dtype=np.int64)[:, cells] @ w
        return self.rule_array[pats]

    def to_json(self) -> dict:
        return {"phi": self.phi.to_json(), "memory": list(self.memory), "rule": list(self.rule)}

    @classmethod
    def from_json(cls, data: dict, H: FiniteGroup, G: FiniteGroup, q: int = 2) -> "Gca":
        phi = GroupHom.from_json(data["phi"], H, G)
        return cls(phi, tuple(data["memory"]), tuple(data["rule"]), q)


@dataclass(frozen=True, eq=False)
class FunctionTable:
    """An arbitrary map ``A^domain -> A^codomain`` stored as output config indices."""

    domain: FiniteGroup
    codomain: FiniteGroup
    q: int
    outputs: np.ndarray

    def __post_init__(self):
        out = np.array(self.outputs, dtype=np.int64)
        if out.shape != (self.q**self.domain.order,):
            raise StructureError("table needs one output per domain configuration")
        if out.size and (out.min() < 0 or out.max() >= self.q**self.codomain.order):
            raise StructureError("table outputs out of range")
        out.setflags(write=False)
        object.__setattr__(self, "outputs", out)

    @property
    def domain_space(self):
        return space_for(self.domain, self.q)

    @property
    def codomain_space(self):
        return space_for(self.codomain, self.q)

    @property
    def key(self) -> bytes:
        return self.outputs.tobytes()

    def images(self) -> np.ndarray:
        """Full image configurations, one row per domain configuration."""
        return self.codomain_space.configs[self.outputs]

    def __len__(self):
        return self.outputs.shape[0]

    def __eq__(self, other):
        if not isinstance(other, FunctionTable):
            return NotImplemented
        return (
            self.q == other.q
            and self.domain.same_as(other.domain)
            and self.codomain.same_as(other.codomain)
            and np.array_equal(self.outputs, other.outputs)
        )

    def __hash__(self):
        return hash(self.key)

    def __call__(self, x: Config) -> Config:
        return self.codomain_space.config(self.outputs[self.domain_space.index(x)])

    def after(self, inner: "FunctionTable") -> "FunctionTable":
        """``self o inner``."""
        if not inner.codomain.same_as(self.domain) or inner.q != self.q:
            raise StructureError("tables do not compose")
        return FunctionTable(inner.domain, self.codomain, self.q, self.outputs[inner.outputs])

    @classmethod
    def identity(cls, G: FiniteGroup, q: int = 2) -> "FunctionTable":
        return cls(G, G, q, np.arange(q**G.order))

    @classmethod
    def from_function(cls, G: FiniteGroup, H: FiniteGroup, q: int, fn: Callable[[Config], Config]):
        sG, sH = space_for(G, q), space_for(H, q)
        return cls(G, H, q, [sH.index(fn(sG.config(i))) for i in range(sG.size)])

    def to_json(self) -> list:
        return self.images().tolist()

    @classmethod
    def from_json(cls, rows: list, G: FiniteGroup, H: FiniteGroup, q: int = 2) -> "FunctionTable":
        return cls(G, H, q, space_for(H, q).encode(np.array(rows, dtype=np.int64)))


@dataclass(frozen=True)
class EquivarianceResult:
    ok: bool
    counterexample: tuple[int, int] | None = None

    def __bool__(self):
        return self.ok


# --- construction and evaluation ------------------------------------------------


def apply(tau: Gca, x: Config) -> Config:
    if not x.group.same_as(tau.G) or x.q != tau.q:
        raise StructureError(f"config over {x.group.label} (q={x.q}) does not match {tau!r}")
    out = tau.evaluate(np.array([x.symbols]))[0]
    return Config(tau.H, tuple(out), tau.q)


def phi_star(phi: GroupHom, q: int = 2) -> Gca:
    """``x -> x o phi``: memory ``{e}``, identity local rule."""
    return Gca(phi, (0,), tuple(range(q)), q)


def identity_ca(G: FiniteGroup, q: int = 2) -> Gca:
    return phi_star(identity_hom(G), q)


def to_table(tau: Gca, budget: int = CONFIG_BUDGET) -> FunctionTable:
    sG = space_for(tau.G, tau.q, budget)
    sH = space_for(tau.H, tau.q, budget)
    return FunctionTable(tau.G, tau.H, tau.q, sH.encode(tau.evaluate(sG.configs)))


def _check_table_hom(f: FunctionTable, phi: GroupHom):
    if not (f.domain.same_as(phi.codomain) and f.codomain.same_as(phi.domain)):
        raise StructureError(f"table {f.domain.label}->{f.codomain.label} does not match {phi!r}")


def equivariant_mask(tables: np.ndarray, phi: GroupHom, q: int) -> np.ndarray:
    """Row-wise phi-equivariance for a stack of tables ``(M, |A^G|)``."""
    sG, sH = space_for(phi.codomain, q), space_for(phi.domain, q)
    tables = np.asarray(tables)
    ok = np.ones(tables.shape[0], dtype=bool)
    for h in range(phi.domain.order):
        lhs = sH.shift_perms[h][tables]
        rhs = tables[:, sG.shift_perms[phi.map[h]]]
        ok &= np.all(lhs == rhs, axis=1)
    return ok


def is_phi_equivariant(f: FunctionTable, phi: GroupHom) -> EquivarianceResult:
    """Exhaustive test of ``h . f(x) == f(phi(h) . x)``; reports the first failing ``(h, x)``."""
    _check_table_hom(f, phi)
    sG, sH = f.domain_space, f.codomain_space
    for h in range(phi.domain.order):
        lhs = sH.shift_perms[h][f.outputs]
        rhs = f.outputs[sG.shift_perms[phi.map[h]]]
        bad = np.flatnonzero(lhs != rhs)
        if bad.size:
            return EquivarianceResult(False, (h, int(bad[0])))
    return EquivarianceResult(True)


def recognize(f: FunctionTable, phi: GroupHom) -> Gca:
    """Presentation of an equivariant table as a phi-CA with memory set ``G``.

    The local rule reads the output at the identity cell of ``H``. Raises
    :class:`NotEquivariant` with the first counterexample otherwise.
    """
    res = is_phi_equivariant(f, phi)
    if not res:
        raise NotEquivariant(res.counterexample)
    rule = f.images()[:, 0]
    tau = Gca(phi, tuple(range(f.domain.order)), tuple(rule), f.q)
    if to_table(tau) != f:
        raise TheoremViolation("recognized automaton does not reproduce its table")
    return tau


def _patterns(q: int, k: int) -> np.ndarray:
    """All patterns over ``k`` cells, lexicographic, shape ``(q^k, k)``."""
    return np.array(list(itertools.product(range(q), repeat=k)), dtype=np.int64)


def _center_cell(tau: Gca) -> np.ndarray:
    """``pi_e o tau`` as a ``(q,)*|G|`` array indexed by coordinates."""
    f = to_table(tau)
    return f.images()[:, 0].reshape((tau.q,) * tau.G.order)


def _depends_only_on(arr: np.ndarray, S: Iterable[int]) -> bool:
    keep = set(S)
    return all(
        np.array_equal(arr, np.broadcast_to(np.take(arr, [0], axis=a), arr.shape))
        for a in range(arr.ndim)
        if a not in keep
    )


def lemma_constant_criterion(tau: Gca, S: Iterable[int]) -> bool:
    """Whether ``pi_e o tau`` is constant on every neighbourhood ``V(x, S)``."""
    return _depends_only_on(_center_cell(tau), S)


def minimize_memory(tau: Gca) -> Gca:
    """Equivalent automaton whose memory set is the essential coordinates of ``pi_e o tau``."""
    arr = _center_cell(tau)
    n, q = tau.G.order, tau.q
    S = tuple(
        a for a in range(n) if not np.array_equal(arr, np.broadcast_to(np.take(arr, [0], axis=a), arr.shape))
    )
    flat = arr.reshape(-1)
    place = q ** (n - 1 - np.array(S, dtype=np.int64))
    rule = flat[_patterns(q, len(S)) @ place]
    out = Gca(tau.phi, S, tuple(rule), q)
    if not _depends_only_on(arr, S):
        raise TheoremViolation(f"essential set {S} fails the constant-on-neighbourhoods criterion")
    for s in S:
        if _depends_only_on(arr, [t for t in S if t != s]):
            raise TheoremViolation(f"memory set {S} is not minimal: {s} removable")
    if to_table(out) != to_table(tau):
        raise TheoremViolation("minimized automaton changed the global function")
    return out


def compose(sigma: Gca, tau: Gca, check: bool = True) -> Gca:
    """``sigma o tau`` as a ``(phi o psi)``-CA with memory set ``phi(S)T``.

    ``tau`` is a phi-CA ``A^G -> A^H`` with memory ``T``; ``sigma`` is a psi-CA
    ``A^H -> A^K`` with memory ``S``. The local rule is read off zero-extended
    patterns on ``phi(S)T``.
    """
    if not sigma.G.same_as(tau.H) or sigma.q != tau.q:
        raise StructureError("sigma's input group must be tau's output group")
    phi, G, q = tau.phi, tau.G, tau.q
    hom = compose_hom(phi, sigma.phi)
    M = sorted({int(G.mul[phi.map[s], t]) for s in sigma.memory for t in tau.memory})
    pats = _patterns(q, len(M))
    rows = np.zeros((pats.shape[0], G.order), dtype=np.int64)
    rows[:, M] = pats
    rule = sigma.evaluate(tau.evaluate(rows))[:, 0]
    out = Gca(hom, tuple(M), tuple(rule), q)
    if check and to_table(out) != to_table(sigma).after(to_table(tau)):
        raise TheoremViolation("composed automaton differs from the composition of tables")
    return out


def bijection_witness(f: FunctionTable) -> NotBijective | None:
    """None if ``f`` is a bijection, else the failure carrying a witness."""
    seen: dict[int, int] = {}
    for x, y in enumerate(f.outputs.tolist()):
        if y in seen:
            return NotBijective(collision=(seen[y], x))
        seen[y] = x
    size = f.q**f.codomain.order
    if len(seen) < size:
        missing = next(y for y in range(size) if y not in seen)
        return NotBijective(non_image=missing)
    return None


def is_bijective(tau: Gca | FunctionTable) -> bool:
    f = tau if isinstance(tau, FunctionTable) else to_table(tau)
    return bijection_witness(f) is None


def invert(tau: Gca) -> Gca:
    """The inverse as a phi^-1-CA, recognized from the inverse table."""
    f = to_table(tau)
    failure = bijection_witness(f)
    if failure is not None:
        raise failure
    if not tau.phi.is_bijective():
        raise TheoremViolation(f"bijective automaton over non-bijective {tau.phi!r}")
    inv = np.empty_like(f.outputs)
    inv[f.outputs] = np.arange(f.outputs.shape[0])
    g = FunctionTable(tau.H, tau.G, tau.q, inv)
    out = recognize(g, tau.phi.inverse())
    if to_table(compose(out, tau)) != FunctionTable.identity(tau.G, tau.q):
        raise TheoremViolation("inverse o tau is not the identity")
    if to_table(compose(tau, out)) != FunctionTable.identity(tau.H, tau.q):
        raise TheoremViolation("tau o inverse is not the identity")
    return out


# --- periodicity ---------------------------------------------------------------


def image_subset_fix(tau: Gca) -> bool:
    f = to_table(tau)
    mask = f.codomain_space.fixed_mask(kernel(tau.phi))
    return bool(np.all(mask[f.outputs]))


def fix_preimages(phi: GroupHom, q: int = 2) -> list[tuple[int, int]]:
    """For each ``x`` in Fix(ker phi), a config ``z`` with ``phi*(z) = x``.

    ``z(g) = x(h)`` for the least ``h`` with ``phi(h) = g``, and 0 off the image.
    Pairs are (x index in A^H, z index in A^G).
    """
    H, G = phi.domain, phi.codomain
    sG, sH = space_for(G, q), space_for(H, q)
    rep = {}
    for h, g in enumerate(phi.map):
        rep.setdefault(g, h)
    star = to_table(phi_star(phi, q))
    out = []
    for xi in sH.fixed_indices(kernel(phi)):
        x = sH.configs[xi]
        z = [int(x[rep[g]]) if g in rep else 0 for g in range(G.order)]
        zi = sG.index(z)
        if star.outputs[zi] != xi:
            raise TheoremViolation(f"constructed preimage of config #{xi} is wrong")
        out.append((int(xi), zi))
    return out


def phi_star_image_equals_fix(phi: GroupHom, q: int = 2) -> bool:
    star = to_table(phi_star(phi, q))
    fixed = set(star.codomain_space.fixed_indices(kernel(phi)).tolist())
    witnesses = fix_preimages(phi, q)
    return set(star.outputs.tolist()) == fixed and {x for x, _ in witnesses} == fixed


# --- misc ------------------------------------------------------------------------


def all_function_tables(G: FiniteGroup, H: FiniteGroup, q: int = 2, budget: int = 10**6) -> np.ndarray:
    """Every map ``A^G -> A^H`` as rows of output indices, lexicographic."""
    n_in, n_out = q**G.order, q**H.order
    total = n_out**n_in
    if total > budget:
        raise BudgetExceeded(f"all maps A^{G.label} -> A^{H.label}", total, budget)
    idx = np.arange(total, dtype=np.int64)
    w = n_out ** np.arange(n_in - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // w[None, :]) % n_out


def refusal_report(exc: Exception) -> str:
    """Plain-text report for a refused recognition or inversion."""
    if isinstance(exc, NotEquivariant):
        h, x = exc.counterexample
        return f"REFUSED not-equivariant\nh\t{h}\nx\t{x}\n"
    if isinstance(exc, NotBijective):
        if exc.collision is not None:
            a, b = exc.collision
            return f"REFUSED not-injective\nx\t{a}\nx'\t{b}\n"
        return f"REFUSED not-surjective\nnon_image\t{exc.non_image}\n"
    return f"REFUSED\t{exc}\n"
