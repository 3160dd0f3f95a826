"""Exhaustive catalogs of CA(G;A), GCA(G;A) and their unit groups.

Catalog members are identified by their function tables; the (phi, S, mu)
presentation is a derived annotation because presentations are not unique.
"""

from __future__ import annotations

import csv
import io
import json
from functools import cached_property

import numpy as np

from .configs import space_for
from .errors import BudgetExceeded, StructureError, TheoremViolation
from .gca import (
    FunctionTable,
    Gca,
    all_function_tables,
    compose,
    equivariant_mask,
    is_bijective,
    minimize_memory,
    phi_star,
    recognize,
    to_table,
)
from .groups import (
    FiniteGroup,
    GroupHom,
    compose_hom,
    enumerate_aut,
    enumerate_end,
    enumerate_homs,
    identity_hom,
    op_product,
)
from .report import Certificate

__all__ = [
    "MonoidCatalog",
    "RowIndex",
    "enumerate_ca",
    "enumerate_ca_naive",
    "enumerate_gca",
    "enumerate_ica",
    "enumerate_igca",
    "embed_end_op",
    "decompose",
    "verify_semidirect",
    "le_phi_scan",
    "catalogs_summary_csv",
    "RULE_BUDGET",
    "COMPOSITION_BUDGET",
]

RULE_BUDGET = 2**17
COMPOSITION_BUDGET = 4 * 10**6


class RowIndex:
    """Exact lookup of table rows by content.

    Rows are hashed to uint64 with fixed random weights, looked up by binary
    search, and every hit is confirmed by comparing the full row.
    """

    def __init__(self, rows: np.ndarray):
        self.rows = np.asarray(rows, dtype=np.int64)
        rng = np.random.default_rng(0x5EED)
        self._w = rng.integers(1, 2**63, size=self.rows.shape[1], dtype=np.uint64) | np.uint64(1)
        keys = self._hash(self.rows)
        self._order = np.argsort(keys, kind="stable")
        self._keys = keys[self._order]
        if np.any(self._keys[1:] == self._keys[:-1]):
            self._exact = {r.tobytes(): i for i, r in enumerate(self.rows)}
        else:
            self._exact = None

    def _hash(self, rows):
        with np.errstate(over="ignore"):
            return (rows.astype(np.uint64) * self._w).sum(axis=-1, dtype=np.uint64)

    def lookup(self, rows: np.ndarray) -> np.ndarray:
        """Index of each query row, or -1 when absent."""
        rows = np.asarray(rows, dtype=np.int64)
        if self._exact is not None:
            return np.array([self._exact.get(r.tobytes(), -1) for r in rows], dtype=np.int64)
        keys = self._hash(rows)
        pos = np.searchsorted(self._keys, keys)
        pos = np.minimum(pos, len(self._keys) - 1)
        cand = self._order[pos]
        hit = (self._keys[pos] == keys) & np.all(self.rows[cand] == rows, axis=1)
        return np.where(hit, cand, -1)

    def __contains__(self, row) -> bool:
        return bool(self.lookup(np.asarray(row)[None, :])[0] >= 0)


class MonoidCatalog:
    """A finite monoid of maps ``A^G -> A^G`` held as a stack of tables.

    ``tables[i]`` is the output-index array of member ``i``; ``homs`` is the
    candidate hom list and ``witness[i]`` the index (into ``homs``) of the
    least hom for which member ``i`` is equivariant.
    """

    def __init__(self, G: FiniteGroup, q: int, kind: str, tables, homs, witness=None,
                 composition_budget: int = COMPOSITION_BUDGET):
        self.G = G
        self.q = q
        self.kind = kind
        self.tables = np.asarray(tables, dtype=np.int64)
        self.tables.setflags(write=False)
        self.homs = list(homs)
        self.composition_budget = composition_budget
        self.index = RowIndex(self.tables)
        if witness is None:
            witness = _least_witness(self.tables, self.homs, q)
        self.witness = np.asarray(witness, dtype=np.int64)
        self._gca: dict[int, Gca] = {}

    @property
    def label(self) -> str:
        return f"{self.kind}({self.G.label};{self.q})"

    @property
    def size(self) -> int:
        return self.tables.shape[0]

    def __len__(self):
        return self.size

    def __repr__(self):
        return f"MonoidCatalog({self.label}, size={self.size})"

    def table(self, i: int) -> FunctionTable:
        return FunctionTable(self.G, self.G, self.q, self.tables[i])

    def index_of(self, table) -> int:
        row = table.outputs if isinstance(table, FunctionTable) else np.asarray(table)
        return int(self.index.lookup(row[None, :])[0])

    def witness_hom(self, i: int) -> GroupHom:
        return self.homs[self.witness[i]]

    def gca(self, i: int) -> Gca:
        """Minimized presentation of member ``i`` over its witness hom."""
        if i not in self._gca:
            self._gca[i] = minimize_memory(recognize(self.table(i), self.witness_hom(i)))
        return self._gca[i]

    @cached_property
    def identity_index(self) -> int:
        i = self.index_of(np.arange(self.tables.shape[1]))
        if i < 0:
            raise StructureError(f"{self.label} does not contain the identity")
        return i

    @cached_property
    def bijective(self) -> np.ndarray:
        ident = np.arange(self.tables.shape[1])
        return np.all(np.sort(self.tables, axis=1) == ident, axis=1)

    @cached_property
    def composition(self) -> np.ndarray:
        """``composition[i, j]`` is the index of member ``i o j``."""
        m = self.size
        if m * m > self.composition_budget:
            raise BudgetExceeded(f"{self.label} composition table", m * m, self.composition_budget)
        comp = np.empty((m, m), dtype=np.int64)
        for i in range(m):
            comp[i] = self.index.lookup(self.tables[i][self.tables])
        if np.any(comp < 0):
            i, j = np.argwhere(comp < 0)[0]
            raise TheoremViolation(f"{self.label} not closed: member {i} o member {j} missing")
        comp.setflags(write=False)
        return comp

    def compose(self, i: int, j: int) -> int:
        return int(self.index.lookup(self.tables[i][self.tables[j]][None, :])[0])

    def has_composition(self) -> bool:
        return self.size * self.size <= self.composition_budget

    @cached_property
    def units(self) -> np.ndarray:
        """Members with a two-sided inverse.

        Read off the composition table when it fits the budget; otherwise
        bijectivity is used, which is equivalent by the invertibility theorem.
        """
        if not self.has_composition():
            return np.flatnonzero(self.bijective)
        e = self.identity_index
        comp = self.composition
        right = comp == e
        return np.flatnonzero(np.any(right & right.T, axis=1))

    def inverse_index(self, i: int) -> int:
        inv = np.empty_like(self.tables[i])
        inv[self.tables[i]] = np.arange(inv.shape[0])
        return self.index_of(inv)

    def restrict(self, indices, kind: str) -> "MonoidCatalog":
        indices = np.asarray(indices, dtype=np.int64)
        return MonoidCatalog(self.G, self.q, kind, self.tables[indices], self.homs,
                             self.witness[indices], self.composition_budget)

    def units_catalog(self, kind: str | None = None) -> "MonoidCatalog":
        return self.restrict(self.units, kind or "I" + self.kind)

    def to_json(self) -> dict:
        return {
            "instance": self.label,
            "group": self.G.label,
            "alphabet": self.q,
            "kind": self.kind,
            "size": self.size,
            "homs": [list(h.map) for h in self.homs],
            "elements": [
                {"outputs": self.tables[i].tolist(), "witness": int(self.witness[i]), "unit": bool(self.bijective[i])}
                for i in range(self.size)
            ],
            "units": self.units.tolist(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json()) + "\n"


def catalogs_summary_csv(catalogs) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["instance", "kind", "group", "alphabet", "size", "units"])
    for c in catalogs:
        w.writerow([c.label, c.kind, c.G.label, c.q, c.size, len(c.units)])
    return buf.getvalue()


# --- enumeration ------------------------------------------------------------------


def _least_witness(tables: np.ndarray, homs, q: int) -> np.ndarray:
    witness = np.full(tables.shape[0], -1, dtype=np.int64)
    for k, phi in enumerate(homs):
        todo = witness < 0
        if not todo.any():
            break
        ok = equivariant_mask(tables[todo], phi, q)
        witness[np.flatnonzero(todo)[ok]] = k
    if np.any(witness < 0):
        raise TheoremViolation(f"member {int(np.argmax(witness < 0))} has no witnessing hom")
    return witness


def _dedupe(tables: np.ndarray) -> np.ndarray:
    """Distinct rows in order of first appearance."""
    _, first = np.unique(tables, axis=0, return_index=True)
    return tables[np.sort(first)]


def _all_rules(q: int, n_patterns: int, budget: int) -> np.ndarray:
    total = q**n_patterns
    if total > budget:
        raise BudgetExceeded(f"{total} local rules over {n_patterns} patterns", total, budget)
    idx = np.arange(total, dtype=np.int64)
    w = q ** np.arange(n_patterns - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // w[None, :]) % q


def _rule_tables(phi: GroupHom, q: int, rules: np.ndarray) -> np.ndarray:
    """Tables of the phi-CA with memory set ``G`` for every row of ``rules``."""
    G = phi.codomain
    sG, sH = space_for(G, q), space_for(phi.domain, q)
    cells = G.mul[phi.array[:, None], np.arange(G.order)[None, :]]
    pats = sG.configs[:, cells] @ sG.weights
    out = np.empty((rules.shape[0], sG.size), dtype=np.int64)
    step = max(1, 2**22 // max(1, pats.size))
    for a in range(0, rules.shape[0], step):
        out[a:a + step] = sH.encode(rules[a:a + step][:, pats])
    return out


def enumerate_ca(G: FiniteGroup, q: int = 2, rule_budget: int = RULE_BUDGET,
                 composition_budget: int = COMPOSITION_BUDGET) -> MonoidCatalog:
    """CA(G;A) from every local rule with memory set ``G``, deduplicated by table."""
    sG = space_for(G, q)
    rules = _all_rules(q, sG.size, rule_budget)
    tables = _dedupe(_rule_tables(identity_hom(G), q, rules))
    return MonoidCatalog(G, q, "CA", tables, [identity_hom(G)], composition_budget=composition_budget)


def enumerate_ca_naive(G: FiniteGroup, q: int = 2, budget: int = 10**6) -> np.ndarray:
    """Reference: filter every map ``A^G -> A^G`` by G-equivariance."""
    tables = all_function_tables(G, G, q, budget)
    return tables[equivariant_mask(tables, identity_hom(G), q)]


def enumerate_gca(G: FiniteGroup, q: int = 2, rule_budget: int = RULE_BUDGET,
                  composition_budget: int = COMPOSITION_BUDGET, ca: MonoidCatalog | None = None) -> MonoidCatalog:
    """GCA(G;A) as the union over End(G) of ``phi* o CA(G;A)``."""
    ca = ca if ca is not None else enumerate_ca(G, q, rule_budget, composition_budget)
    ends = enumerate_end(G)
    parts = [to_table(phi_star(phi, q)).outputs[ca.tables] for phi in ends]
    tables = _dedupe(np.concatenate(parts))
    return MonoidCatalog(G, q, "GCA", tables, ends, composition_budget=composition_budget)


def enumerate_ica(G: FiniteGroup, q: int = 2, **kw) -> MonoidCatalog:
    return enumerate_ca(G, q, **kw).units_catalog("ICA")


def enumerate_igca(G: FiniteGroup, q: int = 2, **kw) -> MonoidCatalog:
    return enumerate_gca(G, q, **kw).units_catalog("IGCA")


# --- structure checks ---------------------------------------------------------------


def embed_end_op(G: FiniteGroup, q: int = 2) -> Certificate:
    """phi -> phi* is injective and turns the End(G)^op product into composition."""
    cert = Certificate("embed", {"group": G.label, "alphabet": q})
    ends = enumerate_end(G)
    stars = [to_table(phi_star(phi, q)) for phi in ends]
    sG = space_for(G, q)
    pairs = 0
    for a, phi in enumerate(ends):
        for b, psi in enumerate(ends):
            pairs += 1
            lhs = to_table(phi_star(op_product(phi, psi), q))
            if lhs != stars[a].after(stars[b]):
                cert.violation("anti-multiplicativity", phi=a, psi=b)
    separating = []
    for a in range(len(ends)):
        for b in range(a + 1, len(ends)):
            phi, psi = ends[a], ends[b]
            g = next(g for g in range(G.order) if phi.map[g] != psi.map[g])
            x = sG.index([int(h == phi.map[g]) for h in range(G.order)])
            ya = sG.configs[stars[a].outputs[x]][g]
            yb = sG.configs[stars[b].outputs[x]][g]
            if ya == yb:
                cert.violation("injectivity", phi=a, psi=b)
            separating.append({"phi": a, "psi": b, "g": g, "x": int(x)})
    cert.counts = {
        "endomorphisms": len(ends),
        "distinct_tables": len({s.key for s in stars}),
        "pairs_checked": pairs,
    }
    cert.clauses = {
        "anti_multiplicative": not any(v["what"] == "anti-multiplicativity" for v in cert.violations),
        "injective": cert.counts["distinct_tables"] == len(ends),
    }
    cert.witnesses = {"separating": separating}
    return cert


def decompose(tau: Gca) -> tuple[GroupHom, Gca]:
    """Split a phi-CA over ``A^G`` as ``phi* o tau_hat`` with ``tau_hat`` a classical CA."""
    if not tau.G.same_as(tau.H):
        raise StructureError("decompose needs an automaton A^G -> A^G")
    phi = tau.phi
    tau_hat = Gca(identity_hom(tau.G), tau.memory, tau.rule, tau.q)
    if to_table(compose(phi_star(phi, tau.q), tau_hat)) != to_table(tau):
        raise TheoremViolation("phi* o tau_hat does not recompose tau")
    if is_bijective(tau):
        if not phi.is_bijective():
            raise TheoremViolation("bijective automaton decomposed over a non-automorphism")
        if not is_bijective(tau_hat):
            raise TheoremViolation("bijective automaton has non-bijective classical factor")
    return phi, tau_hat


def verify_semidirect(G: FiniteGroup, q: int = 2, **kw) -> Certificate:
    """IGCA = ICA x| Aut(G)^op: normality, product, trivial intersection, order."""
    cert = Certificate("semidirect", {"group": G.label, "alphabet": q})
    ca = enumerate_ca(G, q, **kw)
    gca = enumerate_gca(G, q, ca=ca, **kw)
    ica = ca.units_catalog("ICA")
    igca = gca.units_catalog("IGCA")
    auts = enumerate_aut(G)
    ident = identity_hom(G)

    # (i) tau^-1 sigma tau stays in ICA; hom side phi^-1 o id o phi = id
    normal_bad = None
    for t in range(igca.size):
        tau = igca.tables[t]
        tau_inv = np.argsort(tau)
        conj = tau_inv[ica.tables[:, tau]]
        miss = np.flatnonzero(ica.index.lookup(conj) < 0)
        if miss.size:
            normal_bad = {"tau": t, "sigma": int(miss[0])}
            cert.violation("normality", **normal_bad)
            break
        phi = igca.witness_hom(t)
        if compose_hom(phi.inverse(), compose_hom(ident, phi)) != ident:
            cert.violation("normality-hom", tau=t)

    # (ii) IGCA = Aut* o ICA
    stars = [to_table(phi_star(phi, q)).outputs for phi in auts]
    products = _dedupe(np.concatenate([s[ica.tables] for s in stars]))
    found = igca.index.lookup(products)
    product_ok = products.shape[0] == igca.size and bool(np.all(found >= 0))
    if not product_ok:
        cert.violation("product", products=int(products.shape[0]), igca=igca.size)

    # (iii) {phi*} meets ICA only in the identity
    meet = [k for k, s in enumerate(stars) if ica.index_of(s) >= 0]
    meet_ok = [list(auts[k].map) for k in meet] == [list(ident.map)]
    if not meet_ok:
        cert.violation("intersection", homs=[list(auts[k].map) for k in meet])

    order_ok = igca.size == ica.size * len(auts)
    if not order_ok:
        cert.violation("order", igca=igca.size, ica=ica.size, aut=len(auts))

    # product lemma, second part, member by member
    for t in range(igca.size):
        decompose(igca.gca(t))

    cert.counts = {"CA": ca.size, "GCA": gca.size, "ICA": ica.size, "IGCA": igca.size, "Aut": len(auts)}
    cert.clauses = {
        "normal": normal_bad is None,
        "product": product_ok,
        "trivial_intersection": meet_ok,
        "order": order_ok,
    }
    return cert


def le_phi_scan(G: FiniteGroup, H: FiniteGroup, q: int = 2, rule_budget: int = RULE_BUDGET) -> Certificate:
    """Surjective tau forces injective phi; injective tau forces surjective phi.

    Scans every hom ``H -> G`` against every local rule with memory set ``G``.
    """
    cert = Certificate("le-phi", {"from": H.label, "to": G.label, "alphabet": q})
    sG, sH = space_for(G, q), space_for(H, q)
    rules = _all_rules(q, sG.size, rule_budget)
    per_hom = []
    for k, phi in enumerate(enumerate_homs(H, G)):
        tables = _rule_tables(phi, q, rules)
        srt = np.sort(tables, axis=1)
        distinct = 1 + np.sum(srt[:, 1:] != srt[:, :-1], axis=1)
        injective = distinct == sG.size
        surjective = distinct == sH.size
        bad_surj = np.flatnonzero(surjective & (not phi.is_injective()))
        bad_inj = np.flatnonzero(injective & (not phi.is_surjective()))
        for r in bad_surj[:1]:
            cert.violation("surjective tau over non-injective phi", hom=k, rule=int(r))
        for r in bad_inj[:1]:
            cert.violation("injective tau over non-surjective phi", hom=k, rule=int(r))
        per_hom.append({
            "hom": list(phi.map),
            "phi_injective": phi.is_injective(),
            "phi_surjective": phi.is_surjective(),
            "tau_injective": int(injective.sum()),
            "tau_surjective": int(surjective.sum()),
        })
    # converse fails: a classical CA on G that is neither injective nor surjective
    id_tables = _rule_tables(identity_hom(G), q, rules)
    srt = np.sort(id_tables, axis=1)
    distinct = 1 + np.sum(srt[:, 1:] != srt[:, :-1], axis=1)
    neither = np.flatnonzero(distinct < sG.size)
    converse = None
    if neither.size:
        r = int(neither[0])
        converse = {"group": G.label, "rule": rules[r].tolist(), "image_size": int(distinct[r])}
    cert.counts = {"homs": len(per_hom), "rules": int(rules.shape[0]), "per_hom": per_hom}
    cert.witnesses = {"converse_failure": converse}
    cert.clauses = {"no_violations": not cert.violations, "converse_witness": converse is not None}
    return cert
