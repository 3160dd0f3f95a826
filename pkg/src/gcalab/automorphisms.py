"""Automorphisms of CA(G;A) induced by automorphisms of G, and innerness tests.

For ``phi`` in Aut(G) the induced map is conjugation by ``phi*``:
``tau -> (phi^-1)* o tau o phi*``. Automorphisms of a catalog are stored as
permutations of its member indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .configs import space_for
from .errors import StructureError, TheoremViolation
from .gca import FunctionTable, equivariant_mask, phi_star, to_table
from .groups import GroupHom, center, compose_hom, enumerate_aut, identity_hom
from .monoid import MonoidCatalog, enumerate_ca
from .report import Certificate

__all__ = [
    "MonoidAutomorphism",
    "phi_ca",
    "phi_ca_tables",
    "phi_ca_automorphism",
    "conjugation_automorphism",
    "build_Phi",
    "verify_phi_ca_hom",
    "central_shift_ca",
    "is_inner",
    "theorem_inner_check",
    "outer_embedding_check",
]

_PROBES = 32


@dataclass(frozen=True, eq=False)
class MonoidAutomorphism:
    catalog: MonoidCatalog
    perm: np.ndarray
    origin: dict = field(default_factory=dict)

    def __post_init__(self):
        perm = np.asarray(self.perm, dtype=np.int64)
        if perm.shape != (self.catalog.size,) or not np.array_equal(np.sort(perm), np.arange(perm.size)):
            raise StructureError("automorphism must permute the catalog indices")
        perm.setflags(write=False)
        object.__setattr__(self, "perm", perm)

    def __eq__(self, other):
        if not isinstance(other, MonoidAutomorphism):
            return NotImplemented
        return self.catalog is other.catalog and np.array_equal(self.perm, other.perm)

    def __hash__(self):
        return hash(self.perm.tobytes())

    def __call__(self, i: int) -> int:
        return int(self.perm[i])

    def after(self, other: "MonoidAutomorphism") -> "MonoidAutomorphism":
        """``self o other``."""
        return MonoidAutomorphism(self.catalog, self.perm[other.perm], {"kind": "composite"})

    def inverse(self) -> "MonoidAutomorphism":
        return MonoidAutomorphism(self.catalog, np.argsort(self.perm), {"kind": "inverse"})

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.perm, np.arange(self.perm.size)))

    def respects_composition(self) -> bool:
        comp = self.catalog.composition
        p = self.perm
        return bool(np.array_equal(p[comp], comp[p[:, None], p[None, :]]))

    def to_json(self) -> dict:
        return {"instance": self.catalog.label, "perm": self.perm.tolist(), "origin": self.origin}


def phi_ca_tables(phi: GroupHom, tables: np.ndarray, q: int = 2) -> np.ndarray:
    """Row-wise ``(phi^-1)* o tau o phi*`` for a stack of classical CA tables."""
    if not phi.is_bijective() or not phi.domain.same_as(phi.codomain):
        raise StructureError(f"{phi!r} is not an automorphism")
    fwd = to_table(phi_star(phi, q)).outputs
    back = to_table(phi_star(phi.inverse(), q)).outputs
    out = back[np.asarray(tables)[:, fwd]]
    if not np.all(equivariant_mask(out, identity_hom(phi.domain), q)):
        raise TheoremViolation("conjugate of a classical CA is not shift-equivariant")
    return out


def phi_ca(phi: GroupHom, tau: FunctionTable) -> FunctionTable:
    out = phi_ca_tables(phi, tau.outputs[None, :], tau.q)[0]
    return FunctionTable(tau.domain, tau.codomain, tau.q, out)


def phi_ca_automorphism(catalog: MonoidCatalog, phi: GroupHom) -> MonoidAutomorphism:
    perm = catalog.index.lookup(phi_ca_tables(phi, catalog.tables, catalog.q))
    if np.any(perm < 0):
        raise TheoremViolation(f"phi_CA leaves {catalog.label}")
    return MonoidAutomorphism(catalog, perm, {"kind": "phi", "hom": list(phi.map)})


def _conjugates(catalog: MonoidCatalog, sigma: int, rows=None) -> np.ndarray:
    """``sigma^-1 o tau o sigma`` for the selected members ``tau``."""
    s = catalog.tables[sigma]
    s_inv = np.argsort(s)
    tabs = catalog.tables if rows is None else catalog.tables[rows]
    return s_inv[tabs[:, s]]


def conjugation_automorphism(catalog: MonoidCatalog, sigma: int) -> MonoidAutomorphism:
    if not catalog.bijective[sigma]:
        raise StructureError(f"member {sigma} is not a unit")
    perm = catalog.index.lookup(_conjugates(catalog, sigma))
    if np.any(perm < 0):
        raise TheoremViolation("conjugation leaves the catalog")
    return MonoidAutomorphism(catalog, perm, {"kind": "conjugation", "sigma": int(sigma)})


def build_Phi(catalog: MonoidCatalog) -> dict[GroupHom, MonoidAutomorphism]:
    """``phi -> phi_CA`` over all of Aut(G), checked to be a group homomorphism."""
    auts = enumerate_aut(catalog.G)
    Phi = {phi: phi_ca_automorphism(catalog, phi) for phi in auts}
    for phi in auts:
        if catalog.has_composition() and not Phi[phi].respects_composition():
            raise TheoremViolation(f"{phi!r}_CA does not respect composition")
        for psi in auts:
            if Phi[compose_hom(phi, psi)] != Phi[phi].after(Phi[psi]):
                raise TheoremViolation(f"Phi fails on ({phi!r}, {psi!r})")
    return Phi


def verify_phi_ca_hom(G, q: int = 2, catalog: MonoidCatalog | None = None) -> Certificate:
    """(phi o psi)_CA = phi_CA o psi_CA member by member, and each phi_CA is an automorphism."""
    catalog = catalog if catalog is not None else enumerate_ca(G, q)
    cert = Certificate("phi-ca-hom", {"group": G.label, "alphabet": q})
    auts = enumerate_aut(G)
    images = {phi: phi_ca_tables(phi, catalog.tables, q) for phi in auts}
    pairs = 0
    for phi in auts:
        for psi in auts:
            pairs += 1
            lhs = images[compose_hom(phi, psi)]
            rhs = phi_ca_tables(phi, images[psi], q)
            bad = np.flatnonzero(np.any(lhs != rhs, axis=1))
            if bad.size:
                cert.violation("(phi o psi)_CA", phi=list(phi.map), psi=list(psi.map), member=int(bad[0]))
    perms = {}
    for phi in auts:
        alpha = phi_ca_automorphism(catalog, phi)
        perms[phi] = alpha
        if catalog.has_composition() and not alpha.respects_composition():
            cert.violation("not a monoid automorphism", phi=list(phi.map))
    for phi in auts:
        for psi in auts:
            if perms[compose_hom(phi, psi)] != perms[phi].after(perms[psi]):
                cert.violation("Phi not a homomorphism", phi=list(phi.map), psi=list(psi.map))
    distinct = len({a.perm.tobytes() for a in perms.values()})
    cert.counts = {"members": catalog.size, "aut": len(auts), "pairs": pairs, "distinct_images": distinct}
    cert.clauses = {"proposition": not cert.violations}
    return cert


def central_shift_ca(catalog: MonoidCatalog, z: int) -> int:
    """Catalog index of ``x -> z . x`` for central ``z``, checked central in the monoid."""
    G, q = catalog.G, catalog.q
    if z not in center(G):
        raise StructureError(f"{z} is not central in {G.label}")
    shift = space_for(G, q).shift_perms[z]
    if not equivariant_mask(shift[None, :], identity_hom(G), q)[0]:
        raise TheoremViolation("central shift is not a classical CA")
    if not np.array_equal(catalog.tables[:, shift], shift[catalog.tables]):
        raise TheoremViolation(f"shift by {z} does not commute with every member")
    i = catalog.index_of(shift)
    if i < 0:
        raise TheoremViolation(f"shift by {z} missing from {catalog.label}")
    return i


def is_inner(alpha: MonoidAutomorphism) -> int | None:
    """Least unit ``sigma`` (catalog index) with ``alpha(tau) = sigma^-1 tau sigma`` for all tau.

    None after an exhaustive search means ``alpha`` is not inner.
    """
    catalog = alpha.catalog
    target = catalog.tables[alpha.perm]
    probes = np.unique(np.linspace(0, catalog.size - 1, min(_PROBES, catalog.size)).astype(np.int64))
    for sigma in catalog.units:
        if not np.array_equal(_conjugates(catalog, sigma, probes), target[probes]):
            continue
        if np.array_equal(_conjugates(catalog, sigma), target):
            return int(sigma)
    return None


def theorem_inner_check(G, q: int = 2, catalog: MonoidCatalog | None = None) -> Certificate:
    """Every inner phi_CA has phi fixing Z(G); list the refusals that prove the rest."""
    catalog = catalog if catalog is not None else enumerate_ca(G, q)
    cert = Certificate("inner", {"group": G.label, "alphabet": q})
    Z = center(G)
    rows = []
    for phi in enumerate_aut(G):
        witness = is_inner(phi_ca_automorphism(catalog, phi))
        moved = [z for z in Z if phi.map[z] != z]
        if witness is not None and moved:
            cert.violation("inner phi_CA moves the center", hom=list(phi.map), sigma=witness, moved=moved)
        rows.append({"hom": list(phi.map), "inner": witness is not None, "witness": witness, "moves_center": moved})
    cert.counts = {"aut": len(rows), "units_searched": len(catalog.units), "center": list(Z)}
    cert.witnesses = {
        "instances": rows,
        "refusals": [r["hom"] for r in rows if not r["inner"]],
    }
    cert.clauses = {"theorem": not cert.violations}
    return cert


def _inner_count(catalog: MonoidCatalog, budget: int = 2 * 10**6):
    """Count distinct conjugation automorphisms and compare with unit-group quotients.

    Conjugation by a unit is trivial exactly when the unit commutes with every
    member, so the count must equal ``|U| / |U & Z(M)|``. ``|U| / |Z(U)|`` is
    reported alongside; the two differ whenever some unit commutes with all
    units but not with a non-invertible member.
    """
    units = catalog.units
    if catalog.size * len(units) > budget:
        return None
    perms = {conjugation_automorphism(catalog, s).perm.tobytes() for s in units}
    ut = catalog.tables[units]
    tabs = catalog.tables

    def commutes(s, rows):
        return np.array_equal(rows[:, tabs[s]], tabs[s][rows])

    unit_center = sum(1 for s in units if commutes(s, ut))
    monoid_center = sum(1 for s in units if commutes(s, tabs))
    return {
        "inner_automorphisms": len(perms),
        "units": len(units),
        "units_central_in_monoid": monoid_center,
        "center_of_units": unit_center,
        "units_over_monoid_center": len(units) // monoid_center,
        "units_over_center_of_units": len(units) // unit_center,
    }


def outer_embedding_check(G, q: int = 2, catalog: MonoidCatalog | None = None) -> Certificate:
    """For abelian G, distinct automorphisms land in distinct Inn-cosets."""
    if not G.is_abelian():
        raise StructureError(f"{G.label} is not abelian")
    catalog = catalog if catalog is not None else enumerate_ca(G, q)
    cert = Certificate("outer-embed", {"group": G.label, "alphabet": q})
    auts = enumerate_aut(G)
    Phi = {phi: phi_ca_automorphism(catalog, phi) for phi in auts}
    refusals = []
    root = list(range(len(auts)))

    def find(a):
        while root[a] != a:
            a = root[a]
        return a

    for a, phi in enumerate(auts):
        for b, psi in enumerate(auts):
            if a == b:
                continue
            beta = Phi[psi].inverse().after(Phi[phi])
            witness = is_inner(beta)
            if witness is not None:
                cert.violation("same Inn-coset", phi=list(phi.map), psi=list(psi.map), sigma=witness)
                root[find(a)] = find(b)
            else:
                refusals.append([a, b])
    classes = len({find(a) for a in range(len(auts))})
    cert.counts = {"aut": len(auts), "out_classes": classes, "pairs_refused": len(refusals)}
    explore = _inner_count(catalog)
    if explore is not None:
        if explore["inner_automorphisms"] != explore["units_over_monoid_center"]:
            cert.violation("Inn count differs from |U|/|U & Z(M)|", **explore)
        cert.counts["exploratory"] = explore
    cert.witnesses = {"homs": [list(p.map) for p in auts], "refused_pairs": refusals}
    cert.clauses = {"injective": not cert.violations and classes == len(auts)}
    return cert
