"""Theorem checks that need sampling or a specific instance shape, plus the name registry.

Each check returns a :class:`Certificate`; sampled checks take a seed and
record it so runs are reproducible.
"""

from __future__ import annotations

import numpy as np

from .automorphisms import outer_embedding_check, theorem_inner_check, verify_phi_ca_hom
from .configs import space_for
from .errors import NotBijective, NotEquivariant, StructureError
from .gca import (
    FunctionTable,
    Gca,
    all_function_tables,
    bijection_witness,
    compose,
    equivariant_mask,
    fix_preimages,
    image_subset_fix,
    invert,
    is_phi_equivariant,
    phi_star,
    recognize,
    to_table,
)
from .groups import FiniteGroup, enumerate_end, enumerate_homs, kernel
from .monoid import RULE_BUDGET, embed_end_op, enumerate_ca, enumerate_gca, le_phi_scan, verify_semidirect
from .report import Certificate

__all__ = [
    "verify_curtis_hedlund",
    "verify_composition",
    "verify_invertibility",
    "verify_fix",
    "THEOREMS",
    "run_theorem",
]


def verify_curtis_hedlund(G: FiniteGroup, H: FiniteGroup | None = None, q: int = 2,
                          budget: int = 10**6) -> Certificate:
    """Classify every map ``A^G -> A^H`` against every hom ``H -> G``.

    A table is recognized as a phi-CA exactly when it is phi-equivariant, and
    the recognized presentation reproduces the table.
    """
    H = G if H is None else H
    cert = Certificate("curtis-hedlund", {"group": G.label, "target": H.label, "alphabet": q})
    tables = all_function_tables(G, H, q, budget)
    sG, sH = space_for(G, q), space_for(H, q)
    per_hom = []
    for phi in enumerate_homs(H, G):
        mask = equivariant_mask(tables, phi, q)
        recognized = 0
        refusals = []
        for i, row in enumerate(tables):
            f = FunctionTable(G, H, q, row)
            try:
                tau = recognize(f, phi)
            except NotEquivariant as exc:
                h, x = exc.counterexample
                genuine = sH.shift_perms[h][row[x]] != row[sG.shift_perms[phi.map[h]][x]]
                if mask[i] or not genuine:
                    cert.violation("refused an equivariant table", hom=list(phi.map), table=i)
                if len(refusals) < 3:
                    refusals.append({"table": i, "h": h, "x": x})
                continue
            recognized += 1
            if not mask[i]:
                cert.violation("recognized a non-equivariant table", hom=list(phi.map), table=i)
            if to_table(tau) != f:
                cert.violation("round trip", hom=list(phi.map), table=i)
        per_hom.append({
            "hom": list(phi.map),
            "equivariant": int(mask.sum()),
            "recognized": recognized,
            "refusal_examples": refusals,
        })
    cert.counts = {"tables": int(tables.shape[0]), "homs": len(per_hom), "per_hom": per_hom}
    cert.clauses = {
        "recognized_iff_equivariant": all(p["equivariant"] == p["recognized"] for p in per_hom),
        "round_trip": not any(v["what"] == "round trip" for v in cert.violations),
    }
    return cert


def _random_gca(rng, phi, q: int) -> Gca:
    G = phi.codomain
    k = int(rng.integers(1, G.order + 1))
    memory = tuple(sorted(rng.choice(G.order, size=k, replace=False).tolist()))
    rule = tuple(rng.integers(0, q, size=q**k).tolist())
    return Gca(phi, memory, rule, q)


def _check_composition(cert, sigma: Gca, tau: Gca, label):
    out = compose(sigma, tau, check=False)
    G, phi = tau.G, tau.phi
    expected = sorted({int(G.mul[phi.map[s], t]) for s in sigma.memory for t in tau.memory})
    if list(out.memory) != expected:
        cert.violation("memory set", pair=label, got=list(out.memory), expected=expected)
    if list(out.phi.map) != [phi.map[sigma.phi.map[k]] for k in range(sigma.H.order)]:
        cert.violation("hom", pair=label)
    if to_table(out) != to_table(sigma).after(to_table(tau)):
        cert.violation("table", pair=label)


def verify_composition(G: FiniteGroup, q: int = 2, samples: int = 50, seed: int = 0,
                       exhaustive_memory=(0, 1)) -> Certificate:
    """``sigma o tau`` is a (phi o psi)-CA with memory ``phi(S)T`` on ``G = H = K``.

    For every pair in End(G)^2: ``samples`` random presentations, then every
    rule pair with both memory sets equal to ``exhaustive_memory``.
    """
    cert = Certificate("composition", {"group": G.label, "alphabet": q, "samples": samples}, seed=seed)
    rng = np.random.default_rng(seed)
    ends = enumerate_end(G)
    S = tuple(exhaustive_memory)
    if any(not 0 <= s < G.order for s in S):
        raise StructureError(f"memory set {S} not inside {G.label}")
    n_rules = q ** (q ** len(S))
    rules = [tuple((r // q**k) % q for k in range(q ** len(S))) for r in range(n_rules)]
    sampled = exhaustive = 0
    for a, phi in enumerate(ends):
        for b, psi in enumerate(ends):
            for k in range(samples):
                tau, sigma = _random_gca(rng, phi, q), _random_gca(rng, psi, q)
                _check_composition(cert, sigma, tau, (a, b, "sample", k))
                sampled += 1
            taus = [Gca(phi, S, r, q) for r in rules]
            sigmas = [Gca(psi, S, r, q) for r in rules]
            for i, sigma in enumerate(sigmas):
                for j, tau in enumerate(taus):
                    _check_composition(cert, sigma, tau, (a, b, i, j))
                    exhaustive += 1
    cert.counts = {"hom_pairs": len(ends) ** 2, "sampled": sampled, "exhaustive": exhaustive}
    cert.clauses = {
        "tables_agree": not any(v["what"] == "table" for v in cert.violations),
        "memory_is_phi_S_T": not any(v["what"] == "memory set" for v in cert.violations),
    }
    return cert


def verify_invertibility(G: FiniteGroup, q: int = 2, catalog=None) -> Certificate:
    """Every GCA member inverts iff bijective; failures carry a checked witness."""
    catalog = catalog if catalog is not None else enumerate_gca(G, q)
    cert = Certificate("invertibility", {"group": G.label, "alphabet": q})
    inverted = refused = 0
    examples = {}
    for i in range(catalog.size):
        tau = catalog.gca(i)
        f = catalog.table(i)
        failure = bijection_witness(f)
        if failure is None:
            inv = invert(tau)
            inverted += 1
            if inv.phi != tau.phi.inverse():
                cert.violation("inverse hom", member=i)
            if not np.array_equal(to_table(inv).outputs[f.outputs], np.arange(f.outputs.shape[0])):
                cert.violation("round trip", member=i)
            examples.setdefault("inverse", {"member": i, "inverse": inv.to_json()})
            continue
        try:
            invert(tau)
        except NotBijective as exc:
            refused += 1
            if exc.collision is not None:
                x, y = exc.collision
                if x == y or f.outputs[x] != f.outputs[y]:
                    cert.violation("bad collision witness", member=i)
                examples.setdefault("collision", {"member": i, "configs": [x, y]})
            else:
                if exc.non_image in set(f.outputs.tolist()):
                    cert.violation("bad non-image witness", member=i)
                examples.setdefault("non_image", {"member": i, "config": exc.non_image})
        else:
            cert.violation("inverted a non-bijective member", member=i)
    cert.counts = {"members": catalog.size, "inverted": inverted, "refused": refused}
    cert.witnesses = examples
    cert.clauses = {"iff_bijective": inverted + refused == catalog.size and not cert.violations}
    return cert


def verify_fix(H: FiniteGroup, G: FiniteGroup, q: int = 2, samples: int = 100, seed: int = 0,
               phi=None) -> Certificate:
    """Im(phi*) = Fix(ker phi) with preimage witnesses; Im(tau) inside Fix(ker phi) for sampled tau.

    ``phi`` defaults to the first surjective hom ``H -> G`` (else the last one).
    """
    homs = enumerate_homs(H, G)
    if phi is None:
        phi = next((h for h in homs if h.is_surjective()), homs[-1])
    cert = Certificate("fix", {"from": H.label, "to": G.label, "alphabet": q, "hom": list(phi.map),
                               "samples": samples}, seed=seed)
    N = kernel(phi)
    sH = space_for(H, q)
    star = to_table(phi_star(phi, q))
    image = sorted(set(star.outputs.tolist()))
    fixed = sH.fixed_indices(N).tolist()
    witnesses = fix_preimages(phi, q)
    if image != fixed:
        cert.violation("Im(phi*) != Fix(N)", image=len(image), fixed=len(fixed))
    if sorted(x for x, _ in witnesses) != fixed:
        cert.violation("witness coverage")
    rng = np.random.default_rng(seed)
    bad = 0
    for k in range(samples):
        tau = _random_gca(rng, homs[int(rng.integers(len(homs)))], q)
        if not image_subset_fix(tau):
            bad += 1
            cert.violation("Im(tau) not in Fix(ker phi)", sample=k, tau=tau.to_json())
        if not is_phi_equivariant(to_table(tau), tau.phi):
            cert.violation("sampled automaton not equivariant", sample=k)
    cert.counts = {"kernel": list(N), "image": len(image), "fixed": len(fixed), "sampled": samples}
    cert.witnesses = {
        "preimages": [
            {"x": sH.configs[x].tolist(), "z": space_for(G, q).configs[z].tolist()} for x, z in witnesses
        ]
    }
    cert.clauses = {"image_equals_fix": image == fixed, "sampled_images_periodic": bad == 0}
    return cert


def _needs(kw, *names):
    missing = [n for n in names if kw.get(n) is None]
    if missing:
        raise StructureError("missing instance parameter(s): " + ", ".join(missing))


def run_theorem(name: str, *, group=None, source=None, target=None, q: int = 2, seed: int = 0,
                samples: int | None = None, rule_budget: int = RULE_BUDGET) -> Certificate:
    """Dispatch a theorem check by CLI name.

    ``group`` serves single-group checks; ``source``/``target`` are ``H`` and
    ``G`` for checks over a hom ``H -> G``. The seed is stamped on every
    certificate, sampled or not.
    """
    cert = _dispatch(name, group, source, target, q, seed, samples, rule_budget)
    cert.seed = seed
    return cert


def _dispatch(name, group, source, target, q, seed, samples, rule_budget):
    kw = {"group": group, "source": source, "target": target}
    if name not in THEOREMS:
        raise StructureError(f"unknown theorem {name!r}; choose from {', '.join(THEOREMS)}")
    if name == "le-phi":
        _needs(kw, "source", "target")
        return le_phi_scan(target, source, q, rule_budget=rule_budget)
    if name == "fix":
        _needs(kw, "source", "target")
        return verify_fix(source, target, q, samples=100 if samples is None else samples, seed=seed)
    _needs(kw, "group")
    if name == "composition":
        return verify_composition(group, q, samples=50 if samples is None else samples, seed=seed)
    if name == "curtis-hedlund":
        return verify_curtis_hedlund(group, target, q)
    if name == "embed":
        return embed_end_op(group, q)
    if name == "semidirect":
        return verify_semidirect(group, q, rule_budget=rule_budget)
    if name == "invertibility":
        return verify_invertibility(group, q, enumerate_gca(group, q, rule_budget=rule_budget))
    if name == "outer-embed" and not group.is_abelian():
        raise StructureError(f"outer-embed needs an abelian group, {group.label} is not")
    return THEOREMS[name](group, q, enumerate_ca(group, q, rule_budget=rule_budget))


THEOREMS = {
    "curtis-hedlund": verify_curtis_hedlund,
    "composition": verify_composition,
    "invertibility": verify_invertibility,
    "fix": verify_fix,
    "le-phi": le_phi_scan,
    "embed": embed_end_op,
    "semidirect": verify_semidirect,
    "phi-ca-hom": verify_phi_ca_hom,
    "inner": theorem_inner_check,
    "outer-embed": outer_embedding_check,
}
