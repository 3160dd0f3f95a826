"""The ten acceptance criteria, each timed against its limit and checked against an oracle where one exists."""

import itertools
import time

import pytest

import oracle
from acceptance_log import record
from gcalab import (
    Gca,
    build_cyclic,
    compose,
    eca_mirror,
    embed_end_op,
    enumerate_end,
    enumerate_homs,
    le_phi_scan,
    outer_embedding_check,
    parse_group,
    theorem_inner_check,
    to_table,
    verify_mirror,
    verify_phi_ca_hom,
    verify_semidirect,
)
from gcalab.verify import verify_composition, verify_curtis_hedlund, verify_fix, verify_invertibility

pytestmark = pytest.mark.acceptance

Z2, Z3, Z6 = build_cyclic(2), build_cyclic(3), build_cyclic(6)


def timed(fn, *a, **k):
    t = time.perf_counter()
    out = fn(*a, **k)
    return out, time.perf_counter() - t


def oracle_equivariant(mul, phi, outputs):
    """h . f(x) == f(phi(h) . x) for all h, x, on symbol tuples."""
    cs = oracle.configs(len(mul))
    for h in range(len(mul)):
        for i, x in enumerate(cs):
            lhs = oracle.shift(mul, h, cs[outputs[i]])
            rhs = cs[outputs[cs.index(oracle.shift(mul, phi[h], x))]]
            if lhs != rhs:
                return False
    return True


def test_criterion_01_curtis_hedlund():
    cert, dt = timed(verify_curtis_hedlund, Z2)
    mul = Z2.mul.tolist()
    tables = list(itertools.product(range(4), repeat=4))
    expected = {tuple(h.map): sum(oracle_equivariant(mul, h.map, t) for t in tables) for h in enumerate_homs(Z2, Z2)}
    per = {tuple(p["hom"]): p for p in cert.counts["per_hom"]}
    ok = (
        cert.ok
        and cert.counts["tables"] == 256
        and len(per) == 2
        and all(per[h]["equivariant"] == per[h]["recognized"] == n for h, n in expected.items())
    )
    record(1, "curtis-hedlund Z2", ok, dt, 1.0, f"recognized={[p['recognized'] for p in per.values()]}")
    assert ok and dt < 1.0


def test_criterion_02_composition():
    cert, dt = timed(verify_composition, Z3, 2, samples=50, seed=0)
    # independent spot check of the full S = T = {0,1} case through the cell-wise oracle
    mul = Z3.mul.tolist()
    spot_ok = True
    for phi, psi in itertools.product(enumerate_end(Z3), repeat=2):
        for r1, r2 in [((0, 1, 1, 0), (0, 0, 0, 1)), ((1, 0, 1, 1), (0, 1, 1, 1))]:
            tau, sigma = Gca(phi, (0, 1), r1), Gca(psi, (0, 1), r2)
            t = oracle.table(mul, 3, phi.map, (0, 1), r1)
            s = oracle.table(mul, 3, psi.map, (0, 1), r2)
            out = compose(sigma, tau, check=False)
            spot_ok &= to_table(out).outputs.tolist() == [s[t[i]] for i in range(8)]
            spot_ok &= set(out.memory) == {(phi.map[a] + b) % 3 for a in (0, 1) for b in (0, 1)}
    ok = (
        cert.ok
        and spot_ok
        and cert.counts["hom_pairs"] == 9
        and cert.counts["sampled"] == 450
        and cert.counts["exhaustive"] == 9 * 16 * 16
    )
    record(2, "composition Z3", ok, dt, 30.0, f"checked={cert.counts['sampled'] + cert.counts['exhaustive']}")
    assert ok and dt < 30.0


def test_criterion_03_invertibility():
    t = time.perf_counter()
    certs = [verify_invertibility(G, 2) for G in (Z2, Z3)]
    dt = time.perf_counter() - t
    ok = all(c.ok for c in certs)
    ok &= [c.counts["inverted"] for c in certs] == [4, 72]
    ok &= all(c.counts["inverted"] + c.counts["refused"] == c.counts["members"] for c in certs)
    ok &= all("collision" in c.witnesses or "non_image" in c.witnesses for c in certs)
    record(3, "invertibility Z2,Z3", ok, dt, 30.0, f"inverted={[c.counts['inverted'] for c in certs]}")
    assert ok and dt < 30.0


def test_criterion_04_fix():
    cert, dt = timed(verify_fix, Z6, Z3, 2, samples=100, seed=0)
    red = [k % 3 for k in range(6)]
    pulled = {tuple(z[red[h]] for h in range(6)) for z in oracle.configs(3)}
    periodic = {x for x in oracle.configs(6) if all(x[h] == x[(h + 3) % 6] for h in range(6))}
    pre = cert.witnesses["preimages"]
    witnesses_ok = all(tuple(w["x"]) == tuple(w["z"][red[h]] for h in range(6)) for w in pre)
    ok = (
        cert.ok
        and pulled == periodic
        and len(periodic) == 8
        and cert.counts["image"] == cert.counts["fixed"] == 8
        and len(pre) == 8
        and witnesses_ok
        and cert.counts["sampled"] == 100
    )
    record(4, "fix Z6->Z3", ok, dt, 5.0, "image=fix=8")
    assert ok and dt < 5.0


def test_criterion_05_le_phi():
    t = time.perf_counter()
    certs = [le_phi_scan(Z3, Z6, 2), le_phi_scan(Z3, Z2, 2)]
    dt = time.perf_counter() - t
    ok = all(c.ok and not c.violations and c.witnesses["converse_failure"] is not None for c in certs)
    record(5, "le-phi Z6->Z3, Z2->Z3", ok, dt, 30.0)
    assert ok and dt < 30.0


def test_criterion_06_semidirect():
    t = time.perf_counter()
    certs = {G.label: verify_semidirect(G, 2) for G in (Z2, Z3)}
    dt = time.perf_counter() - t
    # brute force: every map A^Z2 -> A^Z2, keep the shift-commuting bijections
    mul = Z2.mul.tolist()
    ica_oracle = sum(
        1 for f in itertools.product(range(4), repeat=4) if len(set(f)) == 4 and oracle_equivariant(mul, (0, 1), f)
    )
    ok = all(c.ok and all(c.clauses.values()) for c in certs.values())
    ok &= all(c.counts["IGCA"] == c.counts["ICA"] * c.counts["Aut"] for c in certs.values())
    ok &= certs["Z2"].counts["ICA"] == 4 == ica_oracle
    record(6, "semidirect Z2,Z3", ok, dt, 60.0, f"|ICA(Z2;2)|={certs['Z2'].counts['ICA']} oracle={ica_oracle}")
    assert ok and dt < 60.0


def test_criterion_07_end_embedding():
    groups = [Z2, Z3, parse_group("Z2xZ2")]
    t = time.perf_counter()
    certs = [embed_end_op(G, 2) for G in groups]
    dt = time.perf_counter() - t
    sizes = [c.counts["endomorphisms"] for c in certs]
    ok = all(c.ok for c in certs) and sizes == [2, 3, 16]
    ok &= all(c.counts["pairs_checked"] == n * n and c.counts["distinct_tables"] == n for c, n in zip(certs, sizes))
    record(7, "End embedding Z2,Z3,Z2xZ2", ok, dt, 10.0, f"|End|={sizes}")
    assert ok and dt < 10.0


def test_criterion_08_phi_ca_hom():
    cert, dt = timed(verify_phi_ca_hom, Z3, 2)
    ok = cert.ok and cert.counts["members"] == 256 and cert.counts["pairs"] == 4
    record(8, "phi_CA homomorphism Z3", ok, dt, 10.0)
    assert ok and dt < 10.0


def test_criterion_09_inner():
    t = time.perf_counter()
    inner = theorem_inner_check(Z3, 2)
    outer = outer_embedding_check(Z3, 2)
    dt = time.perf_counter() - t
    ok = (
        inner.ok
        and inner.witnesses["refusals"] == [[0, 2, 1]]
        and inner.counts["units_searched"] == 36
        and outer.ok
        and outer.counts["out_classes"] == 2
    )
    record(9, "inner/outer Z3", ok, dt, 60.0, f"out_classes={outer.counts['out_classes']}")
    assert ok and dt < 60.0


def test_criterion_10_mirror():
    cert, dt = timed(verify_mirror, 8, 8, 5)

    def reverse_neighbourhoods(number):
        bits = {(l, c, r): (number >> (4 * l + 2 * c + r)) & 1 for l, c, r in itertools.product((0, 1), repeat=3)}
        return sum(bits[(r, c, l)] << (4 * l + 2 * c + r) for l, c, r in bits)

    ok = cert.ok and eca_mirror(110).number == 124 == reverse_neighbourhoods(110)
    ok &= all(eca_mirror(eca_mirror(r)).number == r for r in range(256))
    ok &= cert.counts["raster_checks"] == 256 * 2**8
    record(10, "mirrored rule", ok, dt, 60.0, "mirror(110)=124")
    assert ok and dt < 60.0
