import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from gcalab import (
    Config,
    FunctionTable,
    Gca,
    GroupHom,
    NotBijective,
    NotEquivariant,
    StructureError,
    all_function_tables,
    apply,
    bijection_witness,
    build_cyclic,
    build_direct_product,
    compose,
    compose_hom,
    enumerate_homs,
    fix_preimages,
    identity_ca,
    identity_hom,
    image_subset_fix,
    invert,
    is_bijective,
    is_phi_equivariant,
    kernel,
    lemma_constant_criterion,
    minimize_memory,
    parse_group,
    phi_star,
    phi_star_image_equals_fix,
    recognize,
    refusal_report,
    space_for,
    to_table,
)

Z2, Z3, Z6 = build_cyclic(2), build_cyclic(3), build_cyclic(6)
RED = GroupHom(Z6, Z3, tuple(k % 3 for k in range(6)))
INV3 = GroupHom(Z3, Z3, (0, 2, 1))
MAJORITY = tuple(int(bin(k).count("1") >= 2) for k in range(8))


def table_of(f_map, G, H, q=2):
    """FunctionTable from a dict on symbol tuples, identity elsewhere."""
    sG, sH = space_for(G, q), space_for(H, q)
    out = [sH.index(f_map.get(tuple(r), tuple(r))) for r in sG.configs.tolist()]
    return FunctionTable(G, H, q, np.array(out))


@st.composite
def gcas(draw, pairs=(("Z3", "Z3"), ("Z6", "Z3"), ("Z2", "Z3"), ("Z4", "Z2"), ("S3", "Z2"), ("Z2xZ2", "Z2xZ2"))):
    src, dst = draw(st.sampled_from(pairs))
    H, G = parse_group(src), parse_group(dst)
    phi = draw(st.sampled_from(enumerate_homs(H, G)))
    mem = draw(st.lists(st.integers(0, G.order - 1), min_size=0, max_size=G.order, unique=True))
    mem = tuple(sorted(mem))
    rule = tuple(draw(st.lists(st.integers(0, 1), min_size=2 ** len(mem), max_size=2 ** len(mem))))
    return Gca(phi, mem, rule, 2)


# --- evaluation -----------------------------------------------------------------


def test_majority_example():
    tau = Gca(identity_hom(Z3), (0, 1, 2), MAJORITY)
    assert apply(tau, Config(Z3, (1, 1, 0))).symbols == (1, 1, 1)


def test_identity_ca_is_identity():
    x = Config(Z3, (0, 1, 1))
    assert apply(identity_ca(Z3), x) == x
    assert to_table(identity_ca(Z3)) == FunctionTable.identity(Z3)


@pytest.mark.parametrize("c", [0, 1])
def test_constant_rule_is_constant_for_every_hom(c):
    for phi in enumerate_homs(Z6, Z3):
        tau = Gca(phi, (), (c,))
        f = to_table(tau)
        assert np.all(f.images() == c)


def test_pullback_along_reduction():
    assert apply(phi_star(RED), Config(Z3, (1, 0, 0))).symbols == (1, 0, 0, 1, 0, 0)


def test_pullback_along_sum_map():
    Z33 = build_direct_product(Z3, Z3)
    add = GroupHom(Z33, Z3, tuple((a + b) % 3 for a in range(3) for b in range(3)))
    for sym in oracle.configs(3):
        y = apply(phi_star(add), Config(Z3, sym))
        assert all(y[3 * a + b] == sym[(a + b) % 3] for a in range(3) for b in range(3))


@settings(max_examples=80, deadline=None)
@given(gcas())
def test_table_matches_cellwise_oracle(tau):
    expected = oracle.table(tau.G.mul.tolist(), tau.H.order, tau.phi.map, tau.memory, tau.rule)
    assert to_table(tau).outputs.tolist() == expected


def test_padding_does_not_change_table():
    a = Gca(identity_hom(Z3), (1,), (0, 1))
    b = Gca(identity_hom(Z3), (1, 2), (0, 0, 1, 1))
    assert to_table(a) == to_table(b)


def test_apply_rejects_wrong_group():
    with pytest.raises(StructureError):
        apply(identity_ca(Z3), Config(Z2, (0, 1)))


def test_gca_validation():
    with pytest.raises(StructureError):
        Gca(identity_hom(Z3), (0, 1), (0, 1))
    with pytest.raises(StructureError):
        Gca(identity_hom(Z3), (1, 0), (0, 1, 0, 1))
    with pytest.raises(StructureError):
        Gca(identity_hom(Z3), (3,), (0, 1))


def test_json_round_trip():
    tau = Gca(RED, (0, 2), (0, 1, 1, 0))
    back = Gca.from_json(tau.to_json(), Z6, Z3)
    assert to_table(back) == to_table(tau)
    f = to_table(tau)
    assert FunctionTable.from_json(f.to_json(), Z3, Z6) == f


# --- equivariance and recognition ----------------------------------------------------


@settings(max_examples=80, deadline=None)
@given(gcas())
def test_every_phi_ca_is_phi_equivariant(tau):
    assert is_phi_equivariant(to_table(tau), tau.phi)


def test_swapping_constants_is_a_ca():
    f = table_of({(0, 0): (1, 1), (1, 1): (0, 0)}, Z2, Z2)
    assert is_phi_equivariant(f, identity_hom(Z2))


def test_non_equivariant_counterexample():
    f = table_of({(0, 1): (0, 0)}, Z2, Z2)
    res = is_phi_equivariant(f, identity_hom(Z2))
    assert not res
    assert res.counterexample == (1, space_for(Z2, 2).index((0, 1)))
    with pytest.raises(NotEquivariant) as exc:
        recognize(f, identity_hom(Z2))
    assert exc.value.counterexample == (1, 1)
    assert refusal_report(exc.value).startswith("REFUSED not-equivariant")


def test_recognize_pullback_minimizes_to_identity_cell():
    tau = minimize_memory(recognize(to_table(phi_star(RED)), RED))
    assert tau.memory == (0,)
    assert to_table(tau) == to_table(phi_star(RED))


def test_recognize_identity():
    tau = recognize(FunctionTable.identity(Z3), identity_hom(Z3))
    assert to_table(tau) == FunctionTable.identity(Z3)


@pytest.mark.parametrize("phi", enumerate_homs(Z2, Z2), ids=str)
def test_curtis_hedlund_all_tables_z2(phi):
    tables = all_function_tables(Z2, Z2)
    assert tables.shape == (256, 4)
    recognized = 0
    for row in tables:
        f = FunctionTable(Z2, Z2, 2, row)
        eq = bool(is_phi_equivariant(f, phi))
        try:
            tau = recognize(f, phi)
        except NotEquivariant:
            assert not eq
            continue
        assert eq
        recognized += 1
        assert to_table(tau) == f
    assert recognized == 16


def test_recognize_wrong_groups():
    with pytest.raises(StructureError):
        recognize(FunctionTable.identity(Z3), RED)


# --- memory sets --------------------------------------------------------------------


def test_minimize_examples():
    reads_one = Gca(identity_hom(Z3), (0, 1, 2), tuple((k >> 1) & 1 for k in range(8)))
    assert minimize_memory(reads_one).memory == (1,)
    const = Gca(identity_hom(Z3), (0, 1, 2), (1,) * 8)
    m = minimize_memory(const)
    assert m.memory == () and m.rule == (1,)
    padded = Gca(identity_hom(Z3), (1, 2), (0, 0, 1, 1))
    assert minimize_memory(padded).memory == (1,)


@settings(max_examples=60, deadline=None)
@given(gcas())
def test_minimize_is_idempotent_and_preserves_table(tau):
    m = minimize_memory(tau)
    assert to_table(m) == to_table(tau)
    assert minimize_memory(m).memory == m.memory
    assert set(m.memory) <= set(tau.memory)
    assert lemma_constant_criterion(tau, tau.memory)


# --- composition ---------------------------------------------------------------------


def test_compose_with_identity():
    tau = Gca(RED, (0, 1), (0, 1, 1, 1))
    assert to_table(compose(identity_ca(Z6), tau)) == to_table(tau)


def test_pullbacks_compose_contravariantly():
    Z12 = build_cyclic(12)
    psi = GroupHom(Z12, Z6, tuple(k % 6 for k in range(12)))
    lhs = to_table(compose(phi_star(psi), phi_star(RED)))
    assert lhs == to_table(phi_star(compose_hom(RED, psi)))


def test_compose_memory_z3():
    ident = identity_hom(Z3)
    sigma = Gca(ident, (0, 1), (0, 1, 1, 0))
    tau = Gca(ident, (0, 1), (0, 0, 0, 1))
    out = compose(sigma, tau)
    assert out.memory == (0, 1, 2)
    assert to_table(out) == to_table(sigma).after(to_table(tau))


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_composition_theorem_random(data):
    src, mid, dst = data.draw(st.sampled_from([("Z3", "Z3", "Z3"), ("Z6", "Z6", "Z3"), ("Z2", "Z6", "Z3"), ("Z2xZ2", "Z4", "Z2")]))
    K, H, G = parse_group(src), parse_group(mid), parse_group(dst)
    tau = data.draw(gcas(pairs=((mid, dst),)))
    sigma = data.draw(gcas(pairs=((src, mid),)))
    out = compose(sigma, tau, check=False)
    assert to_table(out) == to_table(sigma).after(to_table(tau))
    expected = {int(G.mul[tau.phi.map[s], t]) for s in sigma.memory for t in tau.memory}
    assert set(out.memory) == expected
    assert out.phi == compose_hom(tau.phi, sigma.phi)
    assert out.H.same_as(K)


def test_compose_rejects_mismatch():
    with pytest.raises(StructureError):
        compose(identity_ca(Z3), identity_ca(Z2))


# --- invertibility ----------------------------------------------------------------------


def test_invert_identity():
    inv = invert(identity_ca(Z3))
    assert to_table(inv) == FunctionTable.identity(Z3)


def test_invert_inversion_pullback():
    tau = phi_star(INV3)
    assert is_bijective(tau)
    inv = invert(tau)
    assert inv.phi == INV3
    assert to_table(inv) == to_table(phi_star(INV3))


def test_pullback_along_reduction_not_bijective():
    tau = phi_star(RED)
    assert not is_bijective(tau)
    assert len(set(to_table(tau).outputs.tolist())) == 8
    with pytest.raises(NotBijective) as exc:
        invert(tau)
    assert exc.value.non_image is not None
    assert exc.value.non_image not in set(to_table(tau).outputs.tolist())


def test_collision_witness():
    tau = Gca(identity_hom(Z3), (), (0,))
    w = bijection_witness(to_table(tau))
    assert w.collision == (0, 1)
    assert "not-injective" in refusal_report(w)


@settings(max_examples=80, deadline=None)
@given(gcas(pairs=(("Z3", "Z3"), ("Z2xZ2", "Z2xZ2"), ("Z4", "Z4"))))
def test_inverse_is_over_inverse_hom(tau):
    f = to_table(tau)
    if not is_bijective(f):
        w = bijection_witness(f)
        if w.collision is not None:
            a, b = w.collision
            assert a != b and f.outputs[a] == f.outputs[b]
        return
    inv = invert(tau)
    assert inv.phi == tau.phi.inverse()
    assert to_table(inv).after(f) == FunctionTable.identity(tau.G)


# --- periodicity -----------------------------------------------------------------


def test_fix_both_sides():
    assert phi_star_image_equals_fix(RED)
    pairs = fix_preimages(RED)
    assert len(pairs) == 8
    star = to_table(phi_star(RED))
    assert all(star.outputs[z] == x for x, z in pairs)


def test_injective_hom_fixes_everything():
    phi = GroupHom(Z3, Z6, (0, 2, 4))
    assert kernel(phi) == (0,)
    assert phi_star_image_equals_fix(phi)


def test_trivial_hom_gives_constants():
    triv = GroupHom(Z2, Z3, (0, 0))
    img = sorted(set(to_table(phi_star(triv)).outputs.tolist()))
    assert img == space_for(Z2, 2).constant_indices().tolist()
    assert phi_star_image_equals_fix(triv)


@settings(max_examples=80, deadline=None)
@given(gcas())
def test_image_is_kernel_periodic(tau):
    assert image_subset_fix(tau)
