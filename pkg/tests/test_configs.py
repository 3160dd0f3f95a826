import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from gcalab import (
    Alphabet,
    BudgetExceeded,
    Config,
    ConfigSpace,
    Pattern,
    StructureError,
    build_cyclic,
    configs_to_csv,
    enumerate_configs,
    fix_subgroup,
    in_neighborhood,
    indicator_config,
    kernel,
    parse_group,
    restrict,
    shift,
    space_for,
)
from gcalab.groups import enumerate_homs, is_subgroup

Z2, Z3, Z4, Z6 = (build_cyclic(n) for n in (2, 3, 4, 6))


def test_shift_identity_and_rotation():
    x = Config(Z3, (1, 0, 0))
    assert shift(0, x) == x
    a = Config(Z3, (5, 6, 7), q=8)
    assert shift(1, a).symbols == (7, 5, 6)


@pytest.mark.parametrize("spec", ["Z4", "Z2xZ2", "S3", "Z6", "D3"])
def test_action_axioms_exhaustive(spec):
    G = parse_group(spec)
    for sym in itertools.product((0, 1), repeat=G.order):
        x = Config(G, sym)
        assert shift(0, x) == x
        for g in range(G.order):
            gx = shift(g, x)
            assert gx.symbols == oracle.shift(G.mul.tolist(), g, sym)
            for h in range(G.order):
                assert shift(g, shift(h, x)) == shift(int(G.mul[g, h]), x)


@pytest.mark.parametrize("spec", ["Z2", "Z3", "Z2xZ2", "S3"])
def test_action_is_faithful(spec):
    G = parse_group(spec)
    for g, h in itertools.combinations(range(G.order), 2):
        chi = indicator_config(G, 2, 0)
        assert shift(g, chi) != shift(h, chi)


def test_shift_perms_match_shift():
    G = parse_group("S3")
    sp = space_for(G, 2)
    for g in range(G.order):
        for i in range(sp.size):
            assert sp.shift_perms[g][i] == sp.index(shift(g, sp.config(i)))


def test_restrict_examples():
    x = Config(Z3, (1, 0, 1))
    assert restrict(x, [0, 2]) == Pattern((0, 2), (1, 1))
    assert restrict(x, []) == Pattern((), ())
    assert restrict(x, range(3)).symbols == x.symbols
    with pytest.raises(StructureError):
        restrict(x, [3])


def test_pattern_support_must_be_sorted():
    with pytest.raises(StructureError):
        Pattern((2, 0), (1, 1))


def test_neighbourhood_examples():
    x, y = Config(Z2, (0, 1)), Config(Z2, (0, 0))
    assert in_neighborhood(y, x, [0])
    assert not in_neighborhood(y, x, [0, 1])
    assert in_neighborhood(y, x, [])
    assert in_neighborhood(x, x, [0, 1])
    with pytest.raises(StructureError):
        in_neighborhood(Config(Z3, (0, 0, 0)), x, [0])
    with pytest.raises(StructureError):
        in_neighborhood(Config(Z2, (0, 0), q=3), x, [0])


def test_fix_examples():
    assert len(fix_subgroup(Z6, 2, [0])) == 64
    consts = fix_subgroup(Z6, 2, range(6))
    assert [c.symbols for c in consts] == [(0,) * 6, (1,) * 6]
    fixed = fix_subgroup(Z6, 2, [0, 3])
    assert len(fixed) == 8
    assert all(c[h] == c[(h + 3) % 6] for c in fixed for h in range(6))
    with pytest.raises(StructureError):
        fix_subgroup(Z6, 2, [0, 2])


@pytest.mark.parametrize("spec", ["Z4", "Z6", "Z2xZ2", "S3", "D4"])
@pytest.mark.parametrize("q", [2, 3])
def test_fix_counts_cosets(spec, q):
    G = parse_group(spec)
    if q**G.order > 10**4:
        pytest.skip("space too large for the slow path")
    subgroups = {tuple(sorted(set(k))) for k in itertools.chain.from_iterable(
        itertools.combinations(range(G.order), r) for r in range(1, G.order + 1)) if is_subgroup(G, k)}
    for K in subgroups:
        assert len(fix_subgroup(G, q, K)) == q ** (G.order // len(K))


def test_indicator_examples():
    assert indicator_config(Z2, 2, 0).symbols == (1, 0)
    for a in range(3):
        for g in range(3):
            assert shift(a, indicator_config(Z3, 2, g)) == indicator_config(Z3, 2, (a + g) % 3)
            assert sum(indicator_config(Z3, 2, g).symbols) == 1


def test_enumeration_order():
    assert len(list(enumerate_configs(Z2, 2))) == 4
    cs = list(enumerate_configs(Z3, Alphabet(2)))
    assert len(cs) == 8
    assert cs[0].symbols == (0, 0, 0)
    assert [c.symbols for c in cs] == oracle.configs(3)


def test_alphabet_and_config_validation():
    with pytest.raises(StructureError):
        Alphabet(1)
    with pytest.raises(StructureError):
        Config(Z2, (0, 2))
    with pytest.raises(StructureError):
        Config(Z2, (0,))


def test_budget():
    with pytest.raises(BudgetExceeded):
        ConfigSpace(build_cyclic(25), 2)


def test_csv_header():
    text = configs_to_csv(fix_subgroup(Z3, 2, range(3)))
    assert text == "g0,g1,g2\n0,0,0\n1,1,1\n"


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 7), st.integers(2, 3), st.data())
def test_index_round_trip(n, q, data):
    G = build_cyclic(n)
    sp = space_for(G, q)
    sym = data.draw(st.lists(st.integers(0, q - 1), min_size=n, max_size=n))
    i = sp.index(sym)
    assert sp.config(i).symbols == tuple(sym)
    assert np.array_equal(sp.configs[i], sym)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["Z4", "Z6", "S3", "Z2xZ3"]), st.data())
def test_shift_is_a_bijection_preserving_symbol_counts(spec, data):
    G = parse_group(spec)
    g = data.draw(st.integers(0, G.order - 1))
    sym = tuple(data.draw(st.lists(st.integers(0, 2), min_size=G.order, max_size=G.order)))
    x = Config(G, sym, q=3)
    y = shift(g, x)
    assert sorted(y.symbols) == sorted(sym)
    assert shift(int(G.inv[g]), y) == x


def test_fix_of_kernel_is_image_of_pullback_for_every_hom():
    for phi in enumerate_homs(Z6, Z3):
        imgs = {tuple(z[phi.map[h]] for h in range(6)) for z in oracle.configs(3)}
        fixed = {c.symbols for c in fix_subgroup(Z6, 2, kernel(phi))}
        assert imgs == fixed
