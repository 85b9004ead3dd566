import itertools

import pytest

from defect_spectro.errors import MalformedPromotion
from defect_spectro.symmetry import (
    Irrep,
    OrbitalConfiguration,
    classify_transitions,
    dipole_allowed,
    irrep_product,
    parse_state_label,
    state_symmetry,
)
from oracles import klein_allowed, klein_product

NAMES = ["A1", "A2", "B1", "B2"]


@pytest.mark.parametrize("a, b", list(itertools.product(NAMES, repeat=2)))
def test_product_table_is_klein_group(a, b):
    assert irrep_product(Irrep[a], Irrep[b]).name == klein_product(a, b)


@pytest.mark.parametrize("a, b, c", list(itertools.product(NAMES, repeat=3)))
def test_product_is_associative(a, b, c):
    A, B, C = Irrep[a], Irrep[b], Irrep[c]
    assert irrep_product(irrep_product(A, B), C) == irrep_product(A, irrep_product(B, C))


@pytest.mark.parametrize("g, e", list(itertools.product(NAMES, repeat=2)))
def test_dipole_rules_against_oracle(g, e):
    assert set(dipole_allowed(Irrep[g], Irrep[e])) == klein_allowed(g, e)


def test_published_transition_families():
    assert dipole_allowed(Irrep.A1, Irrep.B2) == frozenset({"y"})
    assert dipole_allowed(Irrep.B2, Irrep.A2) == frozenset({"x"})
    assert dipole_allowed(Irrep.A1, Irrep.A2) == frozenset()


def test_closed_shell_is_totally_symmetric():
    cfg = OrbitalConfiguration.from_spatial([("a1", 2), ("b1", 2), ("b2", 2)])
    assert state_symmetry(cfg) == Irrep.A1
    assert cfg.multiplicity == 1


def test_open_shell_product():
    cfg = OrbitalConfiguration.from_spatial([("a1", 2), ("b1", 1), ("b2", 1)])
    assert state_symmetry(cfg) == Irrep.A2
    assert cfg.multiplicity == 3


def test_doubly_charged_ground_state_configuration():
    # [a1]2 [b2]2 [b1]2 [a1]1 [b2]2
    cfg = OrbitalConfiguration.from_spatial([("a1", 2), ("b2", 2), ("b1", 2), ("a1", 1), ("b2", 2)])
    assert state_symmetry(cfg) == Irrep.A1
    assert cfg.multiplicity == 2


def test_fixture_configurations(reference_dataset):
    found = {}
    for cset in reference_dataset.orbital_configs:
        ground = cset.states[0]
        for st in cset.states[1:]:
            for ch in ("up", "down"):
                try:
                    (v,) = classify_transitions([(ground.name, ground.config), (st.name, st.config)], ch)
                except MalformedPromotion:
                    continue
                found[(cset.label, cset.charge)] = (ch, v.multiplicity, v.ground_irrep, v.excited_irrep, v.polarizations)
    assert found[("PaV2", -2)] == ("up", 2, Irrep.A1, Irrep.B2, frozenset({"y"}))
    assert found[("PaV2", -1)] == ("down", 3, Irrep.B2, Irrep.A2, frozenset({"x"}))


def test_promotion_in_wrong_channel_rejected(reference_dataset):
    cset = next(c for c in reference_dataset.orbital_configs if c.charge == -2)
    g, e = cset.states
    with pytest.raises(MalformedPromotion):
        classify_transitions([(g.name, g.config), (e.name, e.config)], "down")


def test_double_excitation_rejected():
    g = OrbitalConfiguration.from_spatial([("a1", 2), ("b1", 2), ("b2", 0), ("a2", 0)])
    e = OrbitalConfiguration.from_spatial([("a1", 1), ("b1", 1), ("b2", 1), ("a2", 1)])
    with pytest.raises(MalformedPromotion):
        classify_transitions([("g", g), ("e", e)], "up")


@pytest.mark.parametrize(
    "label, mult, irrep",
    [("3B2", 3, Irrep.B2), ("^2A_1", 2, Irrep.A1), ("A2", None, Irrep.A2), ("b1", None, Irrep.B1)],
)
def test_parse_state_label(label, mult, irrep):
    assert parse_state_label(label) == (mult, irrep)


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        parse_state_label("E")


@pytest.mark.parametrize("g, e", list(itertools.product(NAMES, repeat=2)))
def test_at_most_one_polarization(g, e):
    assert len(dipole_allowed(Irrep[g], Irrep[e])) <= 1


def test_state_symmetry_ignores_orbital_order():
    orbitals = [("a1", 2), ("b1", 1), ("b2", 1), ("a2", 1), ("a1", 0)]
    ref = state_symmetry(OrbitalConfiguration.from_spatial(orbitals))
    for perm in itertools.permutations(orbitals):
        assert state_symmetry(OrbitalConfiguration.from_spatial(perm)) == ref
