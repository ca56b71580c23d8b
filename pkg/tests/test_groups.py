"""Tests for group oracles, self-actions and windows."""

import pytest

from cogradedhopf.groups import (
    GroupAxiomError,
    Window,
    adjoint_self_action,
    check_group_laws_on_window,
    check_self_action_on_window,
    cyclic_group,
    finite_group_from_table,
    integers_group,
    s3_group,
    trivial_group,
    trivial_self_action,
)


def test_z2_table():
    g = finite_group_from_table(["e", "a"], [[0, 1], [1, 0]], name="Z2")
    assert g.order == 2
    assert g.identity == "e"
    assert g.multiply("a", "a") == "e"
    assert g.invert("a") == "a"


def _s3_by_permutation_composition():
    # Independent oracle: compose permutation tuples directly (q first, then p).
    perms = {
        "e": (0, 1, 2),
        "(12)": (1, 0, 2),
        "(13)": (2, 1, 0),
        "(23)": (0, 2, 1),
        "(123)": (1, 2, 0),
        "(132)": (2, 0, 1),
    }
    by_perm = {v: k for k, v in perms.items()}

    def mul(a, b):
        pa, pb = perms[a], perms[b]
        return by_perm[tuple(pa[pb[i]] for i in range(3))]

    return perms, mul


def test_s3_matches_permutation_composition_oracle():
    g = s3_group()
    assert g.order == 6
    perms, mul = _s3_by_permutation_composition()
    for a in perms:
        for b in perms:
            assert g.multiply(a, b) == mul(a, b)


def test_non_associative_table_names_triple():
    # Z3 table with one entry corrupted: breaks associativity (and more).
    table = [[0, 1, 2], [1, 2, 0], [2, 0, 0]]
    with pytest.raises(GroupAxiomError):
        finite_group_from_table(["e", "a", "b"], table)


def test_table_without_identity_rejected():
    with pytest.raises(GroupAxiomError, match="identity"):
        finite_group_from_table(["a", "b"], [[0, 0], [0, 0]])


def test_integers_group():
    z = integers_group()
    assert z.multiply(2, 3) == 5
    assert z.invert(-4) == 4
    assert z.identity == 0
    assert not z.is_finite
    assert z.decode("-7") == -7


def test_adjoint_action_on_s3():
    g = s3_group()
    rho = adjoint_self_action(g)
    assert rho.apply("(12)", "(123)") == "(132)"
    for p in g.elements:
        assert rho.apply(p, "e") == "e"
        # defining property: rho_p(q) * p == p * q
        for q in g.elements:
            assert g.multiply(rho.apply(p, q), p) == g.multiply(p, q)


def test_adjoint_action_is_trivial_on_abelian():
    g = cyclic_group(4)
    rho = adjoint_self_action(g)
    for p in g.elements:
        for q in g.elements:
            assert rho.apply(p, q) == q


def test_trivial_action():
    g = s3_group()
    rho = trivial_self_action(g)
    assert all(rho.apply(p, q) == q for p in g.elements for q in g.elements)
    assert check_self_action_on_window(g, rho, Window.full(g)) is None


def test_action_composition_law_on_windows():
    g = s3_group()
    assert check_self_action_on_window(g, adjoint_self_action(g), Window.full(g)) is None
    z = integers_group()
    w = Window.integer_range(z, -3, 3)
    assert check_self_action_on_window(z, adjoint_self_action(z), w) is None


def test_window_normalization_adds_identity_and_inverses():
    z = integers_group()
    w = Window.of(z, [2, 5])
    assert 0 in w and -2 in w and -5 in w
    assert w.elements[0] == 0 or 0 in w.elements


def test_window_full_requires_finite():
    with pytest.raises(ValueError):
        Window.full(integers_group())
    g = trivial_group()
    assert Window.full(g).elements == ("e",)


def test_group_laws_on_integer_window():
    z = integers_group()
    assert check_group_laws_on_window(z, Window.integer_range(z, -4, 4)) is None
