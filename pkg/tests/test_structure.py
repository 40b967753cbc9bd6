from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from permlike import monomial as mono
from permlike.errors import SplitHypothesisError
from permlike.numtheory import geometric_sum, mu_orbits, Residue
from permlike.structure import (
    Element,
    GroupSpec,
    adjust_generator_p_case,
    centralizer_of_C,
    check_split_nonp_case,
    default_modulus,
)


def translate(p, n, r, t, M=None):
    """Phases of A_0 C^t in normal form (A_0 the trivial-phase normalizer)."""
    d = p**n
    M = M or default_modulus(p, n, r)
    part = mu_orbits(d, r)
    return GroupSpec.from_phases(p, n, r, {o.rep: t * sum(o.members) * (M // d) for o in part}, M)


def test_default_modulus():
    assert default_modulus(3, 2, 4) == 9
    assert default_modulus(3, 2, 2) == 18
    assert default_modulus(5, 1, 2) == 20
    assert default_modulus(3, 3, 26) == 54


def test_validation():
    with pytest.raises(ValueError):
        GroupSpec.from_phases(4, 1, 1)
    with pytest.raises(ValueError):
        GroupSpec.from_phases(2, 2, 1)
    GroupSpec.from_phases(2, 2, 3, explore=True)
    with pytest.raises(ValueError):
        GroupSpec.from_phases(3, 2, 3)
    G = GroupSpec.from_phases(3, 1, 2)
    with pytest.raises(ValueError):
        GroupSpec(3, 1, G.r, G.M, mono.identity(3, G.M))  # I does not conjugate C to C^2


def test_json_roundtrip():
    G = GroupSpec.from_phases(3, 2, 4, {0: 0, 1: 3, 2: 6, 3: 1, 6: 2})
    H = GroupSpec.from_json('{"p": 3, "n": 2, "r": 4, "M": 9, "phases": '
                            '[{"orbit_rep": 0, "exp": 0}, {"orbit_rep": 1, "exp": 3}, '
                            '{"orbit_rep": 2, "exp": 6}, {"orbit_rep": 3, "exp": 1}, '
                            '{"orbit_rep": 6, "exp": 2}]}')
    assert G == H
    assert GroupSpec.from_dict(G.to_dict()) == G
    K = GroupSpec.from_dict({"p": 3, "n": 2, "r": 4, "A": G.A.to_dict()})
    assert K.A == G.A


def test_compose_example_eq2():
    G = GroupSpec.from_phases(3, 2, 4)
    AC = G.element(1, 1)
    # (AC)^3 = A^3 C^(1 + 4 + 16) and 21 = 3 mod 9
    assert G.power(AC, 3) == G.element(3, 3)
    assert geometric_sum(Residue(4, 9), 3).value == 3
    assert G.compose(AC, G.identity()) == AC


@pytest.mark.parametrize("args", [(3, 1, 2), (3, 2, 4), (3, 2, 2), (5, 1, 2), (3, 2, 8)])
def test_realization_is_injective_homomorphism(args):
    G = GroupSpec.from_phases(*args)
    els = G.enumerate_elements()
    mats = [G.realize(x) for x in els]
    assert len(set(mats)) == len(els) == G.order
    assert els == sorted(els)
    for x, y in itertools.product(els, repeat=2):
        assert G.realize(G.compose(x, y)) == mono.multiply(G.realize(x), G.realize(y))
    for x in els:
        assert G.compose(x, G.inverse(x)) == G.identity()


def test_enumeration_sizes():
    assert GroupSpec.from_phases(3, 2, 1, {j: j for j in range(9)}, 9).order == 9
    assert GroupSpec.from_phases(3, 1, 2).order == 6
    assert GroupSpec.from_phases(3, 2, 4).order == 27


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([1, 2, 4, 5, 7, 8]), st.data())
def test_group_axioms_with_random_phases(r, data):
    G0 = GroupSpec.from_phases(3, 2, r)
    phases = {rep: data.draw(st.integers(0, G0.M - 1)) for rep in G0.partition.reps}
    G = GroupSpec.from_phases(3, 2, r, phases)
    pick = st.builds(Element, st.integers(0, G.index - 1), st.integers(0, G.d - 1))
    x, y, z = data.draw(pick), data.draw(pick), data.draw(pick)
    assert G.compose(G.compose(x, y), z) == G.compose(x, G.compose(y, z))
    assert G.realize(G.compose(x, y)) == mono.multiply(G.realize(x), G.realize(y))
    assert G.compose(G.inverse(x), x) == G.identity()
    q = G.index
    assert mono.power(G.A, q) == mono.power(G.C, G.a_power)
    assert all(not _in_C(mono.power(G.A, m), G) for m in range(1, q))


def _in_C(X, G):
    return any(X == mono.power(G.C, k) for k in range(G.d))


def test_adjust_generator_examples():
    G = translate(3, 2, 4, 1)
    assert mono.power(G.A, 3) == mono.power(G.C, 3)
    H = adjust_generator_p_case(G)
    assert H.shift == 1
    assert H.A == mono.multiply(G.A, mono.power(G.C, -1))
    assert mono.power(H.A, 3).is_identity()
    assert mono.order(H.A) == 3
    assert len({mono.multiply(mono.power(H.A, ell), mono.power(H.C, k))
                for ell in range(3) for k in range(9)}) == 27

    G0 = GroupSpec.from_phases(3, 2, 4)
    assert adjust_generator_p_case(G0).A == G0.A and adjust_generator_p_case(G0).shift == 0

    # ord(4 mod 27) = 9, while ord(10 mod 27) = 3
    assert translate(3, 3, 10, 1).ord_r == 3
    G = translate(3, 3, 4, 1)
    assert G.ord_r == 9
    assert mono.power(G.A, 9) == mono.power(G.C, 9)
    H = adjust_generator_p_case(G)
    assert mono.power(H.A, 9).is_identity() and mono.order(H.A) == 9
    G = translate(3, 3, 10, 2)
    H = adjust_generator_p_case(G)
    assert H.shift == 2 and mono.order(H.A) == 3


def test_adjust_generator_reports_failed_inclusion():
    # A diagonal, not in <C>: A^1 is not in <C^1>
    G = GroupSpec.from_phases(3, 1, 1, {0: 0, 1: 0, 2: 1})
    with pytest.raises(SplitHypothesisError, match="split lemma hypothesis failed"):
        adjust_generator_p_case(G)
    with pytest.raises(ValueError):
        adjust_generator_p_case(GroupSpec.from_phases(3, 1, 2))


def test_split_nonp_examples():
    v = check_split_nonp_case(GroupSpec.from_phases(3, 1, 2))
    assert v.holds and v.expected_order == 2
    assert check_split_nonp_case(GroupSpec.from_phases(5, 1, 2)).holds
    v = check_split_nonp_case(GroupSpec.from_phases(3, 2, 2))
    assert v.holds and v.expected_order == 6
    bad = GroupSpec.from_phases(3, 1, 2, {0: 0, 1: 2}, 6)  # cube root of unity on the 2-cycle
    v = check_split_nonp_case(bad)
    assert not v.holds and v.expected_order == 2 and v.actual_order == 6


def test_centralizer_examples():
    cent = centralizer_of_C(GroupSpec.from_phases(3, 1, 2))
    assert cent.equals_cyclic and {x.k for x in cent.elements} == {0, 1, 2}
    G = GroupSpec.from_phases(3, 2, 1, {j: (j * j) % 9 for j in range(9)}, 9)
    cent = centralizer_of_C(G)
    assert len(cent) == G.order and not cent.equals_cyclic
    trivial = GroupSpec.from_phases(3, 1, 1, {0: 0, 1: 0, 2: 0}, 3)
    assert len(centralizer_of_C(trivial)) == 3  # A = I, so G = <C>
