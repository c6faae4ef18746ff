from hypothesis import given, settings
from hypothesis import strategies as st

from hsikit.gradedab import GradedAbelianGroup as G
from hsikit.gradedab import euler_abs, invariant_form, kunneth, tensor, tor

orders = st.lists(st.sampled_from([0, 0, 2, 3, 4, 6]), max_size=3)
groups = st.dictionaries(st.integers(0, 7), orders, max_size=3).map(G)
free_groups = st.dictionaries(st.integers(0, 7), st.lists(st.just(0), max_size=3),
                              max_size=3).map(G)


def test_invariant_form():
    assert invariant_form([6, 4, 0]) == (0, 2, 12)
    assert invariant_form([2, 3]) == (6,)
    assert invariant_form([1, 1]) == ()


def test_tensor_unit():
    H = G({1: [0, 4], 5: [3]})
    assert tensor(G.free(1), H) == H


def test_tor_of_free_vanishes():
    H = G({2: [2, 0]})
    assert tor(G.free(3, 4), H).is_zero()


def test_cyclic_pairs():
    a, b = G({0: [2]}), G({3: [4]})
    assert tensor(a, b) == G({3: [2]})
    assert tor(a, b) == G({3: [2]})


def test_kunneth_examples():
    L2 = G.free(2, 0, coarse=True)
    assert kunneth(L2, L2) == G.free(4, 0, coarse=True)
    S = G({0: [0], 3: [0]})
    H = G({1: [0], 2: [5]})
    assert kunneth(S, H) == H + H.shift(3)
    z2 = G({0: [2]})
    assert kunneth(z2, z2) == G({0: [2], 7: [2]})


def test_euler():
    assert euler_abs(G({0: [0], 3: [0]})) == 0
    assert euler_abs(G.free(7, 0, coarse=True)) == 7
    assert euler_abs(G.zero()) == 0


def test_coarse_mixing():
    fine = G({3: [0]})
    coarse = G.free(2, 0, coarse=True)
    out = kunneth(fine, coarse)
    assert out.coarse and out.rank_in(1) == 2


def test_json_round_trip():
    for H in (G({0: [0, 2], 5: [3]}), G.free(4, 0, coarse=True), G.zero()):
        assert G.from_json(H.to_json()) == H


def test_str():
    assert str(G({0: [0], 3: [0]})) == "Z[0] + Z[3]"
    assert str(G.zero()) == "0"


@settings(max_examples=200, deadline=None)
@given(groups, groups)
def test_kunneth_commutative(a, b):
    assert kunneth(a, b) == kunneth(b, a)


@settings(max_examples=200, deadline=None)
@given(groups, groups, groups)
def test_kunneth_associative(a, b, c):
    assert kunneth(kunneth(a, b), c) == kunneth(a, kunneth(b, c))


@settings(max_examples=100, deadline=None)
@given(free_groups, groups)
def test_rank_and_euler_multiply_for_free(a, b):
    k = kunneth(a, b)
    assert k.rank() == a.rank() * b.rank()
    assert k.euler_abs() == a.euler_abs() * b.euler_abs()
