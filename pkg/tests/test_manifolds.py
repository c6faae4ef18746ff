import itertools
import random

import pytest

from hsikit.errors import InvalidParams, UnsupportedDescription
from hsikit.grpres import abelianization, integer_det
from hsikit.linkdiag import FIGURE_EIGHT, TREFOIL
from hsikit.manifolds import (
    Brieskorn,
    ConnectedSum,
    DoubleBranchedCover,
    Lens,
    PlumbingTree,
    S2xS1,
    SurgeryOnTorusKnot,
    from_json,
    h1,
    h1_order,
    pi1,
    plumbing_det,
    seifert_invariants,
    to_json,
    z2_rank,
)
from hsikit.repvar import TwistedRepProblem, solve_numeric


def test_lens_presentation():
    P = pi1(Lens(5, 1))
    assert P.n_generators == 1 and [r.to_ints() for r in P.relators] == [[1] * 5]


def test_s2xs1_presentation_is_free():
    P = pi1(S2xS1())
    assert P.n_generators == 1 and P.relators == ()
    assert h1(S2xS1()) == ([], 1)
    assert h1_order(S2xS1()) == 0


def test_poincare_sphere_is_homology_sphere():
    assert h1(Brieskorn((2, 3, 5))) == ([], 0)


def test_seifert_normalization():
    for a in [(2, 3, 5), (2, 3, 7), (2, 5, 7), (3, 4, 5), (2, 3, 11)]:
        b0, bs = seifert_invariants(a)
        p = a[0] * a[1] * a[2]
        assert p * (-b0) + sum(b * p // ai for b, ai in zip(bs, a)) in (1, -1)
        assert h1_order(Brieskorn(a)) == 1


def test_lens_orders():
    for p in range(1, 51):
        assert h1_order(Lens(p, 1)) == p


def test_plumbing_chain_determinant():
    T = PlumbingTree((2, 2, 2), ((0, 1), (1, 2)))
    assert h1(T) == ([4], 0)
    assert abs(plumbing_det(T)) == 4


def test_plumbing_h1_matches_determinant():
    r = random.Random(11)
    for _ in range(30):
        n = r.randint(1, 6)
        edges = tuple((r.randrange(v), v) for v in range(1, n))
        weights = tuple(r.randint(-4, 5) for _ in range(n))
        T = PlumbingTree(weights, edges)
        M = T.intersection_matrix()
        assert h1_order(T) == abs(integer_det(M))


def test_plumbing_rejects_cycles():
    with pytest.raises(InvalidParams):
        PlumbingTree((2, 2, 2), ((0, 1), (1, 2), (2, 0)))


def test_torus_knot_surgery_homology():
    for r, s, n in [(2, 3, 5), (2, 3, 7), (2, 5, 1), (3, 4, 11), (2, 3, 0)]:
        assert h1_order(SurgeryOnTorusKnot(r, s, n)) == abs(n)


def test_connected_sum_homology_is_direct_sum():
    Y = ConnectedSum((Lens(2, 1), Lens(3, 1), S2xS1()))
    assert h1(Y) == ([6], 1)
    Y = ConnectedSum((Lens(2, 1), Lens(4, 1)))
    assert h1(Y) == ([2, 4], 0)
    assert z2_rank(Y) == 2


def test_double_cover_homology():
    assert h1_order(DoubleBranchedCover(TREFOIL)) == 3
    assert h1_order(DoubleBranchedCover(FIGURE_EIGHT)) == 5


def test_trefoil_exterior_quotient_by_meridian_is_trivial():
    P = pi1(SurgeryOnTorusKnot(2, 3, 1))
    assert abelianization(P) == ([], 0)


def test_lens_exterior_twisted_solution_exists():
    from hsikit.grpres import quotient_by_square
    from hsikit.manifolds import lens_knot_exterior
    P = quotient_by_square(lens_knot_exterior(2), "meridian")
    prob = TwistedRepProblem.twisted(P, "meridian")
    assert solve_numeric(prob, restarts=20)


def test_invalid_descriptions():
    with pytest.raises(InvalidParams):
        Lens(4, 2)
    with pytest.raises(InvalidParams):
        Brieskorn((2, 3, 4))
    with pytest.raises(UnsupportedDescription):
        from_json({"type": "hyperbolic"})


def test_json_round_trip():
    descs = [Lens(7, 2), S2xS1(), Brieskorn((2, 3, 7)),
             PlumbingTree((2, 3), ((0, 1),)), SurgeryOnTorusKnot(2, 3, 5),
             ConnectedSum((Lens(2, 1), Brieskorn((2, 3, 5)))), DoubleBranchedCover(TREFOIL)]
    for d in descs:
        assert from_json(to_json(d)) == d


def test_presentations_abelianize_consistently():
    for a in itertools.combinations([2, 3, 5, 7, 11], 3):
        assert abelianization(pi1(Brieskorn(a))) == ([], 0)
