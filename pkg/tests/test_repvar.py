import itertools
import math
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from hsikit.errors import InvalidParams, NoConvergence
from hsikit.grpres import Presentation, Word, pairwise_coprime
from hsikit.repvar import (
    TwistedRepProblem,
    brieskorn_problem,
    casson_brieskorn,
    classify,
    enumerate_brieskorn,
    enumerate_lens,
    kind_histogram,
    lens_problem,
    perturbed_count,
    residual,
    sample_points,
    signature,
    solve_numeric,
)
from hsikit.su2 import SU2Element


def milnor_signature(a, b, c):
    """Signature of the Milnor fiber of x^a + y^b + z^c (Brieskorn's count)."""
    pos = neg = 0
    for i, j, k in product(range(1, a), range(1, b), range(1, c)):
        s = (Fraction(i, a) + Fraction(j, b) + Fraction(k, c)) % 2
        if 0 < s < 1:
            neg += 1
        elif 1 < s < 2:
            pos += 1
    return pos - neg


def lens_histogram(comps):
    return {"central": sum(c.kind == "central" for c in comps),
            "abelian": sum(c.kind == "abelian" for c in comps), "irreducible": 0}


def test_forced_central_solution():
    a = Word.gen(0)
    P = Presentation(1, (a ** 2,))
    prob = TwistedRepProblem(P, ((a ** 2, 1), (a, -1)))
    orbits = solve_numeric(prob, restarts=10)
    assert len(orbits) == 1 and orbits[0].kind == "central"
    assert orbits[0].representative[0].distance(SU2Element.central(-1)) < 1e-10


def test_contradictory_pins_give_empty():
    a = Word.gen(0)
    prob = TwistedRepProblem(Presentation(1), ((a, 1), (a, -1)))
    assert solve_numeric(prob, restarts=3) == []


def test_no_convergence():
    a = Word.gen(0)
    prob = TwistedRepProblem(Presentation(1), ((a ** 2, -1), (a ** 3, -1)))
    with pytest.raises(NoConvergence):
        solve_numeric(prob, restarts=5)


def test_bad_solver_arguments():
    with pytest.raises(InvalidParams):
        solve_numeric(lens_problem(3, 1), restarts=0)
    with pytest.raises(InvalidParams):
        solve_numeric(lens_problem(3, 1), tol=0)


def test_enumerate_lens_examples():
    assert [(c.orbit_type, perturbed_count([c])) for c in enumerate_lens(1, 0)] == [("point", 1)]
    comps = enumerate_lens(3, 1)
    assert sorted(c.orbit_type for c in comps) == ["S2", "point"]
    assert perturbed_count(comps) == 3
    comps = enumerate_lens(4, 1)
    assert sorted(c.orbit_type for c in comps) == ["S2", "point", "point"]
    assert perturbed_count(comps) == 4


def test_lens_perturbed_count_is_p():
    for p in range(1, 26):
        for q in range(0, p + 1):
            if math.gcd(p, q) != 1:
                continue
            for c in itertools.product((0, 1), repeat=2):
                assert perturbed_count(enumerate_lens(p, q, c)) == p


def test_lens_components_solve_equations():
    for comp in enumerate_lens(7, 3, (0, 1)):
        t = float(comp.angle) * math.pi
        A = SU2Element(math.cos(t), math.sin(t), 0.0, 0.0)
        assert residual(lens_problem(7, 3, (0, 1)), [A, SU2Element.identity()]) < 1e-12


def test_enumerate_lens_rejects_bad_input():
    with pytest.raises(InvalidParams):
        enumerate_lens(4, 2)


def test_numeric_matches_lens_small():
    for p, q, c in [(3, 1, (0, 0)), (4, 1, (0, 1)), (5, 2, (1, 1))]:
        orbits = solve_numeric(lens_problem(p, q, c), restarts=100)
        exact = enumerate_lens(p, q, c)
        assert len(orbits) == len(exact)
        assert kind_histogram(orbits) == lens_histogram(exact)
        traces = sorted(round(o.representative[0].trace(), 6) for o in orbits)
        assert traces == sorted(round(e.trace, 6) for e in exact)


def test_poincare_sphere_orbits():
    orbits = solve_numeric(brieskorn_problem((2, 3, 5)), restarts=200)
    assert kind_histogram(orbits) == {"central": 1, "abelian": 0, "irreducible": 2}
    prob = brieskorn_problem((2, 3, 5))
    for o in orbits:
        assert residual(prob, o.representative) < 1e-10
        assert o.orbit_type == {"central": "point", "irreducible": "SO3"}[o.kind]


def test_casson_values():
    assert casson_brieskorn((2, 3, 5)) == 1
    assert len(enumerate_brieskorn((2, 3, 5))) == 2
    with pytest.raises(InvalidParams):
        casson_brieskorn((2, 3, 4))


def test_brieskorn_count_even_and_matches_milnor_signature():
    checked = 0
    for a in itertools.combinations(range(2, 14), 3):
        if not pairwise_coprime(a):
            continue
        n = len(enumerate_brieskorn(a))
        assert n % 2 == 0
        sigma = milnor_signature(*a)
        assert abs(sigma) == 8 * (n // 2), a
        checked += 1
    assert checked == 79


def test_signature_is_conjugation_invariant(rng):
    orbits = solve_numeric(brieskorn_problem((2, 3, 7)), restarts=100)
    for o in orbits:
        g = SU2Element.random(rng)
        moved = [x.conjugate_by(g) for x in o.representative]
        assert np.allclose(signature(moved), o.signature, atol=1e-9)
        assert classify(moved) == o.kind


def test_sample_points_satisfy_equations():
    prob = lens_problem(5, 1)
    pts = sample_points(prob, 20)
    assert len(pts) == 20
    assert all(residual(prob, p) < 1e-10 for p in pts)


def test_orbit_json():
    o = solve_numeric(lens_problem(2, 1), restarts=20)[0]
    d = o.to_json()
    assert set(d) == {"kind", "orbit_type", "residual", "signature"}
