import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hsikit.errors import DomainError
from hsikit.su2 import (
    SU2Element,
    Su2Vector,
    adjoint,
    commutator,
    exp_su2,
    haar,
    log_su2,
    orbit_signature,
    qexp,
    qleft,
    qmul,
    qright,
)

SQRT2 = math.sqrt(2.0)
coord = st.floats(-3.0, 3.0, allow_nan=False)


def series_exp(M, terms=20):
    """Truncated power series of a 2x2 complex matrix (independent oracle)."""
    out = np.eye(2, dtype=complex)
    term = np.eye(2, dtype=complex)
    for k in range(1, terms):
        term = term @ M / k
        out = out + term
    return out


def test_exp_zero_is_identity():
    assert exp_su2(Su2Vector()).distance(SU2Element.identity()) == 0.0


def test_exp_at_norm_pi_sqrt2_is_minus_identity():
    v = Su2Vector.from_norm([1.0, 2.0, -0.5], math.pi * SQRT2)
    assert exp_su2(v).distance(SU2Element.central(-1)) < 1e-14


def test_exp_matches_power_series():
    v = Su2Vector(math.pi / 2, 0.0, 0.0)
    g = exp_su2(v)
    assert np.allclose(g.matrix(), series_exp(v.matrix()), atol=1e-12)
    assert abs(g.trace() - 2 * math.cos(math.pi / 2)) < 1e-12


def test_exp_matches_power_series_random(rng):
    for _ in range(50):
        v = Su2Vector(*rng.uniform(-2, 2, 3))
        assert np.allclose(exp_su2(v).matrix(), series_exp(v.matrix(), 40), atol=1e-10)


def test_matrix_is_special_unitary(rng):
    M = SU2Element.random(rng).matrix()
    assert np.allclose(M @ M.conj().T, np.eye(2))
    assert abs(np.linalg.det(M) - 1) < 1e-12


def test_product_matches_matrix_product(rng):
    a, b = SU2Element.random(rng), SU2Element.random(rng)
    assert np.allclose((a * b).matrix(), a.matrix() @ b.matrix())


def test_log_identity_and_trace_zero():
    assert log_su2(SU2Element.identity()).euclidean == 0.0
    g = SU2Element(0.0, 0.0, 1.0, 0.0)
    assert abs(log_su2(g).norm() - (math.pi / 2) * SQRT2) < 1e-12


def test_log_rejects_minus_identity():
    with pytest.raises(DomainError):
        log_su2(SU2Element.central(-1))
    near = exp_su2(Su2Vector.from_norm([0, 0, 1], math.pi * SQRT2 - 1e-6))
    with pytest.raises(DomainError):
        log_su2(near)


def test_exp_log_round_trip(rng):
    for _ in range(1000):
        g = SU2Element.random(rng)
        if g.trace() <= -2 + 1e-6:
            continue
        v = log_su2(g)
        assert v.norm() < math.pi * SQRT2
        assert exp_su2(v).distance(g) < 1e-10


@settings(max_examples=100, deadline=None)
@given(coord, coord, coord, st.floats(-2, 2), st.floats(-2, 2))
def test_one_parameter_subgroup(x, y, z, s, t):
    v = Su2Vector(x, y, z)
    lhs = exp_su2(v.scale(s + t))
    rhs = exp_su2(v.scale(s)) * exp_su2(v.scale(t))
    assert lhs.distance(rhs) < 1e-10


def test_orbit_signature_values():
    assert orbit_signature(SU2Element.identity()) == 2.0
    assert orbit_signature(SU2Element.central(-1)) == -2.0
    v = Su2Vector.from_norm([0.3, 1, 0], math.pi * SQRT2 / 2)
    assert abs(orbit_signature(exp_su2(v))) < 1e-12


def test_conjugation_preserves_signature(rng):
    for _ in range(200):
        g, h = SU2Element.random(rng), SU2Element.random(rng)
        assert abs(orbit_signature(g.conjugate_by(h)) - orbit_signature(g)) < 1e-12


def test_adjoint_is_conjugation_of_exponential(rng):
    g = SU2Element.random(rng)
    v = Su2Vector(0.4, -0.2, 0.9)
    assert exp_su2(adjoint(g, v)).distance(exp_su2(v).conjugate_by(g)) < 1e-12
    assert abs(adjoint(g, v).norm() - v.norm()) < 1e-12


def test_norm_uses_trace_inner_product():
    v = Su2Vector(0.3, -1.1, 0.7)
    M = v.matrix()
    assert abs(v.inner(v) - (-np.trace(M @ M)).real) < 1e-12


def test_commutator_of_commuting_elements():
    a = exp_su2(Su2Vector(0, 0, 0.7))
    b = exp_su2(Su2Vector(0, 0, -1.3))
    assert commutator(a, b).distance(SU2Element.identity()) < 1e-14


def test_long_products_stay_unit(rng):
    g = SU2Element.random(rng)
    out = SU2Element.identity()
    for _ in range(10000):
        out = out * g
    assert abs(np.linalg.norm(out.as_array()) - 1.0) < 1e-12


def test_batched_helpers_agree_with_scalar(rng):
    a, b = haar(rng, (5,)), haar(rng, (5,))
    prod = qmul(a, b)
    for i in range(5):
        ref = SU2Element.from_array(a[i]) * SU2Element.from_array(b[i])
        assert np.allclose(prod[i], ref.as_array())
        assert np.allclose(qleft(a[i]) @ b[i], prod[i])
        assert np.allclose(qright(b[i]) @ a[i], prod[i])
    v = rng.standard_normal((4, 3))
    e = qexp(v)
    for i in range(4):
        assert np.allclose(e[i], exp_su2(Su2Vector(*v[i])).as_array())
