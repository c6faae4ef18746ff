import random

import pytest

from hsikit.errors import DisconnectedDiagram, InvalidParams
from hsikit.linkdiag import (
    FIGURE_EIGHT,
    HOPF,
    STANDARD,
    TREFOIL,
    UNKNOT,
    PDDiagram,
    Unknown,
    add_r1,
    canonical_key,
    certify_quasi_alternating,
    connected_sum,
    determinant,
    faces,
    fox_determinant,
    goeritz_matrix,
    random_moves,
    resolve_crossing,
    safe_determinant,
    simplify,
    verify_certificate,
)

# determinants by hand-checkerboarding (Goeritz) and the Fox coloring matrix
EXPECTED_DET = {"unknot": 1, "hopf": 2, "trefoil": 3, "figure_eight": 5}


def test_standard_determinants():
    for name, D in STANDARD.items():
        assert determinant(D) == EXPECTED_DET[name]
        assert fox_determinant(D) == EXPECTED_DET[name]


def test_hopf_goeritz_is_one_by_one():
    G = goeritz_matrix(HOPF)
    assert len(G) == 1 and abs(G[0][0]) == 2


def test_face_count_is_planar():
    for D in STANDARD.values():
        if D.crossings:
            assert len(faces(D)) == len(D.crossings) + 2


def test_invalid_pd_rejected():
    with pytest.raises(InvalidParams):
        PDDiagram(((1, 2, 3, 4),))
    with pytest.raises(InvalidParams):
        PDDiagram(((1, 1, 2, 3), (2, 4, 4, 3), (5, 5, 6, 6)))


def test_trefoil_resolutions():
    for i in range(3):
        dets = sorted(safe_determinant(resolve_crossing(TREFOIL, i, r)) for r in (0, 1))
        assert dets == [1, 2]


def test_hopf_resolutions_are_unknots():
    for i in range(2):
        for r in (0, 1):
            assert safe_determinant(resolve_crossing(HOPF, i, r)) == 1


def test_resolve_bad_index():
    with pytest.raises(IndexError):
        resolve_crossing(TREFOIL, 3, 0)


def test_split_diagram_raises():
    split = PDDiagram((), free_loops=2)
    with pytest.raises(DisconnectedDiagram):
        determinant(split)
    assert safe_determinant(split) == 0


def test_connected_sum_multiplies_determinants():
    assert determinant(connected_sum(TREFOIL, TREFOIL)) == 9
    assert determinant(connected_sum(TREFOIL, FIGURE_EIGHT)) == 15
    assert fox_determinant(connected_sum(TREFOIL, TREFOIL)) == 9


def test_reidemeister_moves_preserve_determinant():
    r = random.Random(17)
    for base in (TREFOIL, FIGURE_EIGHT):
        d = determinant(base)
        for _ in range(50):
            E = random_moves(base, r.randint(1, 4), r)
            assert determinant(E) == d
            assert determinant(simplify(E)) == d


def test_simplify_removes_kinks():
    for variant in range(8):
        E = add_r1(TREFOIL, 1, variant)
        assert len(E.crossings) == 4
        assert canonical_key(simplify(E)) == canonical_key(TREFOIL)


def test_canonical_key_ignores_labels():
    relabelled = PDDiagram(tuple(tuple(10 + x for x in c) for c in TREFOIL.crossings))
    assert canonical_key(relabelled) == canonical_key(TREFOIL)
    assert canonical_key(TREFOIL) != canonical_key(FIGURE_EIGHT)


def test_qa_certificates_for_standard_links():
    for name, D in STANDARD.items():
        cert = certify_quasi_alternating(D)
        assert not isinstance(cert, Unknown), name
        assert cert.det == EXPECTED_DET[name]
        assert verify_certificate(cert)
        for node in cert.nodes():
            if not node.is_leaf:
                assert node.det == node.det0 + node.det1
                assert node.det0 >= 1 and node.det1 >= 1


def test_trefoil_root_split():
    cert = certify_quasi_alternating(TREFOIL)
    assert (cert.det, sorted((cert.det0, cert.det1))) == (3, [1, 2])


def test_figure_eight_root_split():
    cert = certify_quasi_alternating(FIGURE_EIGHT)
    assert (cert.det, sorted((cert.det0, cert.det1))) == (5, [2, 3])


def test_unknot_is_a_leaf():
    cert = certify_quasi_alternating(UNKNOT)
    assert cert.is_leaf and cert.det == 1


def test_split_link_is_not_certified():
    res = certify_quasi_alternating(PDDiagram((), free_loops=2))
    assert isinstance(res, Unknown) and not res


def test_pd_json_round_trip():
    for D in STANDARD.values():
        assert PDDiagram.from_json(D.to_json()) == D
