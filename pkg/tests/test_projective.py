import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from veronese_groups.projective import (
    ProjectiveError,
    ProjLine,
    ProjMap3,
    ProjPoint2,
    PseudoProjMap,
    chordal_distance,
    classify_projective,
    dedup_points,
    fixing_maps,
    in_general_position,
    kernel_locus,
    line_through,
    normalize,
    normalized_powers,
    pseudo_projective_limit,
    same_point,
)

finite = st.floats(-10, 10, allow_nan=False)
cvec3 = st.lists(st.tuples(finite, finite), min_size=3, max_size=3).map(
    lambda xs: np.array([complex(a, b) for a, b in xs])
).filter(lambda v: np.linalg.norm(v) > 1e-3)
scalars = st.tuples(finite, finite).map(lambda t: complex(*t)).filter(lambda z: abs(z) > 1e-3)


def test_normalize_examples():
    assert np.allclose(normalize([0, 3j, 0]), [0, 1, 0])
    assert np.allclose(normalize([1, 1, 1]), [1, 1, 1])
    assert np.allclose(normalize([2, -4, 2j]), [-0.5, 1, -0.5j])


def test_normalize_ties_lowest_index_and_zero():
    assert np.allclose(normalize([2, -2, 1]), [1, -1, 0.5])
    with pytest.raises(ProjectiveError, match="zero representative"):
        normalize([0, 0, 0])


@given(cvec3, scalars)
def test_normalize_idempotent_and_scale_free(v, lam):
    n = normalize(v)
    assert np.allclose(normalize(n), n)
    assert np.allclose(normalize(lam * v), n, atol=1e-12)


def test_same_point_examples():
    assert same_point(ProjPoint2([1, 2, 3]), ProjPoint2([2, 4, 6]))
    assert not same_point(ProjPoint2([1, 0, 0]), ProjPoint2([0, 1, 0]))
    assert same_point(ProjPoint2([1, 0, 0]), ProjPoint2([1, 1e-12, 0]), tol=1e-9)


def test_chordal_distance_examples():
    p = ProjPoint2([1, 2j, 3])
    assert chordal_distance(p, p) == 0
    assert chordal_distance([1, 0, 0], [0, 0, 1]) == pytest.approx(1.0)
    assert chordal_distance([1, 1, 0], [1, 0, 0]) == pytest.approx(np.sqrt(0.5))
    # full precision for nearby points
    assert chordal_distance([1, 0, 0], [1, 1e-12, 0]) == pytest.approx(1e-12, rel=1e-6)


@given(cvec3, cvec3, scalars)
def test_chordal_distance_symmetric_scale_invariant(p, q, lam):
    d = chordal_distance(p, q)
    assert 0 <= d <= 1
    assert d == pytest.approx(chordal_distance(q, p), abs=1e-12)
    assert d == pytest.approx(chordal_distance(lam * p, q), abs=1e-9)


def test_line_through_examples():
    e1, e2 = ProjPoint2([1, 0, 0]), ProjPoint2([0, 1, 0])
    assert same_point(line_through(e1, e2).c, [0, 0, 1])
    assert same_point(line_through(ProjPoint2([1, 0, -1]), e2).c, [1, 0, 1])
    ln = line_through(ProjPoint2([1, 2, 1]), ProjPoint2([1, -2, 1]))
    assert same_point(ln.c, [1, 0, -1])
    with pytest.raises(ProjectiveError, match="line undetermined"):
        line_through(e1, ProjPoint2([3, 0, 0]))


@given(cvec3, cvec3)
def test_line_through_contains_both(p, q):
    if chordal_distance(p, q) < 1e-3:
        return
    ln = line_through(ProjPoint2(p), ProjPoint2(q))
    assert ln.incidence(p) < 1e-9 and ln.incidence(q) < 1e-9


def test_pseudo_limit_examples():
    ident = pseudo_projective_limit([np.eye(3)] * 6)
    assert ident.kernel_dim == 0
    assert kernel_locus(ident) is None

    seq = normalized_powers(np.diag([4.0, 1.0, 0.25]), range(1, 41))
    lim = pseudo_projective_limit(seq)
    assert lim.kernel_dim == 2
    assert np.allclose(lim.m, np.diag([1, 0, 0]))
    assert same_point(kernel_locus(lim).c, [1, 0, 0])

    unip = np.array([[1, 1, 1], [0, 1, 2], [0, 0, 1]])
    seq = normalized_powers(unip, [10**k for k in range(3, 12)])
    lim = pseudo_projective_limit(seq, tol=1e-4, window=2)
    expect = np.zeros((3, 3))
    expect[0, 2] = 1
    assert np.allclose(lim.m, expect, atol=1e-4)
    assert lim.kernel_dim == 2
    assert same_point(kernel_locus(lim).c, [0, 0, 1])


def test_pseudo_limit_no_limit():
    rot = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]])
    with pytest.raises(ProjectiveError, match="no pseudo-projective limit"):
        pseudo_projective_limit(normalized_powers(rot, range(1, 10)))


def test_pseudo_limit_dominant_eigendirection(rng):
    for _ in range(10):
        p = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        m = p @ np.diag([3.0, 1.5j, -0.5]) @ np.linalg.inv(p)
        lim = pseudo_projective_limit(normalized_powers(m, range(1, 121)))
        assert lim.kernel_dim == 2
        ev, evec = np.linalg.eig(m)
        dom = evec[:, np.argmax(np.abs(ev))]
        assert same_point(lim.image().v, dom, tol=1e-8)


def test_kernel_locus_point():
    k = kernel_locus(PseudoProjMap(np.diag([1, 1, 0])))
    assert isinstance(k, ProjPoint2)
    assert same_point(k, [0, 0, 1])


def test_general_position_examples():
    e = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert in_general_position(e + [[1, 1, 1]])
    assert not in_general_position(e + [[1, 1, 0]])
    assert in_general_position([[1, 0, 0], [0, 0, 1], [1, 2, 1], [1, 2j, -1]])
    # the two determinants quoted for this quadruple
    assert np.linalg.det(np.array([[1, 0, 0], [1, 2, 1], [1, 2j, -1]])) == pytest.approx(-2 - 2j)
    assert np.linalg.det(np.array([[0, 0, 1], [1, 2, 1], [1, 2j, -1]])) == pytest.approx(-2 + 2j)


def test_fixing_maps_rigidity(rng):
    for _ in range(20):
        pts = [rng.standard_normal(3) + 1j * rng.standard_normal(3) for _ in range(4)]
        assert in_general_position(pts)
        basis = fixing_maps(pts)
        assert basis.shape[0] == 1
        g = normalize(basis[0])
        assert np.max(np.abs(g - g[0, 0] * np.eye(3))) < 1e-8
    # three points leave a 3-dimensional family (diagonal maps)
    assert fixing_maps([[1, 0, 0], [0, 1, 0], [0, 0, 1]]).shape[0] == 3


def test_projmap_actions():
    m = ProjMap3(np.diag([2, 1, 1]))
    ln = ProjLine([1, 1, 0])
    p = ProjPoint2([1, -1, 5])
    assert ln.contains(p)
    assert (m @ ln).contains(m @ p)
    with pytest.raises(ProjectiveError):
        ProjMap3(np.diag([1, 1, 0]))
    assert np.allclose(abs(np.linalg.det(ProjMap3(5 * np.eye(3)).unimodular())), 1)


def test_classify_projective():
    assert classify_projective(np.eye(3) * 2) == "identity"
    assert classify_projective(np.diag([4, 1, 0.25])) == "strongly loxodromic"
    assert classify_projective(np.diag([4, 4, 1 / 16])) == "loxodromic"
    assert classify_projective(np.diag([1, 1j, -1])) == "elliptic"
    assert classify_projective(np.array([[1, 1, 1], [0, 1, 2], [0, 0, 1]])) == "parabolic"


def test_dedup_points():
    pts = np.array([[1, 0, 0], [2, 1e-9, 0], [0, 1, 0], [0, 1j, 0]])
    assert dedup_points(pts).tolist() == [0, 2]
