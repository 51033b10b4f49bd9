import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_moebius
from veronese_groups.moebius import (
    CircleSpec,
    MoebiusMap,
    SchottkyError,
    classify,
    fixed_points,
    four_disk_schottky,
    invariant_circle,
    limit_samples,
    limit_set_p1,
    max_circle_gap,
    quasifuchsian_family,
    relator_residual,
    schottky_group,
    solve_invariant_circle,
)
from veronese_groups.projective import chordal_distance, normalize, same_point
from veronese_groups.words import enumerate_layers


def test_classify_examples():
    assert classify(MoebiusMap([[1, 1], [0, 1]])) == "parabolic"
    assert classify(MoebiusMap([[2, 0], [0, 0.5]])) == "loxodromic"
    assert classify(MoebiusMap([[0, -1], [1, 0]])) == "elliptic"
    assert classify(MoebiusMap([[3, 0], [0, 3]])) == "identity"
    # purely imaginary trace: loxodromic, not elliptic
    assert classify(MoebiusMap([[1j, 0], [0, -1j]])) == "elliptic"
    assert classify(MoebiusMap([[2j, 0], [0, -0.5j]])) == "loxodromic"


def test_lift_independence():
    g = MoebiusMap([[2, 1], [3, 4]])
    assert np.isclose(np.linalg.det(g.m), 1)
    h = MoebiusMap(-3j * np.array([[2, 1], [3, 4]]))
    assert g.distance(h) < 1e-12
    assert classify(g) == classify(h)


@given(st.integers(0, 10**6))
def test_classify_conjugation_invariant(seed):
    rng = np.random.default_rng(seed)
    h = random_moebius(rng)
    for g in (MoebiusMap([[1, 1], [0, 1]]), MoebiusMap([[0, -1], [1, 0]]), random_moebius(rng)):
        assert classify(g.conjugate_by(h), tol=1e-7) == classify(g, tol=1e-7)


def test_fixed_points_examples():
    fp = fixed_points(MoebiusMap([[2, 0], [0, 0.5]]))
    assert [f.role for f in fp] == ["attracting", "repelling"]
    assert same_point(fp[0].point, [1, 0]) and same_point(fp[1].point, [0, 1])
    fp = fixed_points(MoebiusMap([[1, 1], [0, 1]]))
    assert len(fp) == 1 and same_point(fp[0].point, [1, 0])
    fp = fixed_points(MoebiusMap([[0, -1], [1, 0]]))
    pts = sorted((f.point.chart() for f in fp), key=lambda z: z.imag)
    assert np.allclose(pts, [-1j, 1j])
    with pytest.raises(ValueError):
        fixed_points(MoebiusMap(np.eye(2)))


def test_fixed_points_are_fixed(rng):
    for _ in range(50):
        g = random_moebius(rng)
        for f in fixed_points(g):
            assert chordal_distance(g.m @ f.point.v, f.point.v) < 1e-9
        if classify(g) == "loxodromic":
            x = fixed_points(g)[0].point
            # forward iterates of a generic point approach the attracting point
            ev = np.abs(np.linalg.eigvals(g.m))
            rate = np.log(ev.max() / ev.min())
            if rate < 0.05:  # too close to elliptic for a quick iteration
                continue
            p = np.array([0.3 + 0.1j, 1.0])
            for _ in range(int(40 / rate) + 1):
                p = normalize(g.m @ p)
            assert chordal_distance(p, x.v) < 1e-6


def _maps_circle_onto(g, src, tgt):
    img = g(src.boundary_samples(16))
    return np.max(np.abs(np.abs(img - tgt.center) - tgt.radius))


def test_schottky_generator_oracle():
    src = CircleSpec.from_center_radius(-2, 0.5)
    tgt = CircleSpec.from_center_radius(2 + 1j, 0.7)
    g = schottky_group([(src, tgt)]).generators[0]
    assert _maps_circle_onto(g, src, tgt) < 1e-12
    # infinity lies outside the source disk and must land inside the target
    assert abs(g(np.inf) - tgt.center) < tgt.radius
    # the source center is sent to infinity
    assert abs(g(src.center + 1e-9)) > 1e6


def test_schottky_examples():
    one = schottky_group([(CircleSpec.from_center_radius(-2, 1), CircleSpec.from_center_radius(2, 1))])
    g = one.generators[0]
    assert classify(g) == "loxodromic"
    assert np.max(np.abs(g.m.imag)) < 1e-15

    four = four_disk_schottky()
    assert len(four.generators) == 2
    assert all(np.max(np.abs(g.m.imag)) < 1e-15 for g in four.generators)

    shifted = four_disk_schottky(shifts=(0, 0.3j, 0, 0.3j))
    assert any(np.max(np.abs(g.m.imag)) > 1e-3 for g in shifted.generators)
    assert invariant_circle(shifted.generators, residual_tol=1e-6) is None

    with pytest.raises(SchottkyError, match="ping-pong violated"):
        schottky_group([(CircleSpec.from_center_radius(0, 1), CircleSpec.from_center_radius(1.5, 1))])


def test_ping_pong_groups_are_free():
    for group in (four_disk_schottky(), four_disk_schottky(shifts=(0, 0.3j, 0, 0.3j))):
        for layer in enumerate_layers(group.matrices(), group.labels, 6):
            m = layer.mats / layer.mats[:, :1, :1]
            off = np.abs(m[:, 0, 1]) + np.abs(m[:, 1, 0]) + np.abs(m[:, 1, 1] - 1)
            assert np.min(off) > 1e-6


def _disk_side(j):
    d = np.arccosh(1 / np.tan(np.pi / 8))
    t = np.tanh(d / 2)
    c = (1 + t * t) / (2 * t)
    return c * np.exp(1j * j * np.pi / 4), np.sqrt(c * c - 1)


def test_octagon_group(octagon):
    assert relator_residual(octagon.generators, octagon.labels, "a1 b1 A1 B1 a2 b2 A2 B2") < 1e-8
    for g in octagon.generators:
        assert classify(g) == "loxodromic"
        assert np.max(np.abs(g.m.imag)) < 1e-12
    # oracle: in the disk model each generator carries one octagon side circle onto another
    k = np.array([[1, -1j], [1, 1j]])
    for g, (s, t) in zip(octagon.generators, [(2, 0), (1, 3), (6, 4), (5, 7)]):
        gd = MoebiusMap(k @ g.m @ np.linalg.inv(k))
        cs, rs = _disk_side(s)
        ct, rt = _disk_side(t)
        z = cs + rs * np.exp(1j * np.linspace(0, 2 * np.pi, 9))
        assert np.max(np.abs(np.abs(gd(z) - ct) - rt)) < 1e-9
        # and preserves the unit circle
        u = np.exp(1j * np.linspace(0, 2 * np.pi, 9))
        assert np.max(np.abs(np.abs(gd(u)) - 1)) < 1e-9


def test_quasifuchsian_family(schottky4):
    assert quasifuchsian_family(schottky4, 0.0) is schottky4
    g02 = quasifuchsian_family(schottky4, 0.2)
    assert any(np.max(np.abs(g.m.imag)) > 1e-3 for g in g02.generators)
    dists = []
    for t in (0.2, 0.1, 0.05, 0.025):
        g = quasifuchsian_family(schottky4, t)
        dists.append(max(a.distance(b) for a, b in zip(g.generators, schottky4.generators)))
    assert all(a > b for a, b in zip(dists, dists[1:]))
    with pytest.raises(SchottkyError, match="family leaves Schottky locus"):
        quasifuchsian_family(schottky4, 1.0, direction=[-2, 0])


def test_invariant_circle_examples(schottky4, rng):
    sol = solve_invariant_circle(schottky4.generators)
    h = sol.circle.h
    ref = np.array([[0, 1j], [-1j, 0]])
    assert same_point(h.ravel(), ref.ravel(), tol=1e-9)
    assert sol.residual < 1e-10

    cyc = solve_invariant_circle([MoebiusMap([[2, 0], [0, 0.5]])])
    assert cyc.circle is not None and cyc.residual < 1e-10
    assert np.linalg.det(cyc.circle.h).real < 0

    assert invariant_circle(quasifuchsian_family(schottky4, 0.2).generators, residual_tol=1e-6) is None
    with pytest.raises(ValueError):
        invariant_circle([])


def test_invariant_circle_real_generators_always(rng):
    for _ in range(20):
        gens = [MoebiusMap(rng.standard_normal((2, 2))) for _ in range(3)]
        gens = [g for g in gens if abs(np.linalg.det(g.m)) > 0]
        sol = solve_invariant_circle(gens)
        assert sol.circle is not None and sol.residual < 1e-10


def test_invariant_circle_conjugated_group(schottky4, rng):
    # a conjugate of a Fuchsian group preserves the image of the real line
    h = random_moebius(rng)
    gens = [g.conjugate_by(h) for g in schottky4.generators]
    c = invariant_circle(gens)
    assert c is not None
    pts = h(np.array([-2.0, 0.5, 7.0]))
    for z in pts:
        assert abs(c.value([z, 1])) < 1e-8 * (1 + abs(z) ** 2)


def test_limit_set_examples(schottky4):
    cyc = limit_set_p1(schottky_group([(CircleSpec.from_center_radius(-2, 1), CircleSpec.from_center_radius(2, 1))]), 6)
    assert len(cyc) == 2

    pts = limit_samples(schottky4, 8).points
    assert len(pts) > 300
    conj = np.conj(pts)
    assert max(chordal_distance(p, q) for p, q in zip(pts, conj)) < 1e-8
    z = pts[:, 0] / pts[:, 1]
    inside = np.zeros(len(z), dtype=bool)
    for c in (-3, -1, 1, 3):
        inside |= np.abs(z - c) <= 0.6 + 1e-12
    assert inside.all()


def test_limit_set_forward_invariant(schottky4):
    small = limit_samples(schottky4, 6)
    big = limit_samples(schottky4, 7)
    worst = 0.0
    for g in schottky4.generators:
        for v, n in zip(small.points, small.word_lengths):
            if n >= 6:  # conjugating a full-length word needs two more letters
                continue
            img = g.m @ v
            worst = max(worst, min(chordal_distance(img, w) for w in big.points))
    assert worst < 1e-6


def test_limit_set_deterministic_and_errors(schottky4):
    a = limit_samples(schottky4, 5)
    b = limit_samples(schottky4, 5)
    assert np.array_equal(a.points, b.points) and a.words == b.words
    ell = MoebiusMap([[0, -1], [1, 0]])
    from veronese_groups.moebius import GroupSpec

    with pytest.raises(ValueError, match="no loxodromic word"):
        limit_set_p1(GroupSpec((ell,), ("a",)), 1)


def test_octagon_gap_shrinks(octagon):
    gaps = [max_circle_gap(limit_samples(octagon, L).points) for L in (4, 5, 6)]
    assert gaps[0] > gaps[1] > gaps[2]
