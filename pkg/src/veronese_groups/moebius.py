"""Moebius transformations, certified discrete groups and their limit sets on P^1."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Sequence, Union

import numpy as np
from scipy.spatial import cKDTree

from .projective import ProjPoint1, chordal_distance, normalize
from .words import Alphabet, enumerate_layers, evaluate_word

CLASS_TOL = 1e-9


class SchottkyError(ValueError):
    pass


def _det1(m) -> np.ndarray:
    m = np.array(m, dtype=complex).reshape(2, 2)
    det = np.linalg.det(m)
    if abs(det) < 1e-300:
        raise ValueError("singular Moebius matrix")
    return m / np.sqrt(det)


@dataclass(frozen=True, eq=False)
class MoebiusMap:
    """z -> (a z + b) / (c z + d), stored as a determinant-one lift."""

    m: np.ndarray

    def __post_init__(self):
        m = _det1(self.m)
        m.setflags(write=False)
        object.__setattr__(self, "m", m)

    @classmethod
    def from_entries(cls, a, b, c, d) -> "MoebiusMap":
        return cls([[a, b], [c, d]])

    @property
    def trace_sq(self) -> complex:
        return complex(np.trace(self.m) ** 2)

    def __matmul__(self, other):
        if isinstance(other, MoebiusMap):
            return MoebiusMap(self.m @ other.m)
        if isinstance(other, ProjPoint1):
            return ProjPoint1(self.m @ other.v)
        return NotImplemented

    def __call__(self, z):
        """Act on affine coordinates (numpy broadcasting; inf maps to a/c)."""
        (a, b), (c, d) = self.m
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (a * z + b) / (c * z + d)
            out = np.where(np.isinf(z), a / c if c != 0 else np.inf, out)
        return out if out.ndim else complex(out)

    def inverse(self) -> "MoebiusMap":
        (a, b), (c, d) = self.m
        return MoebiusMap([[d, -b], [-c, a]])

    def conjugate_by(self, h: "MoebiusMap") -> "MoebiusMap":
        return MoebiusMap(h.m @ self.m @ np.linalg.inv(h.m))

    def distance(self, other: "MoebiusMap") -> float:
        """Sup-norm distance between det-one lifts, minimized over the sign."""
        return float(min(np.max(np.abs(self.m - other.m)), np.max(np.abs(self.m + other.m))))

    def __repr__(self):
        return f"MoebiusMap({np.round(self.m, 12).tolist()})"


def is_identity(g: MoebiusMap, tol: float = CLASS_TOL) -> bool:
    n = normalize(g.m)
    return bool(np.max(np.abs(n - n[0, 0] * np.eye(2))) < tol)


def classify(g: MoebiusMap, tol: float = CLASS_TOL) -> str:
    """One of identity, elliptic, parabolic, loxodromic (by the squared trace)."""
    if is_identity(g, tol):
        return "identity"
    tau = g.trace_sq
    if abs(tau - 4) <= tol * 4:
        return "parabolic"
    if abs(tau.imag) <= tol * max(1.0, abs(tau)) and -tol <= tau.real < 4:
        return "elliptic"
    return "loxodromic"


@dataclass(frozen=True)
class FixedPoint:
    point: ProjPoint1
    role: str  # attracting | repelling | neutral | parabolic


def _eigvec(m: np.ndarray, lam: complex) -> np.ndarray:
    (a, b), (c, d) = m
    v1 = np.array([b, lam - a])
    v2 = np.array([lam - d, c])
    return v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2


def _eigenvalues(m: np.ndarray) -> tuple[complex, complex]:
    """Eigenvalues of a det-one matrix, larger modulus first."""
    t = np.trace(m)
    s = np.sqrt(t * t - 4 + 0j)
    lam = (t + s) / 2 if abs(t + s) >= abs(t - s) else (t - s) / 2
    return lam, 1 / lam


def fixed_points(g: MoebiusMap) -> list[FixedPoint]:
    kind = classify(g)
    if kind == "identity":
        raise ValueError("identity fixes every point")
    m = np.asarray(g.m)
    lam1, lam2 = _eigenvalues(m)
    if kind == "parabolic":
        return [FixedPoint(ProjPoint1(_eigvec(m, np.trace(m) / 2)), "parabolic")]
    p1 = ProjPoint1(_eigvec(m, lam1))
    p2 = ProjPoint1(_eigvec(m, lam2))
    if kind == "loxodromic":
        return [FixedPoint(p1, "attracting"), FixedPoint(p2, "repelling")]
    return [FixedPoint(p1, "neutral"), FixedPoint(p2, "neutral")]


def attracting_repelling(g: MoebiusMap) -> tuple[ProjPoint1, ProjPoint1]:
    fps = fixed_points(g)
    if fps[0].role != "attracting":
        raise ValueError(f"{classify(g)} element has no attracting fixed point")
    return fps[0].point, fps[1].point


# -- batched helpers used by word enumeration ------------------------------

def _batch_det(mats, det):
    if det is None:
        return mats[:, 0, 0] * mats[:, 1, 1] - mats[:, 0, 1] * mats[:, 1, 0]
    return np.asarray(det, dtype=complex)


def loxodromic_mask(mats: np.ndarray, tol: float = CLASS_TOL, det=None) -> np.ndarray:
    det = _batch_det(mats, det)
    tau = (mats[:, 0, 0] + mats[:, 1, 1]) ** 2 / det
    parabolic = np.abs(tau - 4) <= tol * 4
    elliptic = (np.abs(tau.imag) <= tol * np.maximum(1.0, np.abs(tau))) & (tau.real >= -tol) & (
        tau.real < 4
    )
    return ~(parabolic | elliptic)


def attracting_batch(mats: np.ndarray, det=None) -> np.ndarray:
    """Attracting eigenvectors of a stack of loxodromic 2x2 matrices, normalized."""
    det = _batch_det(mats, det)
    m = mats / np.sqrt(det)[:, None, None]
    a, b, c, d = m[:, 0, 0], m[:, 0, 1], m[:, 1, 0], m[:, 1, 1]
    t = a + d
    s = np.sqrt(t * t - 4 + 0j)
    lam = np.where(np.abs(t + s) >= np.abs(t - s), (t + s) / 2, (t - s) / 2)
    v1 = np.stack([b, lam - a], axis=1)
    v2 = np.stack([lam - d, c], axis=1)
    use1 = np.linalg.norm(v1, axis=1) >= np.linalg.norm(v2, axis=1)
    v = np.where(use1[:, None], v1, v2)
    k = np.argmax(np.abs(v), axis=1)
    piv = v[np.arange(len(v)), k]
    v = v / piv[:, None]
    v[np.arange(len(v)), k] = 1.0
    return v


def bloch(v: np.ndarray) -> np.ndarray:
    """Unit vectors on the sphere; Euclidean chord equals twice the sine distance."""
    z, w = v[:, 0], v[:, 1]
    n = np.abs(z) ** 2 + np.abs(w) ** 2
    zw = z * np.conj(w)
    return np.stack([2 * zw.real, 2 * zw.imag, np.abs(z) ** 2 - np.abs(w) ** 2], axis=1) / n[:, None]


def dedup_indices(v: np.ndarray, tol: float) -> np.ndarray:
    """Indices of a greedy, order-preserving subset with pairwise distance >= tol."""
    if len(v) == 0:
        return np.zeros(0, dtype=int)
    pts = bloch(v)
    tree = cKDTree(pts)
    neighbours = tree.query_ball_point(pts, r=2 * tol)
    removed = np.zeros(len(v), dtype=bool)
    keep = []
    for i in range(len(v)):
        if removed[i]:
            continue
        keep.append(i)
        removed[neighbours[i]] = True
    return np.array(keep, dtype=int)


# -- circles ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CircleSpec:
    """The circle {p : p^* h p = 0} on the Riemann sphere, h Hermitian with det < 0.

    For a finite disk the sign is fixed so that its interior is {p^* h p < 0}.
    """

    h: np.ndarray

    def __post_init__(self):
        h = np.array(self.h, dtype=complex).reshape(2, 2)
        if np.max(np.abs(h - h.conj().T)) > 1e-12 * max(1.0, np.max(np.abs(h))):
            raise ValueError("circle matrix must be Hermitian")
        h = (h + h.conj().T) / 2
        if np.linalg.det(h).real >= -1e-12 * np.max(np.abs(h)) ** 2:
            raise ValueError("circle matrix must have negative determinant")
        if h[0, 0].real < 0:
            h = -h
        h.setflags(write=False)
        object.__setattr__(self, "h", h)

    @classmethod
    def from_center_radius(cls, center: complex, radius: float) -> "CircleSpec":
        c = complex(center)
        return cls([[1, -c], [-np.conj(c), abs(c) ** 2 - radius**2]])

    @classmethod
    def real_axis(cls) -> "CircleSpec":
        return cls([[0, 1j], [-1j, 0]])

    @property
    def is_finite(self) -> bool:
        return abs(self.h[0, 0]) > 1e-12 * np.max(np.abs(self.h))

    @property
    def center(self) -> complex:
        if not self.is_finite:
            raise ValueError("circle through infinity has no center")
        return complex(-self.h[0, 1] / self.h[0, 0])

    @property
    def radius(self) -> float:
        if not self.is_finite:
            raise ValueError("circle through infinity has no radius")
        h = self.h / self.h[0, 0]
        return float(np.sqrt(abs(h[0, 1]) ** 2 - h[1, 1].real))

    def value(self, p) -> float:
        v = p.v if isinstance(p, ProjPoint1) else np.asarray(p, dtype=complex)
        return float((np.conj(v) @ self.h @ v).real)

    def boundary_samples(self, n: int = 64) -> np.ndarray:
        theta = 2 * np.pi * np.arange(n) / n
        return self.center + self.radius * np.exp(1j * theta)

    def __repr__(self):
        if self.is_finite:
            return f"CircleSpec(center={self.center:.6g}, radius={self.radius:.6g})"
        return f"CircleSpec({np.round(self.h, 12).tolist()})"


# -- groups and certificates ------------------------------------------------

@dataclass(frozen=True)
class PingPong:
    pairs: tuple[tuple[CircleSpec, CircleSpec], ...]

    def disks(self) -> list[CircleSpec]:
        return [c for pair in self.pairs for c in pair]


@dataclass(frozen=True)
class Relator:
    word: str


Certificate = Optional[Union[PingPong, Relator]]


def check_ping_pong(gens: Sequence[MoebiusMap], cert: PingPong, n_samples: int = 64) -> None:
    """Raise SchottkyError unless the disk data certify a Schottky group."""
    disks = cert.disks()
    if len(cert.pairs) != len(gens):
        raise SchottkyError("ping-pong violated: one disk pair per generator required")
    for d in disks:
        if not d.is_finite:
            raise SchottkyError("ping-pong violated: disks must be bounded")
    for i in range(len(disks)):
        for j in range(i + 1, len(disks)):
            gap = abs(disks[i].center - disks[j].center) - disks[i].radius - disks[j].radius
            if gap <= 0:
                raise SchottkyError("ping-pong violated: disks overlap")
    for g, (src, tgt) in zip(gens, cert.pairs):
        img = g(src.boundary_samples(n_samples))
        err = np.max(np.abs(np.abs(img - tgt.center) - tgt.radius))
        if err > 1e-9 * max(1.0, tgt.radius):
            raise SchottkyError("ping-pong violated: source circle not mapped onto target")
        outside = g(src.center + 2 * src.radius)
        if abs(outside - tgt.center) >= tgt.radius:
            raise SchottkyError("ping-pong violated: exterior not mapped into target disk")


def relator_residual(gens: Sequence[MoebiusMap], labels: Sequence[str], word: str) -> float:
    r = normalize(evaluate_word([g.m for g in gens], labels, word))
    return float(np.max(np.abs(r - r[0, 0] * np.eye(2))))


@dataclass(frozen=True)
class GroupSpec:
    generators: tuple[MoebiusMap, ...]
    labels: tuple[str, ...]
    word_budget: int = 6
    certificate: Certificate = None

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.labels) != len(self.generators):
            raise ValueError("one label per generator required")
        Alphabet.from_labels(self.labels)
        for g in self.generators:
            if is_identity(g):
                raise ValueError("generators must not be the identity")
        if isinstance(self.certificate, PingPong):
            check_ping_pong(self.generators, self.certificate)
        elif isinstance(self.certificate, Relator):
            if relator_residual(self.generators, self.labels, self.certificate.word) > 1e-8:
                raise ValueError("relator does not evaluate to the identity")

    def matrices(self) -> list[np.ndarray]:
        return [np.asarray(g.m) for g in self.generators]


def _default_labels(k: int) -> tuple[str, ...]:
    letters = "abcdefghijklmnopqrstuvwxyz"
    return tuple(letters[i] for i in range(k))


def schottky_generator(src: CircleSpec, tgt: CircleSpec) -> MoebiusMap:
    """Map the exterior of `src` onto the interior of `tgt`.

    z -> c_t - r_t r_s / (z - c_s): inversion in the source circle composed
    with the reflection across the vertical line through its center, then the
    similarity carrying the source disk onto the target disk. The determinant
    r_t r_s is positive, so real centers give a real matrix.
    """
    cs, rs = src.center, src.radius
    ct, rt = tgt.center, tgt.radius
    return MoebiusMap([[ct, -rt * rs - ct * cs], [1, -cs]])


def schottky_group(
    pairs: Sequence[tuple[CircleSpec, CircleSpec]],
    labels: Sequence[str] | None = None,
    word_budget: int = 8,
) -> GroupSpec:
    pairs = tuple((s, t) for s, t in pairs)
    gens = [schottky_generator(s, t) for s, t in pairs]
    return GroupSpec(
        tuple(gens),
        tuple(labels) if labels else _default_labels(len(gens)),
        word_budget,
        PingPong(pairs),
    )


def four_disk_schottky(shifts: Sequence[complex] = (0, 0, 0, 0), radius: float = 0.6) -> GroupSpec:
    """Disks at -3, 3, -1, 1 (plus optional center shifts), paired a: D(-3)->D(3), b: D(-1)->D(1)."""
    centers = [-3, 3, -1, 1]
    disks = [CircleSpec.from_center_radius(c + s, radius) for c, s in zip(centers, shifts)]
    return schottky_group([(disks[0], disks[1]), (disks[2], disks[3])])


OCTAGON_RELATOR = "a1 b1 A1 B1 a2 b2 A2 B2"


def _octagon_pairing(src_side: int, dst_side: int) -> np.ndarray:
    # Regular octagon with vertex angle pi/4 in the disk model; side j faces
    # the direction j*pi/4 at distance d with cosh d = cot(pi/8).
    d = np.arccosh(1 / np.tan(np.pi / 8))
    t = np.tanh(d / 2)
    c = (1 + t * t) / (2 * t)  # center of the side's geodesic circle
    big_c = c * np.exp(1j * dst_side * np.pi / 4)
    e = np.exp(-1j * (src_side + dst_side) * np.pi / 4)
    # reflection swapping the two sides, then reflection across the target side
    return np.array([[big_c * e, -1], [e, -np.conj(big_c)]])


def genus2_octagon_group(word_budget: int = 6) -> GroupSpec:
    """Side pairings of the regular octagon with vertex angle pi/4, in the upper half-plane.

    Generators satisfy [a1, b1][a2, b2] = 1 and have real entries.
    """
    cayley = np.array([[1, -1j], [1, 1j]])  # upper half-plane -> disk
    cayley_inv = np.linalg.inv(cayley)
    gens = []
    for src, dst in [(2, 0), (1, 3), (6, 4), (5, 7)]:
        m = _det1(cayley_inv @ _octagon_pairing(src, dst) @ cayley)
        k = np.argmax(np.abs(m))
        m = m * abs(m.flat[k]) / m.flat[k]
        if np.max(np.abs(m.imag)) > 1e-12:
            raise RuntimeError("octagon generator is not real")
        gens.append(MoebiusMap(m.real))
    return GroupSpec(tuple(gens), ("a1", "b1", "a2", "b2"), word_budget, Relator(OCTAGON_RELATOR))


def quasifuchsian_family(
    base: GroupSpec, t: float, direction: Sequence[complex] | None = None
) -> GroupSpec:
    """Deform a real Schottky group by moving each target disk by t * direction[i].

    The default direction lifts every target disk by i. Raises SchottkyError
    when the moved disks stop being disjoint.
    """
    cert = base.certificate
    if not isinstance(cert, PingPong):
        raise ValueError("base group needs a ping-pong certificate")
    if any(abs(d.center.imag) > 1e-12 for d in cert.disks()):
        raise ValueError("base disks must be centered on the real axis")
    k = len(cert.pairs)
    direction = [1j] * k if direction is None else [complex(x) for x in direction]
    if len(direction) != k:
        raise ValueError("one displacement per generator required")
    if t == 0:
        return base
    pairs = []
    for (src, tgt), delta in zip(cert.pairs, direction):
        moved = CircleSpec.from_center_radius(tgt.center + t * delta, tgt.radius)
        pairs.append((src, moved))
    try:
        return schottky_group(pairs, base.labels, base.word_budget)
    except SchottkyError as exc:
        raise SchottkyError(f"family leaves Schottky locus at t={t}") from exc


# -- invariant circles --------------------------------------------------------

_HERM2_BASIS = np.array(
    [
        [[1, 0], [0, 0]],
        [[0, 1 / np.sqrt(2)], [1 / np.sqrt(2), 0]],
        [[0, 1j / np.sqrt(2)], [-1j / np.sqrt(2), 0]],
        [[0, 0], [0, 1]],
    ],
    dtype=complex,
)


@dataclass
class CircleSolve:
    circle: Optional[CircleSpec]
    residual: float
    singular_values: np.ndarray = field(repr=False)


def _circle_residual(mats: Sequence[np.ndarray], h: np.ndarray, signs=None) -> float:
    nh = np.linalg.norm(h)
    signs = signs or [1] * len(mats)
    return max(np.linalg.norm(g.conj().T @ h @ g - s * h) / nh for g, s in zip(mats, signs))


def _sign_patterns(gens: Sequence[MoebiusMap], tol: float = 1e-9):
    """Per-generator signs s with g^* h g = s h to try, all +1 first.

    A det-one lift can only reverse the sign of an invariant circle form when
    it swaps the two sides of the circle, i.e. comes from a real matrix of
    negative determinant; then trace^2 is real and not positive.
    """
    flippable = [
        k for k, g in enumerate(gens)
        if abs(g.trace_sq.imag) <= tol * max(1.0, abs(g.trace_sq)) and g.trace_sq.real <= tol
    ]
    for r in range(len(flippable) + 1):
        for subset in combinations(flippable, r):
            yield [-1 if k in subset else 1 for k in range(len(gens))]


def solve_invariant_circle(
    gens: Sequence[MoebiusMap],
    residual_tol: float = 1e-8,
    det_tol: float = 1e-8,
    seed: int = 0,
) -> CircleSolve:
    """Search for a Hermitian h with det h < 0 and g^* h g = +-h for every generator.

    The sign is -1 only for generators that swap the two sides of the circle
    (real matrices of negative determinant, up to conjugation).
    """
    if not gens:
        raise ValueError("empty generator list")
    mats = [np.asarray(g.m) for g in gens]
    best = np.inf
    s_best = None
    for signs in _sign_patterns(gens):
        rows = []
        for g, sg in zip(mats, signs):
            block = []
            for e in _HERM2_BASIS:
                d = g.conj().T @ e @ g - sg * e
                block.append([d[0, 0].real, d[1, 1].real, d[0, 1].real, d[0, 1].imag])
            rows.append(np.array(block).T)
        _, s, vt = np.linalg.svd(np.vstack(rows))
        if s_best is None:
            s_best = s
        for x in _null_candidates(s, vt, seed):
            h = np.tensordot(x, _HERM2_BASIS, axes=1)
            res = _circle_residual(mats, h, signs)
            det = np.linalg.det(h).real / np.linalg.norm(h) ** 2
            best = min(best, res)
            if res < residual_tol and det < -det_tol:
                return CircleSolve(CircleSpec(h / np.linalg.norm(h)), res, s)
    return CircleSolve(None, best, s_best)


def _null_candidates(s: np.ndarray, vt: np.ndarray, seed: int, n_random: int = 32):
    """Smallest right singular vector, then nullspace basis and random combinations."""
    n = vt.shape[1]
    s_full = np.concatenate([s, np.zeros(n - len(s))])
    loose = s_full <= 1e-6 * max(s_full[0], 1.0)
    basis = vt[loose] if loose.any() else vt[-1:]
    yield vt[-1]
    for b in basis:
        yield b
    if len(basis) > 1:
        rng = np.random.default_rng(seed)
        for _ in range(n_random):
            yield rng.standard_normal(len(basis)) @ basis


def invariant_circle(gens: Sequence[MoebiusMap], **kw) -> Optional[CircleSpec]:
    return solve_invariant_circle(gens, **kw).circle


# -- limit sets ---------------------------------------------------------------

@dataclass
class LimitSamples:
    points: np.ndarray  # (n, 2) normalized representatives
    words: list[str]
    word_lengths: np.ndarray

    def as_points(self) -> list[ProjPoint1]:
        return [ProjPoint1(v) for v in self.points]


def limit_samples(
    group: GroupSpec, budget: int | None = None, cap: int | None = None, dedup_tol: float = 1e-6
) -> LimitSamples:
    """Attracting fixed points of loxodromic reduced words of length <= budget."""
    budget = group.word_budget if budget is None else budget
    alphabet = Alphabet.from_labels(group.labels)
    pts, words, lengths = [], [], []
    for layer in enumerate_layers(group.matrices(), group.labels, budget):
        mask = loxodromic_mask(layer.mats, det=layer.dets)
        if not mask.any():
            continue
        pts.append(attracting_batch(layer.mats[mask], det=layer.dets[mask]))
        words.extend(alphabet.spell(w) for w in layer.words[mask])
        lengths.append(np.full(int(mask.sum()), layer.length))
    if not pts:
        raise ValueError("no loxodromic word found within the budget")
    allp = np.vstack(pts)
    keep = dedup_indices(allp, dedup_tol)
    if cap is not None:
        keep = keep[:cap]
    lengths_all = np.concatenate(lengths)
    return LimitSamples(allp[keep], [words[i] for i in keep], lengths_all[keep])


def limit_set_p1(
    group: GroupSpec, budget: int | None = None, cap: int | None = None
) -> list[ProjPoint1]:
    return limit_samples(group, budget, cap).as_points()


def max_circle_gap(points: np.ndarray) -> float:
    """Largest chordal gap between consecutive points of a set lying on the real circle."""
    v = np.asarray(points, dtype=complex)
    # rotate each representative to be real
    k = np.argmax(np.abs(v), axis=1)
    ph = v[np.arange(len(v)), k]
    v = (v / (ph / np.abs(ph))[:, None]).real
    ang = np.sort(np.mod(2 * np.arctan2(v[:, 0], v[:, 1]), 2 * np.pi))
    gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * np.pi]]))
    return float(np.sin(np.max(gaps) / 2))


__all__ = [
    "MoebiusMap",
    "CircleSpec",
    "GroupSpec",
    "PingPong",
    "Relator",
    "SchottkyError",
    "classify",
    "fixed_points",
    "attracting_repelling",
    "schottky_group",
    "four_disk_schottky",
    "genus2_octagon_group",
    "quasifuchsian_family",
    "invariant_circle",
    "solve_invariant_circle",
    "limit_set_p1",
    "limit_samples",
    "max_circle_gap",
    "chordal_distance",
]
