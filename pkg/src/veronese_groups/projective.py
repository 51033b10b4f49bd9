"""Homogeneous coordinates on P^1 and P^2, projective and pseudo-projective maps.

Points and maps are stored with the "largest entry equals one" convention
(see `normalize`), which makes convergence in the space of pseudo-projective
maps an ordinary entrywise Cauchy test.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

DEFAULT_TOL = 1e-9


class ProjectiveError(ValueError):
    """Raised for degenerate projective data (zero vectors, coincident points...)."""


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def normalize(v) -> np.ndarray:
    """Scale `v` so that its largest-modulus entry is exactly 1.

    Ties go to the lowest index; moduli within a few ulps of the maximum
    count as tied, so that normalizing twice is a no-op. Works on vectors and
    on matrices (entries are scanned in row-major order).
    """
    v = np.asarray(v, dtype=complex)
    flat = v.ravel()
    if flat.size == 0 or not np.any(flat):
        raise ProjectiveError("zero representative")
    mods = np.abs(flat)
    k = int(np.argmax(mods >= mods.max() * (1 - 8 * np.finfo(float).eps)))
    out = v / flat[k]
    out.ravel()[k] = 1.0
    return out


@dataclass(frozen=True, eq=False)
class ProjPoint1:
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "v", _frozen(normalize(np.reshape(self.v, 2))))

    @classmethod
    def from_chart(cls, z) -> "ProjPoint1":
        """The point [z, 1]; ``z = inf`` gives [1, 0]."""
        if z == np.inf or (isinstance(z, complex) and np.isinf(z)):
            return cls([1, 0])
        return cls([z, 1])

    def chart(self) -> complex:
        """Affine coordinate z/w (complex infinity when w = 0)."""
        z, w = self.v
        if w == 0:
            return complex(np.inf)
        return complex(z / w)

    def __repr__(self):
        return f"ProjPoint1({np.round(self.v, 12).tolist()})"


@dataclass(frozen=True, eq=False)
class ProjPoint2:
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "v", _frozen(normalize(np.reshape(self.v, 3))))

    def __repr__(self):
        return f"ProjPoint2({np.round(self.v, 12).tolist()})"


@dataclass(frozen=True, eq=False)
class ProjLine:
    """The line {p : c[0] p[0] + c[1] p[1] + c[2] p[2] = 0} (no conjugation)."""

    c: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "c", _frozen(normalize(np.reshape(self.c, 3))))

    def incidence(self, p) -> float:
        """Scale-free incidence |c.p| / (|c| |p|)."""
        p = _coords(p)
        return float(abs(self.c @ p) / (np.linalg.norm(self.c) * np.linalg.norm(p)))

    def contains(self, p, tol: float = DEFAULT_TOL) -> bool:
        return self.incidence(p) < tol

    def __repr__(self):
        return f"ProjLine({np.round(self.c, 12).tolist()})"


@dataclass(frozen=True, eq=False)
class ProjMap3:
    m: np.ndarray

    def __post_init__(self):
        m = np.array(self.m, dtype=complex).reshape(3, 3)
        s = np.linalg.svd(m, compute_uv=False)
        if s[0] == 0 or s[-1] <= DEFAULT_TOL * s[0]:
            raise ProjectiveError("matrix is not invertible")
        object.__setattr__(self, "m", _frozen(m))

    def unimodular(self) -> np.ndarray:
        """A lift with |det| = 1 (the phase of the stored matrix is kept)."""
        return np.asarray(self.m) / abs(np.linalg.det(self.m)) ** (1.0 / 3.0)

    def __matmul__(self, other):
        if isinstance(other, ProjMap3):
            return ProjMap3(self.m @ other.m)
        if isinstance(other, ProjPoint2):
            return ProjPoint2(self.m @ other.v)
        if isinstance(other, ProjLine):
            return self.apply_line(other)
        return NotImplemented

    def apply_line(self, line: ProjLine) -> ProjLine:
        """Image of a line: coefficients transform by the inverse on the right."""
        return ProjLine(line.c @ np.linalg.inv(self.m))

    def inverse(self) -> "ProjMap3":
        return ProjMap3(np.linalg.inv(self.m))

    def __repr__(self):
        return f"ProjMap3({np.round(normalize(self.m), 10).tolist()})"


@dataclass(frozen=True, eq=False)
class PseudoProjMap:
    m: np.ndarray
    kernel_dim: int = -1

    def __post_init__(self):
        m = normalize(np.reshape(self.m, (3, 3)))
        object.__setattr__(self, "m", _frozen(m))
        object.__setattr__(self, "kernel_dim", 3 - numerical_rank(m))

    def image(self) -> "ProjPoint2 | ProjLine | None":
        """Projectivized image: a point for rank 1, a line for rank 2."""
        u, s, _ = np.linalg.svd(self.m)
        r = 3 - self.kernel_dim
        if r == 1:
            return ProjPoint2(u[:, 0])
        if r == 2:
            return ProjLine(np.conj(u[:, 2]))
        return None

    def apply(self, p: ProjPoint2, tol: float = DEFAULT_TOL) -> ProjPoint2:
        w = self.m @ p.v
        if np.linalg.norm(w) <= tol * np.linalg.norm(p.v):
            raise ProjectiveError("point lies in the kernel")
        return ProjPoint2(w)

    def __repr__(self):
        return f"PseudoProjMap({np.round(self.m, 10).tolist()}, kernel_dim={self.kernel_dim})"


def _coords(p) -> np.ndarray:
    if isinstance(p, (ProjPoint1, ProjPoint2)):
        return p.v
    if isinstance(p, ProjLine):
        return p.c
    return np.asarray(p, dtype=complex)


def numerical_rank(m, tol: float = DEFAULT_TOL) -> int:
    s = np.linalg.svd(np.asarray(m, dtype=complex), compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def chordal_distance(p, q) -> float:
    """Fubini-Study sine distance sqrt(1 - |<p,q>|^2 / (|p|^2 |q|^2)).

    Evaluated through the Lagrange identity (sum of squared 2x2 minors) so
    that nearby points keep full relative precision.
    """
    p = _coords(p)
    q = _coords(q)
    n = len(p)
    minors = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            minors += abs(p[i] * q[j] - p[j] * q[i]) ** 2
    d = np.sqrt(minors) / (np.linalg.norm(p) * np.linalg.norm(q))
    return float(min(d, 1.0))


def same_point(p, q, tol: float = DEFAULT_TOL) -> bool:
    return chordal_distance(p, q) < tol


def line_through(p: ProjPoint2, q: ProjPoint2, tol: float = DEFAULT_TOL) -> ProjLine:
    if same_point(p, q, tol):
        raise ProjectiveError("line undetermined")
    return ProjLine(np.cross(p.v, q.v))


def in_general_position(pts: Sequence, tol: float = DEFAULT_TOL) -> bool:
    """True iff no three of the four points are collinear (scale-free test)."""
    vs = [_coords(p) for p in pts]
    if len(vs) != 4:
        raise ProjectiveError("expected four points")
    for a, b, c in combinations(vs, 3):
        det = np.linalg.det(np.array([a, b, c]))
        scale = np.linalg.norm(a) * np.linalg.norm(b) * np.linalg.norm(c)
        if abs(det) <= tol * scale:
            return False
    return True


def fixing_maps(pts: Sequence) -> np.ndarray:
    """Basis of the linear space of 3x3 matrices g with g p parallel to p for all p.

    Each constraint is g p x p = 0, which is linear in the nine entries of g.
    Returns an array of shape (k, 3, 3) with k the numerical nullity.
    """
    blocks = []
    for p in pts:
        p = _coords(p)
        p = p / np.linalg.norm(p)
        cross = np.array([[0, -p[2], p[1]], [p[2], 0, -p[0]], [-p[1], p[0], 0]])
        # g p = (I kron p^T) vec(g) for row-major vec; (g p) x p = -[p]_x g p
        blocks.append(-cross @ np.kron(np.eye(3), p[None, :]))
    a = np.vstack(blocks)
    _, s, vh = np.linalg.svd(a)
    s = np.concatenate([s, np.zeros(9 - len(s))])
    null = vh[s <= DEFAULT_TOL * max(s[0], 1.0)]
    return np.conj(null).reshape(-1, 3, 3)


def pseudo_projective_limit(
    seq: Sequence, tol: float = DEFAULT_TOL, window: int = 5
) -> PseudoProjMap:
    """Limit of a sequence of maps as points of QP(3, C).

    Every term is normalized; the last `window` terms must agree entrywise
    within ``10 * tol``. The last term is returned as the limit.
    """
    mats = [normalize(m.m if isinstance(m, (ProjMap3, PseudoProjMap)) else m) for m in seq]
    if len(mats) < 2:
        raise ProjectiveError("need at least two terms")
    tail = mats[-window:]
    ref = tail[-1]
    spread = max(np.max(np.abs(t - ref)) for t in tail)
    if spread > 10 * tol:
        raise ProjectiveError("no pseudo-projective limit at given budget")
    return PseudoProjMap(ref)


def normalized_powers(m, exponents: Sequence[int]) -> list[np.ndarray]:
    """Normalized powers m**n for increasing n, computed without overflow."""
    m = normalize(np.asarray(m.m if isinstance(m, ProjMap3) else m, dtype=complex))
    out = []
    acc = np.eye(m.shape[0], dtype=complex)
    cur = 0
    for n in exponents:
        if n < cur:
            raise ValueError("exponents must be nondecreasing")
        step = n - cur
        base = m.copy()
        while step:
            if step & 1:
                acc = normalize(acc @ base)
            base = normalize(base @ base)
            step >>= 1
        cur = n
        out.append(acc.copy())
    return out


def kernel_locus(m: PseudoProjMap) -> "None | ProjPoint2 | ProjLine":
    """Projectivized kernel: nothing, a point, or a line."""
    _, _, vh = np.linalg.svd(np.asarray(m.m))
    if m.kernel_dim == 0:
        return None
    if m.kernel_dim == 1:
        return ProjPoint2(np.conj(vh[2]))
    if m.kernel_dim == 2:
        # rank one: m = u v^H, kernel = {p : v^H p = 0}
        return ProjLine(vh[0])
    raise ProjectiveError("zero matrix has no projectivization")


def classify_projective(m, tol: float = 1e-7) -> str:
    """Dynamical type of a projective map of P^2 from its spectrum.

    ``strongly loxodromic`` when the three eigenvalue moduli are pairwise
    distinct, ``loxodromic`` when they are not all equal, otherwise
    ``elliptic`` (diagonalizable) or ``parabolic``.
    """
    a = np.asarray(m.m if isinstance(m, ProjMap3) else m, dtype=complex)
    a = a / abs(np.linalg.det(a)) ** (1.0 / 3.0)
    ev = np.linalg.eigvals(a)
    mods = np.sort(np.abs(ev))
    if _is_scalar(a, tol):
        return "identity"
    if mods[2] - mods[0] > tol * mods[2]:
        if mods[1] - mods[0] > tol * mods[2] and mods[2] - mods[1] > tol * mods[2]:
            return "strongly loxodromic"
        return "loxodromic"
    # equal moduli: unipotent part decides
    if _diagonalizable(a, ev, tol):
        return "elliptic"
    return "parabolic"


def _is_scalar(a: np.ndarray, tol: float) -> bool:
    n = normalize(a)
    return bool(np.max(np.abs(n - n[0, 0] * np.eye(3))) < tol)


def _diagonalizable(a: np.ndarray, ev: np.ndarray, tol: float) -> bool:
    # minimal polynomial test on clustered eigenvalues
    clusters: list[complex] = []
    for e in ev:
        if not any(abs(e - c) < 1e-4 for c in clusters):
            clusters.append(e)
    prod = np.eye(3, dtype=complex)
    for c in clusters:
        prod = prod @ (a - c * np.eye(3))
    return bool(np.max(np.abs(prod)) < 1e-6)


def dedup_points(vs: np.ndarray, tol: float = 1e-6) -> np.ndarray:
    """Greedy order-preserving deduplication of projective points by chordal distance.

    Points are embedded as rank-one projectors p p^* / |p|^2, whose Frobenius
    distance is sqrt(2) times the sine distance. Returns kept indices.
    """
    vs = np.asarray(vs, dtype=complex)
    if len(vs) == 0:
        return np.zeros(0, dtype=int)
    u = vs / np.linalg.norm(vs, axis=1)[:, None]
    proj = np.einsum("ni,nj->nij", u, np.conj(u)).reshape(len(u), -1)
    emb = np.hstack([proj.real, proj.imag])
    tree = cKDTree(emb)
    neighbours = tree.query_ball_point(emb, r=np.sqrt(2) * tol)
    removed = np.zeros(len(vs), dtype=bool)
    keep = []
    for i in range(len(vs)):
        if not removed[i]:
            keep.append(i)
            removed[neighbours[i]] = True
    return np.array(keep, dtype=int)
