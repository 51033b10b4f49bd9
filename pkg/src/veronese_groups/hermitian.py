"""Hermitian forms of signature (2, 1) and the complex ball they bound.

Includes the invariant-form solver used to decide whether an iota-lifted
group is complex hyperbolic, the quartic cut out on the Veronese curve by the
boundary of a ball, and the projection from the complex ball to the real
hyperbolic plane.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .projective import ProjMap3, ProjPoint2, ProjectiveError, dedup_points
from .words import enumerate_layers

ANTI_DIAGONAL = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]], dtype=complex)
# invariant form of iota(PSL(2, R)); equals g0^T diag(1, 1, -1) g0
FUCHSIAN_FORM = np.array([[0, 0, -2], [0, 1, 0], [-2, 0, 0]], dtype=complex)


class NotHermitianError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class HermitianForm3:
    h: np.ndarray
    tol: float = 1e-9
    signature: tuple[int, int, int] = field(init=False)

    def __post_init__(self):
        h = np.array(self.h, dtype=complex).reshape(3, 3)
        scale = max(1.0, float(np.max(np.abs(h))))
        if np.max(np.abs(h - h.conj().T)) > 1e-12 * scale:
            raise NotHermitianError("matrix is not Hermitian")
        h = (h + h.conj().T) / 2
        h.setflags(write=False)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "signature", _signature(h, self.tol))

    def value(self, v) -> float:
        return evaluate(self, v)

    def in_ball(self, v) -> bool:
        return evaluate(self, v) < 0

    @property
    def is_real(self) -> bool:
        return bool(np.max(np.abs(self.h.imag)) <= 1e-12 * np.max(np.abs(self.h)))


def _signature(h: np.ndarray, tol: float) -> tuple[int, int, int]:
    ev = np.linalg.eigvalsh(h)
    thr = tol * max(np.max(np.abs(ev)), 1e-300)
    return (int(np.sum(ev > thr)), int(np.sum(ev < -thr)), int(np.sum(np.abs(ev) <= thr)))


def signature(h: HermitianForm3) -> tuple[int, int, int]:
    return h.signature


def _vec(v) -> np.ndarray:
    return v.v if isinstance(v, ProjPoint2) else np.asarray(v, dtype=complex)


def evaluate(h: HermitianForm3, v) -> float:
    """v^* h v; the imaginary part must vanish up to rounding."""
    v = _vec(v)
    val = np.conj(v) @ h.h @ v
    scale = max(1.0, float(np.max(np.abs(h.h)))) * float(np.vdot(v, v).real)
    if abs(val.imag) > 1e-10 * scale:
        raise NotHermitianError("form value has an imaginary part")
    return float(val.real)


# -- invariant forms ----------------------------------------------------------

def _herm3_basis() -> np.ndarray:
    basis = []
    for i in range(3):
        e = np.zeros((3, 3), dtype=complex)
        e[i, i] = 1
        basis.append(e)
    r = 1 / np.sqrt(2)
    for i, j in ((0, 1), (0, 2), (1, 2)):
        e = np.zeros((3, 3), dtype=complex)
        e[i, j] = e[j, i] = r
        basis.append(e)
        e = np.zeros((3, 3), dtype=complex)
        e[i, j], e[j, i] = 1j * r, -1j * r
        basis.append(e)
    return np.array(basis)


HERM3_BASIS = _herm3_basis()
_UPPER = [(0, 1), (0, 2), (1, 2)]


def _real_coords(d: np.ndarray) -> list[float]:
    out = [d[i, i].real for i in range(3)]
    for i, j in _UPPER:
        out.extend([d[i, j].real, d[i, j].imag])
    return out


@dataclass
class HermitianSolve:
    form: Optional[HermitianForm3]
    residual: float
    singular_values: np.ndarray = field(repr=False)
    nullity: int = 0


def invariance_residual(gens: Sequence[np.ndarray], h: np.ndarray) -> float:
    """max over generators of |g^* h g - h| / |h| for unimodular lifts."""
    nh = np.linalg.norm(h)
    return float(max(np.linalg.norm(g.conj().T @ h @ g - h) / nh for g in gens))


def _unimodular(g) -> np.ndarray:
    if isinstance(g, ProjMap3):
        return g.unimodular()
    g = np.asarray(g, dtype=complex)
    det = np.linalg.det(g)
    if abs(det) < 1e-300:
        raise ProjectiveError("generator is not invertible")
    return g / abs(det) ** (1 / 3)


def solve_invariant_hermitian(
    gens: Sequence,
    residual_tol: float = 1e-8,
    seed: int = 0,
    n_random: int = 64,
) -> HermitianSolve:
    """Find a signature (2, 1) form h with g^* h g = h for all generators.

    With |det g| = 1 the relation g^* h g = lambda h forces lambda = 1, so the
    problem is the real-linear system on the 9-dimensional space of Hermitian
    matrices. The stacked constraint matrix is solved through its smallest
    singular directions; when the nullspace is larger than one dimension a
    basis and seeded random combinations are scanned for the right signature.
    """
    if not gens:
        raise ValueError("empty generator list")
    mats = [_unimodular(g) for g in gens]
    blocks = []
    for g in mats:
        cols = [_real_coords(g.conj().T @ e @ g - e) for e in HERM3_BASIS]
        blocks.append(np.array(cols).T)
    a = np.vstack(blocks)
    _, s, vt = np.linalg.svd(a)
    s_full = np.concatenate([s, np.zeros(9 - len(s))])
    loose = s_full <= 1e-6 * max(s_full[0], 1.0)
    basis = vt[loose] if loose.any() else vt[-1:]

    def candidates():
        yield vt[-1]
        yield from basis
        if len(basis) > 1:
            rng = np.random.default_rng(seed)
            for _ in range(n_random):
                yield rng.standard_normal(len(basis)) @ basis

    best = np.inf
    for x in candidates():
        h = np.tensordot(x, HERM3_BASIS, axes=1)
        res = invariance_residual(mats, h)
        best = min(best, res)
        if res >= residual_tol:
            continue
        for sign in (1, -1):
            form = HermitianForm3(sign * h / np.linalg.norm(h))
            if form.signature == (2, 1, 0):
                return HermitianSolve(form, res, s_full, int(loose.sum()))
    return HermitianSolve(None, float(best), s_full, int(loose.sum()))


def invariant_hermitian_form(gens: Sequence, **kw) -> Optional[HermitianForm3]:
    return solve_invariant_hermitian(gens, **kw).form


# -- the quartic on the Veronese curve ---------------------------------------

QUARTIC_MONOMIALS = ("1", "x", "y", "x2", "xy", "y2", "r2x", "r2y", "r2", "r4")


def _monomials(x, y) -> list:
    r2 = x * x + y * y
    return [np.ones_like(x), x, y, x * x, x * y, y * y, r2 * x, r2 * y, r2, r2 * r2]


@dataclass(frozen=True, eq=False)
class QuarticCurve:
    """F(x, y) = <psi(1, x + iy), psi(1, x + iy)> as a real polynomial.

    `coeffs` follow QUARTIC_MONOMIALS, where r2 = x^2 + y^2 and r4 = r2^2.
    `a` holds the source form entries a_ij = b_ij + i c_ij.
    """

    coeffs: np.ndarray
    a: np.ndarray

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return sum(c * m for c, m in zip(self.coeffs, _monomials(x, y)))

    def as_dict(self) -> dict[str, float]:
        return dict(zip(QUARTIC_MONOMIALS, map(float, self.coeffs)))


def boundary_quartic(h: HermitianForm3, strict: bool = True) -> QuarticCurve:
    """Quartic whose zero set is the preimage of the ball boundary on the curve.

    With ``strict`` the chart normalization is enforced: psi(inf) = [0, 0, 1]
    must not be a null point of h, otherwise the chart misses part of the
    boundary circle.
    """
    a = np.asarray(h.h)
    if strict and abs(a[2, 2]) <= 1e-12 * np.max(np.abs(a)):
        raise ValueError("renormalize: psi(inf) on the null set")
    a11, a22, a33 = a[0, 0].real, a[1, 1].real, a[2, 2].real
    b12, c12 = a[0, 1].real, a[0, 1].imag
    b13, c13 = a[0, 2].real, a[0, 2].imag
    b23, c23 = a[1, 2].real, a[1, 2].imag
    coeffs = np.array(
        [
            a11,
            4 * b12,
            -4 * c12,
            2 * b13,
            -4 * c13,
            -2 * b13,
            4 * b23,
            -4 * c23,
            4 * a22,
            a33,
        ]
    )
    return QuarticCurve(coeffs, a.copy())


LAPLACIAN_MONOMIALS = ("1", "x", "y", "r2")


@dataclass(frozen=True, eq=False)
class PlaneQuadratic:
    coeffs: np.ndarray  # over LAPLACIAN_MONOMIALS

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        c0, cx, cy, cr = self.coeffs
        return c0 + cx * x + cy * y + cr * (x * x + y * y)


def quartic_laplacian(q: QuarticCurve) -> PlaneQuadratic:
    """16 (a33 (x^2 + y^2) + a22 + 2 b23 x - 2 c23 y)."""
    a = q.a
    a22, a33 = a[1, 1].real, a[2, 2].real
    b23, c23 = a[1, 2].real, a[1, 2].imag
    return PlaneQuadratic(16 * np.array([a22, 2 * b23, -2 * c23, a33]))


@dataclass
class CensusReport:
    min_f: float
    max_f: float
    n_negative: int
    n_zero: int
    n_positive: int
    value_at_infinity: float
    zero_samples: np.ndarray  # complex chart points on or next to F = 0
    argmin: complex
    resolution: int
    radius: float

    def summary(self) -> str:
        return (
            f"min F = {self.min_f:.6g} at z = {self.argmin:.6g}, max F = {self.max_f:.6g}; "
            f"negative {self.n_negative}, zero {self.n_zero}, positive {self.n_positive}; "
            f"F(inf) = {self.value_at_infinity:.6g}; boundary samples {len(self.zero_samples)}"
        )


def veronese_ball_census(
    h: HermitianForm3, resolution: int = 400, radius: float = 4.0, zero_tol: float = 1e-9
) -> CensusReport:
    """Sample the sign of F on a chart grid plus psi(inf).

    The grid has ``resolution`` intervals per axis (so ``resolution + 1``
    points, symmetric about 0). Samples with |F| <= zero_tol * max|h| count
    as zero; boundary samples also include grid points where F changes sign
    against the right or upper neighbour.
    """
    q = boundary_quartic(h, strict=False)
    axis = np.linspace(-radius, radius, resolution + 1)
    x, y = np.meshgrid(axis, axis, indexing="xy")
    f = q(x, y)
    thr = zero_tol * max(1.0, float(np.max(np.abs(h.h))))
    f_inf = float(h.h[2, 2].real)
    vals = np.append(f.ravel(), f_inf)
    zero = np.abs(f) <= thr
    sign = np.sign(np.where(zero, 0.0, f))
    flip = np.zeros_like(zero)
    flip[:, :-1] |= sign[:, :-1] * sign[:, 1:] < 0
    flip[:-1, :] |= sign[:-1, :] * sign[1:, :] < 0
    boundary = zero | flip
    k = int(np.argmin(f))
    return CensusReport(
        min_f=float(np.min(vals)),
        max_f=float(np.max(vals)),
        n_negative=int(np.sum(vals < -thr)),
        n_zero=int(np.sum(np.abs(vals) <= thr)),
        n_positive=int(np.sum(vals > thr)),
        value_at_infinity=f_inf,
        zero_samples=(x + 1j * y)[boundary],
        argmin=complex(x.ravel()[k], y.ravel()[k]),
        resolution=resolution,
        radius=radius,
    )


# -- projection to the real hyperbolic plane -------------------------------

@dataclass(frozen=True)
class RealProjectionResult:
    point: ProjPoint2
    eta_sq: complex

    @property
    def real_coords(self) -> np.ndarray:
        return np.asarray(self.point.v).real


def real_projection_pi(
    v, h: HermitianForm3, tol: float = 1e-12, hermitian_reading: bool = False
) -> RealProjectionResult:
    """[conj(eta) v + eta conj(v)] with eta^2 = -v^T h v.

    The bilinear value v^T h v makes the result independent of the chosen
    representative. ``hermitian_reading=True`` uses eta^2 = -v^* h v instead
    (diagnostic only: that variant depends on the phase of v).
    """
    if not h.is_real:
        raise ValueError("projection needs a real form")
    v = _vec(v)
    hr = h.h.real
    beta = (np.conj(v) @ hr @ v) if hermitian_reading else (v @ hr @ v)
    if abs(beta) <= tol * float(np.vdot(v, v).real) * np.max(np.abs(hr)):
        raise ProjectiveError("projection undefined on bilinear null locus")
    eta = np.sqrt(-complex(beta))
    w = np.conj(eta) * v + eta * np.conj(v)
    w = w.real
    if not np.any(w):
        raise ProjectiveError("projection undefined on bilinear null locus")
    return RealProjectionResult(ProjPoint2(w), complex(-beta))


# -- Chen-Greenberg sampling --------------------------------------------------

def chen_greenberg_sample(
    gens: Sequence,
    h: HermitianForm3,
    base,
    budget: int,
    labels: Sequence[str] | None = None,
    boundary_tol: float = 1e-3,
    dedup_tol: float = 1e-6,
) -> list[ProjPoint2]:
    """Orbit points of an interior base point that have drifted to the ball boundary.

    Orbit points p = w(base) over reduced words of length <= budget are kept
    when the normalized form value v^* h v / (|v|^2 |h|_2) is within
    `boundary_tol` of zero.
    """
    mats = [_unimodular(g) for g in gens]
    if invariance_residual(mats, np.asarray(h.h)) >= 1e-8:
        raise ValueError("form is not invariant under the generators")
    b = _vec(base)
    if evaluate(h, b) >= 0:
        raise ValueError("base point is not inside the ball")
    labels = labels or [chr(ord("a") + i) for i in range(len(mats))]
    hnorm = np.max(np.abs(np.linalg.eigvalsh(h.h)))
    found = []
    for layer in enumerate_layers(mats, labels, budget):
        pts = layer.mats @ b
        norms = np.einsum("ni,ni->n", np.conj(pts), pts).real
        vals = np.einsum("ni,ij,nj->n", np.conj(pts), h.h, pts).real / (norms * hnorm)
        found.append(pts[np.abs(vals) < boundary_tol])
    pts = np.vstack(found) if found else np.zeros((0, 3), dtype=complex)
    if len(pts) == 0:
        raise ValueError("no orbit point approaches the ball boundary within the budget")
    keep = dedup_points(pts, dedup_tol)
    return [ProjPoint2(p) for p in pts[keep]]
