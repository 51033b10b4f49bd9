"""The Veronese conic in P^2, the representation iota of PSL(2, C), tangent lines.

``psi([z, w]) = [z^2, 2zw, w^2]`` parametrizes the conic ``y^2 = 4xz`` and
``iota(g)`` is the action of ``g`` on binary quadratic forms, so that
``psi(g x) = iota(g) psi(x)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .moebius import MoebiusMap
from .projective import (
    DEFAULT_TOL,
    ProjectiveError,
    ProjLine,
    ProjMap3,
    ProjPoint1,
    ProjPoint2,
    chordal_distance,
)

REAL_FORM_CONJUGATOR = np.array([[1, 0, -1], [0, 1, 0], [1, 0, 1]])


@dataclass(frozen=True)
class VeronesePoint:
    p: ProjPoint2
    preimage: ProjPoint1


def psi_vec(v) -> np.ndarray:
    z, w = np.asarray(v, dtype=complex)
    return np.array([z * z, 2 * z * w, w * w])


def psi(p: ProjPoint1) -> VeronesePoint:
    return VeronesePoint(ProjPoint2(psi_vec(p.v)), p)


def curve_residual(p) -> float:
    """|y^2 - 4xz| / |p|^2, which vanishes exactly on the Veronese conic."""
    x, y, z = p.v if isinstance(p, ProjPoint2) else np.asarray(p, dtype=complex)
    n = abs(x) ** 2 + abs(y) ** 2 + abs(z) ** 2
    return float(abs(y * y - 4 * x * z) / n)


def psi_inverse(p: ProjPoint2, tol: float = DEFAULT_TOL) -> ProjPoint1:
    if curve_residual(p) >= tol:
        raise ProjectiveError("not on Veronese curve")
    x, y, z = p.v
    return ProjPoint1([x, y / 2] if abs(x) >= abs(z) else [y / 2, z])


def iota_matrix(m) -> np.ndarray:
    (a, b), (c, d) = np.asarray(m, dtype=complex)
    return np.array(
        [
            [a * a, a * b, b * b],
            [2 * a * c, a * d + b * c, 2 * b * d],
            [c * c, d * c, d * d],
        ]
    )


def iota(g: MoebiusMap) -> ProjMap3:
    return ProjMap3(iota_matrix(g.m))


def iota_batch(mats: np.ndarray) -> np.ndarray:
    a, b, c, d = mats[:, 0, 0], mats[:, 0, 1], mats[:, 1, 0], mats[:, 1, 1]
    return np.stack(
        [
            np.stack([a * a, a * b, b * b], axis=-1),
            np.stack([2 * a * c, a * d + b * c, 2 * b * d], axis=-1),
            np.stack([c * c, d * c, d * d], axis=-1),
        ],
        axis=1,
    )


def tangent_coeffs(v) -> np.ndarray:
    """Coefficients of the tangent line at psi([z, w]).

    For [1, k] this is (k^2, -k, 1), i.e. the line z = k y - k^2 x. Written
    homogeneously as (w^2, -z w, z^2) it extends continuously to [0, 1],
    where it becomes (1, 0, 0).
    """
    z, w = np.asarray(v, dtype=complex)
    return np.array([w * w, -z * w, z * z])


def tangent_line(k: ProjPoint1) -> ProjLine:
    return ProjLine(tangent_coeffs(k.v))


def tangent_batch(v: np.ndarray) -> np.ndarray:
    z, w = v[:, 0], v[:, 1]
    return np.stack([w * w, -z * w, z * z], axis=1)


def tangency_discriminant(line: ProjLine) -> float:
    """Scale-free discriminant of c0 + 2 c1 s + c2 s^2, the line restricted to the curve.

    Zero exactly when the line touches the conic at a single (double) point.
    """
    c0, c1, c2 = line.c
    return float(abs(c1 * c1 - c0 * c2) / np.sum(np.abs(line.c) ** 2))


def _kappa_rep(v: np.ndarray) -> np.ndarray:
    """Representative [1, k], or [0, 1] for the point at infinity."""
    v = np.asarray(v, dtype=complex)
    if abs(v[0]) > DEFAULT_TOL * np.linalg.norm(v):
        return v / v[0]
    return np.array([0, 1], dtype=complex)


def tangent_triple_determinant(x: ProjPoint1, y: ProjPoint1, z: ProjPoint1) -> complex:
    """Determinant of the tangent rows on [1, k] representatives: (s-r)(k-s)(k-r) up to sign."""
    rows = [tangent_coeffs(_kappa_rep(p.v)) for p in (x, y, z)]
    return complex(np.linalg.det(np.array(rows)))


def tangent_triple_general_position(
    x: ProjPoint1, y: ProjPoint1, z: ProjPoint1, tol: float = DEFAULT_TOL
) -> bool:
    rows = np.array([tangent_coeffs(p.v) for p in (x, y, z)])
    rows = rows / np.linalg.norm(rows, axis=1)[:, None]
    return bool(abs(np.linalg.det(rows)) > tol)


@dataclass(frozen=True)
class RealFormConjugator:
    g0: ProjMap3

    def apply(self, p: ProjPoint2) -> ProjPoint2:
        return self.g0 @ p

    def conjugate(self, m: ProjMap3) -> ProjMap3:
        return self.g0 @ m @ self.g0.inverse()


def real_form_conjugator() -> RealFormConjugator:
    """The real map sending psi(R-hat) onto the conic X^2 + Y^2 = Z^2."""
    return RealFormConjugator(ProjMap3(REAL_FORM_CONJUGATOR))


def is_on_curve(p: ProjPoint2, tol: float = DEFAULT_TOL) -> bool:
    return curve_residual(p) < tol


def equivariance_defect(g: MoebiusMap, x: ProjPoint1) -> float:
    """Chordal distance between psi(g x) and iota(g) psi(x)."""
    return chordal_distance(psi(g @ x).p, iota(g) @ psi(x).p)
