"""Kulkarni limit sets of iota-lifted groups as unions of tangent lines.

For a discrete group of Moebius maps, the complement of the equicontinuity
set of its iota-lift is the union of the tangent lines to the Veronese curve
at psi(z), z in the limit set on P^1. The functions here sample that union,
test membership of its complement, and cross-check it against orbit
accumulation and pseudo-projective limits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .moebius import GroupSpec, MoebiusMap, attracting_repelling, bloch, classify, limit_samples
from .projective import (
    ProjLine,
    ProjPoint1,
    ProjPoint2,
    ProjectiveError,
    chordal_distance,
    kernel_locus,
    normalized_powers,
    pseudo_projective_limit,
)
from .veronese import iota, iota_batch, psi, tangent_batch, tangent_line
from .words import enumerate_layers


@dataclass
class TangentLineFamily:
    line_coeffs: np.ndarray  # (n, 3)
    source_coords: np.ndarray  # (n, 2)
    budget: int
    words: list[str]
    word_lengths: np.ndarray

    def __len__(self):
        return len(self.line_coeffs)

    @property
    def lines(self) -> list[ProjLine]:
        return [ProjLine(c) for c in self.line_coeffs]

    @property
    def sources(self) -> list[ProjPoint1]:
        return [ProjPoint1(v) for v in self.source_coords]

    def real_mask(self, tol: float = 1e-8) -> np.ndarray:
        """Lines whose coefficient ratios are real (after removing a common phase)."""
        c = self.line_coeffs
        k = np.argmax(np.abs(c), axis=1)
        piv = c[np.arange(len(c)), k]
        r = c / piv[:, None]
        return np.max(np.abs(r.imag), axis=1) < tol

    def incidences(self, p) -> np.ndarray:
        """Normalized incidence |c.p| / (|c| |p|) of p with every line."""
        v = p.v if isinstance(p, ProjPoint2) else np.asarray(p, dtype=complex)
        c = self.line_coeffs
        return np.abs(c @ v) / (np.linalg.norm(c, axis=1) * np.linalg.norm(v))


def kulkarni_limit_lines(
    group: GroupSpec,
    budget: int | None = None,
    cap: int | None = None,
    dedup_tol: float = 1e-6,
) -> TangentLineFamily:
    budget = group.word_budget if budget is None else budget
    s = limit_samples(group, budget, cap, dedup_tol)
    return TangentLineFamily(tangent_batch(s.points), s.points, budget, s.words, s.word_lengths)


def omega_membership(p, fam: TangentLineFamily, eps: float = 1e-3) -> bool:
    """Approximate test for p lying in the Kulkarni discontinuity region."""
    if len(fam) == 0:
        raise ValueError("empty line family")
    return bool(np.min(fam.incidences(p)) > eps)


def nearest_line_incidence(points: np.ndarray, fam: TangentLineFamily, k: int = 16) -> np.ndarray:
    """For each point, the smallest incidence among the lines of the k sources
    closest to its nearest curve parameter.

    This is an upper bound for the true minimum over the family, so values
    below eps certify that some family line passes within eps.
    """
    pts = np.asarray(points, dtype=complex)
    x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
    near = np.where(
        (np.abs(x) >= np.abs(z))[:, None],
        np.stack([x, y / 2], axis=1),
        np.stack([y / 2, z], axis=1),
    )
    tree = cKDTree(bloch(fam.source_coords))
    k = min(k, len(fam))
    _, idx = tree.query(bloch(near), k=k)
    idx = np.asarray(idx).reshape(len(pts), k)
    c = fam.line_coeffs[idx]  # (m, k, 3)
    inc = np.abs(np.einsum("mkj,mj->mk", c, pts))
    inc /= np.linalg.norm(c, axis=2) * np.linalg.norm(pts, axis=1)[:, None]
    return inc.min(axis=1)


@dataclass
class PseudoLimitReport:
    kernel_dim: int
    image: ProjPoint2
    kernel: ProjLine
    image_residual: float
    kernel_residual: float
    limit: np.ndarray

    def ok(self, tol: float = 1e-6) -> bool:
        return self.kernel_dim == 2 and self.image_residual < tol and self.kernel_residual < tol


def pseudo_limit_tangent_check(g: MoebiusMap, n_max: int = 60) -> PseudoLimitReport:
    """Compare the limit of iota(g)^n with psi(attracting) and the tangent at psi(repelling)."""
    if classify(g) != "loxodromic":
        raise ValueError("pseudo-limit check needs a loxodromic element")
    x, y = attracting_repelling(g)
    powers = normalized_powers(iota(g).m, range(1, n_max + 1))
    lim = pseudo_projective_limit(powers)
    ker = kernel_locus(lim)
    img = lim.image()
    if lim.kernel_dim != 2:
        raise ProjectiveError(f"limit has kernel dimension {lim.kernel_dim}, expected 2")
    return PseudoLimitReport(
        kernel_dim=lim.kernel_dim,
        image=img,
        kernel=ker,
        image_residual=chordal_distance(img, psi(x).p),
        kernel_residual=chordal_distance(ker, tangent_line(y)),
        limit=np.asarray(lim.m),
    )


def orbit_accumulation_array(
    group: GroupSpec, seed, budget: int | None = None, eps: float = 1e-3
) -> np.ndarray:
    """Orbit points iota(w) seed for reduced words w of length >= budget - 1."""
    budget = group.word_budget if budget is None else budget
    s = seed.v if isinstance(seed, ProjPoint2) else np.asarray(seed, dtype=complex)
    fam = kulkarni_limit_lines(group, budget)
    if np.min(fam.incidences(s)) <= eps:
        raise ValueError("seed lies on (or too close to) a limit line")
    out = []
    for layer in enumerate_layers(group.matrices(), group.labels, budget):
        if layer.length < budget - 1:
            continue
        pts = iota_batch(layer.mats) @ s
        pts = pts / np.max(np.abs(pts), axis=1)[:, None]
        out.append(pts)
    return np.vstack(out)


def orbit_accumulation_p2(
    group: GroupSpec, seed, budget: int | None = None, eps: float = 1e-3
) -> list[ProjPoint2]:
    return [ProjPoint2(p) for p in orbit_accumulation_array(group, seed, budget, eps)]


def line_family_is_invariant(
    group: GroupSpec, fam: TangentLineFamily, bigger: TangentLineFamily, tol: float = 1e-6
) -> list[tuple[str, str]]:
    """Sources (word, generator) whose translated line is missing from `bigger`.

    Only sources produced by words shorter than the budget are checked:
    conjugating a word of full length may need two extra letters. Build
    `bigger` with a small dedup tolerance, otherwise a neighbouring
    representative up to the dedup radius away may stand in for the line.
    """
    missing = []
    tree = cKDTree(bloch(bigger.source_coords))
    for lab, g in zip(group.labels, group.generators):
        img = np.array([g.m @ v for v in fam.source_coords])
        img = img / np.max(np.abs(img), axis=1)[:, None]
        dist, idx = tree.query(bloch(img))
        for i, (d, j) in enumerate(zip(dist, idx)):
            if fam.word_lengths[i] >= fam.budget:
                continue
            cand = bigger.line_coeffs[j]
            moved = fam.line_coeffs[i] @ np.linalg.inv(iota(g).m)
            if chordal_distance(cand, moved) >= tol:
                missing.append((fam.words[i], lab))
    return missing
