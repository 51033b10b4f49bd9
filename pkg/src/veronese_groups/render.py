"""Rasterization of limit sets, tangent-line families and quartic sign maps.

Everything here is a pure function of its inputs: images are built in a
float coverage buffer, combined with ``max`` and quantized once, so reruns
are byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .kulkarni import TangentLineFamily
from .projective import ProjPoint1
from .veronese import REAL_FORM_CONJUGATOR

INK = np.array([0, 0, 0], dtype=float)
MARK = np.array([200, 0, 0], dtype=float)
INF_TOL = 1e-12
LINE_CHUNK = 4096


@dataclass(frozen=True)
class Viewport:
    """A square-pixel window of the real plane centred at `center` (x + iy)."""

    center: complex
    half_width: float
    pixels: tuple[int, int]  # (width, height)

    def __post_init__(self):
        w, h = self.pixels
        if w <= 0 or h <= 0 or not self.half_width > 0:
            raise ValueError("viewport needs positive dimensions")

    @property
    def scale(self) -> float:
        """Pixels per unit."""
        return self.pixels[0] / (2 * self.half_width)

    @property
    def half_height(self) -> float:
        return self.half_width * self.pixels[1] / self.pixels[0]

    def to_pixel(self, x, y):
        """Chart coordinates to fractional (col, row); pixel k covers [k, k+1)."""
        c = complex(self.center)
        col = (np.asarray(x) - c.real) * self.scale + self.pixels[0] / 2
        row = (c.imag - np.asarray(y)) * self.scale + self.pixels[1] / 2
        return col, row

    def pixel_centers(self):
        """Chart coordinates (x, y) of all pixel centres, each of shape (h, w)."""
        w, h = self.pixels
        c = complex(self.center)
        xs = c.real + ((np.arange(w) + 0.5) - w / 2) / self.scale
        ys = c.imag - ((np.arange(h) + 0.5) - h / 2) / self.scale
        return np.meshgrid(xs, ys)


@dataclass
class RasterImage:
    width: int
    height: int
    pixels: np.ndarray  # (height, width, 3) uint8
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=np.uint8)
        if self.pixels.shape != (self.height, self.width, 3):
            raise ValueError("pixel buffer must have length 3*w*h")

    @classmethod
    def blank(cls, width: int, height: int) -> "RasterImage":
        return cls(width, height, np.full((height, width, 3), 255, dtype=np.uint8))

    def tobytes(self) -> bytes:
        return self.pixels.tobytes()

    def painted(self) -> np.ndarray:
        """Boolean mask of non-white pixels."""
        return np.any(self.pixels != 255, axis=2)


def _compose(cov: np.ndarray, mark: np.ndarray | None = None) -> np.ndarray:
    """Blend ink coverage and marker coverage over a white background."""
    img = 255.0 - cov[..., None] * (255.0 - INK)
    if mark is not None:
        m = mark[..., None]
        img = img * (1 - m) + m * MARK
    return np.rint(img).astype(np.uint8)


def _mark_border(shape, width: int = 2) -> np.ndarray:
    m = np.zeros(shape)
    m[:width, :] = m[-width:, :] = 1.0
    m[:, :width] = m[:, -width:] = 1.0
    return m


def splat_dots(cov: np.ndarray, cols: np.ndarray, rows: np.ndarray, radius: float) -> None:
    """Max-combine anti-aliased discs: coverage falls off linearly over one pixel."""
    h, w = cov.shape
    reach = int(np.ceil(radius + 1))
    base_c = np.floor(cols).astype(int)
    base_r = np.floor(rows).astype(int)
    flat = cov.reshape(-1)
    for dr in range(-reach, reach + 1):
        for dc in range(-reach, reach + 1):
            pc, pr = base_c + dc, base_r + dr
            ok = (pc >= 0) & (pc < w) & (pr >= 0) & (pr < h)
            if not ok.any():
                continue
            d = np.hypot(pc[ok] + 0.5 - cols[ok], pr[ok] + 0.5 - rows[ok])
            val = np.clip(radius + 0.5 - d, 0.0, 1.0)
            np.maximum.at(flat, pr[ok] * w + pc[ok], val)


def p1_chart(points) -> tuple[np.ndarray, np.ndarray]:
    """Chart values z/w of P^1 points and a mask of points at infinity."""
    v = np.array([p.v if isinstance(p, ProjPoint1) else p for p in points], dtype=complex)
    v = v.reshape(-1, 2)
    at_inf = np.abs(v[:, 1]) <= INF_TOL * np.abs(v[:, 0])
    z = np.where(at_inf, 0, v[:, 0] / np.where(at_inf, 1, v[:, 1]))
    return z, at_inf


def render_p1_limit_set(samples, vp: Viewport, dot_radius: float = 1.0) -> RasterImage:
    """Dots at the chart values of P^1 samples; infinity marks the frame border."""
    z, at_inf = p1_chart(samples)
    if len(z) == 0:
        raise ValueError("no samples to render")
    w, h = vp.pixels
    cov = np.zeros((h, w))
    fin = z[~at_inf]
    cols, rows = vp.to_pixel(fin.real, fin.imag)
    splat_dots(cov, cols, rows, dot_radius)
    mark = _mark_border(cov.shape) if at_inf.any() else None
    img = RasterImage(w, h, _compose(cov, mark))
    img.notes["at_infinity"] = int(at_inf.sum())
    return img


def real_line_coeffs(c: np.ndarray, tol: float = 1e-8) -> tuple[np.ndarray, np.ndarray]:
    """Real representatives of lines with real coefficient ratios, and a mask of those."""
    c = np.asarray(c, dtype=complex)
    k = np.argmax(np.abs(c), axis=1)
    piv = c[np.arange(len(c)), k]
    r = c / piv[:, None]
    real = np.max(np.abs(r.imag), axis=1) < tol
    return r.real[real], real


def draw_lines(cov: np.ndarray, vp: Viewport, coeffs: np.ndarray) -> None:
    """Max-combine real lines a x + b y + c = 0 with a 1-pixel linear falloff.

    Each line is walked along its dominant axis; the pixels on the crossing
    scanline and its neighbours get coverage from their perpendicular distance.
    """
    h, w = cov.shape
    flat = cov.reshape(-1)
    s = vp.scale
    cx, cy = complex(vp.center).real, complex(vp.center).imag
    # rewrite each line in pixel coordinates: A col + B row + C = 0
    a, b, c = coeffs[:, 0], coeffs[:, 1], coeffs[:, 2]
    A = a / s
    B = -b / s
    C = c + a * (cx - w / (2 * s)) + b * (cy + h / (2 * s))
    norm = np.hypot(A, B)
    visible = norm > 0
    A, B, C = A[visible] / norm[visible], B[visible] / norm[visible], C[visible] / norm[visible]
    for steep in (False, True):
        sel = (np.abs(A) > np.abs(B)) if steep else (np.abs(A) <= np.abs(B))
        if not sel.any():
            continue
        a1, b1, c1 = (B, A, C) if steep else (A, B, C)
        a1, b1, c1 = a1[sel], b1[sel], c1[sel]
        n_along, n_across = (h, w) if steep else (w, h)
        centers = np.arange(n_along) + 0.5
        for i in range(0, len(a1), LINE_CHUNK):
            aa, bb, cc = a1[i : i + LINE_CHUNK, None], b1[i : i + LINE_CHUNK, None], c1[i : i + LINE_CHUNK, None]
            cross = -(aa * centers + cc) / bb  # crossing coordinate per scanline
            base = np.floor(cross - 0.5).astype(int)
            along = np.broadcast_to(np.arange(n_along), cross.shape)
            for off in (-1, 0, 1, 2):
                k = base + off
                ok = (k >= 0) & (k < n_across)
                if not ok.any():
                    continue
                d = np.abs(aa * centers + bb * (k + 0.5) + cc)[ok]
                val = np.clip(1.0 - d, 0.0, 1.0)
                kk, al = k[ok], along[ok]
                idx = al * w + kk if steep else kk * w + al
                np.maximum.at(flat, idx, val)


def render_line_family_real_slice(
    fam: TangentLineFamily, vp: Viewport
) -> tuple[RasterImage, int]:
    """Real tangent lines drawn in the chart Z = 1 after the real-form conjugation.

    Lines with non-real coefficient ratios are skipped and counted.
    """
    real, mask = real_line_coeffs(fam.line_coeffs)
    skipped = int((~mask).sum())
    if len(real) == 0:
        raise ValueError("all lines skipped: no line has real coefficient ratios")
    moved = real @ np.linalg.inv(REAL_FORM_CONJUGATOR)
    w, h = vp.pixels
    cov = np.zeros((h, w))
    draw_lines(cov, vp, moved)
    img = RasterImage(w, h, _compose(cov))
    img.notes["skipped"] = skipped
    return img, skipped


def dual_chart(coeffs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Dual-plane chart points (c0/c2, c1/c2) and a mask of lines at chart infinity."""
    c = np.asarray(coeffs, dtype=complex).reshape(-1, 3)
    scale = np.max(np.abs(c), axis=1)
    at_inf = np.abs(c[:, 2]) <= INF_TOL * scale
    den = np.where(at_inf, 1, c[:, 2])
    return np.stack([c[:, 0] / den, c[:, 1] / den], axis=1), at_inf


def render_dual_locus(fam: TangentLineFamily, vp: Viewport, dot_radius: float = 1.0) -> RasterImage:
    """Each line as a dot at the real parts of (c0/c2, c1/c2); chart infinity marks the border."""
    pts, at_inf = dual_chart(fam.line_coeffs)
    w, h = vp.pixels
    cov = np.zeros((h, w))
    fin = pts[~at_inf]
    cols, rows = vp.to_pixel(fin[:, 0].real, fin[:, 1].real)
    splat_dots(cov, cols, rows, dot_radius)
    mark = _mark_border(cov.shape) if at_inf.any() else None
    img = RasterImage(w, h, _compose(cov, mark))
    img.notes["at_infinity"] = int(at_inf.sum())
    return img


def quartic_values(h: np.ndarray, z: np.ndarray) -> np.ndarray:
    """F(z) = psi(1, z)^* h psi(1, z) evaluated elementwise."""
    v = np.stack([np.ones_like(z), 2 * z, z * z], axis=-1)
    return np.einsum("...i,ij,...j->...", v.conj(), np.asarray(h, dtype=complex), v).real


def render_quartic_sign(h: np.ndarray, vp: Viewport) -> RasterImage:
    """Sign map of F on the chart: grey where negative, ink where the sign flips."""
    x, y = vp.pixel_centers()
    f = quartic_values(h, x + 1j * y)
    neg = f < 0
    edge = np.zeros_like(neg)
    edge[:, 1:] |= neg[:, 1:] != neg[:, :-1]
    edge[1:, :] |= neg[1:, :] != neg[:-1, :]
    cov = np.where(edge, 1.0, np.where(neg, 0.25, 0.0))
    return RasterImage(vp.pixels[0], vp.pixels[1], _compose(cov))


def write_image(img: RasterImage, path) -> None:
    """Binary P6 pixmap."""
    header = f"P6\n{img.width} {img.height}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(img.tobytes())


def _clip_line(a, b, c, x0, x1, y0, y1):
    """Segment of a x + b y + c = 0 inside the box, or None."""
    pts = []
    if abs(b) > 0:
        for x in (x0, x1):
            y = -(a * x + c) / b
            if y0 <= y <= y1:
                pts.append((x, y))
    if abs(a) > 0:
        for y in (y0, y1):
            x = -(b * y + c) / a
            if x0 <= x <= x1:
                pts.append((x, y))
    if len(pts) < 2:
        return None
    pts.sort()
    return pts[0], pts[-1]


def write_svg(path, vp: Viewport, lines=None, dots=None, dot_radius: float = 1.0) -> int:
    """SVG with one <path> per visible line (a x + b y + c = 0) and per dot (x + iy).

    Returns the number of path elements written.
    """
    w, h = vp.pixels
    x0, x1 = complex(vp.center).real - vp.half_width, complex(vp.center).real + vp.half_width
    y0, y1 = complex(vp.center).imag - vp.half_height, complex(vp.center).imag + vp.half_height
    body = []
    for a, b, c in np.asarray(lines if lines is not None else np.zeros((0, 3)), dtype=float):
        seg = _clip_line(a, b, c, x0, x1, y0, y1)
        if seg is None:
            continue
        (p, q), (r, s) = seg
        (c0, r0), (c1, r1) = vp.to_pixel(p, q), vp.to_pixel(r, s)
        body.append(f'<path d="M {c0:.3f} {r0:.3f} L {c1:.3f} {r1:.3f}" stroke="black" />')
    for z in np.asarray(dots if dots is not None else [], dtype=complex):
        col, row = vp.to_pixel(z.real, z.imag)
        r = dot_radius
        body.append(
            f'<path d="M {col - r:.3f} {row:.3f} a {r} {r} 0 1 0 {2 * r} 0 '
            f'a {r} {r} 0 1 0 {-2 * r} 0" fill="black" />'
        )
    text = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">\n' + "\n".join(body) + "\n</svg>\n"
    )
    Path(path).write_text(text)
    return len(body)
