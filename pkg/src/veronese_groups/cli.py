"""Command-line front end: analyze, limitset, deform, render.

Exit codes: 0 ok, 2 parse error, 3 numerical failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

import numpy as np

from .hermitian import solve_invariant_hermitian, veronese_ball_census
from .kulkarni import kulkarni_limit_lines
from .moebius import classify, quasifuchsian_family, solve_invariant_circle
from .projective import ProjectiveError
from .render import (
    RasterImage,
    Viewport,
    dual_chart,
    p1_chart,
    real_line_coeffs,
    render_dual_locus,
    render_line_family_real_slice,
    render_p1_limit_set,
    render_quartic_sign,
    write_image,
    write_svg,
)
from .specfile import SpecError, load_spec
from .veronese import REAL_FORM_CONJUGATOR, iota_matrix

EXIT_OK, EXIT_PARSE, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


class NumericalFailure(RuntimeError):
    pass


def _fmt_c(z: complex) -> str:
    z = complex(z)
    # adding 0.0 turns -0.0 into 0.0 so signed zeros print alike
    return f"{z.real + 0.0:+.12e}{z.imag + 0.0:+.12e}j"


def _fmt_mat(m: np.ndarray) -> str:
    return "[" + "; ".join(" ".join(_fmt_c(x) for x in row) for row in np.asarray(m)) + "]"


def _load(path):
    spec = load_spec(path)
    try:
        group = spec.to_group()
    except SpecError:
        raise
    except ValueError as exc:
        raise NumericalFailure(str(exc)) from exc
    return spec, group


def _verdicts(group, tol: float, seed: int):
    circle = solve_invariant_circle(group.generators, residual_tol=tol, seed=seed)
    herm = solve_invariant_hermitian([iota_matrix(g.m) for g in group.generators], residual_tol=tol, seed=seed)
    return circle, herm


def cmd_analyze(args, out) -> int:
    spec, group = _load(args.spec)
    tol = args.tol if args.tol is not None else spec.residual_tol
    print(f"group: {spec.kind}, {len(group.generators)} generators, word budget {group.word_budget}", file=out)
    for lab, g in zip(group.labels, group.generators):
        print(f"generator {lab}: {classify(g)}, trace^2 = {_fmt_c(g.trace_sq)}", file=out)
    circle, herm = _verdicts(group, tol, args.seed)
    if circle.circle is not None:
        print(f"invariant circle: YES (residual {circle.residual:.3e}) {circle.circle!r}", file=out)
    else:
        print(f"invariant circle: NO (residual floor {circle.residual:.3e})", file=out)
    for lab, g in zip(group.labels, group.generators):
        print(f"iota({lab}) = {_fmt_mat(iota_matrix(g.m))}", file=out)
    if herm.form is not None:
        p, n, z = herm.form.signature
        print(f"invariant Hermitian form: YES ({p},{n}) residual {herm.residual:.3e}", file=out)
        print(f"  form = {_fmt_mat(herm.form.h)}", file=out)
        census = veronese_ball_census(herm.form, resolution=args.grid or 400)
        print(f"census: {census.summary()}", file=out)
    else:
        print(f"invariant Hermitian form: NO (residual floor {herm.residual:.3e})", file=out)
        print("census: skipped (no invariant form)", file=out)
    return EXIT_OK


def _fit_viewport(xs: np.ndarray, ys: np.ndarray, pixels: int, cap: float = 20.0) -> Viewport:
    """Square viewport around the origin holding the finite points, capped at `cap`."""
    r = float(np.max(np.abs(np.concatenate([xs, ys])))) if len(xs) else 1.0
    return Viewport(0j, float(np.clip(1.1 * r, 1.0, cap)), (pixels, pixels))


def _sorted_sources(fam):
    """Canonical order: by rounded chart data of the normalized representative."""
    v = np.round(fam.source_coords, 12)
    keys = [(p[0].real, p[0].imag, p[1].real, p[1].imag) for p in v]
    return sorted(range(len(keys)), key=keys.__getitem__)


def _limit_outputs(spec, group, budget: int, pixels: int):
    fam = kulkarni_limit_lines(group, budget)
    z, at_inf = p1_chart(fam.source_coords)
    vp1 = _fit_viewport(z[~at_inf].real, z[~at_inf].imag, pixels)
    p1_img = render_p1_limit_set(fam.source_coords, vp1)
    try:
        slice_img, skipped = render_line_family_real_slice(fam, Viewport(0j, 2.0, (pixels, pixels)))
    except ValueError:
        slice_img, skipped = RasterImage.blank(pixels, pixels), len(fam)
    d, d_inf = dual_chart(fam.line_coeffs)
    vpd = _fit_viewport(d[~d_inf, 0].real, d[~d_inf, 1].real, pixels)
    dual_img = render_dual_locus(fam, vpd)
    lines = [
        f"# kind {spec.kind}, budget {budget}, sources {len(fam)}, real-slice skipped {skipped}",
        "# source [z, w] ; tangent line (c0, c1, c2)",
    ]
    for i in _sorted_sources(fam):
        src = " ".join(_fmt_c(x) for x in fam.source_coords[i])
        c = fam.line_coeffs[i]
        c = c / c[np.argmax(np.abs(c))]
        lines.append(f"{src} ; {' '.join(_fmt_c(x) for x in c)}")
    return fam, {"limit_p1.ppm": p1_img, "real_slice.ppm": slice_img, "dual_locus.ppm": dual_img}, "\n".join(lines) + "\n"


def cmd_limitset(args, out) -> int:
    spec, group = _load(args.spec)
    budget = args.budget or group.word_budget
    fam, images, text = _limit_outputs(spec, group, budget, args.grid or 400)
    dest = Path(args.out or ".")
    dest.mkdir(parents=True, exist_ok=True)
    for name, img in images.items():
        write_image(img, dest / name)
    (dest / "limit_sources.txt").write_text(text)
    print(f"{len(fam)} limit sources at budget {budget}; wrote {len(images) + 1} files to {dest}", file=out)
    return EXIT_OK


def _deform_rows(spec, t_values, tol: float, seed: int):
    base = spec.base_group()
    for t in t_values:
        try:
            g = quasifuchsian_family(base, t, spec.direction)
        except ValueError as exc:
            yield [f"{t:g}", "COLLISION", "", "", "", "", "", str(exc)]
            continue
        circle, herm = _verdicts(g, tol, seed)
        dist = max(a.distance(b) for a, b in zip(g.generators, base.generators))
        yield [
            f"{t:g}",
            "ok",
            "YES" if circle.circle is not None else "NO",
            f"{circle.residual:.3e}",
            "YES" if herm.form is not None else "NO",
            f"{herm.residual:.3e}",
            f"{dist:.12e}",
            "",
        ]


DEFORM_HEADER = ["t", "certificate", "circle", "circle_residual", "hermitian", "hermitian_residual", "max_generator_distance", "note"]


def cmd_deform(args, out) -> int:
    spec = load_spec(args.spec)
    if spec.kind not in ("schottky", "quasifuchsian"):
        raise SpecError(f"deform needs a schottky base, got kind {spec.kind!r}")
    try:
        t_values = [float(x) for x in args.t_list.split(",") if x.strip()]
    except ValueError as exc:
        raise SpecError(f"bad --t-list: {args.t_list}") from exc
    tol = args.tol if args.tol is not None else spec.residual_tol
    try:
        rows = list(_deform_rows(spec, t_values, tol, args.seed))
    except ValueError as exc:
        raise NumericalFailure(str(exc)) from exc
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(DEFORM_HEADER)
    w.writerows(rows)
    if args.out:
        Path(args.out).write_text(buf.getvalue())
    out.write(buf.getvalue())
    return EXIT_OK


def cmd_render(args, out) -> int:
    spec, group = _load(args.spec)
    budget = args.budget or group.word_budget
    pixels = args.grid or 400
    target = Path(args.out or f"{args.picture}.ppm")
    svg = target.suffix.lower() == ".svg"
    if args.picture == "quartic":
        herm = solve_invariant_hermitian([iota_matrix(g.m) for g in group.generators], seed=args.seed)
        if herm.form is None:
            raise NumericalFailure(f"no invariant Hermitian form (residual floor {herm.residual:.3e})")
        if svg:
            raise SpecError("quartic render is raster only")
        write_image(render_quartic_sign(herm.form.h, Viewport(0j, 3.0, (pixels, pixels))), target)
        print(f"wrote {target}", file=out)
        return EXIT_OK
    fam = kulkarni_limit_lines(group, budget)
    if args.picture == "p1":
        z, at_inf = p1_chart(fam.source_coords)
        vp = _fit_viewport(z[~at_inf].real, z[~at_inf].imag, pixels)
        if svg:
            write_svg(target, vp, dots=z[~at_inf])
        else:
            write_image(render_p1_limit_set(fam.source_coords, vp), target)
    elif args.picture == "slice":
        vp = Viewport(0j, 2.0, (pixels, pixels))
        if svg:
            real, _ = real_line_coeffs(fam.line_coeffs)
            write_svg(target, vp, lines=real @ np.linalg.inv(REAL_FORM_CONJUGATOR))
        else:
            write_image(render_line_family_real_slice(fam, vp)[0], target)
    else:
        d, d_inf = dual_chart(fam.line_coeffs)
        vp = _fit_viewport(d[~d_inf, 0].real, d[~d_inf, 1].real, pixels)
        if svg:
            write_svg(target, vp, dots=d[~d_inf, 0].real + 1j * d[~d_inf, 1].real)
        else:
            write_image(render_dual_locus(fam, vp), target)
    print(f"wrote {target}", file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="veronese-groups", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("spec", help="group specification file (TOML)")
        sp.add_argument("--budget", type=int, help="word length budget (default: from spec)")
        sp.add_argument("--tol", type=float, help="invariance residual tolerance")
        sp.add_argument("--grid", type=int, help="pixels per side, or census resolution for analyze")
        sp.add_argument("--out", help="output path")
        sp.add_argument("--seed", type=int, default=0, help="seed for nullspace sampling")
        return sp

    common(sub.add_parser("analyze", help="classify generators and test invariant circle / form"))
    common(sub.add_parser("limitset", help="limit sources, line family and renders into --out dir"))
    d = common(sub.add_parser("deform", help="quasi-Fuchsian family diagnostics as CSV"))
    d.add_argument("--t-list", default="0.2,0.1,0.05", help="comma-separated parameters")
    r = common(sub.add_parser("render", help="render one picture (.ppm or .svg by extension)"))
    r.add_argument("picture", choices=["p1", "slice", "dual", "quartic"])
    return p


COMMANDS = {"analyze": cmd_analyze, "limitset": cmd_limitset, "deform": cmd_deform, "render": cmd_render}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except SpecError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (NumericalFailure, ProjectiveError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
