"""Group specification files (TOML).

A file describes one group. Complex numbers are written as ``[re, im]``
pairs and explicit 2x2 matrices as eight reals ``[a_re, a_im, b_re, b_im,
c_re, c_im, d_re, d_im]``. See the README for the full grammar.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import tomli

from .moebius import (
    CircleSpec,
    GroupSpec,
    MoebiusMap,
    genus2_octagon_group,
    quasifuchsian_family,
    schottky_group,
)

KINDS = ("schottky", "octagon", "quasifuchsian", "explicit")


class SpecError(ValueError):
    """Malformed spec file; carries a 1-based line and column when known."""

    def __init__(self, msg: str, line: int | None = None, col: int | None = None):
        self.msg, self.line, self.col = msg, line, col
        where = f" (line {line}, column {col})" if line is not None else ""
        super().__init__(msg + where)


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float


@dataclass
class GroupSpecFile:
    kind: str
    labels: list[str] | None = None
    word_budget: int = 6
    residual_tol: float = 1e-8
    membership_eps: float = 1e-3
    pairs: list[tuple[Disk, Disk]] = field(default_factory=list)
    t: float = 0.0
    direction: list[complex] | None = None
    matrices: list[list[float]] = field(default_factory=list)

    def base_group(self) -> GroupSpec:
        """The undeformed Schottky group of a schottky or quasifuchsian spec."""
        if self.kind not in ("schottky", "quasifuchsian"):
            raise SpecError(f"kind {self.kind!r} has no Schottky base")
        pairs = [
            (CircleSpec.from_center_radius(s.center, s.radius), CircleSpec.from_center_radius(d.center, d.radius))
            for s, d in self.pairs
        ]
        return schottky_group(pairs, self.labels, self.word_budget)

    def to_group(self) -> GroupSpec:
        if self.kind == "octagon":
            return genus2_octagon_group(self.word_budget)
        if self.kind == "schottky":
            return self.base_group()
        if self.kind == "quasifuchsian":
            return quasifuchsian_family(self.base_group(), self.t, self.direction)
        gens = [MoebiusMap.from_entries(*_matrix_entries(m)) for m in self.matrices]
        labels = self.labels or [chr(ord("a") + i) for i in range(len(gens))]
        return GroupSpec(tuple(gens), tuple(labels), self.word_budget)


def _matrix_entries(m):
    return [complex(m[k], m[k + 1]) for k in range(0, 8, 2)]


def _locate(text: str, key: str) -> tuple[int | None, int | None]:
    """Best-effort position of `key =` or `[[key]]` in the source text."""
    for n, line in enumerate(text.splitlines(), 1):
        stripped = line.lstrip()
        if stripped.startswith(f"{key} ") or stripped.startswith(f"{key}=") or stripped.startswith(f"[[{key}]]"):
            return n, len(line) - len(stripped) + 1
    return None, None


def _complex(x, where: str) -> complex:
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(v, (int, float)) for v in x):
        return complex(float(x[0]), float(x[1]))
    raise SpecError(f"{where}: expected a number or [re, im] pair")


def _disk(d, where: str) -> Disk:
    if not isinstance(d, dict) or "center" not in d or "radius" not in d:
        raise SpecError(f"{where}: expected {{ center = [re, im], radius = r }}")
    r = d["radius"]
    if not isinstance(r, (int, float)) or r <= 0:
        raise SpecError(f"{where}.radius: expected a positive number")
    return Disk(_complex(d["center"], f"{where}.center"), float(r))


_ALLOWED = {
    "kind",
    "labels",
    "word_budget",
    "residual_tol",
    "membership_eps",
    "pairs",
    "t",
    "direction",
    "matrices",
}


def parse_spec(text: str) -> GroupSpecFile:
    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise SpecError(exc.msg, exc.lineno, exc.colno) from exc

    def fail(key, msg):
        line, col = _locate(text, key)
        raise SpecError(msg, line, col)

    for key in data:
        if key not in _ALLOWED:
            fail(key, f"unknown key {key!r}")
    kind = data.get("kind")
    if kind not in KINDS:
        fail("kind", f"kind must be one of {', '.join(KINDS)}")
    out = GroupSpecFile(kind=kind)
    try:
        if "labels" in data:
            labels = data["labels"]
            if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
                fail("labels", "labels must be a list of strings")
            out.labels = list(labels)
        for key, typ in (("word_budget", int), ("residual_tol", float), ("membership_eps", float)):
            if key in data:
                v = data[key]
                if isinstance(v, bool) or not isinstance(v, (int, float)) or (typ is int and not isinstance(v, int)):
                    fail(key, f"{key} must be {'an integer' if typ is int else 'a number'}")
                setattr(out, key, typ(v))
        if out.word_budget < 1:
            fail("word_budget", "word_budget must be at least 1")
        if kind in ("schottky", "quasifuchsian"):
            pairs = data.get("pairs")
            if not isinstance(pairs, list) or not pairs:
                fail("pairs", f"{kind} spec needs [[pairs]] entries")
            for i, p in enumerate(pairs):
                if not isinstance(p, dict) or set(p) != {"source", "target"}:
                    fail("pairs", f"pairs[{i}] needs exactly source and target")
                out.pairs.append((_disk(p["source"], f"pairs[{i}].source"), _disk(p["target"], f"pairs[{i}].target")))
        if kind == "quasifuchsian":
            t = data.get("t")
            if isinstance(t, bool) or not isinstance(t, (int, float)):
                fail("t", "quasifuchsian spec needs a numeric t")
            out.t = float(t)
            if "direction" in data:
                d = data["direction"]
                if not isinstance(d, list):
                    fail("direction", "direction must be a list of [re, im] pairs")
                out.direction = [_complex(x, f"direction[{i}]") for i, x in enumerate(d)]
        if kind == "explicit":
            mats = data.get("matrices")
            if not isinstance(mats, list) or not mats:
                fail("matrices", "explicit spec needs a matrices list")
            for i, m in enumerate(mats):
                if not isinstance(m, list) or len(m) != 8 or not all(
                    isinstance(v, (int, float)) and not isinstance(v, bool) for v in m
                ):
                    fail("matrices", f"matrices[{i}] must be 8 reals")
                out.matrices.append([float(v) for v in m])
    except SpecError as exc:
        if exc.line is not None:
            raise
        # nested errors are reported against their top-level key
        key = re.match(r"[a-z_]*", exc.msg).group(0)
        raise SpecError(exc.msg, *_locate(text, key)) from None
    return out


def _num(x: float) -> str:
    return repr(float(x))


def _toml_str(x: str) -> str:
    # JSON escapes for control characters are valid TOML; DEL must be escaped too
    return json.dumps(x, ensure_ascii=False).replace("\x7f", "\\u007f")


def _pair(z: complex) -> str:
    return f"[{_num(z.real)}, {_num(z.imag)}]"


def _disk_str(d: Disk) -> str:
    return f"{{ center = {_pair(d.center)}, radius = {_num(d.radius)} }}"


def serialize_spec(spec: GroupSpecFile) -> str:
    """Compact TOML; parse_spec(serialize_spec(s)) == s."""
    out = [f'kind = "{spec.kind}"']
    if spec.labels is not None:
        out.append("labels = [" + ", ".join(_toml_str(x) for x in spec.labels) + "]")
    out.append(f"word_budget = {spec.word_budget}")
    out.append(f"residual_tol = {_num(spec.residual_tol)}")
    out.append(f"membership_eps = {_num(spec.membership_eps)}")
    if spec.kind == "quasifuchsian":
        out.append(f"t = {_num(spec.t)}")
        if spec.direction is not None:
            out.append("direction = [" + ", ".join(_pair(z) for z in spec.direction) + "]")
    if spec.kind == "explicit":
        out.append("matrices = [")
        out.extend("    [" + ", ".join(_num(v) for v in m) + "]," for m in spec.matrices)
        out.append("]")
    if spec.kind in ("schottky", "quasifuchsian"):
        for src, tgt in spec.pairs:
            out += ["", "[[pairs]]", f"source = {_disk_str(src)}", f"target = {_disk_str(tgt)}"]
    return "\n".join(out) + "\n"


def load_spec(path) -> GroupSpecFile:
    """Read and parse a spec file; OSError propagates unchanged."""
    return parse_spec(Path(path).read_text())


def dump_spec(spec: GroupSpecFile, path) -> None:
    Path(path).write_text(serialize_spec(spec))


def four_disk_spec(word_budget: int = 8) -> GroupSpecFile:
    """The four-disk Fuchsian Schottky group as a spec (disks at -3, 3, -1, 1)."""
    d = lambda c: Disk(complex(c), 0.6)  # noqa: E731
    return GroupSpecFile(kind="schottky", word_budget=word_budget, pairs=[(d(-3), d(3)), (d(-1), d(1))])
