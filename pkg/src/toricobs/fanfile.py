"""JSON fan files.

A file holds either explicit data::

    {"name": "P4", "rays": [[1, 0, 0, 0], ...], "max_cones": [[0, 1, 2, 3], ...]}

or a primitive presentation, which is rebuilt into rays and cones on load::

    {"name": "L12",
     "primitive_presentation": {"n": 8, "basis": [0, 1, 3, 5],
                                "relations": [{"lhs": [1, 2], "rhs": [[0, 1]]}, ...]}}

Indices are 0-based.  An optional ``chow_hint`` lists index pairs to try
first when choosing pair monomials for A^2.  ``serialize`` writes one fixed
layout so that parse/serialize round-trips byte for byte.
"""
from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .catalog import CatalogEntry, Presentation
from .fan import Fan, PrimitiveRelation, fan_from_primitive_data

_KEYS = {"name", "rays", "max_cones", "primitive_presentation", "chow_hint"}


class FanFileError(ValueError):
    """Malformed fan file."""


@dataclass(frozen=True)
class FanFile:
    name: str
    rays: tuple[tuple[int, ...], ...] | None = None
    max_cones: tuple[tuple[int, ...], ...] | None = None
    presentation: Presentation | None = None
    chow_hint: tuple[tuple[int, int], ...] | None = None

    def to_fan(self) -> Fan:
        """Build (and for presentations, reconstruct) the fan.  Raises FanError."""
        if self.presentation is not None:
            p = self.presentation
            return fan_from_primitive_data(p.n, p.basis, p.relations, self.name)
        return Fan(self.name, self.rays, self.max_cones)

    @classmethod
    def from_fan(cls, fan: Fan, chow_hint=None) -> "FanFile":
        hint = tuple(tuple(h) for h in chow_hint) if chow_hint else None
        return cls(fan.name, fan.rays, fan.max_cones, None, hint)

    @classmethod
    def from_entry(cls, entry: CatalogEntry) -> "FanFile":
        if entry.presentation is not None:
            return cls(entry.type_label, presentation=entry.presentation,
                       chow_hint=entry.chow_hint)
        return cls.from_fan(entry.fan, entry.chow_hint)


def _int(x, where):
    if isinstance(x, bool) or not isinstance(x, int):
        raise FanFileError(f"{where}: expected an integer, got {x!r}")
    return x


def _int_list(x, where, length=None):
    if not isinstance(x, list):
        raise FanFileError(f"{where}: expected a list")
    if length is not None and len(x) != length:
        raise FanFileError(f"{where}: expected {length} entries, got {len(x)}")
    return tuple(_int(v, where) for v in x)


def _list_of(x, where):
    if not isinstance(x, list):
        raise FanFileError(f"{where}: expected a list")
    return x


def _presentation(d) -> Presentation:
    if not isinstance(d, dict):
        raise FanFileError("primitive_presentation: expected an object")
    extra = set(d) - {"n", "basis", "relations"}
    if extra:
        raise FanFileError(f"primitive_presentation: unknown keys {sorted(extra)}")
    try:
        n = _int(d["n"], "primitive_presentation.n")
        basis = _int_list(d["basis"], "primitive_presentation.basis", 4)
        rels = []
        for k, r in enumerate(_list_of(d["relations"], "relations")):
            where = f"relations[{k}]"
            if not isinstance(r, dict) or set(r) != {"lhs", "rhs"}:
                raise FanFileError(f"{where}: expected an object with lhs and rhs")
            lhs = _int_list(r["lhs"], where + ".lhs")
            rhs = tuple(_int_list(t, where + ".rhs", 2)
                        for t in _list_of(r["rhs"], where + ".rhs"))
            rels.append(PrimitiveRelation(tuple(sorted(lhs)), tuple(sorted(rhs))))
    except KeyError as exc:
        raise FanFileError(f"primitive_presentation: missing {exc.args[0]!r}") from None
    return Presentation(n, basis, tuple(rels))


def parse(text: str) -> FanFile:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FanFileError(f"not valid JSON: {exc.msg} at line {exc.lineno}") from None
    if not isinstance(d, dict):
        raise FanFileError("top level must be an object")
    extra = set(d) - _KEYS
    if extra:
        raise FanFileError(f"unknown keys {sorted(extra)}")
    name = d.get("name")
    if not isinstance(name, str) or not name:
        raise FanFileError("name must be a non-empty string")
    explicit = "rays" in d or "max_cones" in d
    presented = "primitive_presentation" in d
    if explicit == presented:
        raise FanFileError("give exactly one of rays+max_cones or primitive_presentation")
    hint = None
    if "chow_hint" in d:
        hint = tuple(_int_list(h, "chow_hint", 2) for h in _list_of(d["chow_hint"], "chow_hint"))
    if presented:
        return FanFile(name, presentation=_presentation(d["primitive_presentation"]),
                       chow_hint=hint)
    if "rays" not in d or "max_cones" not in d:
        raise FanFileError("rays and max_cones must both be present")
    rays = tuple(_int_list(r, f"rays[{k}]", 4) for k, r in enumerate(_list_of(d["rays"], "rays")))
    cones = tuple(_int_list(c, f"max_cones[{k}]", 4)
                  for k, c in enumerate(_list_of(d["max_cones"], "max_cones")))
    return FanFile(name, rays, cones, None, hint)


def _row(v) -> str:
    return "[" + ", ".join(str(x) for x in v) + "]"


def _block(rows, indent) -> str:
    if not rows:
        return "[]"
    pad = " " * indent
    return "[\n" + ",\n".join(pad + "  " + r for r in rows) + "\n" + pad + "]"


def serialize(ff: FanFile) -> str:
    out = ["{", f'  "name": {json.dumps(ff.name)}']
    if ff.presentation is not None:
        p = ff.presentation
        rels = [f'{{"lhs": {_row(r.lhs)}, "rhs": {_block_inline(r.rhs)}}}' for r in p.relations]
        out[-1] += ","
        out.append('  "primitive_presentation": {')
        out.append(f'    "n": {p.n},')
        out.append(f'    "basis": {_row(p.basis)},')
        out.append(f'    "relations": {_block(rels, 4)}')
        out.append("  }")
    else:
        out[-1] += ","
        out.append(f'  "rays": {_block([_row(r) for r in ff.rays], 2)},')
        out.append(f'  "max_cones": {_block([_row(c) for c in ff.max_cones], 2)}')
    if ff.chow_hint is not None:
        out[-1] += ","
        out.append(f'  "chow_hint": {_block_inline(ff.chow_hint)}')
    out.append("}")
    return "\n".join(out) + "\n"


def _block_inline(pairs) -> str:
    return "[" + ", ".join(_row(p) for p in pairs) + "]"


def load(path) -> FanFile:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FanFileError(f"cannot read {path}: {exc.strerror}") from None
    return parse(text)


def load_fan(path) -> tuple[Fan, FanFile]:
    ff = load(path)
    try:
        return ff.to_fan(), ff
    except ValueError as exc:  # FanError, NotABasis
        raise FanFileError(f"{path}: {exc}") from None


def write_atomic(path, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
