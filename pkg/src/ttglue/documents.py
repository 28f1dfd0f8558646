"""Versioned JSON documents for spaces, subsets, maps and gluing data.

Parsing is strict: unknown fields are rejected and every error names the
offending location (``line:col`` for syntax errors, a field path such as
``basics[2][0]`` otherwise). Saving is canonical, so ``save(load(save(m)))``
is byte-identical to ``save(m)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .errors import TTGlueError
from .gluing import GluingDatum, SpectralMapModel
from .space import SpectralSpaceModel, _family_key

SPACE = "spectral-space/1"
SUBSET = "subset/1"
MAP = "spectral-map/1"
DATUM = "gluing-datum/1"


class DocumentError(TTGlueError, ValueError):
    def __init__(self, location: str, message: str, witness=None):
        self.location = location
        self.witness = witness
        super().__init__(f"{location}: {message}")


@dataclass
class LoadReport:
    """What loading changed relative to the literal document."""

    covers_expanded: bool = False
    added_pairs: int = 0
    added_basics: list[list[str]] = field(default_factory=list)


# -- parsing helpers ---------------------------------------------------------


def _parse(data: bytes | str, where: str = "document") -> Any:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DocumentError(f"{where}@byte {exc.start}", "not valid UTF-8") from None
    try:
        return json.loads(data)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{where}@{exc.lineno}:{exc.colno}", exc.msg) from None


def _object(obj, path: str, fmt: str | None, required: set[str], optional: set[str] = frozenset()):
    if not isinstance(obj, dict):
        raise DocumentError(path, f"expected an object, got {type(obj).__name__}")
    allowed = set(required) | set(optional) | ({"format"} if fmt else set())
    extra = sorted(set(obj) - allowed)
    if extra:
        raise DocumentError(f"{path}.{extra[0]}", "unknown field")
    if fmt is not None:
        if "format" not in obj:
            raise DocumentError(f"{path}.format", "missing format version")
        if obj["format"] != fmt:
            raise DocumentError(f"{path}.format", f"expected {fmt!r}, got {obj['format']!r}")
    missing = sorted(set(required) - set(obj))
    if missing:
        raise DocumentError(f"{path}.{missing[0]}", "missing field")
    return obj


def _list(obj, path: str) -> list:
    if not isinstance(obj, list):
        raise DocumentError(path, f"expected a list, got {type(obj).__name__}")
    return obj


def _ids(obj, path: str, known: set[str] | None = None) -> list[str]:
    out = []
    for i, x in enumerate(_list(obj, path)):
        if not isinstance(x, str) or not x:
            raise DocumentError(f"{path}[{i}]", "point ids must be non-empty strings")
        if known is not None and x not in known:
            raise DocumentError(f"{path}[{i}]", f"unknown point {x!r}")
        out.append(x)
    return out


def _id_map(obj, path: str, keys: set[str], values: set[str]) -> dict[str, str]:
    if not isinstance(obj, dict):
        raise DocumentError(path, "expected an object mapping ids to ids")
    for k, v in obj.items():
        if k not in keys:
            raise DocumentError(f"{path}.{k}", f"unknown source point {k!r}")
        if not isinstance(v, str) or v not in values:
            raise DocumentError(f"{path}.{k}", f"unknown target point {v!r}")
    return dict(obj)


# -- spaces --------------------------------------------------------------------


def space_from_obj(obj, path: str = "$") -> tuple[SpectralSpaceModel, LoadReport]:
    _object(obj, path, SPACE, {"points", "specializes"}, {"covers", "basics", "limits"})
    points = _ids(obj["points"], f"{path}.points")
    seen: set[str] = set()
    for i, x in enumerate(points):
        if x in seen:
            raise DocumentError(f"{path}.points[{i}]", f"duplicate point {x!r}", witness=x)
        seen.add(x)
    covers = obj.get("covers", False)
    if not isinstance(covers, bool):
        raise DocumentError(f"{path}.covers", "expected true or false")
    pairs = []
    for i, pair in enumerate(_list(obj["specializes"], f"{path}.specializes")):
        p = _ids(pair, f"{path}.specializes[{i}]", seen)
        if len(p) != 2:
            raise DocumentError(f"{path}.specializes[{i}]", "expected a [from, to] pair")
        pairs.append(tuple(p))
    basics = [
        _ids(b, f"{path}.basics[{i}]", seen)
        for i, b in enumerate(_list(obj.get("basics", []), f"{path}.basics"))
    ]
    limits: dict[str, list[str]] = {}
    for i, lim in enumerate(_list(obj.get("limits", []), f"{path}.limits")):
        lp = f"{path}.limits[{i}]"
        _object(lim, lp, None, {"point", "tail"})
        x = _ids([lim["point"]], f"{lp}.point", seen)[0]
        if x in limits:
            raise DocumentError(f"{lp}.point", f"second limit annotation for {x!r}")
        limits[x] = _ids(lim["tail"], f"{lp}.tail", seen)

    raw = SpectralSpaceModel.build(points, pairs, basics, limits, covers=covers, close_basics=False)
    problems = raw.validate()
    # closing the basics repairs union/intersection gaps; report the rest
    fatal = [v for v in problems if not v.kind.startswith("basics-")]
    if fatal:
        v = fatal[0]
        raise DocumentError(f"{path}", f"{v.kind}: {v.message}", witness=list(v.witness))
    model = SpectralSpaceModel.build(points, raw.relation, basics, limits)
    leftover = model.validate()
    if leftover:
        v = leftover[0]
        raise DocumentError(f"{path}", f"{v.kind}: {v.message}", witness=list(v.witness))
    given = {frozenset(b) for b in basics}
    report = LoadReport(
        covers_expanded=covers,
        added_pairs=len(raw.relation) - len(set(pairs)),
        added_basics=[sorted(b) for b in model.basics if b not in given],
    )
    return model, report


def space_to_obj(model: SpectralSpaceModel) -> dict:
    obj = {
        "format": SPACE,
        "points": list(model.points),
        "specializes": [list(p) for p in sorted(model.relation)],
        "basics": [sorted(b) for b in sorted(model.basics, key=_family_key)],
    }
    obj["limits"] = [{"point": x, "tail": sorted(t)} for x, t in sorted(model.limits)]
    return obj


def _render(obj, indent: int = 0) -> str:
    # flat lists and scalars stay on one line; containers of containers break
    def flat(x):
        return not isinstance(x, (dict, list)) or (
            isinstance(x, list) and all(not isinstance(y, (dict, list)) for y in x))

    if flat(obj):
        return json.dumps(obj, ensure_ascii=False)
    pad, inner = " " * indent, " " * (indent + 2)
    if isinstance(obj, list):
        if not obj:
            return "[]"
        body = ",\n".join(inner + _render(x, indent + 2) for x in obj)
        return f"[\n{body}\n{pad}]"
    if not obj:
        return "{}"
    body = ",\n".join(
        f"{inner}{json.dumps(str(k), ensure_ascii=False)}: {_render(v, indent + 2)}" for k, v in obj.items())
    return f"{{\n{body}\n{pad}}}"


def dumps(obj) -> bytes:
    return (_render(obj) + "\n").encode("utf-8")


def load_space(data: bytes | str) -> SpectralSpaceModel:
    return space_from_obj(_parse(data))[0]


def load_space_with_report(data: bytes | str) -> tuple[SpectralSpaceModel, LoadReport]:
    return space_from_obj(_parse(data))


def save_space(model: SpectralSpaceModel) -> bytes:
    return dumps(space_to_obj(model))


# -- subsets, maps, data -----------------------------------------------------------


def load_subset(data: bytes | str, space: SpectralSpaceModel | None = None) -> frozenset[str]:
    obj = _object(_parse(data), "$", SUBSET, {"points"})
    known = set(space.points) if space is not None else None
    return frozenset(_ids(obj["points"], "$.points", known))


def save_subset(subset) -> bytes:
    return dumps({"format": SUBSET, "points": sorted(subset)})


def map_from_obj(obj, target: SpectralSpaceModel, path: str = "$") -> SpectralMapModel:
    _object(obj, path, MAP, {"source", "assign"})
    source, _ = space_from_obj(obj["source"], f"{path}.source")
    assign = _id_map(obj["assign"], f"{path}.assign", set(source.points), set(target.points))
    missing = sorted(set(source.points) - set(assign))
    if missing:
        raise DocumentError(f"{path}.assign.{missing[0]}", "map is undefined here")
    phi = SpectralMapModel(source, target, assign)
    bad = phi.validate()
    if bad:
        raise DocumentError(f"{path}", f"{bad[0].kind}: {bad[0].message}", witness=list(bad[0].witness))
    return phi


def load_map(data: bytes | str, target: SpectralSpaceModel) -> SpectralMapModel:
    return map_from_obj(_parse(data), target)


def save_map(phi: SpectralMapModel) -> bytes:
    return dumps({
        "format": MAP,
        "source": space_to_obj(phi.source),
        "assign": {x: phi.assign[x] for x in phi.source.points},
    })


def datum_from_obj(obj, path: str = "$") -> GluingDatum:
    _object(obj, path, DATUM, {"U", "Xhat", "Yhat", "attach"})
    U, _ = space_from_obj(obj["U"], f"{path}.U")
    Xhat, _ = space_from_obj(obj["Xhat"], f"{path}.Xhat")
    yhat = frozenset(_ids(obj["Yhat"], f"{path}.Yhat", set(Xhat.points)))
    attach = _id_map(obj["attach"], f"{path}.attach", set(Xhat.points) - yhat, set(U.points))
    datum = GluingDatum(U, Xhat, yhat, attach)
    probs = datum.problems()
    if probs:
        raise DocumentError(path, probs[0])
    return datum


def load_datum(data: bytes | str) -> GluingDatum:
    return datum_from_obj(_parse(data))


def save_datum(datum: GluingDatum) -> bytes:
    return dumps({
        "format": DATUM,
        "U": space_to_obj(datum.U),
        "Xhat": space_to_obj(datum.Xhat),
        "Yhat": sorted(datum.Yhat),
        "attach": dict(sorted(datum.attach.items())),
    })


def read_bytes(path: str | Path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise DocumentError(str(path), exc.strerror or "cannot read file") from None


def report_bytes(doc: Mapping) -> bytes:
    return dumps(doc)
