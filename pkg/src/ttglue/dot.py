"""Graphviz DOT output: Hasse diagram of the specialization order."""

from __future__ import annotations

import json
from typing import Iterable, Mapping

from .errors import UnknownPointError
from .space import SpectralSpaceModel

_PALETTE = ("lightblue", "lightsalmon", "palegreen", "plum", "khaki", "lightgray")


def _q(s: str) -> str:
    return json.dumps(s, ensure_ascii=False)


def emit_dot(model: SpectralSpaceModel, highlight: Mapping[str, Iterable[str]] | None = None,
             name: str = "space") -> str:
    """One node per point, one edge ``x -> y`` per covering ``x ~> y``.

    ``highlight`` maps a style label to a subset; a node in several subsets
    gets every label in its ``class`` attribute and the fill colour of the
    first label (in sorted order).
    """
    highlight = {k: frozenset(v) for k, v in (highlight or {}).items()}
    pts = set(model.points)
    unknown = set().union(*highlight.values()) - pts if highlight else set()
    if unknown:
        raise UnknownPointError(unknown)
    labels = sorted(highlight)
    colour = {lab: _PALETTE[i % len(_PALETTE)] for i, lab in enumerate(labels)}
    lines = [f"digraph {_q(name)} {{", "  rankdir=TB;"] if model.points else [f"digraph {_q(name)} {{"]
    for x in model.points:
        mine = [lab for lab in labels if x in highlight[lab]]
        attrs = [f"label={_q(x)}"]
        if x in dict(model.limits):
            attrs.append("shape=doublecircle")
        if mine:
            attrs += [f"class={_q(' '.join(mine))}", "style=filled", f"fillcolor={_q(colour[mine[0]])}"]
        lines.append(f"  {_q(x)} [{', '.join(attrs)}];")
    for x, y in model.covers():
        lines.append(f"  {_q(x)} -> {_q(y)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
