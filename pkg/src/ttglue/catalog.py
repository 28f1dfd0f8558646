"""Worked examples as (space, Y, phi, expected Tate support) packages."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from . import gluing
from .arith import LexValue, excisive_tate_layers, lex_divides_all_powers, vanishing_locus
from .errors import AgreementFailure, GroupError
from .gluing import GluingDatum, SpectralMapModel
from .groups import (
    FiniteGroupModel,
    SubgroupClass,
    build_group,
    classify_subgroup,
    elementary_abelian_image,
    equivariant_tate_classes,
    subconjugate,
    subgroup_classes,
)
from .reports import FAIL, UNKNOWN, VACUOUS, CheckReport
from .space import SpectralSpaceModel

INF = "inf"
DEFAULT_TRUNCATION = 4


class ExtrapolationWarning(UserWarning):
    """Result extends a formula beyond the cases worked out explicitly."""


def hat(x: str) -> str:
    return x + "^"


def point_id(layer: str, height) -> str:
    return f"{layer}_{height}"


@dataclass(frozen=True)
class LayeredChainSpace:
    """Disjoint copies ("layers") of a truncated chromatic chain.

    Each layer is the chain ``1 ~> 2 ~> ... ~> N (~> inf)``; ``cross`` adds
    extra specializations between layers (generating pairs of point ids).
    """

    layer_ids: tuple[str, ...]
    height_cutoff: int
    include_infinity: tuple[bool, ...] | bool = True
    cross: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        if self.height_cutoff < 1:
            raise ValueError("height cutoff must be >= 1")

    def _has_inf(self, k: int) -> bool:
        inc = self.include_infinity
        return inc if isinstance(inc, bool) else inc[k]

    def heights(self, k: int) -> list:
        hs: list = list(range(1, self.height_cutoff + 1))
        return hs + [INF] if self._has_inf(k) else hs

    def layer(self, layer: str) -> frozenset[str]:
        k = self.layer_ids.index(layer)
        return frozenset(point_id(layer, h) for h in self.heights(k))

    def tail_start(self) -> int:
        return math.ceil(self.height_cutoff / 2)

    def compile(self) -> SpectralSpaceModel:
        points, pairs, finite, limits = [], [], [], {}
        for k, lay in enumerate(self.layer_ids):
            chain = [point_id(lay, h) for h in self.heights(k)]
            points += chain
            pairs += list(zip(chain, chain[1:]))
            finite += chain[: self.height_cutoff]
            if self._has_inf(k):
                limits[point_id(lay, INF)] = [
                    point_id(lay, n) for n in range(self.tail_start(), self.height_cutoff + 1)
                ]
        pairs += list(self.cross)
        tmp = SpectralSpaceModel.build(points, pairs, covers=True, close_basics=False)
        basics = [tmp.closure({x}) for x in finite]
        return SpectralSpaceModel.build(points, tmp.relation, basics, limits)

    def layer_closure(self, support: Iterable[str]) -> frozenset[str]:
        """Add (layer, inf) whenever every finite height of that layer is present."""
        s = set(support)
        for k, lay in enumerate(self.layer_ids):
            finite = {point_id(lay, n) for n in range(1, self.height_cutoff + 1)}
            if self._has_inf(k) and finite <= s:
                s.add(point_id(lay, INF))
        return frozenset(s)


@dataclass
class ExamplePackage:
    name: str
    space: SpectralSpaceModel
    Y: frozenset[str]
    expected_tate_support: frozenset[str]
    phi: SpectralMapModel | None = None
    datum: GluingDatum | None = None
    u_embed: dict | None = None
    y_embed: dict | None = None
    layers: LayeredChainSpace | None = None
    # False when the space carries only part of the true specialization order
    order_known: bool = True
    notes: dict[str, str] = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = set(self.space.points)
        for label, s in (("Y", self.Y), ("expected_tate_support", self.expected_tate_support)):
            if not set(s) <= pts:
                raise ValueError(f"{self.name}: {label} mentions unknown points {sorted(set(s) - pts)}")
        if self.Y & self.expected_tate_support:
            raise ValueError(f"{self.name}: expected Tate support meets Y")
        if self.phi is not None and self.datum is None:
            self.datum, self.u_embed, self.y_embed = gluing.restriction_datum(self.space, self.Y, self.phi)


def _copy_map(X: SpectralSpaceModel) -> SpectralMapModel:
    src = X.rename({x: hat(x) for x in X.points})
    return SpectralMapModel(src, X, {hat(x): x for x in X.points})


# -- chromatic -------------------------------------------------------------


def chromatic_p_completion_package(N: int = DEFAULT_TRUNCATION) -> ExamplePackage:
    """p-local chain completed at p: Y is the closure of C_2, phi is a homeomorphism."""
    if N < 2:
        raise ValueError("height cutoff must be >= 2")
    layers = LayeredChainSpace(("C",), N)
    X = layers.compile()
    Y = X.closure({point_id("C", 2)})
    return ExamplePackage(
        name="chromatic-p-completion",
        space=X,
        Y=Y,
        expected_tate_support=frozenset({point_id("C", 1)}),
        phi=_copy_map(X),
        layers=layers,
        notes={"phi": "identity on points from a copy of the chain (homeomorphism)"},
    )


def en_local_package(n: int = 2) -> ExamplePackage:
    """E(n)-local sphere completed at the closed point C_{n+1}."""
    if n < 1:
        raise ValueError("n must be >= 1")
    layers = LayeredChainSpace(("C",), n + 1, include_infinity=False)
    X = layers.compile()
    closed = point_id("C", n + 1)
    return ExamplePackage(
        name=f"en-local-n{n}",
        space=X,
        Y=frozenset({closed}),
        expected_tate_support=frozenset(X.points) - {closed},
        phi=_copy_map(X),
        layers=layers,
        notes={
            "phi": "identity on points: models surjectivity only; injectivity is the "
                   "Hovey-Strickland conjecture and is not asserted",
        },
    )


# -- valuation domain --------------------------------------------------------


def valuation_package() -> ExamplePackage:
    """Rank-two valuation domain completed at its principal maximal ideal."""
    X = SpectralSpaceModel.build(
        ["0", "p", "m"], [("0", "p"), ("p", "m")], [["m"], ["p", "m"], ["0", "p", "m"]], covers=True
    )
    src = SpectralSpaceModel.build(["0^", "m^"], [("0^", "m^")], [["m^"], ["0^", "m^"]], covers=True)
    phi = SpectralMapModel(src, X, {"0^": "p", "m^": "m"})
    nu_a, nu_b = LexValue(0, 1), LexValue(1, 0)
    return ExamplePackage(
        name="valuation",
        space=X,
        Y=frozenset({"m"}),
        expected_tate_support=frozenset({"p"}),
        phi=phi,
        notes={"phi": "completion is a discrete valuation ring; image = the two top points"},
        extra={"nu_a": nu_a, "nu_b": nu_b, "V_b": vanishing_locus(nu_b)},
    )


def nil_ring_certificate(pkg: ExamplePackage) -> CheckReport:
    """If a^n | b for all n then the image of phi lies in V(b)."""
    rep = CheckReport("nil-ring-certificate")
    a, b = pkg.extra["nu_a"], pkg.extra["nu_b"]
    divides = lex_divides_all_powers(a, b)
    rep.details = {"divides_all_powers": divides, "V_b": pkg.extra["V_b"]}
    if not divides:
        rep.fail({"kind": "no-certificate"})
        return rep
    image = pkg.phi.image()
    if not image <= pkg.extra["V_b"]:
        rep.fail({"kind": "image-outside-V(b)", "points": sorted(image - pkg.extra["V_b"])})
    generic = [x for x in pkg.space.points if not pkg.space.generalizations({x}) - {x}]
    if set(generic) & pkg.expected_tate_support:
        rep.fail({"kind": "generic-point-in-support", "points": generic})
    return rep


# -- Artin motives ----------------------------------------------------------


def artin_motives_space(N: int = 3) -> ExamplePackage:
    """Zigzag spectrum with a closed, non-Thomason point M_inf at the end."""
    if N < 2:
        raise ValueError("N must be >= 2")
    M = [f"M_{n}" for n in range(N + 1)]
    P = [f"P_{n}" for n in range(1, N + 1)]
    pairs = []
    for n in range(1, N + 1):
        pairs += [(f"P_{n}", f"M_{n - 1}"), (f"P_{n}", f"M_{n}")]
    tmp = SpectralSpaceModel.build(M + P + ["M_inf"], pairs, covers=True, close_basics=False)
    basics = [tmp.closure({x}) for x in M + P]
    # at least three M's, so no single closure cl(P_n) swallows the tail
    tail = [f"M_{n}" for n in range(min(math.ceil(N / 2), N - 2), N + 1)]
    X = SpectralSpaceModel.build(tmp.points, tmp.relation, basics, {"M_inf": tail})
    return ExamplePackage(
        name="artin-motives",
        space=X,
        Y=frozenset(X.points) - {"M_inf"},
        expected_tate_support=frozenset({"M_inf"}),
        notes={"phi": "not supplied: no model of the completed spectrum is available"},
    )


def artin_y_side_map(pkg: ExamplePackage) -> SpectralMapModel:
    """Inclusion of the Y-side model into the Artin space (U = {M_inf}, V empty)."""
    X = pkg.space
    src = X.induced(pkg.Y).rename({y: hat(y) for y in pkg.Y})
    return SpectralMapModel(src, X, {hat(y): y for y in pkg.Y})


# -- D8 / Mackey functors ----------------------------------------------------


def d8_class_names(G: FiniteGroupModel, classes: Sequence[SubgroupClass]) -> dict[int, str]:
    """Readable labels for the subgroup classes of D8, read off the group structure."""
    names: dict[int, str] = {}
    kleins = []
    for k, c in enumerate(classes):
        flags = classify_subgroup(G, c.rep, 2)
        if c.order == 1:
            names[k] = "1"
        elif c.order == G.order:
            names[k] = "D8"
        elif c.order == 4:
            if flags.is_elementary_abelian:
                kleins.append(k)
            else:
                names[k] = "C4"
        elif c.order == 2 and len(c.representatives) == 1 and all(
            G.mul[a][b] == G.mul[b][a] for a in c.rep for b in G.elements
        ):
            names[k] = "Z"
    kleins.sort(key=lambda k: sorted(classes[k].rep))
    for i, k in enumerate(kleins, 1):
        names[k] = f"V{i}"
    for k, c in enumerate(classes):
        if k in names:
            continue
        owners = [names[v] for v in kleins if subconjugate(c, classes[v])]
        if c.order != 2 or len(owners) != 1:
            raise GroupError("group does not look like D8")
        names[k] = "R" + owners[0][1:]
    return names


def subgroup_lattice_space(G: FiniteGroupModel, names: dict[int, str] | None = None):
    """Spectrum of derived Mackey functors: subgroup classes, larger specializing to smaller.

    Returns ``(space, classes, names)``.
    """
    classes = subgroup_classes(G)
    if names is None:
        names = {k: f"H{c.order}_{k}" for k, c in enumerate(classes)}
    pairs = [
        (names[i], names[j])
        for i, big in enumerate(classes)
        for j, small in enumerate(classes)
        if subconjugate(small, big)
    ]
    tmp = SpectralSpaceModel.build(names.values(), pairs, close_basics=False)
    basics = [tmp.closure({x}) for x in tmp.points]
    return SpectralSpaceModel.build(tmp.points, pairs, basics), classes, names


def quillen_sketch(G: FiniteGroupModel, p: int, classes, names):
    """Finite model of the spectrum of the derived category of kG.

    One component per maximal elementary abelian p-subgroup E of rank <= 2:
    a generic point over one marked rational point per order-p subgroup of
    E, over the closed point. Rational points whose subgroups are
    G-conjugate are identified (fusion); components are glued along shared
    points. Returns ``(space, phi_assignment)``.
    """
    elem = [k for k, c in enumerate(classes) if classify_subgroup(G, c.rep, p).is_elementary_abelian]
    maximal = [k for k in elem if not any(
        k != j and subconjugate(classes[k], classes[j]) for j in elem)]
    trivial = next(k for k, c in enumerate(classes) if c.order == 1)
    closed = hat(names[trivial])
    points = {closed}
    pairs = []
    assign = {closed: names[trivial]}
    for k in maximal:
        c = classes[k]
        if c.order > p * p:
            raise NotImplementedError("components of p-rank above 2 are not modeled")
        if c.order == p:
            # rank one: the component is just the 2-chain of the subgroup
            x = hat(names[k])
            points.add(x)
            pairs.append((x, closed))
            assign[x] = names[k]
            continue
        eta = hat("eta_" + names[k])
        points.add(eta)
        assign[eta] = names[k]
        pairs.append((eta, closed))
        E = c.rep
        for a in sorted(E - {G.identity}):
            C = G.generated([a])
            j = next(i for i, d in enumerate(classes) if C in d.representatives)
            x = hat(names[j])
            points.add(x)
            assign[x] = names[j]
            pairs += [(eta, x), (x, closed)]
    tmp = SpectralSpaceModel.build(points, pairs, covers=True, close_basics=False)
    basics = [tmp.closure({x}) for x in tmp.points]
    return SpectralSpaceModel.build(tmp.points, tmp.relation, basics), assign


def d8_package() -> ExamplePackage:
    G = build_group("D8")
    classes = subgroup_classes(G)
    names = d8_class_names(G, classes)
    X, _, _ = subgroup_lattice_space(G, names)
    Xhat, assign = quillen_sketch(G, 2, classes, names)
    phi = SpectralMapModel(Xhat, X, assign)
    image = elementary_abelian_image(G, 2)
    quillen = frozenset(names[classes.index(c)] for c in image)
    return ExamplePackage(
        name="d8-mackey",
        space=X,
        Y=frozenset({"1"}),
        expected_tate_support=quillen - {"1"},
        phi=phi,
        notes={
            "space": "conjugacy classes of subgroups of D8 from the Cayley table",
            "phi": "Quillen sketch: two Klein-four components with fusion, glued along the centre",
        },
        extra={"quillen_image": quillen, "group": G, "classes": classes, "names": names},
    )


# -- equivariant -------------------------------------------------------------


def abelian_class_names(classes: Sequence[SubgroupClass]) -> dict[int, str]:
    by_order: dict[int, list[int]] = {}
    for k, c in enumerate(classes):
        by_order.setdefault(c.order, []).append(k)
    names = {}
    for order, ks in by_order.items():
        for i, k in enumerate(ks):
            names[k] = f"H{order}" + (chr(ord("a") + i) if len(ks) > 1 else "")
    return names


def equivariant_package(description, p: int, N: int = 3) -> ExamplePackage:
    """Layer-level model of the G-equivariant stable category, completed at the trivial layer.

    The order between layers is not modeled, so only layer membership of
    the Tate support is meaningful.
    """
    G = build_group(description)
    if not G.is_abelian():
        raise GroupError("equivariant packages require an abelian group")
    if G.order > 32:
        raise GroupError("equivariant packages are limited to order <= 32")
    classes = subgroup_classes(G)
    names = abelian_class_names(classes)
    layers = LayeredChainSpace(tuple(names[k] for k in range(len(classes))), N)
    X = layers.compile()
    tate = equivariant_tate_classes(G, p)
    tate_names = sorted(names[classes.index(c)] for c in tate)
    support = frozenset().union(*(layers.layer(n) for n in tate_names)) if tate_names else frozenset()
    trivial = names[next(k for k, c in enumerate(classes) if c.order == 1)]
    return ExamplePackage(
        name=f"equivariant-{G.name.replace(' ', '').replace('/', '')}-p{p}",
        space=X,
        Y=layers.layer(trivial),
        expected_tate_support=support,
        layers=layers,
        order_known=False,
        notes={"order": "UNKNOWN: cross-layer specializations are not modeled"},
        extra={"tate_layers": tate_names, "layer_split": not tate_names, "group": G, "p": p},
    )


# -- excisive ------------------------------------------------------------------


def excisive_d3p2_package(N: int = DEFAULT_TRUNCATION) -> ExamplePackage:
    """3-excisive functors at p = 2: three layers, Y the third."""
    ids = ("[1]", "[2]", "[3]")
    cross = []
    for k in (1, 2):
        src, dst = f"[{k}]", f"[{k + 1}]"
        for n in range(1, N + 1):
            cross.append((point_id(src, n), point_id(dst, n + 1 if n < N else INF)))
        cross.append((point_id(src, INF), point_id(dst, INF)))
    layers = LayeredChainSpace(ids, N, cross=tuple(cross))
    X = layers.compile()
    tate = excisive_tate_layers(3, 2)
    support = frozenset().union(*(layers.layer(f"[{l}]") for l in tate))
    return ExamplePackage(
        name="excisive-d3-p2",
        space=X,
        Y=layers.layer("[3]"),
        expected_tate_support=support,
        layers=layers,
        notes={
            "order": "cross edges ([k],n) ~> ([k+1],n+1); "
                     "height N+1 is truncated to inf",
        },
        extra={"tate_layers": sorted(tate)},
    )


def truncated_excisive_support(d: int, p: int, h: int) -> frozenset[tuple[str, int]]:
    """Tate support after truncating to heights <= h: finite heights below h of each Tate layer."""
    if h < 1:
        raise ValueError("h must be >= 1")
    if (d, p) != (3, 2):
        warnings.warn(f"truncated support for (d, p) = ({d}, {p}) is extrapolated", ExtrapolationWarning)
    return frozenset((f"[{l}]", n) for l in excisive_tate_layers(d, p) for n in range(1, h))


# -- split ---------------------------------------------------------------------


def split_package() -> ExamplePackage:
    X = SpectralSpaceModel.build(["a", "b"], [("a", "a"), ("b", "b")], [["a"], ["b"]])
    src = SpectralSpaceModel.build(["a^"], [("a^", "a^")], [["a^"]])
    return ExamplePackage(
        name="split",
        space=X,
        Y=frozenset({"a"}),
        expected_tate_support=frozenset(),
        phi=SpectralMapModel(src, X, {"a^": "a"}),
    )


CATALOG: dict[str, Callable[..., ExamplePackage]] = {
    "valuation": valuation_package,
    "chromatic-p-completion": chromatic_p_completion_package,
    "en-local": en_local_package,
    "artin-motives": artin_motives_space,
    "d8-mackey": d8_package,
    "excisive-d3-p2": excisive_d3p2_package,
    "split": split_package,
    "equivariant-Z2": lambda: equivariant_package([2], 2),
    "equivariant-Z6": lambda: equivariant_package([2, 3], 2),
    "equivariant-Z3": lambda: equivariant_package([3], 2),
    "equivariant-Z2xZ2": lambda: equivariant_package([2, 2], 2),
}

# constructors taking the height cutoff
_TRUNCATED = {"chromatic-p-completion", "excisive-d3-p2"}


def build_catalog(names: Iterable[str] | None = None, trunc: int = DEFAULT_TRUNCATION) -> list[ExamplePackage]:
    out = []
    for name in names or CATALOG:
        if name not in CATALOG:
            raise KeyError(f"unknown catalog entry {name!r}; known: {', '.join(CATALOG)}")
        out.append(CATALOG[name](trunc) if name in _TRUNCATED else CATALOG[name]())
    return out


# -- check suite -------------------------------------------------------------


def _unknown(name: str, why: str) -> CheckReport:
    return CheckReport(name, status=UNKNOWN, notes=[why])


def run_package_checks(pkg: ExamplePackage, max_exhaustive: int = gluing.DEFAULT_MAX_EXHAUSTIVE,
                       max_cocone: int = gluing.DEFAULT_MAX_COCONE) -> list[CheckReport]:
    """Run every applicable check on one package. Report names are prefixed with the package name."""
    X, Y, T = pkg.space, pkg.Y, pkg.expected_tate_support
    out: list[CheckReport] = []

    rep = CheckReport("validate")
    for v in X.validate():
        rep.fail({"kind": v.kind, "witness": list(v.witness)})
    out.append(rep)

    rep = CheckReport("y-thomason")
    if not X.is_thomason(Y):
        rep.fail({"Y": sorted(Y)})
    out.append(rep)

    rep = CheckReport("complement-proconstructible")
    if not X.classify(frozenset(X.points) - Y).proconstructible:
        rep.fail({"complement": sorted(frozenset(X.points) - Y)})
    out.append(rep)

    rep = CheckReport("support-proconstructible")
    if not X.classify(T).proconstructible:
        rep.fail({"support": sorted(T)})
    out.append(rep)

    rep = CheckReport("dual-closure-agreement")
    try:
        rep.details["dual_closure"] = X.dual_closure(Y)
    except AgreementFailure as exc:
        rep.fail(exc.values)
    out.append(rep)

    if pkg.layers is not None:
        rep = CheckReport("layer-closure")
        if pkg.layers.layer_closure(T) != T:
            rep.fail({"missing": sorted(pkg.layers.layer_closure(T) - T)})
        out.append(rep)

    if pkg.order_known:
        rep = CheckReport("split")
        diag = gluing.split_diagnostic(X, Y, T)
        rep.details = {"is_split": diag.is_split, "tate_must_vanish": diag.tate_must_vanish}
        if not diag.support_consistent:
            rep.fail({"is_split": diag.is_split, "support": sorted(T)})
        out.append(rep)
        out.append(gluing.bounds_report(X, Y, T))
        out.append(gluing.check_tiv(X, Y, T))
    else:
        why = pkg.notes.get("order", "specialization order incomplete")
        out += [_unknown(n, why) for n in ("split", "bounds", "tiv")]
        rep = CheckReport("layer-classification")
        rep.details = {"tate_layers": pkg.extra.get("tate_layers"), "layer_split": pkg.extra.get("layer_split")}
        if pkg.extra.get("layer_split") != (not T):
            rep.fail({"layer_split": pkg.extra.get("layer_split"), "support": sorted(T)})
        out.append(rep)

    if pkg.phi is not None:
        phi = pkg.phi
        rep = CheckReport("map-valid")
        for v in phi.validate():
            rep.fail({"kind": v.kind, "witness": list(v.witness)})
        out.append(rep)
        rep = CheckReport("tate-support-of-map")
        got = gluing.tate_support_of_map(X, Y, phi)
        rep.details = {"image_minus_Y": got}
        if got != T:
            rep.fail({"expected": sorted(T), "got": sorted(got)})
        out.append(rep)
        homeo = gluing.check_homeo_over_y(X, Y, phi)
        out.append(homeo)
        if homeo.ok:
            out.append(gluing.check_tiv_strong(X, Y, phi))
        else:
            out.append(CheckReport("tiv-strong", status=FAIL, notes=["precondition: homeo-over-y failed"]))
        out.append(gluing.check_local_preservation(X, Y, phi))
        if len(X.points) <= max_exhaustive:
            out.append(gluing.check_recover_specializations(X, Y, phi, max_exhaustive))
            out.append(gluing.check_closed_determined(X, Y, phi, max_exhaustive))
        else:
            why = f"|X| = {len(X.points)} exceeds the exhaustive bound {max_exhaustive}"
            out += [CheckReport(n, status=VACUOUS, notes=[why])
                    for n in ("recover-specializations", "closed-determined")]
        out.append(gluing.check_pushout(pkg.datum, X, pkg.u_embed, pkg.y_embed, max_cocone))
        out.append(gluing.check_glue_round_trip(X, Y, phi))

    if "nu_a" in pkg.extra:
        out.append(nil_ring_certificate(pkg))

    for r in out:
        r.name = f"{pkg.name}/{r.name}"
    return out
