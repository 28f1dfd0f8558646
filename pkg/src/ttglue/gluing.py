"""Reconstruction of a spectrum from a localization piece and a completion piece.

The completion side is given as a spectral map ``phi`` into the space ``X``
(or, for gluing, as a :class:`GluingDatum`). The checks here verify, on
explicit finite models, the statements relating ``phi``, the Thomason
subset ``Y`` and its open complement ``U``.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping

from .errors import BoundExceeded, InvalidDatum, PreconditionError
from .reports import FAIL, PASS, VACUOUS, CheckReport
from .space import SpectralSpaceModel, Violation, _bits, close_family

DEFAULT_MAX_EXHAUSTIVE = 16
DEFAULT_MAX_COCONE = 4


@dataclass(frozen=True, eq=False)
class SpectralMapModel:
    source: SpectralSpaceModel
    target: SpectralSpaceModel
    assign: Mapping[str, str]

    def __call__(self, x: str) -> str:
        return self.assign[x]

    def image(self, subset: Iterable[str] | None = None) -> frozenset[str]:
        pts = self.source.points if subset is None else subset
        return frozenset(self.assign[x] for x in pts)

    def preimage(self, subset: Iterable[str]) -> frozenset[str]:
        s = frozenset(subset)
        return frozenset(x for x in self.source.points if self.assign[x] in s)

    @property
    def _preimage_table(self) -> tuple[int, ...]:
        # target bit -> mask of source points mapping there
        cached = self.__dict__.get("_pt")
        if cached is None:
            t = [0] * len(self.target.points)
            tidx = self.target.index
            for i, x in enumerate(self.source.points):
                t[tidx[self.assign[x]]] |= 1 << i
            cached = tuple(t)
            object.__setattr__(self, "_pt", cached)
        return cached

    def preimage_mask(self, target_mask: int) -> int:
        out = 0
        t = self._preimage_table
        for j in _bits(target_mask):
            out |= t[j]
        return out

    def validate(self) -> list[Violation]:
        out = []
        src, tgt = self.source, self.target
        missing = sorted(set(src.points) - set(self.assign))
        if missing:
            out.append(Violation("map-undefined", "map is undefined on source points", tuple(missing)))
        extra = sorted(set(self.assign) - set(src.points))
        if extra:
            out.append(Violation("map-unknown-source", "map assigns unknown source points", tuple(extra)))
        bad = sorted(x for x, y in self.assign.items() if y not in tgt.index)
        if bad:
            out.append(Violation("map-unknown-target", "map sends points outside the target", tuple(bad)))
        if out:
            return out
        for x, y in sorted(src.relation):
            if x in src.index and y in src.index and not tgt.specializes(self.assign[x], self.assign[y]):
                out.append(Violation(
                    "map-not-monotone",
                    f"{x} ~> {y} but {self.assign[x]} does not specialize to {self.assign[y]}",
                    (x, y),
                ))
        for b in tgt.basics:
            pre = self.preimage(b)
            if not src.is_thomason(pre):
                out.append(Violation(
                    "map-not-spectral",
                    "preimage of a target basic is not Thomason",
                    (tuple(sorted(b)), tuple(sorted(pre))),
                ))
        return out


@dataclass(frozen=True, eq=False)
class GluingDatum:
    """Localization piece ``U``, completion piece ``Xhat`` with the Thomason
    subset ``Yhat`` over ``Y``, and the attaching map ``V -> U`` where
    ``V = Xhat - Yhat``."""

    U: SpectralSpaceModel
    Xhat: SpectralSpaceModel
    Yhat: frozenset[str]
    attach: Mapping[str, str]

    @property
    def V(self) -> frozenset[str]:
        return frozenset(self.Xhat.points) - self.Yhat

    def attach_map(self) -> SpectralMapModel:
        return SpectralMapModel(self.Xhat.restrict_to_complement(self.Yhat), self.U, dict(self.attach))

    def problems(self) -> list[str]:
        out = []
        unknown = sorted(self.Yhat - set(self.Xhat.points))
        if unknown:
            return [f"Yhat mentions unknown points {unknown}"]
        if not self.Xhat.is_thomason(self.Yhat):
            return [f"Yhat {sorted(self.Yhat)} is not Thomason in Xhat"]
        if set(self.attach) != set(self.V):
            out.append(
                f"attach must be defined exactly on Xhat - Yhat = {sorted(self.V)}, "
                f"got {sorted(self.attach)}"
            )
            return out
        clash = sorted(set(self.U.points) & self.Yhat)
        if clash:
            out.append(f"U and Yhat share point ids {clash}")
        for v in self.attach_map().validate():
            out.append(f"attach: {v.message} {list(v.witness)}")
        return out


@dataclass(frozen=True)
class GluedSpace:
    space: SpectralSpaceModel
    u_part: frozenset[str]
    y_part: frozenset[str]


def glue_spaces(datum: GluingDatum) -> GluedSpace:
    """Pushout of ``U <- V -> Xhat``.

    The order is U's order, Xhat's order on Yhat, and the cross rule
    ``u ~> y`` iff some ``z`` in V has ``u ~> attach(z)`` in U and
    ``z ~> y`` in Xhat. Nothing in Yhat specializes into U.
    """
    probs = datum.problems()
    if probs:
        raise InvalidDatum(probs)
    U, Xh, Yh = datum.U, datum.Xhat, datum.Yhat
    rel = set(U.relation)
    rel |= {(a, b) for a, b in Xh.relation if a in Yh and b in Yh}
    for z, target in datum.attach.items():
        below = U.generalizations({target})
        above = Xh.closure({z}) & Yh
        rel |= {(u, y) for u in below for y in above}
    points = set(U.points) | Yh
    tmp = SpectralSpaceModel.build(points, rel, close_basics=False)
    basics = [tmp.closure(b) for b in U.basics]
    basics += [b for b in Xh.basics if b <= Yh]

    def q(x):
        return datum.attach.get(x, x)

    limits = {x: frozenset(t) for x, t in U.limits}
    for x, tail in Xh.limits:
        if x in Yh:
            limits[x] = frozenset(q(t) for t in tail) - {x}
    space = SpectralSpaceModel.build(points, rel, basics, limits)
    return GluedSpace(space, frozenset(U.points), frozenset(Yh))


def restriction_datum(X: SpectralSpaceModel, Y: Iterable[str], phi: SpectralMapModel):
    """The datum (U, phi.source, phi^-1(Y), phi|V) with embeddings into X.

    Returns ``(datum, u_embed, y_embed)``.
    """
    Y = frozenset(Y)
    U = X.restrict_to_complement(Y)
    yhat = phi.preimage(Y)
    attach = {x: phi(x) for x in phi.source.points if x not in yhat}
    datum = GluingDatum(U, phi.source, yhat, attach)
    u_embed = {u: u for u in U.points}
    y_embed = {y: phi(y) for y in yhat}
    return datum, u_embed, y_embed


def _require_map_into(X, phi):
    if phi.target != X:
        raise PreconditionError("phi.target is not the given space X")


def tate_support_of_map(X: SpectralSpaceModel, Y: Iterable[str], phi: SpectralMapModel) -> frozenset[str]:
    """Img(phi) minus Y."""
    _require_map_into(X, phi)
    Y = frozenset(Y)
    if not X.is_thomason(Y):
        raise PreconditionError("Y is not Thomason")
    return phi.image() - Y


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        rep = fn(*args, **kwargs)
        rep.seconds = time.perf_counter() - t0
        return rep

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    wrapper.__wrapped__ = fn
    return wrapper


def _cross_pairs(X, Y):
    y = X.mask(Y)
    for i, x in enumerate(X.points):
        if y >> i & 1:
            continue
        for j in _bits(X._up[i] & y):
            yield x, X.points[j]


@_timed
def check_homeo_over_y(X: SpectralSpaceModel, Y: Iterable[str], phi: SpectralMapModel) -> CheckReport:
    """phi restricted over Y is an order isomorphism matching the basics."""
    _require_map_into(X, phi)
    Y = frozenset(Y)
    rep = CheckReport("homeo-over-y")
    src = phi.source
    pre = phi.preimage(Y)
    fibres: dict[str, list[str]] = {}
    for q in pre:
        fibres.setdefault(phi(q), []).append(q)
    for y in sorted(Y):
        f = sorted(fibres.get(y, []))
        if len(f) != 1:
            rep.fail({"kind": "fibre-size", "point": y, "preimage": f})
    for a, b in itertools.product(sorted(pre), repeat=2):
        if src.specializes(a, b) != X.specializes(phi(a), phi(b)):
            rep.fail({"kind": "order", "pair": [a, b], "image": [phi(a), phi(b)]})
    pre_mask = src.mask(pre)
    y_mask = X.mask(Y)
    fam_hat = close_family(b & pre_mask for b in src._basic_masks)
    fam_x = close_family(phi.preimage_mask(b & y_mask) for b in X._basic_masks)
    if fam_hat != fam_x:
        only_hat = sorted(sorted(src.subset(m)) for m in fam_hat - fam_x)
        only_x = sorted(sorted(src.subset(m)) for m in fam_x - fam_hat)
        rep.fail({"kind": "basics", "only_from_source": only_hat, "only_from_target": only_x})
    return rep


@_timed
def check_tiv(X: SpectralSpaceModel, Y: Iterable[str], S: Iterable[str]) -> CheckReport:
    """Every specialization from outside Y into Y passes through S."""
    Y, S = frozenset(Y), frozenset(S)
    if S & Y:
        raise PreconditionError(f"S meets Y in {sorted(S & Y)}")
    if not X.is_thomason(Y):
        raise PreconditionError("Y is not Thomason")
    rep = CheckReport("tiv")
    s = X.mask(S)
    pairs = 0
    for x, y in _cross_pairs(X, Y):
        pairs += 1
        between = X._up[X.index[x]] & X._down[X.index[y]] & s
        if not between:
            rep.fail({"x": x, "y": y})
    rep.details["cross_pairs"] = pairs
    if pairs == 0:
        rep.status = VACUOUS
        rep.notes.append("no specializations from outside Y into Y")
    return rep


@_timed
def check_tiv_strong(X: SpectralSpaceModel, Y: Iterable[str], phi: SpectralMapModel) -> CheckReport:
    """Cross specializations are mediated by images of generalizations of the
    unique preimage over Y."""
    _require_map_into(X, phi)
    Y = frozenset(Y)
    if not check_homeo_over_y(X, Y, phi).ok:
        raise PreconditionError("phi is not a homeomorphism over Y")
    rep = CheckReport("tiv-strong")
    src = phi.source
    over = {phi(q): q for q in phi.preimage(Y)}
    mediators = {}
    pairs = 0
    for x, y in _cross_pairs(X, Y):
        pairs += 1
        q1 = over[y]
        found = sorted(
            q for q in src.generalizations({q1})
            if phi(q) not in Y and X.specializes(x, phi(q)) and X.specializes(phi(q), y)
        )
        if found:
            mediators[f"{x}->{y}"] = found[0]
        else:
            rep.fail({"x": x, "y": y, "preimage": q1})
    rep.details["mediators"] = mediators
    if pairs == 0:
        rep.status = VACUOUS
        rep.notes.append("no specializations from outside Y into Y")
    return rep


def split_diagnostic(X: SpectralSpaceModel, Y: Iterable[str], tate_support: Iterable[str] | None = None):
    """Whether Y is open and closed, i.e. its complement is Thomason too."""
    Y = frozenset(Y)
    if not X.is_thomason(Y):
        raise PreconditionError("Y is not Thomason")
    is_split = X.is_thomason(frozenset(X.points) - Y)
    consistent = None
    if tate_support is not None:
        consistent = is_split == (not frozenset(tate_support))
    return SplitDiagnostic(is_split, is_split, consistent)


@dataclass(frozen=True)
class SplitDiagnostic:
    is_split: bool
    tate_must_vanish: bool
    # None when no Tate support was supplied
    support_consistent: bool | None = None


@_timed
def bounds_report(X: SpectralSpaceModel, Y: Iterable[str], tate_support: Iterable[str]) -> CheckReport:
    """immediate generalizations of Y <= tate_support <= dual closure of Y minus Y."""
    Y, T = frozenset(Y), frozenset(tate_support)
    if T & Y:
        raise PreconditionError(f"Tate support meets Y in {sorted(T & Y)}")
    rep = CheckReport("bounds")
    lower = X.immediate_generalizations(Y)
    upper = X.dual_closure(Y) - Y
    rep.details = {"lower": lower, "upper": upper, "support": T}
    if not lower <= T:
        rep.fail({"bound": "lower", "missing": sorted(lower - T)})
    if not T <= upper:
        rep.fail({"bound": "upper", "outside": sorted(T - upper)})
    return rep


def _completion_hypothesis(X, Y, phi) -> list[str]:
    """Necessary conditions for phi to come from completion along Y."""
    issues = []
    support = phi.image() - Y
    split = X.is_thomason(frozenset(X.points) - Y)
    if not split and not support:
        issues.append("Y is not open and closed but the image of phi misses every point outside Y")
    lower = X.immediate_generalizations(Y)
    if not lower <= support:
        issues.append(f"image of phi misses immediate generalizations {sorted(lower - support)}")
    return issues


class _Translator:
    """Mask translation between two numberings, via 8-bit chunk tables."""

    def __init__(self, pairs: Iterable[tuple[int, int]], width: int):
        single = {}
        for a, b in pairs:
            single[a] = single.get(a, 0) | (1 << b)
        self.tables = []
        for base in range(0, max(width, 1), 8):
            t = [0] * 256
            for byte in range(256):
                acc = 0
                for k in range(8):
                    if byte >> k & 1:
                        acc |= single.get(base + k, 0)
                t[byte] = acc
            self.tables.append(t)

    def __call__(self, mask: int) -> int:
        out = 0
        for t in self.tables:
            out |= t[mask & 0xFF]
            mask >>= 8
        return out


def _exhaustive(X, Y, phi, predicate_name, max_exhaustive):
    _require_map_into(X, phi)
    Y = frozenset(Y)
    if not X.is_thomason(Y):
        raise PreconditionError("Y is not Thomason")
    n = len(X.points)
    if n > max_exhaustive:
        raise BoundExceeded(f"|X| = {n} exceeds the exhaustive bound {max_exhaustive}")
    U = X.restrict_to_complement(Y)
    src = phi.source
    to_u = _Translator(((X.index[u], U.index[u]) for u in U.points), n)
    pred_x = getattr(X, predicate_name)
    pred_u = getattr(U, predicate_name)
    pred_s = getattr(src, predicate_name)
    counterexamples = []
    total = 0
    for m in range(1 << n):
        lhs = pred_x(m)
        rhs = pred_u(to_u(m)) and pred_s(phi.preimage_mask(m))
        if lhs != rhs:
            total += 1
            if len(counterexamples) < 20:
                counterexamples.append({"subset": sorted(X.subset(m)), "in_X": lhs, "pieces": rhs})
    return counterexamples, total, 1 << n


def _finish_exhaustive(rep, X, Y, phi, counterexamples, total, checked):
    rep.details["subsets_checked"] = checked
    rep.details["counterexamples"] = total
    if not counterexamples:
        return rep
    issues = _completion_hypothesis(X, frozenset(Y), phi)
    rep.witnesses.extend(counterexamples)
    if issues:
        rep.status = VACUOUS
        rep.notes.extend(issues)
        rep.notes.append("phi cannot come from a completion; counterexamples are expected")
    else:
        rep.status = FAIL
    return rep


@_timed
def check_recover_specializations(X, Y, phi, max_exhaustive: int = DEFAULT_MAX_EXHAUSTIVE) -> CheckReport:
    """V specialization-closed iff its U-part and its phi-preimage are, over all V."""
    ce, total, checked = _exhaustive(X, Y, phi, "is_specialization_closed_mask", max_exhaustive)
    return _finish_exhaustive(CheckReport("recover-specializations"), X, Y, phi, ce, total, checked)


@_timed
def check_closed_determined(X, Y, phi, max_exhaustive: int = DEFAULT_MAX_EXHAUSTIVE) -> CheckReport:
    """Z closed iff its U-part and its phi-preimage are closed, over all Z."""
    ce, total, checked = _exhaustive(X, Y, phi, "is_closed_mask", max_exhaustive)
    return _finish_exhaustive(CheckReport("closed-determined"), X, Y, phi, ce, total, checked)


@_timed
def check_local_preservation(X, Y, phi) -> CheckReport:
    """A local X with non-empty Y has a local completion and phi keeps the closed point."""
    _require_map_into(X, phi)
    rep = CheckReport("local-preservation")
    if not (X.is_local() and frozenset(Y)):
        rep.status = VACUOUS
        rep.notes.append("X is not local or Y is empty")
        return rep
    if not phi.source.is_local():
        rep.fail({"kind": "source-not-local", "closed_points": sorted(phi.source.closed_points())})
        return rep
    (m_hat,) = phi.source.closed_points()
    (m,) = X.closed_points()
    if phi(m_hat) != m:
        rep.fail({"kind": "closed-point", "image": phi(m_hat), "expected": m})
    return rep


# -- pushout ---------------------------------------------------------------


@lru_cache(maxsize=None)
def small_posets(max_size: int) -> tuple[tuple[int, tuple[tuple[bool, ...], ...]], ...]:
    """All posets with at most ``max_size`` elements, up to isomorphism.

    Each entry is ``(n, le)`` with ``le[a][b]`` true iff a <= b.
    """
    out = []
    for n in range(1, max_size + 1):
        offdiag = [(a, b) for a in range(n) for b in range(n) if a != b]
        seen = set()
        for bits in range(1 << len(offdiag)):
            rel = {(a, a) for a in range(n)}
            rel |= {offdiag[k] for k in range(len(offdiag)) if bits >> k & 1}
            if any((b, a) in rel for a, b in rel if a != b):
                continue
            if any((a, d) not in rel for a, b in rel for c, d in rel if b == c):
                continue
            canon = min(
                tuple(sorted((p[a], p[b]) for a, b in rel))
                for p in itertools.permutations(range(n))
            )
            if canon in seen:
                continue
            seen.add(canon)
            le = tuple(tuple((a, b) in rel for b in range(n)) for a in range(n))
            out.append((n, le))
    return tuple(out)


def monotone_maps(model: SpectralSpaceModel, size: int, le, fixed: Mapping[str, int] | None = None):
    """Yield every order-preserving map from ``model`` into the poset ``le``."""
    fixed = fixed or {}
    order = sorted(model.points, key=lambda x: (bin(model._down[model.index[x]]).count("1"), x))
    preds = {x: [z for z in order[:k] if model.specializes(z, x)] for k, x in enumerate(order)}
    succs = {x: [z for z in order[:k] if model.specializes(x, z) and z != x] for k, x in enumerate(order)}
    assign: dict[str, int] = {}

    def rec(k):
        if k == len(order):
            yield dict(assign)
            return
        x = order[k]
        choices = [fixed[x]] if x in fixed else range(size)
        for v in choices:
            if all(le[assign[z]][v] for z in preds[x]) and all(le[v][assign[z]] for z in succs[x]):
                assign[x] = v
                yield from rec(k + 1)
                del assign[x]

    yield from rec(0)


def _compare_via(glued: SpectralSpaceModel, X: SpectralSpaceModel, m: Mapping[str, str]) -> list[dict]:
    out = []
    rel = {(m[a], m[b]) for a, b in glued.relation}
    for a, b in sorted(rel - X.relation):
        out.append({"kind": "extra-specialization", "pair": [a, b]})
    for a, b in sorted(X.relation - rel):
        out.append({"kind": "missing-specialization", "pair": [a, b]})
    fam = {frozenset(m[x] for x in b) for b in glued.basics}
    if fam != set(X.basics):
        out.append({
            "kind": "basics",
            "only_glued": sorted(sorted(b) for b in fam - set(X.basics)),
            "only_X": sorted(sorted(b) for b in set(X.basics) - fam),
        })
    lim = {m[x]: frozenset(m[t] for t in tail) for x, tail in glued.limits}
    if lim != X.limit_map:
        out.append({"kind": "limits", "glued": lim, "X": X.limit_map})
    return out


@_timed
def check_pushout(
    datum: GluingDatum,
    X: SpectralSpaceModel,
    u_embed: Mapping[str, str],
    y_embed: Mapping[str, str],
    max_target: int = DEFAULT_MAX_COCONE,
) -> CheckReport:
    """X is the pushout of U <- V -> Xhat.

    Two parts: the glued model is isomorphic to X through the embeddings
    (order, basics and limits), and every compatible pair of order maps
    from U and Xhat into a poset with at most ``max_target`` elements
    factors uniquely through X.
    """
    rep = CheckReport("pushout")
    if set(u_embed) != set(datum.U.points) or set(y_embed) != set(datum.Yhat):
        raise PreconditionError("embeddings must be defined on U and on Yhat")
    images = list(u_embed.values()) + list(y_embed.values())
    if sorted(images) != sorted(X.points) or len(set(images)) != len(images):
        raise PreconditionError("embeddings do not identify U and Yhat with a partition of X")
    glued = glue_spaces(datum)
    mapping = {**u_embed, **y_embed}
    for mismatch in _compare_via(glued.space, X, mapping):
        rep.fail(mismatch)

    # legs into X
    leg_hat = {v: u_embed[datum.attach[v]] for v in datum.V}
    leg_hat.update(y_embed)
    for a, b in sorted(datum.Xhat.relation):
        if not X.specializes(leg_hat[a], leg_hat[b]):
            rep.fail({"kind": "leg-not-monotone", "pair": [a, b]})
    inv_u = {v: k for k, v in u_embed.items()}
    inv_y = {v: k for k, v in y_embed.items()}

    cocones = 0
    for n, le in small_posets(max_target):
        f_cache: dict[tuple, list[dict]] = {}
        for g in monotone_maps(datum.Xhat, n, le):
            fixed: dict[str, int] = {}
            clash = False
            for v in datum.V:
                u = datum.attach[v]
                if fixed.setdefault(u, g[v]) != g[v]:
                    clash = True
                    break
            if clash:
                continue
            key = tuple(sorted(fixed.items()))
            if key not in f_cache:
                f_cache[key] = list(monotone_maps(datum.U, n, le, fixed))
            for f in f_cache[key]:
                cocones += 1
                h = {x: (f[inv_u[x]] if x in inv_u else g[inv_y[x]]) for x in X.points}
                bad = next(((a, b) for a, b in X.relation if not le[h[a]][h[b]]), None)
                if bad is not None:
                    rep.fail({"kind": "no-factorization", "target_size": n, "pair": list(bad)})
                    break
    rep.details["cocones_checked"] = cocones
    rep.details["target_posets"] = len(small_posets(max_target))
    return rep


@_timed
def check_glue_round_trip(X, Y, phi) -> CheckReport:
    """glue(restriction datum of (X, Y, phi)) reproduces X."""
    rep = CheckReport("glue-round-trip")
    datum, u_embed, y_embed = restriction_datum(X, Y, phi)
    glued = glue_spaces(datum)
    for v in glued.space.validate():
        rep.fail({"kind": "invalid-glued-space", "violation": v.kind, "witness": list(v.witness)})
    for mismatch in _compare_via(glued.space, X, {**u_embed, **y_embed}):
        rep.fail(mismatch)
    return rep
