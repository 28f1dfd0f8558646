"""Finite annotated models of spectral spaces.

A model is a finite poset (the specialization order, ``x ~> y`` meaning
``y`` lies in the closure of ``x``), a family of declared Thomason closed
sets ("basics") and optional limit annotations used to emulate the
constructible topology of a truncated infinite space.

Subsets are passed around as frozensets of point ids. Internally every
model numbers its points and works with integer bitmasks.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

from .errors import (
    AgreementFailure,
    NotSpecializationClosedError,
    NotThomasonError,
    UnknownPointError,
)


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def meet_closure(masks: Iterable[int]) -> set[int]:
    """All intersections of non-empty subfamilies."""
    out: set[int] = set()
    for g in masks:
        out |= {r & g for r in out}
        out.add(g)
    return out


def join_closure(masks: Iterable[int]) -> set[int]:
    """All unions of non-empty subfamilies."""
    out: set[int] = set()
    for g in masks:
        out |= {r | g for r in out}
        out.add(g)
    return out


def saturate(mask: int, limits: Iterable[tuple[int, int]]) -> int:
    """Add every limit point whose tail lies in ``mask``, until stable."""
    limits = list(limits)
    changed = True
    while changed:
        changed = False
        for bit, tail in limits:
            if tail & mask == tail and not mask >> bit & 1:
                mask |= 1 << bit
                changed = True
    return mask


def close_family(masks: Iterable[int], limits: Iterable[tuple[int, int]] = ()) -> set[int]:
    """Close a family of sets under pairwise union and intersection, then saturate by limits.

    Empty sets are dropped. The union-closure of an intersection-closed
    family is again intersection-closed, so one pass of each suffices
    unless limit saturation changes something.
    """
    limits = list(limits)
    fam = {m for m in masks if m}
    while True:
        closed = {m for m in join_closure(meet_closure(fam)) if m}
        sat = {saturate(m, limits) for m in closed} if limits else closed
        if sat == closed or sat == fam:
            return sat
        fam = sat


def _family_key(s: frozenset) -> tuple:
    return (len(s), tuple(sorted(s)))


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    witness: tuple = ()


@dataclass(frozen=True)
class SubsetClassification:
    specialization_closed: bool
    thomason: bool
    proconstructible: bool
    closed: bool


@dataclass(frozen=True)
class SpectralSpaceModel:
    """A finite spectral-space surrogate.

    Use :meth:`build` rather than the raw constructor: it canonicalizes
    the point order and closes the basics family. The raw constructor
    stores exactly what it is given, which is what the validator needs to
    see malformed inputs.
    """

    points: tuple[str, ...]
    relation: frozenset[tuple[str, str]]
    basics: tuple[frozenset[str], ...] = ()
    limits: tuple[tuple[str, frozenset[str]], ...] = ()

    @classmethod
    def build(
        cls,
        points: Iterable[str],
        specializes: Iterable[tuple[str, str]] = (),
        basics: Iterable[Iterable[str]] = (),
        limits: Mapping[str, Iterable[str]] | None = None,
        *,
        covers: bool = False,
        close_basics: bool = True,
    ) -> "SpectralSpaceModel":
        """Construct a model.

        With ``covers=True`` the relation is taken as generating pairs and
        replaced by its reflexive-transitive closure. Otherwise it is stored
        as given (no repair). Unless ``close_basics`` is false, basics are
        closed under union and intersection and saturated by limits.
        """
        pts = tuple(sorted(set(points)))
        rel = {tuple(p) for p in specializes}
        if covers:
            rel = _reflexive_transitive_closure(pts, rel)
        lim = tuple(sorted((x, frozenset(t)) for x, t in (limits or {}).items()))
        raw = cls(pts, frozenset(rel), tuple(frozenset(b) for b in basics), lim)
        if not close_basics:
            return raw
        unknown = {x for b in raw.basics for x in b} - set(pts)
        if unknown:
            raise UnknownPointError(unknown)
        fam = close_family((raw.mask(b) for b in raw.basics), raw._limit_masks)
        closed = tuple(sorted((raw.subset(m) for m in fam), key=_family_key))
        return cls(pts, raw.relation, closed, lim)

    # -- indexing -------------------------------------------------------

    @cached_property
    def index(self) -> dict[str, int]:
        return {x: i for i, x in enumerate(self.points)}

    @cached_property
    def full_mask(self) -> int:
        return (1 << len(self.points)) - 1

    def mask(self, subset: Iterable[str]) -> int:
        idx = self.index
        m = 0
        bad = []
        for x in subset:
            i = idx.get(x)
            if i is None:
                bad.append(x)
            else:
                m |= 1 << i
        if bad:
            raise UnknownPointError(bad)
        return m

    def subset(self, mask: int) -> frozenset[str]:
        return frozenset(self.points[i] for i in _bits(mask))

    def _norm(self, subset: Iterable[str]) -> int:
        if isinstance(subset, str):
            raise TypeError("expected a collection of point ids, got a single string")
        return self.mask(subset)

    @cached_property
    def limit_map(self) -> dict[str, frozenset[str]]:
        return dict(self.limits)

    @cached_property
    def _limit_masks(self) -> tuple[tuple[int, int], ...]:
        idx = self.index
        out = []
        for x, tail in self.limits:
            if x in idx and all(t in idx for t in tail):
                out.append((idx[x], self.mask(tail)))
        return tuple(out)

    @cached_property
    def _up(self) -> tuple[int, ...]:
        # up[i]: closure of {point i}; always contains i
        idx = self.index
        up = [1 << i for i in range(len(self.points))]
        for x, y in self.relation:
            if x in idx and y in idx:
                up[idx[x]] |= 1 << idx[y]
        return tuple(up)

    @cached_property
    def _down(self) -> tuple[int, ...]:
        down = [1 << i for i in range(len(self.points))]
        for i, u in enumerate(self._up):
            for j in _bits(u):
                down[j] |= 1 << i
        return tuple(down)

    @cached_property
    def _basic_masks(self) -> tuple[int, ...]:
        return tuple(self.mask(b) for b in self.basics)

    @cached_property
    def _min_basic(self) -> tuple[int | None, ...]:
        out: list[int | None] = [None] * len(self.points)
        for b in self._basic_masks:
            for i in _bits(b):
                out[i] = b if out[i] is None else out[i] & b
        return tuple(out)

    @cached_property
    def _meet_closed(self) -> bool:
        fam = set(self._basic_masks)
        return all((a & b) in fam or not a & b for a in fam for b in fam)

    @cached_property
    def _atoms(self) -> tuple[int, ...]:
        """Atoms of the Boolean algebra generated by the basics."""
        seen = 0
        atoms = []
        n = len(self.points)
        members = [0] * n  # bitmask over basics containing point i
        for k, b in enumerate(self._basic_masks):
            for i in _bits(b):
                members[i] |= 1 << k
        for i in range(n):
            if seen >> i & 1:
                continue
            atom = 0
            for j in range(n):
                if members[j] == members[i]:
                    atom |= 1 << j
            seen |= atom
            atoms.append(atom)
        return tuple(atoms)

    def specializes(self, x: str, y: str) -> bool:
        return bool(self._up[self.index[x]] >> self.index[y] & 1)

    def __len__(self) -> int:
        return len(self.points)

    # -- mask-level primitives (used by the exhaustive checks) -----------

    def closure_mask(self, m: int) -> int:
        out = 0
        up = self._up
        for i in _bits(m):
            out |= up[i]
        return out

    def generalizations_mask(self, m: int) -> int:
        out = 0
        down = self._down
        for i in _bits(m):
            out |= down[i]
        return out

    def is_specialization_closed_mask(self, m: int) -> bool:
        up = self._up
        return all(up[i] & m == up[i] for i in _bits(m))

    def is_thomason_mask(self, m: int) -> bool:
        if self._meet_closed:
            mb = self._min_basic
            return all(mb[i] is not None and mb[i] & m == mb[i] for i in _bits(m))
        cover = 0
        for b in self._basic_masks:
            if b & m == b:
                cover |= b
        return cover == m

    def in_boolean_algebra_mask(self, m: int) -> bool:
        return all(a & m in (0, a) for a in self._atoms)

    def satisfies_limit_rule_mask(self, m: int) -> bool:
        return all(m >> x & 1 for x, tail in self._limit_masks if tail & m == tail)

    def is_proconstructible_mask(self, m: int) -> bool:
        return self.in_boolean_algebra_mask(m) and self.satisfies_limit_rule_mask(m)

    def is_closed_mask(self, m: int) -> bool:
        return self.is_specialization_closed_mask(m) and self.is_proconstructible_mask(m)

    # -- subset calculus ------------------------------------------------

    def closure(self, subset: Iterable[str]) -> frozenset[str]:
        return self.subset(self.closure_mask(self._norm(subset)))

    def generalizations(self, subset: Iterable[str]) -> frozenset[str]:
        """gen(S): points whose closure meets ``subset``."""
        return self.subset(self.generalizations_mask(self._norm(subset)))

    def classify(self, subset: Iterable[str]) -> SubsetClassification:
        m = self._norm(subset)
        sc = self.is_specialization_closed_mask(m)
        pc = self.is_proconstructible_mask(m)
        return SubsetClassification(
            specialization_closed=sc,
            thomason=self.is_thomason_mask(m),
            proconstructible=pc,
            closed=sc and pc,
        )

    def is_thomason(self, subset: Iterable[str]) -> bool:
        return self.is_thomason_mask(self._norm(subset))

    def _require_thomason(self, subset) -> int:
        m = self._norm(subset)
        if not self.is_thomason_mask(m):
            raise NotThomasonError(self.subset(m))
        return m

    def completion_kernel_basics(self, Y: Iterable[str]) -> list[frozenset[str]]:
        """Basics disjoint from ``Y``: supports of compacts killed by completion."""
        y = self._require_thomason(Y)
        return [self.subset(b) for b in self._basic_masks if not b & y]

    def thomason_w(self, Y: Iterable[str]) -> frozenset[str]:
        """W(Y): union of all basics disjoint from the Thomason subset ``Y``."""
        y = self._require_thomason(Y)
        w = 0
        for b in self._basic_masks:
            if not b & y:
                w |= b
        return self.subset(w)

    def cons_closure(self, subset: Iterable[str]) -> frozenset[str]:
        """Closure under the limit rule (constructible-closure surrogate)."""
        return self.subset(saturate(self._norm(subset), self._limit_masks))

    def dual_closure(self, Y: Iterable[str]) -> frozenset[str]:
        """Closure of ``Y`` in the inverse topology, computed two ways.

        The complement of W(Y) and gen(cons-closure of Y) must agree; a
        disagreement means the model is incoherent and raises
        :class:`AgreementFailure` with both values attached.
        """
        y = self._require_thomason(Y)
        via_w = self.full_mask & ~self.mask(self.thomason_w(self.subset(y)))
        via_gen = self.generalizations_mask(saturate(y, self._limit_masks))
        if via_w != via_gen:
            raise AgreementFailure(
                "complement of W(Y) differs from gen(cons(Y))",
                {"complement_of_w": self.subset(via_w), "gen_of_cons": self.subset(via_gen)},
            )
        return self.subset(via_w)

    def immediate_generalizations(self, Y: Iterable[str]) -> frozenset[str]:
        """Points x outside Y with some y in Y such that the interval [x, y] is {x, y}."""
        y = self._norm(Y)
        if not self.is_specialization_closed_mask(y):
            raise NotSpecializationClosedError(self.subset(y))
        up, down = self._up, self._down
        out = 0
        for i in range(len(self.points)):
            if y >> i & 1:
                continue
            for j in _bits(up[i] & y):
                if down[j] & up[i] == (1 << i) | (1 << j):
                    out |= 1 << i
                    break
        return self.subset(out)

    def closed_points(self) -> frozenset[str]:
        return frozenset(x for i, x in enumerate(self.points) if self._up[i] == 1 << i)

    def is_local(self) -> bool:
        closed = [self.index[x] for x in self.closed_points()]
        if len(closed) != 1:
            return False
        m = closed[0]
        return all(u >> m & 1 for u in self._up)

    # -- derived models -------------------------------------------------

    def induced(self, subset: Iterable[str]) -> "SpectralSpaceModel":
        """Subspace model on ``subset``: traced order, basics and limits."""
        keep = self.subset(self._norm(subset))
        rel = [(x, y) for x, y in self.relation if x in keep and y in keep]
        basics = [b & keep for b in self.basics if b & keep]
        limits = {x: t for x, t in self.limits if x in keep and t <= keep}
        return SpectralSpaceModel.build(keep, rel, basics, limits)

    def restrict_to_complement(self, Y: Iterable[str]) -> "SpectralSpaceModel":
        """The model of U = points minus the Thomason subset ``Y``."""
        y = self._require_thomason(Y)
        return self.induced(self.subset(self.full_mask & ~y))

    def rename(self, mapping: Mapping[str, str]) -> "SpectralSpaceModel":
        """Relabel points; ids missing from ``mapping`` are kept."""
        f = lambda x: mapping.get(x, x)
        return SpectralSpaceModel(
            tuple(sorted(f(x) for x in self.points)),
            frozenset((f(x), f(y)) for x, y in self.relation),
            tuple(sorted((frozenset(map(f, b)) for b in self.basics), key=_family_key)),
            tuple(sorted((f(x), frozenset(map(f, t))) for x, t in self.limits)),
        )

    def covers(self) -> list[tuple[str, str]]:
        """Covering pairs of the order (x ~> y, x != y, nothing strictly between)."""
        out = []
        up, down = self._up, self._down
        for i, x in enumerate(self.points):
            for j in _bits(up[i] & ~(1 << i)):
                if up[i] & down[j] == (1 << i) | (1 << j):
                    out.append((x, self.points[j]))
        return sorted(out)

    def validate(self) -> list[Violation]:
        return validate_space(self)


def _reflexive_transitive_closure(points, pairs):
    succ = {x: {x} for x in points}
    for x, y in pairs:
        succ.setdefault(x, {x}).add(y)
        succ.setdefault(y, {y})
    changed = True
    while changed:
        changed = False
        for x in succ:
            new = set().union(*(succ[y] for y in succ[x]))
            if not new <= succ[x]:
                succ[x] |= new
                changed = True
    return {(x, y) for x in succ for y in succ[x]}


def validate_space(model: SpectralSpaceModel) -> list[Violation]:
    """Report every violated model invariant. Never raises on bad data."""
    out: list[Violation] = []
    pts = set(model.points)
    if len(pts) != len(model.points):
        dup = sorted({x for x in model.points if model.points.count(x) > 1})
        out.append(Violation("duplicate-point", "point ids are not unique", tuple(dup)))
    for x in sorted(pts):
        if not isinstance(x, str) or not x:
            out.append(Violation("empty-id", "point ids must be non-empty strings", (x,)))

    stray = sorted({z for pair in model.relation for z in pair} - pts)
    if stray:
        out.append(Violation("unknown-point", "relation mentions unknown points", tuple(stray)))
    rel = {(x, y) for x, y in model.relation if x in pts and y in pts}
    for x in sorted(pts):
        if (x, x) not in rel:
            out.append(Violation("reflexivity", f"{x} does not specialize to itself", (x,)))
    for x, y in sorted(rel):
        if x < y and (y, x) in rel:
            out.append(Violation("antisymmetry", f"{x} ~> {y} and {y} ~> {x}", (x, y)))
    succ: dict[str, set[str]] = {x: set() for x in pts}
    for x, y in rel:
        succ[x].add(y)
    for x in sorted(pts):
        for y in sorted(succ[x]):
            for z in sorted(succ[y] - succ[x]):
                out.append(Violation("transitivity", f"{x} ~> {y} ~> {z} but not {x} ~> {z}", (x, y, z)))

    basics = [frozenset(b) for b in model.basics]
    for b in basics:
        bad = sorted(b - pts)
        if bad:
            out.append(Violation("unknown-point", "basic mentions unknown points", tuple(bad)))
    basics = [b & pts for b in basics]
    for b in basics:
        for x in sorted(b):
            leak = sorted(succ[x] - b)
            if leak:
                out.append(Violation(
                    "basic-not-specialization-closed",
                    f"basic {sorted(b)} contains {x} but not its specialization {leak[0]}",
                    (tuple(sorted(b)), x, leak[0]),
                ))
                break
    order = sorted(pts, key=str)
    bit = {x: 1 << i for i, x in enumerate(order)}

    def to_mask(subset) -> int:
        m = 0
        for x in subset:
            m |= bit[x]
        return m

    # a finite tail inside a union forces its limit point in
    known_limits = [
        (bit[x].bit_length() - 1, to_mask(t))
        for x, t in model.limits
        if x in pts and t and frozenset(t) <= pts
    ]
    masks = {to_mask(b): b for b in basics}
    fam = set(masks) | {0}
    uniq = sorted(masks.items(), key=lambda kv: _family_key(kv[1]))
    for i, (a, sa) in enumerate(uniq):
        for b, sb in uniq[i + 1:]:
            if saturate(a | b, known_limits) not in fam:
                out.append(Violation("basics-union", "saturated union of two basics is not a basic",
                                     (tuple(sorted(sa)), tuple(sorted(sb)))))
            if a & b not in fam:
                out.append(Violation("basics-intersection", "intersection of two basics is not a basic",
                                     (tuple(sorted(sa)), tuple(sorted(sb)))))

    for x, tail in model.limits:
        tail = frozenset(tail)
        bad = sorted(({x} | tail) - pts)
        if bad:
            out.append(Violation("unknown-point", "limit annotation mentions unknown points", tuple(bad)))
            continue
        if not tail:
            out.append(Violation("limit-empty-tail", f"limit point {x} has an empty tail", (x,)))
        if x in tail:
            out.append(Violation("limit-self", f"limit point {x} lies in its own tail", (x,)))
        for b in basics:
            if tail <= b and x not in b:
                out.append(Violation(
                    "limit-coherence",
                    f"basic {sorted(b)} contains the tail of {x} but not {x}",
                    (x, tuple(sorted(b))),
                ))
    return out
