"""Brute-force finite groups from Cayley tables.

Enough group theory for the equivariant and Mackey examples: subgroup
enumeration (two independent ways), conjugacy classes of subgroups,
p-group tests and the elementary abelian part of the subgroup lattice.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .errors import GroupError

DEFAULT_MAX_ORDER = 64


@dataclass(frozen=True)
class FiniteGroupModel:
    order: int
    mul: tuple[tuple[int, ...], ...]
    identity: int = 0
    name: str = ""

    @property
    def elements(self) -> range:
        return range(self.order)

    @cached_property
    def inverse(self) -> tuple[int, ...]:
        e = self.identity
        return tuple(next(b for b in self.elements if self.mul[a][b] == e) for a in self.elements)

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.mul[x][a]
            k += 1
        return k

    def conjugate(self, g: int, subset: Iterable[int]) -> frozenset[int]:
        gi = self.inverse[g]
        return frozenset(self.mul[self.mul[g][h]][gi] for h in subset)

    def is_abelian(self) -> bool:
        m = self.mul
        return all(m[a][b] == m[b][a] for a in self.elements for b in self.elements)

    def generated(self, gens: Iterable[int]) -> frozenset[int]:
        """Subgroup generated by ``gens`` (orbit of the identity under right multiplication)."""
        gens = list(set(gens))
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.mul[x][g]
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(seen)

    def is_subgroup(self, subset: Iterable[int]) -> bool:
        h = frozenset(subset)
        if self.identity not in h:
            return False
        return all(self.mul[a][b] in h for a in h for b in h)

    def validate(self) -> list[str]:
        """Problems with the Cayley table; empty when it defines a group."""
        n, m = self.order, self.mul
        probs = []
        if len(m) != n or any(len(row) != n for row in m):
            return [f"table is not {n}x{n}"]
        full = set(range(n))
        for a in range(n):
            if set(m[a]) != full:
                probs.append(f"row {a} is not a permutation")
            if {m[b][a] for b in range(n)} != full:
                probs.append(f"column {a} is not a permutation")
        e = self.identity
        if any(m[e][a] != a or m[a][e] != a for a in range(n)):
            probs.append(f"{e} is not an identity")
        if not probs:
            for a, b, c in itertools.product(range(n), repeat=3):
                if m[m[a][b]][c] != m[a][m[b][c]]:
                    probs.append(f"not associative at ({a}, {b}, {c})")
                    break
        return probs


def _cyclic_product(factors: Sequence[int]) -> FiniteGroupModel:
    elems = list(itertools.product(*(range(n) for n in factors)))
    index = {e: i for i, e in enumerate(elems)}
    mul = tuple(
        tuple(index[tuple((x + y) % n for x, y, n in zip(a, b, factors))] for b in elems)
        for a in elems
    )
    name = " x ".join(f"Z/{n}" for n in factors) if factors else "1"
    return FiniteGroupModel(len(elems), mul, index[tuple(0 for _ in factors)], name)


def _dihedral(n: int) -> FiniteGroupModel:
    # element r^i s^j stored at index i + n*j; s r s = r^-1
    def idx(i, j):
        return i % n + n * j

    mul = []
    for a in range(2 * n):
        i, j = a % n, a // n
        row = []
        for b in range(2 * n):
            k, l = b % n, b // n
            row.append(idx(i + (-k if j else k), (j + l) % 2))
        mul.append(tuple(row))
    return FiniteGroupModel(2 * n, tuple(mul), 0, f"D{2 * n}")


def build_group(description, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroupModel:
    """Group from a list of cyclic factor orders, or the name ``"D8"``.

    ``[2, 3]`` is Z/2 x Z/3; ``[]`` is the trivial group. Dihedral groups
    ``"D<2n>"`` are accepted for any n >= 2.
    """
    if isinstance(description, str):
        name = description.strip().upper()
        if not (name.startswith("D") and name[1:].isdigit()):
            raise GroupError(f"unknown group name {description!r}")
        order = int(name[1:])
        if order < 4 or order % 2:
            raise GroupError(f"dihedral order must be even and >= 4, got {order}")
        if order > max_order:
            raise GroupError(f"order {order} exceeds the bound {max_order}")
        g = _dihedral(order // 2)
    else:
        try:
            factors = [int(n) for n in description]
        except (TypeError, ValueError):
            raise GroupError(f"malformed group description {description!r}") from None
        if any(n < 1 for n in factors):
            raise GroupError("cyclic factors must be positive")
        if math.prod(factors) > max_order:
            raise GroupError(f"order {math.prod(factors)} exceeds the bound {max_order}")
        g = _cyclic_product(factors)
    probs = g.validate()
    if probs:
        raise GroupError("; ".join(probs))
    return g


# -- subgroups -------------------------------------------------------------


def cyclic_subgroups(G: FiniteGroupModel) -> set[frozenset[int]]:
    return {G.generated([a]) for a in G.elements}


def subgroups_by_growth(G: FiniteGroupModel) -> set[frozenset[int]]:
    """Every subgroup, grown from the trivial one by adjoining one element at a time."""
    trivial = frozenset([G.identity])
    gens = {trivial: []}
    frontier = [trivial]
    while frontier:
        nxt = []
        for H in frontier:
            for g in G.elements:
                if g in H:
                    continue
                K = G.generated(gens[H] + [g])
                if K not in gens:
                    gens[K] = gens[H] + [g]
                    nxt.append(K)
        frontier = nxt
    return set(gens)


def _product_closure(G: FiniteGroupModel, a: frozenset[int], b: frozenset[int]) -> frozenset[int]:
    cur = set(a) | set(b)
    while True:
        new = {G.mul[x][y] for x in cur for y in cur}
        if new <= cur:
            return frozenset(cur)
        cur |= new


def subgroups_by_joins(G: FiniteGroupModel) -> set[frozenset[int]]:
    """Every subgroup, as the join-closure of the cyclic subgroups.

    Joins are computed by closing the union under products, independent of
    the generator search used by :func:`subgroups_by_growth`.
    """
    cyc = cyclic_subgroups(G)
    found = set(cyc)
    frontier = set(cyc)
    while frontier:
        nxt = set()
        for H in frontier:
            for C in cyc:
                if C <= H:
                    continue
                K = _product_closure(G, H, C)
                if K not in found:
                    found.add(K)
                    nxt.add(K)
        frontier = nxt
    return found


def all_subgroups(G: FiniteGroupModel) -> list[frozenset[int]]:
    """All subgroups, enumerated twice; raises if the enumerators disagree."""
    a = subgroups_by_growth(G)
    b = subgroups_by_joins(G)
    if a != b:
        raise GroupError(f"subgroup enumerators disagree on {G.name or 'group'}: {len(a)} vs {len(b)}")
    return sorted(a, key=lambda h: (len(h), sorted(h)))


@dataclass(frozen=True)
class SubgroupClass:
    representatives: tuple[frozenset[int], ...]
    order: int

    @property
    def rep(self) -> frozenset[int]:
        return self.representatives[0]

    def __contains__(self, subgroup) -> bool:
        return frozenset(subgroup) in self.representatives


def subgroup_classes(G: FiniteGroupModel) -> list[SubgroupClass]:
    """Conjugacy classes of subgroups, ordered by subgroup order then by smallest representative."""
    remaining = all_subgroups(G)
    seen: set[frozenset[int]] = set()
    classes = []
    for H in remaining:
        if H in seen:
            continue
        orbit = {G.conjugate(g, H) for g in G.elements}
        seen |= orbit
        reps = tuple(sorted(orbit, key=sorted))
        classes.append(SubgroupClass(reps, len(H)))
    classes.sort(key=lambda c: (c.order, sorted(c.rep)))
    return classes


def subconjugate(small: SubgroupClass, big: SubgroupClass) -> bool:
    """Some representative of ``small`` lies inside some conjugate of ``big``."""
    return any(h <= k for h in small.representatives for k in big.representatives)


def class_of(classes: Sequence[SubgroupClass], subgroup) -> SubgroupClass:
    h = frozenset(subgroup)
    for c in classes:
        if h in c.representatives:
            return c
    raise GroupError("not a subgroup of this group")


@dataclass(frozen=True)
class SubgroupFlags:
    is_p_group: bool
    is_elementary_abelian: bool
    is_abelian: bool
    is_trivial: bool


def is_prime_power(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


def classify_subgroup(G: FiniteGroupModel, H: Iterable[int], p: int) -> SubgroupFlags:
    H = frozenset(H)
    if not G.is_subgroup(H):
        raise GroupError("H is not a subgroup")
    abelian = all(G.mul[a][b] == G.mul[b][a] for a in H for b in H)
    elem = abelian and all(G.element_order(a) == p for a in H if a != G.identity)
    return SubgroupFlags(
        is_p_group=is_prime_power(len(H), p),
        is_elementary_abelian=elem,
        is_abelian=abelian,
        is_trivial=len(H) == 1,
    )


def equivariant_tate_classes(G: FiniteGroupModel, p: int) -> list[SubgroupClass]:
    """Classes of nontrivial p-subgroups of an abelian group."""
    if not G.is_abelian():
        raise GroupError("equivariant Tate classification is only known for abelian groups")
    out = []
    for c in subgroup_classes(G):
        f = classify_subgroup(G, c.rep, p)
        if f.is_p_group and not f.is_trivial:
            out.append(c)
    return out


def elementary_abelian_image(G: FiniteGroupModel, p: int) -> list[SubgroupClass]:
    """Classes contained, up to conjugacy, in some elementary abelian p-subgroup."""
    classes = subgroup_classes(G)
    elem = [c for c in classes if classify_subgroup(G, c.rep, p).is_elementary_abelian]
    return [c for c in classes if any(subconjugate(c, e) for e in elem)]


def abelian_group_types(order: int) -> list[list[int]]:
    """Cyclic-factor descriptions (prime powers) of every abelian group of the given order."""
    per_prime = []
    n, q = order, 2
    while n > 1:
        if n % q == 0:
            k = 0
            while n % q == 0:
                n //= q
                k += 1
            per_prime.append([[q ** part for part in lam] for lam in _partitions(k)])
        q += 1
    if not per_prime:
        return [[]]
    return [sum(combo, []) for combo in itertools.product(*per_prime)]


def _partitions(k: int, largest: int | None = None) -> list[list[int]]:
    largest = k if largest is None else largest
    if k == 0:
        return [[]]
    out = []
    for first in range(min(k, largest), 0, -1):
        out += [[first] + rest for rest in _partitions(k - first, first)]
    return out
