import itertools
import math

import pytest

from ttglue.errors import GroupError
from ttglue.groups import (
    abelian_group_types,
    all_subgroups,
    build_group,
    classify_subgroup,
    elementary_abelian_image,
    equivariant_tate_classes,
    subgroup_classes,
    subgroups_by_growth,
    subgroups_by_joins,
)


def brute_subgroups(G):
    """Every subset containing the identity and closed under multiplication."""
    rest = [g for g in G.elements if g != G.identity]
    out = set()
    for r in range(len(rest) + 1):
        for combo in itertools.combinations(rest, r):
            H = frozenset(combo) | {G.identity}
            if all(G.mul[a][b] in H for a in H for b in H):
                out.add(H)
    return out


def gaussian_binomial(n, k, p):
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= p ** (n - i) - 1
        den *= p ** (i + 1) - 1
    return num // den


def conjugate_partition(lam):
    return [sum(1 for part in lam if part > i) for i in range(max(lam, default=0))]




def birkhoff_total(lam, p):
    seen, total = set(), 0
    for mu in itertools.product(*(range(part + 1) for part in sorted(lam, reverse=True))):
        key = tuple(sorted((m for m in mu if m), reverse=True))
        if key in seen:
            continue
        lam_sorted = sorted(lam, reverse=True)
        if any(m > l for m, l in zip(key, lam_sorted)):
            continue
        seen.add(key)
        lc = conjugate_partition(lam_sorted)
        mc = conjugate_partition(list(key)) + [0] * (len(lc) + 1)
        count = 1
        for i in range(len(lc)):
            count *= p ** (mc[i + 1] * (lc[i] - mc[i])) * gaussian_binomial(lc[i] - mc[i + 1], mc[i] - mc[i + 1], p)
        total += count
    return total


def factor_exponents(factors):
    """Split prime-power cyclic factors by prime: {p: [exponents]}."""
    out = {}
    for n in factors:
        p = next(q for q in range(2, n + 1) if n % q == 0)
        out.setdefault(p, []).append(round(math.log(n, p)))
    return out


class TestBuild:
    def test_examples(self):
        assert build_group([2]).order == 2
        d8 = build_group("D8")
        assert d8.order == 8 and not d8.is_abelian()
        r = 1
        assert d8.element_order(r) == 4
        s = 4
        assert d8.element_order(s) == 2
        assert d8.mul[d8.mul[s][r]][s] == d8.inverse[r]
        z6 = build_group([2, 3])
        assert z6.order == 6 and any(z6.element_order(g) == 6 for g in z6.elements)

    def test_errors(self):
        with pytest.raises(GroupError):
            build_group([8, 8, 2])
        with pytest.raises(GroupError):
            build_group("Q8")
        with pytest.raises(GroupError):
            build_group(["x"])


class TestSubgroups:
    @pytest.mark.parametrize("desc", [[1], [2], [3], [4], [2, 2], [6], [2, 4], [2, 2, 2], [3, 3], "D8", "D6", [12]])
    def test_enumerators_match_brute_force(self, desc):
        G = build_group(desc)
        truth = brute_subgroups(G)
        assert subgroups_by_growth(G) == truth
        assert subgroups_by_joins(G) == truth

    def test_birkhoff_helper_small_cases(self):
        assert birkhoff_total([1, 1], 2) == 5
        assert birkhoff_total([2], 2) == 3
        assert birkhoff_total([1, 1, 1], 2) == 16

    @pytest.mark.parametrize("factors", [t for n in range(2, 33) for t in abelian_group_types(n)])
    def test_counts_match_birkhoff(self, factors):
        G = build_group(factors)
        expected = math.prod(birkhoff_total(exps, p) for p, exps in factor_exponents(factors).items())
        assert len(all_subgroups(G)) == expected

    def test_abelian_type_counts(self):
        # number of abelian groups of order n (partition function per prime)
        assert [len(abelian_group_types(n)) for n in (1, 8, 16, 32, 36, 24)] == [1, 3, 5, 7, 4, 3]


class TestClasses:
    def test_counts(self):
        assert len(subgroup_classes(build_group([2]))) == 2
        assert len(subgroup_classes(build_group("D8"))) == 8
        assert [c.order for c in subgroup_classes(build_group([2, 3]))] == [1, 2, 3, 6]
        assert all(len(subgroup_classes(build_group([p]))) == 2 for p in (2, 3, 5, 7))

    def test_d8_orbit_sizes(self):
        sizes = sorted((c.order, len(c.representatives)) for c in subgroup_classes(build_group("D8")))
        assert sizes == [(1, 1), (2, 1), (2, 2), (2, 2), (4, 1), (4, 1), (4, 1), (8, 1)]


class TestClassify:
    def test_klein_four_in_d8(self):
        G = build_group("D8")
        kleins = [c for c in subgroup_classes(G) if c.order == 4 and classify_subgroup(G, c.rep, 2).is_elementary_abelian]
        assert len(kleins) == 2
        f = classify_subgroup(G, kleins[0].rep, 2)
        assert (f.is_p_group, f.is_elementary_abelian, f.is_abelian, f.is_trivial) == (True, True, True, False)

    def test_trivial_and_c3(self):
        z6 = build_group([2, 3])
        assert classify_subgroup(z6, {z6.identity}, 2).is_trivial
        c3 = next(c for c in subgroup_classes(z6) if c.order == 3)
        assert not classify_subgroup(z6, c3.rep, 2).is_p_group

    def test_not_a_subgroup(self):
        with pytest.raises(GroupError):
            classify_subgroup(build_group([4]), {0, 1}, 2)


class TestTateClasses:
    def test_examples(self):
        assert [c.order for c in equivariant_tate_classes(build_group([2]), 2)] == [2]
        assert [c.order for c in equivariant_tate_classes(build_group([2, 3]), 2)] == [2]
        assert sorted(c.order for c in equivariant_tate_classes(build_group([2, 2]), 2)) == [2, 2, 2, 4]

    def test_non_abelian(self):
        with pytest.raises(GroupError):
            equivariant_tate_classes(build_group("D8"), 2)

    def test_elementary_abelian_image(self):
        assert len(elementary_abelian_image(build_group("D8"), 2)) == 6
        assert [c.order for c in elementary_abelian_image(build_group([4]), 2)] == [1, 2]
        z2 = build_group([2])
        assert elementary_abelian_image(z2, 2) == subgroup_classes(z2)
