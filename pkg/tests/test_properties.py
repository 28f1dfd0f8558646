import random

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from models import inclusion, poset_from_dag, random_completion
from ttglue import documents as D
from ttglue import gluing
from ttglue.arith import LexValue, excisive_tate_layers, lex_divides_all_powers, p_power_partition_exists
from ttglue.catalog import LayeredChainSpace
from ttglue.groups import build_group, subgroup_classes, subgroups_by_growth, subgroups_by_joins
from ttglue.reports import PASS, VACUOUS
from ttglue.space import SpectralSpaceModel

SETTINGS = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def posets(draw, max_size=7):
    n = draw(st.integers(0, max_size))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    perm = draw(st.permutations(range(n)))
    return poset_from_dag(n, [(perm[i], perm[j]) for i, j in chosen])


@st.composite
def space_and_subset(draw, max_size=7):
    X = draw(posets(max_size))
    S = frozenset(draw(st.sets(st.sampled_from(X.points)))) if X.points else frozenset()
    return X, S


@st.composite
def space_and_thomason(draw, max_size=7):
    X, S = draw(space_and_subset(max_size))
    return X, X.closure(S)


@st.composite
def layered(draw):
    k = draw(st.integers(1, 3))
    N = draw(st.integers(1, 5))
    return LayeredChainSpace(tuple(f"L{i}" for i in range(k)), N)


@SETTINGS
@given(space_and_subset())
def test_closure_operators(data):
    X, S = data
    c = X.closure(S)
    assert S <= c and X.closure(c) == c
    g = X.generalizations(S)
    assert S <= g and X.generalizations(g) == g
    flipped = SpectralSpaceModel.build(X.points, {(y, x) for x, y in X.relation}, close_basics=False)
    assert flipped.closure(S) == g
    for x in S:
        assert X.closure({x}) <= c


@SETTINGS
@given(posets())
def test_built_models_validate(X):
    assert X.validate() == []
    assert X.classify(X.points).closed


@SETTINGS
@given(space_and_subset())
def test_classification_flags(data):
    X, S = data
    c = X.classify(S)
    assert not c.closed or (c.specialization_closed and c.proconstructible)
    assert not c.thomason or c.specialization_closed
    # point closures as basics: every specialization-closed set is Thomason and closed
    assert c.thomason == c.specialization_closed == c.closed
    assert c.proconstructible


@SETTINGS
@given(space_and_thomason())
def test_subset_calculus(data):
    X, Y = data
    W = X.thomason_w(Y)
    assert not W & Y and X.is_thomason(W)
    assert W == frozenset().union(*X.completion_kernel_basics(Y))
    assert X.dual_closure(Y) == X.generalizations(Y)
    assert X.classify(frozenset(X.points) - Y).proconstructible
    lower = X.immediate_generalizations(Y)
    assert not lower & Y
    assert all(X.closure({x}) & Y for x in lower)
    assert lower <= X.generalizations(Y) - Y


@SETTINGS
@given(space_and_thomason())
def test_restrict_to_complement(data):
    X, Y = data
    U = X.restrict_to_complement(Y)
    assert set(U.points) == set(X.points) - Y
    assert U.validate() == []
    assert all(U.specializes(a, b) == X.specializes(a, b) for a in U.points for b in U.points)


@SETTINGS
@given(st.integers(0, 2**32 - 1), st.integers(1, 7))
def test_gluing_statements_on_random_completions(seed, n):
    X, Y, S, phi = random_completion(random.Random(seed), n)
    assert gluing.tate_support_of_map(X, Y, phi) == S
    assert gluing.check_homeo_over_y(X, Y, phi).status == PASS
    assert gluing.check_tiv_strong(X, Y, phi).status in (PASS, VACUOUS)
    assert gluing.check_tiv(X, Y, S).status in (PASS, VACUOUS)
    assert gluing.check_glue_round_trip(X, Y, phi).status == PASS
    assert gluing.check_recover_specializations(X, Y, phi).status == PASS
    assert gluing.check_closed_determined(X, Y, phi).status == PASS
    assert gluing.bounds_report(X, Y, S).status == PASS
    assert gluing.split_diagnostic(X, Y, S).support_consistent


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_pushout_on_random_completions(seed, n):
    X, Y, _, phi = random_completion(random.Random(seed), n)
    datum, u_embed, y_embed = gluing.restriction_datum(X, Y, phi)
    assert gluing.check_pushout(datum, X, u_embed, y_embed, max_target=3).status == PASS


@SETTINGS
@given(space_and_thomason())
def test_glued_space_always_validates(data):
    X, Y = data
    glued = gluing.glue_spaces(gluing.restriction_datum(X, Y, inclusion(X, X.points))[0])
    assert glued.space.validate() == []


@SETTINGS
@given(posets())
def test_serialization_round_trip(X):
    b = D.save_space(X)
    assert D.load_space(b) == X
    assert D.save_space(D.load_space(b)) == b


@SETTINGS
@given(layered())
def test_layered_spaces(L):
    X = L.compile()
    assert X.validate() == []
    for lay in L.layer_ids:
        layer = L.layer(lay)
        assert L.layer_closure(layer - {f"{lay}_inf"}) == layer
        # the limit point sits in the constructible closure of its finite heights
        assert f"{lay}_inf" in X.cons_closure(layer - {f"{lay}_inf"})
        assert not X.is_thomason({f"{lay}_inf"})


@SETTINGS
@given(st.integers(0, 3), st.integers(0, 5), st.integers(0, 3), st.integers(-5, 30))
def test_lex_closed_form(a1, a2, b1, b2):
    a, b = LexValue(a1, a2), LexValue(b1, b2)
    if not b.is_nonnegative():
        return
    brute = all(a * n <= b for n in range(1, 100))
    assert lex_divides_all_powers(a, b) == brute


@SETTINGS
@given(st.integers(1, 60), st.sampled_from([2, 3, 5, 7]))
def test_excisive_layers_shape(d, p):
    layers = excisive_tate_layers(d, p)
    assert all(1 <= l < d for l in layers)
    # the all-ones partition always exists; so every length between the shortest and d works mod (p - 1)
    assert p_power_partition_exists(d, d, p)
    for l in layers:
        assert (d - l) % (p - 1) == 0


@settings(max_examples=25, deadline=None)
@given(st.lists(st.sampled_from([2, 3, 4, 5]), min_size=1, max_size=3).filter(lambda f: __import__("math").prod(f) <= 32))
def test_group_enumerators_agree(factors):
    G = build_group(factors)
    subs = subgroups_by_growth(G)
    assert subs == subgroups_by_joins(G)
    # abelian: every class is a single subgroup
    assert len(subgroup_classes(G)) == len(subs)
