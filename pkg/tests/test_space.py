import pytest

from models import chain3, poset_from_dag
from ttglue.errors import NotSpecializationClosedError, NotThomasonError, UnknownPointError
from ttglue.space import SpectralSpaceModel, SubsetClassification, close_family, saturate


def kinds(model):
    return {v.kind for v in model.validate()}


class TestValidate:
    def test_chain_is_valid(self, chain):
        assert chain.validate() == []

    def test_empty_space_is_valid(self):
        assert SpectralSpaceModel.build([]).validate() == []

    def test_cycle_reports_antisymmetry(self):
        m = SpectralSpaceModel.build(["x", "y"], [("x", "y"), ("y", "x")], covers=True, close_basics=False)
        bad = [v for v in m.validate() if v.kind == "antisymmetry"]
        assert bad and set(bad[0].witness) == {"x", "y"}

    def test_missing_reflexive_pair(self):
        m = SpectralSpaceModel.build(["x"], [], close_basics=False)
        assert "reflexivity" in kinds(m)

    def test_missing_transitive_pair(self):
        rel = [("a", "a"), ("b", "b"), ("c", "c"), ("a", "b"), ("b", "c")]
        m = SpectralSpaceModel.build("abc", rel, close_basics=False)
        assert "transitivity" in kinds(m)

    def test_basic_not_specialization_closed(self):
        m = SpectralSpaceModel.build(["0", "m"], [("0", "m")], [["0"]], covers=True, close_basics=False)
        assert "basic-not-specialization-closed" in kinds(m)

    def test_unclosed_basics_reported(self):
        m = SpectralSpaceModel.build(["a", "b"], [], [["a"], ["b"]], covers=True, close_basics=False)
        assert "basics-union" in kinds(m)

    def test_limit_annotations(self):
        pts = ["a", "b"]
        assert "limit-self" in kinds(SpectralSpaceModel.build(pts, [], [], {"a": ["a", "b"]}, covers=True))
        assert "limit-empty-tail" in kinds(SpectralSpaceModel.build(pts, [], [], {"a": []}, covers=True))
        incoherent = SpectralSpaceModel.build(pts, [], [["b"]], {"a": ["b"]}, covers=True, close_basics=False)
        assert "limit-coherence" in kinds(incoherent)

    def test_build_closes_basics_under_limits(self):
        m = SpectralSpaceModel.build(["a", "b"], [], [["b"]], {"a": ["b"]}, covers=True)
        assert m.basics == (frozenset({"a", "b"}),)
        assert m.validate() == []

    def test_unknown_basic_point(self):
        with pytest.raises(UnknownPointError):
            SpectralSpaceModel.build(["a"], [], [["z"]], covers=True)


class TestClosureOperators:
    def test_closure(self, chain, d8):
        assert chain.closure({"p"}) == {"p", "m"}
        assert chain.closure(set()) == frozenset()
        assert d8.space.closure({"C4"}) == {"C4", "Z", "1"}

    def test_generalizations(self, chain, artin):
        assert chain.generalizations({"m"}) == {"0", "p", "m"}
        assert chain.generalizations(set()) == frozenset()
        assert artin.space.generalizations({"M_inf"}) == {"M_inf"}

    def test_unknown_point(self, chain):
        with pytest.raises(UnknownPointError) as err:
            chain.closure({"q"})
        assert err.value.ids == ("q",)

    def test_bare_string_is_rejected(self, chain):
        with pytest.raises(TypeError):
            chain.closure("p")


class TestClassify:
    def test_artin_y(self, artin):
        assert artin.space.classify(artin.Y) == SubsetClassification(True, True, False, False)

    def test_artin_limit_point(self, artin):
        assert artin.space.classify({"M_inf"}) == SubsetClassification(True, False, True, True)

    def test_whole_space(self, chain, artin, d8):
        for X in (chain, artin.space, d8.space):
            assert X.classify(X.points) == SubsetClassification(True, True, True, True)

    def test_non_closed_subset_of_chain(self, chain):
        c = chain.classify({"0"})
        assert not c.specialization_closed and not c.thomason and c.proconstructible and not c.closed


class TestSubsetCalculus:
    def test_thomason_w(self, chain, discrete, chromatic):
        assert chain.thomason_w({"m"}) == frozenset()
        assert discrete.thomason_w({"a"}) == {"b"}
        assert chromatic.space.thomason_w(chromatic.Y) == frozenset()

    def test_thomason_w_requires_thomason(self, chain):
        with pytest.raises(NotThomasonError):
            chain.thomason_w({"0"})

    def test_cons_closure(self, artin, chain, chromatic):
        assert artin.space.cons_closure(artin.Y) == artin.Y | {"M_inf"}
        assert chain.cons_closure({"0"}) == {"0"}
        X = chromatic.space
        finite = {x for x in X.points if not x.endswith("inf")}
        assert X.cons_closure(finite) == set(X.points)

    def test_dual_closure(self, chain, artin, discrete):
        assert chain.dual_closure({"m"}) == set(chain.points)
        assert artin.space.dual_closure(artin.Y) == set(artin.space.points)
        assert discrete.dual_closure({"a"}) == {"a"}

    def test_immediate_generalizations(self, chain, chromatic, d8):
        assert chain.immediate_generalizations({"m"}) == {"p"}
        assert chromatic.space.immediate_generalizations(chromatic.Y) == {"C_1"}
        assert d8.space.immediate_generalizations({"1"}) == {"Z", "R1", "R2"}

    def test_immediate_generalizations_requires_closed(self, chain):
        with pytest.raises(NotSpecializationClosedError):
            chain.immediate_generalizations({"p"})

    def test_restrict_to_complement(self, chain, chromatic):
        U = chain.restrict_to_complement({"m"})
        assert U.points == ("0", "p")
        assert set(U.basics) == {frozenset({"p"}), frozenset({"0", "p"})}
        assert chain.restrict_to_complement(set()) == chain
        assert chromatic.space.restrict_to_complement(chromatic.Y).points == ("C_1",)

    def test_completion_kernel_basics(self, chain, discrete, chromatic):
        assert chain.completion_kernel_basics({"m"}) == []
        assert discrete.completion_kernel_basics({"a"}) == [frozenset({"b"})]
        assert chromatic.space.completion_kernel_basics(chromatic.Y) == []

    def test_is_local(self, chain, discrete, d8):
        assert chain.is_local()
        assert not discrete.is_local()
        assert d8.space.is_local()


class TestHelpers:
    def test_saturate(self):
        assert saturate(0b011, [(2, 0b011)]) == 0b111
        assert saturate(0b001, [(2, 0b011)]) == 0b001

    def test_close_family_union_intersection(self):
        assert close_family([0b01, 0b10]) == {0b01, 0b10, 0b11}
        assert close_family([0b011, 0b110]) == {0b010, 0b011, 0b110, 0b111}

    def test_covers_of_diamond(self):
        X = poset_from_dag(4, [(0, 1), (0, 2), (1, 3), (2, 3)])
        assert X.covers() == [("x0", "x1"), ("x0", "x2"), ("x1", "x3"), ("x2", "x3")]

    def test_rename_round_trip(self):
        X = chain3()
        there = X.rename({x: x + "'" for x in X.points})
        assert there.rename({x + "'": x for x in X.points}) == X
