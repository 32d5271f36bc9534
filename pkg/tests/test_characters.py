"""Unit tests for characters, denominators, and reduced-module maps."""

from fractions import Fraction as F

import pytest

from thetachar.characters import (
    CharacterSpec,
    ReductionParams,
    central_charge,
    character_ratio,
    character_series,
    dd_indices,
    dd_numerator,
    denominator,
    h_s_values,
    index_set,
    nice_numerator,
    nice_param_to_j,
    reduction_hs,
    vanishes,
)
from thetachar.suites import _m2_closed_ratio, _one_ratio, ratio_pair_equal

HALF = F(1, 2)


class TestIndexBookkeeping:
    def test_small_index_sets(self):
        assert index_set(1, "NS") == (HALF,)
        assert index_set(1, "R") == (F(0),)
        assert index_set(2, "NS") == (-HALF, HALF)
        assert index_set(2, "R") == (F(0), F(1))
        assert index_set(3, "NS") == (-HALF, HALF, F(3, 2))
        assert index_set(3, "R") == (F(-1), F(0), F(1))

    @pytest.mark.parametrize("M", range(1, 9))
    def test_index_set_size_and_bounds(self, M):
        for sector in ("NS", "R"):
            js = index_set(M, sector)
            assert len(js) == M
            assert all(F(1 - M, 2) <= j <= F(M, 2) for j in js)

    def test_central_charges(self):
        assert central_charge(1) == 0
        assert central_charge(2) == -3
        assert central_charge(3) == -4
        assert central_charge(6) == -5
        with pytest.raises(ValueError):
            central_charge(0)

    def test_spec_validation(self):
        spec = CharacterSpec(2, "1/2", "NS", "+")
        assert spec.j == HALF
        with pytest.raises(ValueError):
            CharacterSpec(2, F(1, 4), "NS", "+")
        with pytest.raises(ValueError):
            CharacterSpec(2, HALF, "R", "+")
        with pytest.raises(ValueError):
            CharacterSpec(2, HALF, "NS", "x")
        with pytest.raises(ValueError):
            CharacterSpec(2, HALF, "ns", "+")

    @pytest.mark.parametrize("M,j,sector,h,s", [
        (1, HALF, "NS", F(0), F(0)),
        (2, HALF, "NS", F(-1, 4), F(-1, 2)),
        (2, -HALF, "NS", F(-1, 4), F(-3, 2)),
        (1, F(0), "R", F(0), F(0)),
        (2, F(0), "R", F(-1, 8), F(0)),
        (2, F(1), "R", F(3, 8), F(1)),
    ])
    def test_h_s_values_pinned(self, M, j, sector, h, s):
        assert h_s_values(CharacterSpec(M, j, sector, "+")) == (h, s)


class TestLevelOneAndTwo:
    @pytest.mark.parametrize("sector,sign", [
        ("NS", "+"), ("NS", "-"), ("R", "+"), ("R", "-"),
    ])
    def test_level_one_characters_are_constant(self, sector, sign):
        j = index_set(1, sector)[0]
        spec = CharacterSpec(1, j, sector, sign)
        assert ratio_pair_equal(lambda p: character_ratio(spec, p),
                                _one_ratio, F(8))

    # (sector, j) -> per-sign lowest-q x-rows of the expansion
    _LEADING = {
        ("NS", HALF): {"+": {-HALF: 1, F(-5, 2): 1, F(-9, 2): 1},
                       "-": {-HALF: 1, F(-5, 2): 1, F(-9, 2): 1}},
        ("NS", -HALF): {"+": {F(-3, 2): 1, F(-7, 2): 1, F(-11, 2): 1},
                        "-": {F(-3, 2): 1, F(-7, 2): 1, F(-11, 2): 1}},
        ("R", F(0)): {"+": {F(0): 1}, "-": {F(0): 1}},
        ("R", F(1)): {"+": {F(1): 1, F(0): 2, F(-1): 1},
                      "-": {F(1): 1, F(0): -2, F(-1): 1}},
    }

    @pytest.mark.parametrize("sector,j", list(_LEADING))
    @pytest.mark.parametrize("sign", ["+", "-"])
    def test_level_two_leading_rows(self, sector, j, sign):
        spec = CharacterSpec(2, j, sector, sign)
        ser = character_series(spec, F(3))
        h, s = h_s_values(spec)
        assert ser.x_window == (s - 4, s + 2)
        lead = -central_charge(2) / 24 + h
        assert min(qe for qe, _, _ in ser.terms()) == lead
        row = {xe: c for qe, xe, c in ser.terms() if qe == lead}
        assert row == self._LEADING[(sector, j)][sign]

    @pytest.mark.parametrize("sector,j", [
        ("NS", HALF), ("NS", -HALF), ("R", F(0)), ("R", F(1)),
    ])
    @pytest.mark.parametrize("sign", ["+", "-"])
    def test_level_two_closed_forms(self, sector, j, sign):
        spec = CharacterSpec(2, j, sector, sign)
        assert ratio_pair_equal(
            lambda p: _m2_closed_ratio(sector, j, sign, p),
            lambda p: character_ratio(spec, p), F(6))


class TestSeriesControls:
    def test_custom_window_and_q_order(self):
        spec = CharacterSpec(2, HALF, "NS", "+")
        ser = character_series(spec, F(5, 8), x_window=(F(-5, 2), -HALF))
        exps = {(qe, xe) for qe, xe, _ in ser.terms()}
        assert all(-F(5, 2) <= xe <= -HALF for _, xe in exps)
        assert all(qe < F(5, 8) for qe, _ in exps)
        assert (F(-1, 8), -HALF) in exps
        assert (F(-1, 8), F(-5, 2)) in exps

    def test_empty_window_rejected(self):
        spec = CharacterSpec(2, HALF, "NS", "+")
        with pytest.raises(ValueError):
            character_series(spec, 2, x_window=(1, 0))

    def test_lead_exponent_matches_weights(self):
        for j in index_set(3, "NS"):
            spec = CharacterSpec(3, j, "NS", "+")
            ser = character_series(spec, F(2))
            h, _ = h_s_values(spec)
            lead = -central_charge(3) / 24 + h
            assert min(qe for qe, _, _ in ser.terms()) == lead


class TestDenominator:
    @pytest.mark.parametrize("sign", ["+", "-"])
    @pytest.mark.parametrize("sector", ["NS", "R"])
    def test_eta_and_theta_forms_agree(self, sign, sector):
        a = denominator(sign, sector, F(6), form="eta")
        b = denominator(sign, sector, F(6), form="theta")
        assert a.cross_order(b) >= F(6)
        assert a.equals(b, F(6))

    def test_unknown_form_rejected(self):
        with pytest.raises(ValueError):
            denominator("+", "NS", 4, form="czech")


class TestNumerators:
    def test_nice_numerator_is_denominator_times_character(self):
        j = nice_param_to_j(3, 1, "I", False)
        spec = CharacterSpec(3, j, "NS", "+")
        assert ratio_pair_equal(
            lambda p: nice_numerator(3, 1, "I", "+", False, p),
            lambda p: character_ratio(spec, p) * denominator("+", "NS", p),
            F(6))

    def test_twisted_nice_numerator(self):
        j = nice_param_to_j(2, 0, "III", True)
        spec = CharacterSpec(2, j, "R", "-")
        assert ratio_pair_equal(
            lambda p: nice_numerator(2, 0, "III", "-", True, p),
            lambda p: character_ratio(spec, p) * denominator("-", "R", p),
            F(6))

    def test_dd_reduces_to_nice_at_boundary(self):
        # level 4, k1 = 1, k2 = 1 puts both block indices at 3/2: the
        # deepest rescale/shift combination the pair form reaches here
        assert ratio_pair_equal(
            lambda p: dd_numerator(4, 1, 1, "I", "+", False, p),
            lambda p: nice_numerator(4, 1, "I", "+", False, p), F(6))

    def test_dd_indices_pinned(self):
        assert dd_indices(4, 1, 1, "I", False) == (F(3, 2), F(3, 2))
        assert dd_indices(3, 0, 1, "III", False) == (F(5, 2), F(3, 2))
        assert dd_indices(3, 0, 1, "I", True) == (F(3), F(2))
        with pytest.raises(ValueError):
            dd_indices(3, 0, 1, "II", False)

    def test_nice_param_to_j_pinned(self):
        assert nice_param_to_j(2, 0, "I", False) == HALF
        assert nice_param_to_j(2, 0, "III", False) == -HALF
        assert nice_param_to_j(2, 0, "I", True) == F(0)
        assert nice_param_to_j(2, 0, "III", True) == F(1)
        assert nice_param_to_j(3, 1, "I", False) == F(3, 2)


class TestReduction:
    def test_params_validation(self):
        with pytest.raises(ValueError):
            ReductionParams(2, 1, 2, 0, 1, "I", False)   # m2 > m
        with pytest.raises(ValueError):
            ReductionParams(2, 1, 0, 0, 0, "II", False)  # k1 < 1
        with pytest.raises(ValueError):
            ReductionParams(2, 1, 0, 1, 1, "I", False)   # 2k1+k2 > M-1
        with pytest.raises(ValueError):
            ReductionParams(2, 1, 0, 0, 1, "V", False)

    def test_h_s_pinned_untwisted(self):
        got = reduction_hs(ReductionParams(3, 1, 0, 0, 2, "I", False))
        assert got == (F(-1, 3), F(-2, 3))

    def test_h_s_pinned_twisted(self):
        got = reduction_hs(ReductionParams(2, 1, 0, 0, 1, "III", True))
        assert got == (F(3, 8), F(1))

    def test_heart_equivalences(self):
        # shifting k1 by one trades heart I for IV and III for II
        for M, m, m2, k1, k2, tw in [(3, 1, 0, 0, 1, False),
                                     (4, 3, 2, 0, 2, True),
                                     (5, 2, 1, 1, 1, False)]:
            a = reduction_hs(ReductionParams(M, m, m2, k1, k2, "I", tw))
            b = reduction_hs(ReductionParams(M, m, m2, k1 + 1, k2, "IV", tw))
            assert a == b
        for M, m, m2, k1, k2, tw in [(3, 1, 0, 0, 1, False),
                                     (4, 3, 2, 0, 2, True),
                                     (5, 2, 1, 1, 1, False)]:
            c = reduction_hs(ReductionParams(M, m, m2, k1, k2, "III", tw))
            d = reduction_hs(ReductionParams(M, m, m2, k1 + 1, k2, "II", tw))
            assert c == d

    def test_vanishing_predicate(self):
        assert vanishes(ReductionParams(5, 1, 1, 1, 2, "I", False))
        assert vanishes(ReductionParams(4, 2, 2, 0, 3, "III", True))
        assert not vanishes(ReductionParams(5, 2, 1, 1, 2, "I", False))
        assert not vanishes(ReductionParams(5, 1, 1, 1, 1, "I", False))
        assert not vanishes(ReductionParams(5, 1, 1, 2, 1, "IV", False))
