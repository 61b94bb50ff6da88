from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eppsim import oracles
from eppsim.bell_core import BellDiagonalState
from eppsim.multipartite import (GHZComponent, GHZDiagonalState, GHZDomainError, dmepp_curves, dmepp_step1,
                                 dmepp_step2, dmepp_yield_count, dmepp_yield_sample, ghz_bit_error_mixture,
                                 ghz_phase_error_mixture, mmepp_round, smepp_round)

PHI_WEIGHTS = {"HHH": Fr(7, 10), "VHH": Fr(1, 10), "HVH": Fr(1, 10), "HHV": Fr(1, 10)}
fid = st.fractions(min_value=Fr(1, 100), max_value=Fr(99, 100))


def test_components_enumerate_basis():
    for n in (2, 3, 4):
        comps = GHZComponent.all(n)
        assert len(set(comps)) == 2 ** n
    assert GHZComponent.from_string("VHH") == GHZComponent.from_string("HVV")
    with pytest.raises(GHZDomainError):
        GHZComponent(4, 0, 3)


def test_state_validation():
    with pytest.raises(ValueError):
        GHZDiagonalState.from_weights({"HHH": Fr(1, 2), "VHH": Fr(1, 3)}, 3)


def test_pure_input_unchanged():
    pure = GHZDiagonalState.from_weights({"HHH": 1}, 3)
    for res in (mmepp_round(pure), mmepp_round(pure, "phase"), smepp_round(pure)):
        assert res.fidelity == 1


def test_mmepp_bit_example():
    res = mmepp_round(ghz_bit_error_mixture(Fr(4, 5), 3))
    assert res.fidelity == Fr(16, 17)
    assert res.success_prob == Fr(17, 25)


def test_mmepp_phase_matches_state_vectors():
    for F in (0.6, 0.8):
        s = ghz_phase_error_mixture(F)
        res = mmepp_round(s, "phase")
        p, kept = oracles.mmepp_oracle(s, "phase")
        assert res.success_prob == pytest.approx(p, abs=1e-12)
        for c, w in kept.items():
            assert float(res.output.weight(c)) == pytest.approx(w / p, abs=1e-12)


def test_smepp_success_examples():
    s = ghz_bit_error_mixture(Fr(4, 5))
    assert smepp_round(s).success_prob == Fr(17, 50)
    assert smepp_round(s, theta_pi_mode=True).success_prob == Fr(17, 25)
    assert smepp_round(GHZDiagonalState.from_weights({"HHH": 1}, 3)).fidelity == 1


def test_smepp_matches_parity_oracle():
    for mode in (False, True):
        s = ghz_bit_error_mixture(0.7, 3, 2)
        res = smepp_round(s, mode)
        p, kept = oracles.smepp_oracle(s, mode)
        assert float(res.success_prob) == pytest.approx(p, abs=1e-12)


def test_mmepp_rejects_bad_input():
    with pytest.raises(GHZDomainError):
        mmepp_round(GHZDiagonalState.from_weights({"HH": 1}, 2))
    with pytest.raises(GHZDomainError):
        mmepp_round(ghz_bit_error_mixture(Fr(4, 5)), "amplitude")


def test_mmepp_general_n():
    res = mmepp_round(ghz_bit_error_mixture(Fr(4, 5), 5, 3))
    assert res.fidelity == Fr(16, 17)


def test_dmepp_step1_example():
    s = GHZDiagonalState.from_weights(PHI_WEIGHTS, 3)
    res, rec = dmepp_step1(s)
    assert res.fidelity == Fr(49, 52)
    assert res.success_prob == Fr(52, 100)
    # every recycled pair: phi+ weight 2FF_i / (2FF_i + 2F_jF_k) = 0.875
    for _, (w, pair) in rec.pairs:
        assert pair.fidelity == Fr(7, 8)
        assert w == Fr(16, 100)
    assert res.success_prob + rec.total_weight == 1


def test_dmepp_step1_pure_and_domain():
    res, rec = dmepp_step1(GHZDiagonalState.from_weights({"HHH": 1}, 3))
    assert res.fidelity == 1 and rec.total_weight == 0
    with pytest.raises(GHZDomainError):
        dmepp_step1(ghz_phase_error_mixture(Fr(4, 5)))


def test_dmepp_step1_recycled_pairs_match_oracle():
    s = GHZDiagonalState.from_weights({k: float(v) for k, v in PHI_WEIGHTS.items()}, 3)
    _, rec = dmepp_step1(s)
    for key, kept in oracles.recycle_oracle(s).items():
        w, pair = rec[key]
        assert float(w) == pytest.approx(kept.sum(), abs=1e-12)
        assert [float(x) for x in pair.p] == pytest.approx(list(kept / kept.sum()), abs=1e-12)


def test_dmepp_step2_examples():
    pair = BellDiagonalState((Fr(7, 8), 0, Fr(1, 8), 0))
    out = dmepp_step2(pair, pair)
    assert out.fidelity == Fr(49, 64)
    pure = BellDiagonalState((1, 0, 0, 0))
    assert dmepp_step2(pure, pure).fidelity == 1
    z = oracles.fusion_oracle(pair, pair)
    for c, w in z.items():
        assert float(out.weight(c)) == pytest.approx(w, abs=1e-12)
    with pytest.raises(GHZDomainError):
        dmepp_step2(BellDiagonalState((Fr(1, 2), Fr(1, 2), 0, 0)), pure)


def test_dmepp_curves_examples():
    c = dmepp_curves(1)
    assert all(v == 1 for v in c.values())
    c = dmepp_curves(Fr(4, 5))
    assert c["eff_a"] == Fr(49, 75)
    assert c["eff_b"] == Fr(62, 75)
    assert dmepp_curves(Fr(1, 2))["fid_conv"] == Fr(3, 4)
    with pytest.raises(ValueError):
        dmepp_curves(Fr(1, 4))


def test_efficiency_assignment_by_count():
    # the single-round scheme yields eff_a, the two-step scheme eff_b
    for F in (Fr(2, 5), Fr(7, 10), Fr(9, 10)):
        cnt, cur = dmepp_yield_count(F), dmepp_curves(F)
        assert cnt["conventional_eff"] == cur["eff_a"]
        assert cnt["two_step_eff"] == cur["eff_b"]
        assert cnt["conventional_fid"] == cur["fid_conv"]
        assert cnt["two_step_fid"] == cur["fid_dmepp"]


def test_yield_sample_agrees_with_count():
    F = Fr(7, 10)
    s = dmepp_yield_sample(F, copies=200_000, seed=3)
    cnt = dmepp_yield_count(F)
    n = s["input_pairs"]
    assert s["conventional_out"] / n == pytest.approx(float(cnt["conventional_eff"]), abs=0.005)
    assert s["two_step_out"] / n == pytest.approx(float(cnt["two_step_eff"]), abs=0.005)


@settings(max_examples=40, deadline=None)
@given(fid)
def test_mmepp_and_smepp_give_same_mixture(F):
    s = GHZDiagonalState.from_weights({"HHH": F, "VHH": (1 - F) / 2, "HHV": (1 - F) / 2}, 3)
    a, b = mmepp_round(s), smepp_round(s)
    assert a.output == b.output
    assert sum(w for _, w in a.output.p) == 1


@settings(max_examples=60, deadline=None)
@given(fid)
def test_recycled_pair_beats_input(F):
    F0 = (1 - F) / 3
    if F > F0:
        assert F / (F + F0) > F


@settings(max_examples=60, deadline=None)
@given(st.fractions(min_value=Fr(26, 100), max_value=1))
def test_fused_fidelity_is_square_of_pair_weight(F):
    F0 = (1 - F) / 3
    w = F / (F + F0)
    pair = BellDiagonalState((w, 0, 1 - w, 0))
    assert dmepp_step2(pair, pair).fidelity == w * w
