from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eppsim.bell_core import BellDiagonalState, UnsupportedMixtureError, pan_pbs_round
from eppsim.hyper_epp import (HyperDiagonalState, QDCavityParams, deterministic_round, hepp_branch_table,
                              hepp_two_step, qd_transmission, qnd_spdc_enumeration, qnd_spdc_fidelity,
                              single_copy_round, spepp_round)
from eppsim.optics_engine import build_preset, run_protocol
from eppsim.optics_engine.protocol import run_protocol_detailed

unit = st.fractions(min_value=0, max_value=1)
open_half = st.fractions(min_value=Fr(1, 2), max_value=1).filter(lambda x: Fr(1, 2) < x < 1)


def rank2(F):
    return BellDiagonalState((F, 0, 1 - F, 0))


@pytest.mark.parametrize("Fp, Fs, Fn, P", [(Fr(1, 2), Fr(1, 2), Fr(1, 2), Fr(1, 2)),
                                            (Fr(4, 5), Fr(7, 10), Fr(28, 31), Fr(31, 50)),
                                            (1, 1, 1, 1)])
def test_single_copy_examples(Fp, Fs, Fn, P):
    res = single_copy_round(Fp, Fs)
    assert (res.fidelity, res.success_prob) == (Fn, P)


def test_single_copy_matches_fock_circuit():
    spec = build_preset("single_copy_hyper", Fp=Fr(4, 5), Fs=Fr(7, 10))
    run = run_protocol_detailed(spec)
    assert run.result.fidelity == Fr(28, 31)
    assert run.result.success_prob == Fr(31, 50)
    assert run.result.success_prob + run.rejected == 1


def test_single_copy_time_bin_tag():
    assert single_copy_round(Fr(4, 5), Fr(7, 10), "time-bin") == single_copy_round(Fr(4, 5), Fr(7, 10))
    with pytest.raises(ValueError):
        single_copy_round(Fr(4, 5), Fr(7, 10), "frequency")


def test_hyper_state_product_weights():
    h = HyperDiagonalState.rank2(Fr(4, 5), Fr(7, 10))
    assert sum(h.weights().values()) == 1
    assert h.fidelity == Fr(14, 25)


def test_spepp_matches_fock_circuit():
    for F in (Fr(1, 2), Fr(3, 4)):
        got = run_protocol(build_preset("spepp", F=F))
        ref = spepp_round(F)
        assert got.success_prob == ref.success_prob and got.fidelity == 1


def test_qnd_spdc_examples():
    assert qnd_spdc_fidelity(Fr(1, 10), 1) == 1
    assert float(qnd_spdc_fidelity(Fr(1, 10), Fr(3, 4))) == pytest.approx(0.205625 / 0.20625, abs=1e-12)
    assert float(qnd_spdc_fidelity(1e-9, 0.6)) == pytest.approx(1, abs=1e-8)
    with pytest.raises(ValueError):
        qnd_spdc_fidelity(0, Fr(1, 2))


def test_qnd_spdc_enumeration_matches_closed_form():
    for p in (Fr(1, 100), Fr(1, 10)):
        for F in (Fr(3, 5), Fr(3, 4)):
            f, _ = qnd_spdc_enumeration(p, F)
            assert f == qnd_spdc_fidelity(p, F)


def test_qnd_spdc_bosonic_reading_differs():
    # with one shared two-pair expansion the double-pair weight changes, so the formula no longer holds
    f, _ = qnd_spdc_enumeration(Fr(1, 10), Fr(3, 4), pairs="bosonic")
    assert f != qnd_spdc_fidelity(Fr(1, 10), Fr(3, 4))


def test_deterministic_examples():
    for pol in ({"phi+": Fr(1, 2), "psi+": Fr(1, 4), "phi-": Fr(1, 8), "psi-": Fr(1, 8)},
                {"HH": Fr(1, 4), "VV": Fr(1, 4), "HV": Fr(1, 4), "VH": Fr(1, 4)},
                {"phi+": 1}):
        res = deterministic_round(pol)
        assert res.success_prob == 1 and res.fidelity == 1
    with pytest.raises(UnsupportedMixtureError):
        deterministic_round({"phi+": 1}, BellDiagonalState((Fr(1, 2), 0, Fr(1, 2), 0)))
    with pytest.raises(ValueError):
        deterministic_round({"phi+": Fr(1, 2)})


def test_qd_transmission_examples():
    t, r = qd_transmission(QDCavityParams(1.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.1))
    assert t == pytest.approx(-1) and abs(r) < 1e-12
    t, r = qd_transmission(QDCavityParams(1.0, 1.0, 1.0, 50.0, 1.0, 0.1, 0.1))
    assert abs(t) < 0.01 and abs(r) > 0.99
    t, _ = qd_transmission(QDCavityParams(1.0, 1.0, 1.0, 1.0, 0.0, 0.1, 0.1))
    assert t == 0
    with pytest.raises(ValueError):
        QDCavityParams(1.0, 1.0, 1.0, -1.0, 1.0, 0.0, 0.0)
    with pytest.raises(ZeroDivisionError):
        qd_transmission(QDCavityParams(1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0))


def test_hepp_examples():
    out = hepp_two_step(1, 1)
    assert all(v == 1 for v in out.values())
    out = hepp_two_step(Fr(4, 5), Fr(4, 5))
    assert out["Fp_out"] == out["Fs_out"] == Fr(16, 17)
    assert out["eff_with_qsjm"] == Fr(17, 25)
    assert out["eff_without"] == Fr(289, 625)


def test_hepp_branch_table_complete():
    rows = hepp_branch_table(Fr(3, 5), Fr(9, 10))
    assert sum(r[3] for r in rows) == 1
    assert {r[2] for r in rows} == {"keep", "discard", "recycle-polarization", "recycle-spatial"}


def test_hepp_matched_pairing_shortfall():
    # if recycle-spatial outweighs recycle-polarization the quoted efficiency overcounts
    out = hepp_two_step(Fr(3, 5), Fr(9, 10))
    assert out["eff_matched"] < out["eff_with_qsjm"]


@settings(max_examples=100, deadline=None)
@given(open_half, open_half)
def test_single_copy_dominance(Fp, Fs):
    assert single_copy_round(Fp, Fs).fidelity > max(Fp, Fs)


@settings(max_examples=100, deadline=None)
@given(unit, unit)
def test_hepp_invariants(Fp, Fs):
    out = hepp_two_step(Fp, Fs)
    assert out["eff_with_qsjm"] >= out["eff_without"]
    assert out["Fp_out"] == pan_pbs_round(rank2(Fp)).fidelity
    assert out["Fs_out"] == pan_pbs_round(rank2(Fs)).fidelity


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 5), st.floats(0, 5), st.floats(0.01, 5), st.floats(0, 5), st.floats(0.01, 5))
def test_qd_reflection_minus_transmission_is_one(dw, g, kappa, ks, gamma):
    t, r = qd_transmission(QDCavityParams(1.0, 1.0 + dw, 1.0, g, kappa, ks, gamma))
    assert abs((r - t) - 1) < 1e-12
