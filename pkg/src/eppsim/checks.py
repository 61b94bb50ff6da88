"""Analytic-versus-oracle checks shared by the test-suite and ``eppsim verify``.

Each check returns a :class:`CheckResult`; ``run_suite`` picks them by name
or by protocol id.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import hyper_epp as hy
from . import mbepp as mb
from . import multipartite as mp
from . import oracles
from . import qubits as qb
from .bell_core import (ORDER, BellComponent, BellDiagonalState, bbpssw_round, dejmps_round, make_werner,
                        pan_pbs_round, pan_spdc_round)

TOL = 1e-9


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class Check:
    name: str
    protocols: tuple
    fn: Callable[[int, int], CheckResult]


def _rank2(F) -> BellDiagonalState:
    return BellDiagonalState((F, 0, 1 - F, 0))


def _grid(lo: Fraction, hi: Fraction, points: int) -> list:
    return [lo + (hi - lo) * k / (points - 1) for k in range(points)]


def _preset_check(name: str, preset: str, analytic, grid, label: str = "") -> CheckResult:
    from .optics_engine import verify_against_analytic

    rep = verify_against_analytic(preset, analytic, grid, tol=TOL)
    detail = (f"{len(rep.rows)} points, max output dev {rep.max_fidelity_dev:.3g}, "
              f"max success dev {rep.max_success_dev:.3g}{label}")
    return CheckResult(name, rep.passed, detail)


def check_pan2001(seed, samples):
    grid = [{"F": F} for F in _grid(Fraction(11, 20), Fraction(19, 20), 20)]
    return _preset_check("pan2001 vs PBS map", "pan2001", lambda F: pan_pbs_round(_rank2(F)), grid)


def check_pan2003(seed, samples):
    from .optics_engine import build_preset, run_protocol

    grid = [{"F": F, "p": Fraction(1, 100)} for F in _grid(Fraction(11, 20), Fraction(19, 20), 9)]
    at = {F: run_protocol(build_preset("pan2003_spdc", F=F)).fidelity for F in (Fraction(3, 4), Fraction(2, 3))}
    label = f"; F=3/4 -> {at[Fraction(3, 4)]}, F=2/3 -> {at[Fraction(2, 3)]}"
    return _preset_check("pan2003_spdc vs double-pair closed form", "pan2003_spdc", pan_spdc_round, grid, label)


def check_nested(seed, samples):
    from .optics_engine import build_preset, run_protocol

    F = Fraction(3, 4)
    got = run_protocol(build_preset("nested_repeater", F=F))
    ref = pan_pbs_round(_rank2(F))
    dev = max(abs(float(a) - float(b)) for a, b in zip(got.output.p, ref.output.p))
    return CheckResult("nested_repeater output vs single-pair PBS map", dev <= TOL,
                       f"F=3/4 -> {got.fidelity} (PBS map {ref.fidelity}), dev {dev:.3g}")


def check_spepp(seed, samples):
    grid = [{"F": F} for F in _grid(Fraction(1, 2), Fraction(1), 6)]
    return _preset_check("spepp vs closed form", "spepp", hy.spepp_round, grid)


def check_deterministic(seed, samples):
    from .optics_engine import verify_against_analytic

    rng = random.Random(seed)
    names = ["phi+", "phi-", "psi+", "psi-", "HH", "HV", "VH", "VV"]
    grid = []
    for _ in range(10):
        picks = rng.sample(names, 4)
        raw = [Fraction(rng.randint(1, 20)) for _ in picks]
        tot = sum(raw)
        grid.append({"pol": [[w / tot, n] for w, n in zip(raw, picks)]})
    rep = verify_against_analytic("deterministic_epp",
                                  lambda pol: hy.deterministic_round({n: w for w, n in pol}), grid, tol=TOL)
    return CheckResult("deterministic_epp vs closed form", rep.passed,
                       f"{len(grid)} random mixtures, max dev {max(rep.max_fidelity_dev, rep.max_success_dev):.3g}")


def check_single_copy(seed, samples):
    pts = _grid(Fraction(11, 20), Fraction(19, 20), 5)
    grid = [{"Fp": a, "Fs": b} for a in pts for b in pts]
    return _preset_check("single_copy_hyper vs F_n formula", "single_copy_hyper", hy.single_copy_round, grid)


def check_mbepp_linear(seed, samples):
    res = mb.mbepp_linear_optics(p=Fraction(1, 100), F=Fraction(17, 20))
    ref = mb.mbepp_round_physical(_rank2(Fraction(17, 20)))
    dev = max(abs(float(a) - float(b)) for a, b in zip(res.output.p, ref.output.p))
    return CheckResult("mbepp_linear (single pairs, GHZ resources) vs physical round", dev <= TOL,
                       f"F=0.85 -> {res.fidelity} (physical {ref.fidelity}), dev {dev:.3g}")


def _bell_dev(res, kept: np.ndarray) -> float:
    tot = float(kept.sum())
    d = abs(float(res.success_prob) - tot)
    if tot > 0:
        d = max(d, max(abs(float(a) - b / tot) for a, b in zip(res.output.p, kept)))
    return d


def check_bbpssw(seed, samples):
    dev = 0.0
    for F in np.linspace(0.3, 1.0, 15):
        res = bbpssw_round(make_werner(float(F)))
        _, _, kept = oracles.bilateral_cnot_oracle(make_werner(float(F)))
        dev = max(dev, _bell_dev(res, kept))
    return CheckResult("bbpssw vs bilateral-CNOT state vectors", dev <= TOL, f"15 Werner points, max dev {dev:.3g}")


def check_dejmps(seed, samples):
    rng = np.random.default_rng(seed)
    dev = 0.0
    for _ in range(15):
        w = rng.dirichlet(np.ones(4))
        st = BellDiagonalState(tuple(float(x) for x in w))
        _, _, kept = oracles.dejmps_oracle(st)
        dev = max(dev, _bell_dev(dejmps_round(st), kept))
    return CheckResult("dejmps vs rotated bilateral-CNOT state vectors", dev <= TOL,
                       f"15 random mixtures, max dev {dev:.3g}")


def _ghz_dev(res, p_keep, kept: dict) -> float:
    d = abs(float(res.success_prob) - p_keep)
    for c, w in kept.items():
        d = max(d, abs(float(res.output.weight(c)) - w / p_keep))
    for c, w in res.output.p:
        d = max(d, abs(float(w) - kept.get(c, 0.0) / p_keep))
    return d


def check_multipartite(seed, samples):
    dev = 0.0
    for F in (0.6, 0.75, 0.9):
        bit = mp.ghz_bit_error_mixture(F, 3, 1)
        ph = mp.ghz_phase_error_mixture(F, 3)
        dev = max(dev, _ghz_dev(mp.mmepp_round(bit, "bit"), *oracles.mmepp_oracle(bit, "bit")))
        dev = max(dev, _ghz_dev(mp.mmepp_round(ph, "phase"), *oracles.mmepp_oracle(ph, "phase")))
        for mode in (False, True):
            dev = max(dev, _ghz_dev(mp.smepp_round(bit, mode), *oracles.smepp_oracle(bit, mode)))
    return CheckResult("GHZ rounds vs 6-qubit state vectors", dev <= TOL, f"max dev {dev:.3g}")


def check_dmepp(seed, samples):
    dev = 0.0
    st = mp.GHZDiagonalState.from_weights({"HHH": 0.7, "VHH": 0.1, "HVH": 0.1, "HHV": 0.1}, 3)
    _, rec = mp.dmepp_step1(st)
    ref = oracles.recycle_oracle(st)
    for key, kept in ref.items():
        w, pair = rec[key]
        dev = max(dev, abs(float(w) - float(kept.sum())))
        dev = max(dev, max(abs(float(a) - b / kept.sum()) for a, b in zip(pair.p, kept)))
    p1 = BellDiagonalState((0.875, 0, 0.125, 0))
    fused = mp.dmepp_step2(p1, p1)
    fz = oracles.fusion_oracle(p1, p1)
    for c, w in fz.items():
        dev = max(dev, abs(float(fused.weight(c)) - w))
    for F in (Fraction(2, 5), Fraction(3, 5), Fraction(4, 5)):
        cnt, cur = mp.dmepp_yield_count(F), mp.dmepp_curves(F)
        for a, b in (("conventional_eff", "eff_a"), ("two_step_eff", "eff_b"),
                     ("conventional_fid", "fid_conv"), ("two_step_fid", "fid_dmepp")):
            dev = max(dev, abs(float(cnt[a]) - float(cur[b])))
    return CheckResult("two-step GHZ scheme vs state vectors and yield count", dev <= TOL, f"max dev {dev:.3g}")


def _table_mismatches() -> int:
    """Count (input pair, outcome) cases where the outcome table disagrees with the state vectors."""
    bad = 0
    for c1 in ORDER:
        for c2 in ORDER:
            expect = BellComponent.from_bits(c1.amplitude_bit, c1.phase_bit ^ c2.phase_bit)
            matched = c1.amplitude_bit == c2.amplitude_bit
            for outs, psi in oracles.measurement_round_oracle(c1, c2).items():
                look = mb.correction_lookup(mb.BsaOutcome(outs))
                w = qb.bell_weights(psi, 0, 1)
                if w.sum() < 1e-14:
                    continue
                if look.accept != matched:
                    bad += 1
                    continue
                if look.accept:
                    label = ORDER[int(np.argmax(w))]
                    if abs(w.max() - w.sum()) > 1e-12 or mb.apply_action(label, look.action) != expect:
                        bad += 1
    return bad


def check_mbepp_table(seed, samples):
    bad = _table_mismatches()
    return CheckResult("outcome table vs 10-qubit state vectors", bad == 0,
                       f"256 outcomes x 16 input pairs, {bad} mismatches")


def check_qnd_spdc(seed, samples):
    dev = 0.0
    for p in (Fraction(1, 100), Fraction(1, 10), Fraction(1, 3)):
        for F in (Fraction(3, 5), Fraction(3, 4), Fraction(9, 10)):
            f_enum, _ = hy.qnd_spdc_enumeration(p, F)
            dev = max(dev, abs(float(f_enum - hy.qnd_spdc_fidelity(p, F))))
    return CheckResult("QND-SPDC closed form vs term enumeration", dev <= TOL, f"9 points, max dev {dev:.3g}")


def check_hepp(seed, samples):
    dev = 0.0
    for Fp in (Fraction(3, 5), Fraction(4, 5), Fraction(9, 10)):
        for Fs in (Fraction(3, 5), Fraction(4, 5), Fraction(9, 10)):
            out = hy.hepp_two_step(Fp, Fs)
            dev = max(dev, abs(float(out["Fp_out"] - pan_pbs_round(_rank2(Fp)).fidelity)),
                      abs(float(out["Fs_out"] - pan_pbs_round(_rank2(Fs)).fidelity)))
            if Fp >= Fs:
                dev = max(dev, abs(float(out["eff_matched"] - out["eff_with_qsjm"])))
    return CheckResult("two-step hyper scheme vs per-DOF PBS maps and branch table", dev <= TOL,
                       f"9 points, max dev {dev:.3g}")


def check_logical_mc(seed, samples):
    q = mb.QpcParams(2, 2)
    loss = mb.LossModel(0.8)
    lines, ok = [], True
    for pe in (0.0, 0.1):
        est = mb.mc_logical_success(q, loss, 0.85, mb.QndErrorModel(pe), samples=samples, seed=seed)
        ref = mb.logical_pg_imperfect(q, loss, 0.85, mb.QndErrorModel(pe))
        ok &= est.agrees(ref)
        lines.append(f"P_g'(pe={pe}) {float(ref):.6f} vs MC {est.mean:.6f}+-{est.stderr:.2g}")
    fid, acc = mb.mc_logical_fidelity(q, 0.85, mb.QndErrorModel(0.1), samples=samples, seed=seed + 1)
    ok &= fid.agrees(mb.logical_f2(q, 0.85, mb.QndErrorModel(0.1)))
    ok &= acc.agrees(mb.logical_pfg(q, 0.85, mb.QndErrorModel(0.1)))
    lines.append(f"F2 {float(mb.logical_f2(q, 0.85, mb.QndErrorModel(0.1))):.6f} vs MC {fid.mean:.6f}+-{fid.stderr:.2g}")
    q3 = mb.QpcParams(3, 2)
    est = mb.mc_loss_survival(q3, mb.LossModel(0.9), samples=samples, seed=seed + 2)
    ok &= est.agrees(mb.loss_survival(q3, mb.LossModel(0.9)))
    return CheckResult("logical closed forms vs Monte Carlo (3 sigma)", bool(ok), "; ".join(lines))


CHECKS = (
    Check("pan2001", ("pan2001", "pan_pbs"), check_pan2001),
    Check("pan2003_spdc", ("pan2003_spdc", "pan_spdc"), check_pan2003),
    Check("nested_repeater", ("nested_repeater",), check_nested),
    Check("spepp", ("spepp", "spepp_map"), check_spepp),
    Check("deterministic_epp", ("deterministic_epp", "deterministic"), check_deterministic),
    Check("single_copy_hyper", ("single_copy_hyper", "single_copy"), check_single_copy),
    Check("mbepp_linear", ("mbepp_linear", "mbepp_physical"), check_mbepp_linear),
    Check("bbpssw", ("bbpssw",), check_bbpssw),
    Check("dejmps", ("dejmps",), check_dejmps),
    Check("multipartite", ("mmepp", "smepp"), check_multipartite),
    Check("dmepp", ("dmepp_curves", "dmepp_yield"), check_dmepp),
    Check("mbepp_table", ("mbepp_physical",), check_mbepp_table),
    Check("qnd_spdc", ("qnd_spdc",), check_qnd_spdc),
    Check("hepp", ("hepp_two_step",), check_hepp),
    Check("logical_mc", ("logical_pg", "logical_f2", "logical_pg_imperfect", "logical_mc"), check_logical_mc),
)


def suite_names() -> list:
    names = {c.name for c in CHECKS}
    for c in CHECKS:
        names.update(c.protocols)
    return sorted(names)


def select(suite: str) -> list:
    if suite == "all":
        return list(CHECKS)
    picked = [c for c in CHECKS if suite == c.name or suite in c.protocols]
    if not picked:
        raise KeyError(suite)
    return picked


def run_suite(suite: str = "all", seed: int = 0, samples: int = 1_000_000) -> list:
    return [c.fn(seed, samples) for c in select(suite)]
