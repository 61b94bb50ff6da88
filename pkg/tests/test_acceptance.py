"""One PASS/FAIL line per primary acceptance criterion.

Run with pytest (lines appear in the "acceptance" summary section) or
directly: ``python3 tests/test_acceptance.py``.
"""

import random
import sys
import time
from fractions import Fraction as Fr
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import eppsim.mbepp as mb  # noqa: E402
from conftest import ACCEPTANCE_LINES  # noqa: E402
from eppsim import checks, cli, oracles  # noqa: E402
from eppsim._numeric import to_real  # noqa: E402
from eppsim.bell_core import (BellDiagonalState, bbpssw_round, bilateral_cnot_round, dejmps_round,  # noqa: E402
                              make_werner, pan_pbs_round, twirl)
from eppsim.hyper_epp import single_copy_round  # noqa: E402
from eppsim.multipartite import dmepp_curves, dmepp_yield_count, dmepp_yield_sample  # noqa: E402
from eppsim.optics_engine import (ModeLabel, Not, OpticalState, Pattern, apply_element, bd, bs,  # noqa: E402
                                  build_preset, cpbs, hwp, pbs, postselect, run_protocol,
                                  verify_against_analytic)


def rank2(F):
    return BellDiagonalState((F, 0, 1 - F, 0))


def record(name, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} {name}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def spdc_anchor():
    t0 = time.perf_counter()
    res = run_protocol(build_preset("pan2003_spdc", F=Fr(3, 4), p=Fr(1, 100)))
    dt = time.perf_counter() - t0
    ok = res.fidelity == Fr(13, 14) and dt < 5
    return record("pan2003 SPDC anchor", ok,
                  f"F=3/4 gives {res.fidelity} (expected 13/14), {dt:.2f} s")


def pbs_closed_form():
    t0 = time.perf_counter()
    grid = [{"F": Fr(k, 20)} for k in range(1, 21)]
    rep = verify_against_analytic("pan2001", lambda F: pan_pbs_round(rank2(F)), grid, tol=1e-9)
    formula_ok = all(
        abs(float(got.fidelity) - float(p["F"] ** 2 / (p["F"] ** 2 + (1 - p["F"]) ** 2))) <= 1e-9
        and abs(float(got.success_prob) - float((p["F"] ** 2 + (1 - p["F"]) ** 2) / 2)) <= 1e-9
        for p, got, _ in rep.rows)
    dt = time.perf_counter() - t0
    return record("PBS closed form", rep.passed and formula_ok and dt < 10,
                  f"20 points, max dev {max(rep.max_fidelity_dev, rep.max_success_dev):.2g}, {dt:.2f} s")


def bbpssw_checks():
    dev = 0.0
    for F in np.linspace(0, 1, 41):
        res = bbpssw_round(make_werner(float(F)))
        _, _, kept = oracles.bilateral_cnot_oracle(make_werner(float(F)))
        dev = max(dev, abs(float(res.success_prob) - kept.sum()),
                  max(abs(float(a) - b / kept.sum()) for a, b in zip(res.output.p, kept)))
    fixed = {x: bbpssw_round(make_werner(x)).fidelity for x in (Fr(0), Fr(1, 4), Fr(1, 2), Fr(1))}
    not_fixed = [f"{x}->{y}" for x, y in fixed.items() if x != y]
    mono = all(bbpssw_round(make_werner(Fr(k, 200))).fidelity > Fr(k, 200) for k in range(101, 200))
    ok = dev <= 1e-12 and not not_fixed and mono
    return record("BBPSSW", ok, f"oracle dev {dev:.2g}; fixed-point failures {not_fixed or 'none'}; "
                                f"monotone on (1/2, 1): {mono}")


def deterministic():
    rng = random.Random(2024)
    names = ["HH", "HV", "VH", "VV"]
    bad = 0
    for _ in range(100):
        raw = [Fr(rng.randint(0, 30)) for _ in names]
        if sum(raw) == 0:
            raw[0] = Fr(1)
        pol = [[w / sum(raw), n] for w, n in zip(raw, names) if w]
        res = run_protocol(build_preset("deterministic_epp", pol=pol))
        bad += not (res.success_prob == 1 and res.fidelity == 1)
    return record("Deterministic EPP", bad == 0, f"100 random product-polarization mixtures, {bad} failures")


def single_copy():
    pts = [Fr(k, 10) for k in range(5, 11)]
    grid = [{"Fp": a, "Fs": b} for a in pts for b in pts]
    from eppsim.hyper_epp import single_copy_round as analytic

    rep = verify_against_analytic("single_copy_hyper", analytic, grid, tol=1e-9)
    dense = [Fr(k, 100) for k in range(51, 100)]
    dom = sum(single_copy_round(a, b).fidelity > max(a, b) for a in dense for b in dense)
    ok = rep.passed and dom == len(dense) ** 2
    return record("Single-copy hyper-EPP", ok,
                  f"Fock dev {max(rep.max_fidelity_dev, rep.max_success_dev):.2g} on 36 points; "
                  f"dominance {dom}/{len(dense) ** 2}")


def dmepp():
    grid = [Fr(k, 100) for k in range(26, 100)]
    rec_ok = all(F / (F + (1 - F) / 3) > F for F in grid if F > (1 - F) / 3)
    table = cli.cmd_sweep(cli.SweepSpec("dmepp_curves", [cli.parse_grid("F:0.3:1.0:50")], {}))
    rows = table.strip().splitlines()
    count_ok = True
    for F in (Fr(2, 5), Fr(3, 5), Fr(4, 5)):
        cnt, cur = dmepp_yield_count(F), dmepp_curves(F)
        count_ok &= cnt["conventional_eff"] == cur["eff_a"] and cnt["two_step_eff"] == cur["eff_b"]
    s = dmepp_yield_sample(Fr(7, 10), copies=200_000, seed=1)
    n = s["input_pairs"]
    c = dmepp_curves(Fr(7, 10))
    sample_ok = (abs(s["conventional_out"] / n - float(c["eff_a"])) < 0.005
                 and abs(s["two_step_out"] / n - float(c["eff_b"])) < 0.005)
    ok = rec_ok and len(rows) == 51 and count_ok and sample_ok
    return record("DMEPP", ok, f"recycled > F: {rec_ok}; table rows {len(rows) - 1}; single round yields "
                               f"(1-2F+4F^2)/3, two-step (2-F+2F^2)/3 (count and sample agree: "
                               f"{count_ok and sample_ok})")


def table_one():
    res = checks.check_mbepp_table(0, 0)
    lin = mb.mbepp_linear_optics(p=Fr(1, 100), F=Fr(17, 20))
    gate = bilateral_cnot_round(rank2(Fr(17, 20)))
    dev = max(abs(float(a) - float(b)) for a, b in zip(lin.output.p, gate.output.p))
    phys = mb.mbepp_round_physical(rank2(Fr(17, 20)))
    dev = max(dev, max(abs(float(a) - float(b)) for a, b in zip(phys.output.p, gate.output.p)))
    return record("MBEPP outcome table", res.passed and dev <= 1e-12, f"{res.detail}; accepted output dev {dev:.2g}")


def logical():
    t0 = time.perf_counter()
    q, loss, F = mb.QpcParams(2, 2), mb.LossModel(0.8), 0.85
    pg = {pe: float(mb.logical_pg_imperfect(q, loss, F, mb.QndErrorModel(pe))) for pe in (0.0, 0.1)}
    anchors = abs(pg[0.1] - 0.18) <= 0.01 and abs(pg[0.0] - 0.30) <= 0.01
    qe = mb.QpcParams(2, 2)
    f2_ok = mb.logical_f2(qe, Fr(17, 20), mb.QndErrorModel(0)) == pan_pbs_round(rank2(Fr(17, 20))).fidelity
    below = all(mb.logical_pg_imperfect(q, mb.LossModel(eta), f, mb.QndErrorModel(pe))
                <= mb.logical_pg(q, mb.LossModel(eta), f) + 1e-15
                for eta in np.linspace(0.5, 1, 6) for f in np.linspace(0.5, 1, 6) for pe in (0.0, 0.05, 0.1, 0.2))
    mc = checks.check_logical_mc(0, 1_000_000)
    dt = time.perf_counter() - t0
    ok = anchors and f2_ok and below and mc.passed and dt < 60
    return record("Logical MBEPP anchors", ok,
                  f"P_g'(Pe=0.1)={pg[0.1]:.4f} (expected 0.18), P_g'(Pe=0)={pg[0.0]:.4f} (expected 0.30); "
                  f"F2=F1 at Pe=0: {f2_ok}; P_g'<=P_g: {below}; MC 3 sigma: {mc.passed}; {dt:.1f} s")


def _random_state(rng):
    L = [ModeLabel(m, p) for m in ("a", "b") for p in "HV"]
    items = [(Fr(rng.randint(-4, 4)), [rng.choice(L) for _ in range(rng.randint(0, 4))]) for _ in range(5)]
    items.append((Fr(1), [L[0]]))
    return OpticalState.from_monomials(items, ("a", "b"), 4)


def properties():
    rng = random.Random(7)
    norm_ok = True
    for _ in range(200):
        w = [Fr(rng.randint(0, 9)) for _ in range(4)]
        w[0] += 1
        s = BellDiagonalState(tuple(x / sum(w) for x in w))
        for op in (bbpssw_round, dejmps_round, bilateral_cnot_round):
            norm_ok &= sum(op(s).output.p) == 1
    elements = [pbs("a", "b", "c", "d"), cpbs("a", "b", "c", "d"), bs("a", "b", "c", "d"), hwp("a"),
                hwp("b", Fr(45, 2)), bd(("a", "b"), ("c", "d", "e"))]
    unit_ok = branch_ok = True
    for _ in range(100):
        st = _random_state(rng)
        if st.is_empty():
            continue
        for e in elements:
            unit_ok &= abs(float(to_real(apply_element(st, e).norm2())) - float(to_real(st.norm2()))) < 1e-12
        rule = Pattern({"a": rng.randint(0, 2), "b": rng.randint(0, 2)}, only=False)
        p, _ = postselect(st, rule)
        q, _ = postselect(st, Not(rule))
        branch_ok &= abs(float(p) + float(q) - 1) < 1e-12
    twirl_ok = all(twirl(twirl(make_werner(Fr(k, 20)))) == twirl(make_werner(Fr(k, 20))) for k in range(21))
    t0 = time.perf_counter()
    _, code = cli.cmd_verify("all", cli.RunContext(0, 1_000_000))
    dt = time.perf_counter() - t0
    ok = norm_ok and unit_ok and branch_ok and twirl_ok and code == 0 and dt < 300
    return record("Property suite", ok, f"normalization {norm_ok}, unitarity {unit_ok}, branch completeness "
                                        f"{branch_ok}, twirl idempotence {twirl_ok}; verify all exit {code} "
                                        f"in {dt:.1f} s")


CRITERIA = [spdc_anchor, pbs_closed_form, bbpssw_checks, deterministic, single_copy, dmepp, table_one, logical,
            properties]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[c.__name__ for c in CRITERIA])
def test_acceptance(criterion):
    assert criterion()


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    sys.exit(0 if all(results) else 1)
