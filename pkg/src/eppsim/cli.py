"""Command-line front end: ``eppsim {list,run,sweep,verify}``.

Numbers print with 12 significant digits. Exit codes: 0 success,
1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import inspect
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from typing import Callable

from ._numeric import parse_number

DIGITS = 12


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Param:
    name: str
    default: object
    kind: str = "number"  # number | int | choice
    choices: tuple = ()


@dataclass(frozen=True)
class Protocol:
    name: str
    params: tuple
    outputs: tuple
    fn: Callable
    description: str
    uses_rng: bool = False


@dataclass(frozen=True)
class RunContext:
    seed: int = 0
    samples: int = 100_000


@dataclass
class SweepSpec:
    protocol: str
    grids: list  # [(name, start, stop, points)]
    fixed: dict = field(default_factory=dict)

    def __post_init__(self):
        for name, _, _, points in self.grids:
            if points < 2:
                raise UsageError(f"grid for {name} needs at least 2 points")


# --- protocol table -------------------------------------------------------


def _rank2(F):
    from .bell_core import BellDiagonalState

    return BellDiagonalState((F, 0, 1 - F, 0))


def _fs(res) -> dict:
    out = None if res.output is None else res.output.fidelity
    return {"fidelity": out, "success": res.success_prob}


def _bell(fn):
    def run(p, ctx):
        from . import bell_core as bc

        return _fs(getattr(bc, fn)(bc.make_werner(p["F"])))
    return run


def _pan_pbs(p, ctx):
    from .bell_core import pan_pbs_round

    return _fs(pan_pbs_round(_rank2(p["F"])))


def _pan_spdc(p, ctx):
    from .bell_core import pan_spdc_round

    return _fs(pan_spdc_round(p["F"], p["p"]))


def _ghz_input(p):
    from . import multipartite as mp

    if p["error_kind"] == "bit":
        return mp.ghz_bit_error_mixture(p["F"], p["n"])
    return mp.ghz_phase_error_mixture(p["F"], p["n"])


def _mmepp(p, ctx):
    from .multipartite import mmepp_round

    return _fs(mmepp_round(_ghz_input(p), p["error_kind"]))


def _smepp(p, ctx):
    from .multipartite import smepp_round

    return _fs(smepp_round(_ghz_input(p), bool(p["theta_pi"]), p["error_kind"]))


def _dmepp_curves(p, ctx):
    from .multipartite import dmepp_curves

    return dmepp_curves(p["F"])


def _dmepp_yield(p, ctx):
    from .multipartite import dmepp_yield_count

    return dmepp_yield_count(p["F"])


def _dmepp_sample(p, ctx):
    from .multipartite import dmepp_yield_sample

    c = dmepp_yield_sample(p["F"], copies=ctx.samples, seed=ctx.seed)
    n = c["input_pairs"]
    return {"conventional_eff": Fraction(c["conventional_out"], n), "two_step_eff": Fraction(c["two_step_out"], n),
            "conventional_fid": Fraction(c["conventional_good"], max(c["conventional_out"], 1)),
            "two_step_fid": Fraction(c["two_step_good"], max(c["two_step_out"], 1)), "input_pairs": n}


def _single_copy(p, ctx):
    from .hyper_epp import single_copy_round

    return _fs(single_copy_round(p["Fp"], p["Fs"], p["dof"]))


def _spepp_map(p, ctx):
    from .hyper_epp import spepp_round

    return _fs(spepp_round(p["F"]))


def _qnd_spdc(p, ctx):
    from .hyper_epp import qnd_spdc_enumeration, qnd_spdc_fidelity

    return {"fidelity": qnd_spdc_fidelity(p["p"], p["F"]),
            "fidelity_bosonic": qnd_spdc_enumeration(p["p"], p["F"], "bosonic")[0]}


def _deterministic(p, ctx):
    from .hyper_epp import deterministic_round

    return _fs(deterministic_round({"phi+": p["F"], "psi+": 1 - p["F"]}))


def _qd_cavity(p, ctx):
    from .hyper_epp import QDCavityParams, qd_transmission

    t, r = qd_transmission(QDCavityParams(**{k: float(p[k]) for k in
                                             ("w_c", "w", "w_X", "g", "kappa", "kappa_s", "gamma")}))
    return {"t_re": t.real, "t_im": t.imag, "r_re": r.real, "r_im": r.imag, "t_abs": abs(t), "r_abs": abs(r)}


def _hepp(p, ctx):
    from .hyper_epp import hepp_two_step

    return hepp_two_step(p["Fp"], p["Fs"])


def _mbepp_physical(p, ctx):
    from .mbepp import mbepp_round_physical

    return _fs(mbepp_round_physical(_rank2(p["F"])))


def _qpc(p):
    from .mbepp import QpcParams

    return QpcParams(p["n"], p["m"])


def _logical_pg(p, ctx):
    from .mbepp import LossModel, logical_pg

    return {"P_g": logical_pg(_qpc(p), LossModel(p["eta"]), p["F"], p["reading"])}


def _logical_f2(p, ctx):
    from .mbepp import QndErrorModel, logical_f2, logical_pfg

    q = QndErrorModel(p["pe"])
    return {"F2": logical_f2(_qpc(p), p["F"], q), "P_Fg": logical_pfg(_qpc(p), p["F"], q)}


def _logical_pg_imperfect(p, ctx):
    from .mbepp import LossModel, QndErrorModel, logical_pg, logical_pg_imperfect

    loss = LossModel(p["eta"])
    return {"P_g_imperfect": logical_pg_imperfect(_qpc(p), loss, p["F"], QndErrorModel(p["pe"]), p["reading"]),
            "P_g": logical_pg(_qpc(p), loss, p["F"], p["reading"])}


def _logical_mc(p, ctx):
    from .mbepp import LossModel, QndErrorModel, mc_logical_fidelity, mc_logical_success

    q = QndErrorModel(p["pe"])
    s = mc_logical_success(_qpc(p), LossModel(p["eta"]), p["F"], q, samples=ctx.samples, seed=ctx.seed)
    f, _ = mc_logical_fidelity(_qpc(p), p["F"], q, samples=ctx.samples, seed=ctx.seed + 1)
    return {"P_g_imperfect": s.mean, "P_g_stderr": s.stderr, "F2": f.mean, "F2_stderr": f.stderr,
            "samples": s.samples}


F34 = Fraction(3, 4)
FS_OUT = ("fidelity", "success")
QPC = (Param("n", 2, "int"), Param("m", 2, "int"))
READING = Param("reading", "joint", "choice", ("joint", "marginal"))

_ANALYTIC = [
    Protocol("bbpssw", (Param("F", F34),), FS_OUT, _bell("bbpssw_round"), "CNOT round with twirling, Werner input"),
    Protocol("dejmps", (Param("F", F34),), FS_OUT, _bell("dejmps_round"), "CNOT round with local rotations, Werner input"),
    Protocol("pan_pbs", (Param("F", F34),), FS_OUT, _pan_pbs, "PBS parity check on two ideal pairs"),
    Protocol("pan_spdc", (Param("F", F34), Param("p", Fraction(1, 100))), FS_OUT, _pan_spdc,
             "PBS parity check with SPDC double-pair emission"),
    Protocol("mmepp", (Param("F", F34), Param("n", 3, "int"), Param("error_kind", "bit", "choice", ("bit", "phase"))),
             FS_OUT, _mmepp, "GHZ round with transversal CNOTs"),
    Protocol("smepp", (Param("F", F34), Param("n", 3, "int"), Param("error_kind", "bit", "choice", ("bit", "phase")),
                       Param("theta_pi", 0, "int")), FS_OUT, _smepp, "GHZ round with parity projections"),
    Protocol("dmepp_curves", (Param("F", F34),), ("eff_a", "eff_b", "fid_conv", "fid_dmepp"), _dmepp_curves,
             "closed-form yield and fidelity of the one- and two-step GHZ schemes"),
    Protocol("dmepp_yield", (Param("F", F34),),
             ("conventional_eff", "conventional_fid", "two_step_eff", "two_step_fid"), _dmepp_yield,
             "exact bookkeeping of both GHZ schemes"),
    Protocol("dmepp_sample", (Param("F", F34),),
             ("conventional_eff", "conventional_fid", "two_step_eff", "two_step_fid", "input_pairs"), _dmepp_sample,
             "sampled copies through both GHZ schemes (uses --seed, --samples)", True),
    Protocol("single_copy", (Param("Fp", Fraction(4, 5)), Param("Fs", Fraction(7, 10)),
                             Param("dof", "spatial", "choice", ("spatial", "time-bin"))), FS_OUT, _single_copy,
             "one hyperentangled pair, polarization vs spatial parity"),
    Protocol("spepp_map", (Param("F", F34),), FS_OUT, _spepp_map, "spatial entanglement removes bit flips"),
    Protocol("qnd_spdc", (Param("p", Fraction(1, 10)), Param("F", F34)), ("fidelity", "fidelity_bosonic"), _qnd_spdc,
             "QND selection of SPDC pairs"),
    Protocol("deterministic", (Param("F", F34),), FS_OUT, _deterministic, "spatial entanglement copied to polarization"),
    Protocol("qd_cavity", (Param("w_c", 0.0), Param("w", 0.0), Param("w_X", 0.0), Param("g", 1.0),
                           Param("kappa", 1.0), Param("kappa_s", 0.0), Param("gamma", 0.1)),
             ("t_re", "t_im", "r_re", "r_im", "t_abs", "r_abs"), _qd_cavity, "double-sided cavity transmission"),
    Protocol("hepp_two_step", (Param("Fp", Fraction(4, 5)), Param("Fs", Fraction(7, 10))),
             ("Fp_out", "Fs_out", "F_out", "eff_with_qsjm", "eff_without", "eff_matched"), _hepp,
             "two-step polarization and spatial purification"),
    Protocol("mbepp_physical", (Param("F", Fraction(17, 20)),), FS_OUT, _mbepp_physical,
             "measurement-based round with ideal GHZ resources"),
    Protocol("logical_pg", QPC + (Param("eta", Fraction(4, 5)), Param("F", Fraction(17, 20)), READING), ("P_g",),
             _logical_pg, "logical success probability under photon loss"),
    Protocol("logical_f2", QPC + (Param("F", Fraction(17, 20)), Param("pe", Fraction(1, 10))), ("F2", "P_Fg"),
             _logical_f2, "logical fidelity with imperfect QND"),
    Protocol("logical_pg_imperfect", QPC + (Param("eta", Fraction(4, 5)), Param("F", Fraction(17, 20)),
                                            Param("pe", Fraction(1, 10)), READING),
             ("P_g_imperfect", "P_g"), _logical_pg_imperfect, "logical success with loss and imperfect QND"),
    Protocol("logical_mc", QPC + (Param("eta", 0.8), Param("F", 0.85), Param("pe", 0.1)),
             ("P_g_imperfect", "P_g_stderr", "F2", "F2_stderr", "samples"), _logical_mc,
             "Monte Carlo of the logical round (uses --seed, --samples)", True),
]


def _preset_protocol(name: str) -> Protocol:
    from .optics_engine import build_preset, run_protocol
    from .optics_engine.mbepp_linear import mbepp_linear
    from .optics_engine.presets import PRESETS

    builder = PRESETS.get(name, mbepp_linear)
    params = []
    for p in inspect.signature(builder).parameters.values():
        if isinstance(p.default, str):
            choices = ("postselected", "full") if p.name == "branch" else (p.default,)
            params.append(Param(p.name, p.default, "choice", choices))
        elif p.default is not None and not isinstance(p.default, (list, tuple)):
            params.append(Param(p.name, p.default))

    def run(values, ctx):
        return _fs(run_protocol(build_preset(name, **values)))

    return Protocol(name, tuple(params), FS_OUT, run, f"Fock-engine preset: {build_preset(name).description}")


def protocols() -> dict:
    from .optics_engine import preset_names

    table = {p.name: p for p in _ANALYTIC}
    for name in preset_names():
        table[name] = _preset_protocol(name)
    return dict(sorted(table.items()))


def _lookup(name: str) -> Protocol:
    table = protocols()
    if name not in table:
        raise UsageError(f"unknown protocol {name!r}; see 'eppsim list'")
    return table[name]


# --- values and formatting ------------------------------------------------


def _coerce_param(param: Param, raw):
    if param.kind == "choice":
        if str(raw) not in param.choices:
            raise UsageError(f"{param.name} must be one of {', '.join(param.choices)}")
        return str(raw)
    value = parse_number(raw) if isinstance(raw, str) else raw
    if param.kind == "int":
        if isinstance(value, float) and not value.is_integer():
            raise UsageError(f"{param.name} must be an integer")
        return int(value)
    return value


def resolve_params(proto: Protocol, given: dict) -> dict:
    known = {p.name: p for p in proto.params}
    extra = set(given) - set(known)
    if extra:
        raise UsageError(f"{proto.name} has no parameter(s) {', '.join(sorted(extra))}; "
                         f"known: {', '.join(known) or 'none'}")
    return {name: _coerce_param(p, given.get(name, p.default)) for name, p in known.items()}


def fmt(x) -> str:
    if x is None:
        return "nan"
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, str):
        return x
    if isinstance(x, int):
        return str(x)
    return format(float(x), f".{DIGITS}g")


def evaluate(proto: Protocol, values: dict, ctx: RunContext) -> list:
    """One result row: inputs in declared order, then the outputs."""
    try:
        out = proto.fn(values, ctx)
    except (ValueError, KeyError, TypeError, ZeroDivisionError) as exc:
        raise UsageError(f"{proto.name}: {exc}") from None
    return [values[p.name] for p in proto.params] + [out.get(k) for k in proto.outputs]


def header(proto: Protocol) -> list:
    return [p.name for p in proto.params] + list(proto.outputs)


def render(proto: Protocol, rows: list, form: str) -> str:
    cols = header(proto)
    buf = io.StringIO()
    if form == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([fmt(x) for x in r])
    else:
        for r in rows:
            rec = {"protocol": proto.name}
            rec.update({c: fmt(x) for c, x in zip(cols, r)})
            buf.write(json.dumps(rec) + "\n")
    return buf.getvalue()


def grid_values(start, stop, points: int) -> list:
    if points < 2:
        raise UsageError("a grid needs at least 2 points")
    exact = isinstance(start, Fraction) and isinstance(stop, Fraction)
    step = (stop - start) / (points - 1) if exact else (float(stop) - float(start)) / (points - 1)
    if exact:
        return [start + k * step for k in range(points)]
    vals = [float(start) + k * step for k in range(points)]
    vals[-1] = float(stop)
    return vals


def parse_grid(text: str) -> tuple:
    parts = text.split(":")
    if len(parts) != 4:
        raise UsageError(f"grid {text!r} is not NAME:START:STOP:POINTS")
    name, a, b, n = parts
    try:
        return name, parse_number(a), parse_number(b), int(n)
    except ValueError:
        raise UsageError(f"grid {text!r} has a non-numeric field") from None


def parse_params(items) -> dict:
    out = {}
    for it in items or ():
        if "=" not in it:
            raise UsageError(f"parameter {it!r} is not NAME=VALUE")
        k, v = it.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def cmd_run(protocol: str, params: dict, ctx: RunContext = RunContext(), form: str = "records") -> str:
    proto = _lookup(protocol)
    return render(proto, [evaluate(proto, resolve_params(proto, params), ctx)], form)


def cmd_sweep(spec: SweepSpec, ctx: RunContext = RunContext(), form: str = "csv") -> str:
    proto = _lookup(spec.protocol)
    axes = [(name, grid_values(a, b, n)) for name, a, b, n in spec.grids]
    rows = []
    for combo in iproduct(*[vals for _, vals in axes]):
        given = dict(spec.fixed)
        given.update({name: v for (name, _), v in zip(axes, combo)})
        rows.append(evaluate(proto, resolve_params(proto, given), ctx))
    return render(proto, rows, form)


def cmd_verify(suite: str = "all", ctx: RunContext = RunContext(samples=1_000_000)) -> tuple:
    """Returns (report text, exit code)."""
    from .checks import run_suite, select

    try:
        select(suite)
    except KeyError:
        raise UsageError(f"unknown verification suite {suite!r}; see 'eppsim list'") from None
    results = run_suite(suite, seed=ctx.seed, samples=ctx.samples)
    lines = [f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}" for r in results]
    failed = sum(not r.passed for r in results)
    lines.append(f"{len(results) - failed}/{len(results)} checks passed")
    return "\n".join(lines) + "\n", 0 if failed == 0 else 1


def cmd_list() -> str:
    from .checks import suite_names

    lines = ["protocols:"]
    for name, p in protocols().items():
        params = ", ".join(f"{q.name}={fmt(q.default)}" for q in p.params)
        lines.append(f"  {name}({params}) -> {', '.join(p.outputs)}  # {p.description}")
    lines.append("verification suites: all, " + ", ".join(suite_names()))
    return "\n".join(lines) + "\n"


# --- entry point ----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="eppsim", description="entanglement purification simulator")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, with_format=True):
        p.add_argument("--out", help="write output to this file instead of stdout")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--samples", type=int, default=None)
        if with_format:
            p.add_argument("--format", choices=("csv", "records"), default=None)

    sub.add_parser("list", help="list protocols and verification suites")
    r = sub.add_parser("run", help="evaluate one protocol once")
    r.add_argument("protocol_pos", nargs="?", metavar="PROTOCOL")
    r.add_argument("--protocol")
    r.add_argument("--param", action="append", metavar="NAME=VALUE")
    common(r)
    s = sub.add_parser("sweep", help="evaluate a protocol over a parameter grid")
    s.add_argument("protocol_pos", nargs="?", metavar="PROTOCOL")
    s.add_argument("--protocol")
    s.add_argument("--param", action="append", metavar="NAME=VALUE")
    s.add_argument("--grid", action="append", metavar="NAME:START:STOP:POINTS")
    common(s)
    v = sub.add_parser("verify", help="run analytic-versus-oracle checks")
    v.add_argument("suite", nargs="?", default="all")
    common(v, with_format=False)
    return ap


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc}") from None


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "list":
            _emit(cmd_list(), None)
            return 0
        if args.command == "verify":
            ctx = RunContext(args.seed, args.samples or 1_000_000)
            text, code = cmd_verify(args.suite, ctx)
            _emit(text, args.out)
            return code
        protocol = args.protocol or args.protocol_pos
        if not protocol:
            raise UsageError("no protocol given (use --protocol NAME)")
        ctx = RunContext(args.seed, args.samples or 100_000)
        params = parse_params(args.param)
        if args.command == "run":
            _emit(cmd_run(protocol, params, ctx, args.format or "records"), args.out)
        else:
            if not args.grid:
                raise UsageError("sweep needs at least one --grid NAME:START:STOP:POINTS")
            spec = SweepSpec(protocol, [parse_grid(g) for g in args.grid], params)
            _emit(cmd_sweep(spec, ctx, args.format or "csv"), args.out)
        return 0
    except UsageError as exc:
        print(f"eppsim: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
