"""Wired-up optical protocols.

Each builder returns a :class:`ProtocolSpec`; parameters default to exact
rationals so the engine runs in exact arithmetic unless a float is passed.
"""

from __future__ import annotations

from fractions import Fraction

from .._numeric import coerce
from .elements import bd, cpbs, hwp, pbs
from .protocol import OutputRule, ProtocolSpec, Select, bitflip_channel
from .rules import AnyOf, Pattern, one_each
from .sources import SourceSpec


def _four_mode_output(only=True):
    return OutputRule(one_each(("a3", "a4", "b3", "b4"), only), ("a3", "b3"), "II", "ZI", "four-mode")


def pan2001(F=Fraction(3, 4)) -> ProtocolSpec:
    F = coerce(F)
    srcs = (SourceSpec("pair", ("a1", "b1"), {"state": "phi+", "bitflip": 1 - F}),
            SourceSpec("pair", ("a2", "b2"), {"state": "phi+", "bitflip": 1 - F}))
    circuit = (pbs("a1", "a2", "a3", "a4"), pbs("b1", "b2", "b3", "b4"))
    return ProtocolSpec("pan2001", srcs, circuit, (_four_mode_output(),), (("a4", "PM"), ("b4", "PM")),
                        description="PBS parity check on two ideal pairs; four-mode rule; +/- readout of a4, b4")


def pan2003_spdc(F=Fraction(3, 4), p=Fraction(1, 100)) -> ProtocolSpec:
    F = coerce(F)
    srcs = (SourceSpec("spdc", ("a1", "b1"), {"p": p, "state": "phi+", "bitflip": 1 - F}),
            SourceSpec("spdc", ("a2", "b2"), {"p": p, "state": "phi+", "bitflip": 1 - F}))
    circuit = (pbs("a1", "a2", "a3", "a4"), pbs("b1", "b2", "b3", "b4"))
    return ProtocolSpec("pan2003_spdc", srcs, circuit, (_four_mode_output(),), (("a4", "PM"), ("b4", "PM")),
                        truncation=4,
                        description="same circuit fed by SPDC expansions up to double-pair emission")


def _swap_block(x: str, y: str, tag_a: str, tag_b: str) -> tuple:
    """+/- PBS on photons x, y, then an H/V PBS per output: T = transmitted H, R = reflected V."""
    sa, sb = f"s{tag_a}", f"s{tag_b}"
    Ta, Ra, Tb, Rb = f"T{tag_a}", f"R{tag_a}", f"T{tag_b}", f"R{tag_b}"
    dets = (Ta, Ra, Tb, Rb)
    rule = AnyOf((Pattern({Ta: 1, Tb: 1, Ra: 0, Rb: 0}, only=False),
                  Pattern({Ra: 1, Rb: 1, Ta: 0, Tb: 0}, only=False)))
    return (cpbs(x, y, sa, sb), pbs(sa, None, Ta, Ra), pbs(sb, None, Tb, Rb),
            Select(rule, f"swap {x}-{y}")), dets


def nested_repeater(F=Fraction(3, 4), p=Fraction(1, 100)) -> ProtocolSpec:
    F = coerce(F)
    srcs = (SourceSpec("spdc", ("ph1", "ph2"), {"p": p}, "left"),
            SourceSpec("spdc", ("ph3", "ph4"), {"p": p}, "left"),
            SourceSpec("spdc", ("ph5", "ph6"), {"p": p}, "right"),
            SourceSpec("spdc", ("ph7", "ph8"), {"p": p}, "right"))
    left, dl = _swap_block("ph2", "ph3", "1", "2")
    right, dr = _swap_block("ph6", "ph7", "3", "4")
    circuit = left + right + (
        bitflip_channel("ph4", 1 - F), bitflip_channel("ph8", 1 - F),
        pbs("ph1", "ph5", "a3", "a4"), pbs("ph4", "ph8", "b3", "b4"))
    out = OutputRule(one_each(("a3", "a4", "b3", "b4"), only=False), ("a3", "b3"), "II", "ZI", "four-mode")
    return ProtocolSpec("nested_repeater", srcs, circuit, (out,), (("a4", "PM"), ("b4", "PM")),
                        truncation=8, group_truncation={"left": 4, "right": 4},
                        description="two swapping stages wash out double pairs, then the four-mode PBS round")


def spepp(F=Fraction(3, 4), pol=None, eta=1, omega_pi=0) -> ProtocolSpec:
    pol = pol or [[coerce(F), "phi+"], [1 - coerce(F), "psi+"]]
    src = SourceSpec("hyper", ("a1", "a2", "b1", "b2"), {"pol": pol, "spat": [[1, "phi+"]],
                                                          "eta": eta, "omega_pi": omega_pi})
    circuit = (pbs("a1", "a2", "a3", "a4"), pbs("b1", "b2", "b3", "b4"))
    outs = (OutputRule(Pattern({"a3": 1, "b3": 1}), ("a3", "b3"), label="upper"),
            OutputRule(Pattern({"a4": 1, "b4": 1}), ("a4", "b4"), label="lower"))
    return ProtocolSpec("spepp", (src,), circuit, outs,
                        description="spatial entanglement checks polarization parity (single-pair order)")


def deterministic_epp(pol=None) -> ProtocolSpec:
    """pol: [[weight, state], ...] with Bell symbols or products HH/HV/VH/VV."""
    pol = pol or [[Fraction(1, 4), "HH"], [Fraction(1, 4), "VV"], [Fraction(1, 4), "HV"], [Fraction(1, 4), "VH"]]
    src = SourceSpec("hyper", ("a1", "a2", "b1", "b2"), {"pol": pol, "spat": [[1, "phi+"]]})

    def side(x1, x2, t1, r1, t2, r2, good, bad):
        # x1: H -> t1, V -> r1;  x2: H -> t2 -> V, V -> r2 -> H; then merge
        return (pbs(x1, None, t1, r1), pbs(x2, None, t2, r2), hwp(t2), hwp(r2),
                pbs(t1, t2, good, f"{good}_dump"), pbs(r2, r1, bad, f"{bad}_dump"))

    circuit = side("a1", "a2", "c1", "e1", "c2", "e2", "D2", "D5") + side("b1", "b2", "d1", "f1", "d2", "f2", "D4", "D7")
    outs = (OutputRule(Pattern({"D2": 1, "D4": 1}, False), ("D2", "D4"), label="D2D4"),
            OutputRule(Pattern({"D5": 1, "D7": 1}, False), ("D5", "D7"), label="D5D7"),
            OutputRule(Pattern({"D2": 1, "D7": 1}, False), ("D2", "D7"), "XI", label="D2D7"),
            OutputRule(Pattern({"D5": 1, "D4": 1}, False), ("D5", "D4"), "XI", label="D5D4"))
    return ProtocolSpec("deterministic_epp", (src,), circuit, outs,
                        description="spatial entanglement moved into polarization; which-detector reveals the old polarization")


def single_copy_hyper(Fp=Fraction(4, 5), Fs=Fraction(7, 10)) -> ProtocolSpec:
    Fp, Fs = coerce(Fp), coerce(Fs)
    src = SourceSpec("hyper", ("a1", "a2", "b1", "b2"),
                     {"pol": [[Fp, "phi+"], [1 - Fp, "psi+"]], "spat": [[Fs, "phi+"], [1 - Fs, "psi+"]]})

    def side(x1, x2, p, D_even, D_odd):
        h1, v1, h2, v2 = f"{p}h1", f"{p}v1", f"{p}h2", f"{p}v2"
        return (pbs(x1, None, h1, v1), pbs(x2, None, h2, v2), hwp(h1), hwp(v2),
                bd((h1, v2), (f"{p}j0", D_even, f"{p}j1")),
                bd((v1, h2), (f"{p}k0", D_odd, f"{p}k1")))

    circuit = side("a1", "a2", "a", "D1", "D3") + side("b1", "b2", "b", "D2", "D4")
    outs = (OutputRule(Pattern({"D1": 1, "D2": 1}, False), ("D1", "D2"), label="D1D2"),
            OutputRule(Pattern({"D3": 1, "D4": 1}, False), ("D3", "D4"), label="D3D4"))
    return ProtocolSpec("single_copy_hyper", (src,), circuit, outs,
                        description="polarization x spatial parity check with beam displacers")


PRESETS = {
    "pan2001": pan2001,
    "pan2003_spdc": pan2003_spdc,
    "nested_repeater": nested_repeater,
    "spepp": spepp,
    "deterministic_epp": deterministic_epp,
    "single_copy_hyper": single_copy_hyper,
}


def build_preset(name: str, **params) -> ProtocolSpec:
    if name == "mbepp_linear":
        from .mbepp_linear import mbepp_linear

        return mbepp_linear(**params)
    try:
        fn = PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; known: {sorted(list(PRESETS) + ['mbepp_linear'])}") from None
    return fn(**params)


def preset_names() -> list:
    return sorted(list(PRESETS) + ["mbepp_linear"])
