"""Linear optical elements as substitutions on creation operators.

Conventions (all fixed, see README):

* PBS: first input H -> out1, V -> out2; second input H -> out2, V -> out1.
* CPBS: the same in the +/- basis (+ transmitted, - reflected).
* HWP at angle t: H -> cos2t H + sin2t V, V -> sin2t H - cos2t V.
* BD: lane i keeps H in output lane i and shifts V to output lane i+1.
* BS: in1 -> (out1 + i out2)/sqrt2, in2 -> (i out1 + out2)/sqrt2.
* PHASE: multiply the chosen polarization(s) by exp(i pi q).
* SWAP: input k is relabelled as output k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .._numeric import Surd, is_exact
from .state import POLS, ConfigurationError, ModeLabel, OpticalState

KINDS = ("PBS", "CPBS", "HWP", "BD", "BS", "PHASE", "SWAP")

_R2 = Surd.inv_sqrt2()
_HALF = Surd(Fraction(1, 2))
_I = Surd.i()


def _cos_sin_deg(deg):
    """cos and sin of an angle in degrees, exact on multiples of 45."""
    if is_exact(deg) and Fraction(deg) % 45 == 0:
        k = int(Fraction(deg) / 45) % 8
        table = [(1, 0), (_R2, _R2), (0, 1), (-_R2, _R2), (-1, 0), (-_R2, -_R2), (0, -1), (_R2, -_R2)]
        c, s = table[k]
        return Surd.lift(c), Surd.lift(s)
    r = math.radians(float(deg))
    return math.cos(r), math.sin(r)


def _phase(q):
    """exp(i pi q), exact for q a multiple of 1/4."""
    if is_exact(q) and (Fraction(q) * 4).denominator == 1:
        c, s = _cos_sin_deg(Fraction(q) * 180)
        return c + _I * s
    return complex(math.cos(math.pi * float(q)), math.sin(math.pi * float(q)))


@dataclass(frozen=True)
class OpticalElement:
    kind: str
    inputs: tuple
    outputs: tuple = ()
    params: dict = field(default_factory=dict, hash=False, compare=True)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown element kind {self.kind!r}")
        object.__setattr__(self, "inputs", tuple(self.inputs))
        outs = tuple(self.outputs) if self.outputs else self._default_outputs()
        object.__setattr__(self, "outputs", outs)
        self._check_shape()

    def _default_outputs(self):
        if self.kind in ("HWP", "PHASE"):
            return self.inputs
        if self.kind == "SWAP":
            return tuple(reversed(self.inputs))
        raise ConfigurationError(f"{self.kind} needs explicit output modes")

    def _check_shape(self):
        ni, no = len(self.inputs), len(self.outputs)
        ok = {
            "PBS": ni in (1, 2) and no == 2,
            "CPBS": ni in (1, 2) and no == 2,
            "HWP": ni == 1 and no == 1,
            "PHASE": ni == 1 and no == 1,
            "BS": ni in (1, 2) and no == 2,
            "BD": ni >= 1 and no == ni + 1,
            "SWAP": ni == no and ni >= 1,
        }[self.kind]
        if not ok:
            raise ConfigurationError(f"{self.kind} with {ni} inputs / {no} outputs is not valid")

    # the map on single-photon labels
    def transfer(self) -> dict:
        """ModeLabel -> list of (ModeLabel, coefficient)."""
        L = ModeLabel
        i, o, k = self.inputs, self.outputs, self.kind
        t: dict = {}
        if k == "PBS":
            t[L(i[0], "H")] = [(L(o[0], "H"), 1)]
            t[L(i[0], "V")] = [(L(o[1], "V"), 1)]
            if len(i) > 1:
                t[L(i[1], "H")] = [(L(o[1], "H"), 1)]
                t[L(i[1], "V")] = [(L(o[0], "V"), 1)]
        elif k == "CPBS":
            h = _HALF

            def plus(port):
                return [(L(port, "H"), h), (L(port, "V"), h)]

            def minus(port, sign):
                return [(L(port, "H"), sign * h), (L(port, "V"), -sign * h)]

            # H = (+ + -)/sqrt2, V = (+ - -)/sqrt2; + goes straight, - crosses
            t[L(i[0], "H")] = plus(o[0]) + minus(o[1], 1)
            t[L(i[0], "V")] = plus(o[0]) + minus(o[1], -1)
            if len(i) > 1:
                t[L(i[1], "H")] = plus(o[1]) + minus(o[0], 1)
                t[L(i[1], "V")] = plus(o[1]) + minus(o[0], -1)
        elif k == "HWP":
            c, s = _cos_sin_deg(self.params.get("angle_deg", 45) * 2)
            t[L(i[0], "H")] = [(L(o[0], "H"), c), (L(o[0], "V"), s)]
            t[L(i[0], "V")] = [(L(o[0], "H"), s), (L(o[0], "V"), -c)]
        elif k == "PHASE":
            ph = _phase(self.params.get("phase_pi", 1))
            which = self.params.get("pol", "V")
            for p in POLS:
                coef = ph if which in (p, "both") else 1
                t[L(i[0], p)] = [(L(o[0], p), coef)]
        elif k == "BS":
            for p in POLS:
                t[L(i[0], p)] = [(L(o[0], p), _R2), (L(o[1], p), _I * _R2)]
                if len(i) > 1:
                    t[L(i[1], p)] = [(L(o[0], p), _I * _R2), (L(o[1], p), _R2)]
        elif k == "BD":
            for j, lane in enumerate(i):
                t[L(lane, "H")] = [(L(o[j], "H"), 1)]
                t[L(lane, "V")] = [(L(o[j + 1], "V"), 1)]
        elif k == "SWAP":
            for a, b in zip(i, o):
                for p in POLS:
                    t[L(a, p)] = [(L(b, p), 1)]
        return {m: [(tgt, Surd.lift(c)) for tgt, c in img] for m, img in t.items()}

    def to_dict(self) -> dict:
        from .serialize import encode_number

        return {
            "kind": self.kind,
            "inputs": list(self.inputs),
            "outputs": list(self.outputs),
            "params": {k: encode_number(v) if not isinstance(v, str) else v for k, v in self.params.items()},
        }


def apply_element(state: OpticalState, e: OpticalElement) -> OpticalState:
    missing = [m for m in e.inputs if m not in state.modes]
    if missing:
        raise ConfigurationError(f"{e.kind} input mode(s) {missing} not present in the state")
    clash = (set(e.outputs) - set(e.inputs)) & state.modes
    if clash:
        raise ConfigurationError(f"{e.kind} output mode(s) {sorted(clash)} already in use")
    table = e.transfer()
    new_modes = (state.modes - set(e.inputs)) | set(e.outputs)
    return state.substitute(table.get, new_modes)


# short constructors used by the presets
def pbs(in1, in2, out1, out2) -> OpticalElement:
    ins = (in1,) if in2 is None else (in1, in2)
    return OpticalElement("PBS", ins, (out1, out2))


def cpbs(in1, in2, out1, out2) -> OpticalElement:
    ins = (in1,) if in2 is None else (in1, in2)
    return OpticalElement("CPBS", ins, (out1, out2))


def hwp(mode, angle_deg=45, out=None) -> OpticalElement:
    return OpticalElement("HWP", (mode,), (out or mode,), {"angle_deg": Fraction(angle_deg) if isinstance(angle_deg, int) else angle_deg})


def bs(in1, in2, out1, out2) -> OpticalElement:
    return OpticalElement("BS", (in1, in2), (out1, out2))


def bd(lanes_in, lanes_out) -> OpticalElement:
    return OpticalElement("BD", tuple(lanes_in), tuple(lanes_out))


def phase(mode, phase_pi=1, pol="V") -> OpticalElement:
    return OpticalElement("PHASE", (mode,), (mode,), {"phase_pi": Fraction(phase_pi) if isinstance(phase_pi, int) else phase_pi, "pol": pol})


def rename(src, dst) -> OpticalElement:
    return OpticalElement("SWAP", (src,), (dst,))
