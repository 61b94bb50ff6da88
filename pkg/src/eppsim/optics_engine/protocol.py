"""Postselection, polarization measurement and the protocol harness."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from typing import Iterable, Sequence, Union

from .._numeric import Surd, coerce, simplify, sqrt_scalar, to_real
from ..bell_core import ORDER, BellComponent, BellDiagonalState, Correction, PurificationResult
from .elements import OpticalElement, apply_element, hwp
from .rules import AnyOf, Pattern, PostselectionRule
from .serialize import decode_number, encode_number
from .sources import SourceSpec
from .state import ConfigurationError, Mixture, OpticalState, abs2, key_factorial, key_photons, make_key


# ---------------------------------------------------------------- basics

def normalized(state: OpticalState) -> OpticalState:
    n = state.norm2()
    if n == 0:
        return state
    r = sqrt_scalar(to_real(n))
    return state.scaled(1 / r)


def postselect(state: Union[OpticalState, Mixture], rule: PostselectionRule):
    """(probability, renormalized state); an empty state marks probability 0."""
    if isinstance(state, Mixture):
        total = 0
        kept = []
        for w, st in state:
            p, s = postselect(st, rule)
            if p != 0:
                kept.append((w * p, s))
                total = total + w * p
        if total == 0:
            return 0, Mixture(())
        return total, Mixture(tuple((w / total, s) for w, s in kept))
    n0 = state.norm2()
    part = state.filter(rule.matches)
    if part.is_empty():
        return to_real(0), part
    return to_real(part.norm2() / n0 if not isinstance(n0, float) else float(part.norm2()) / n0), normalized(part)


def _basis_change(state: OpticalState, modes: Iterable[str], basis: str) -> OpticalState:
    if basis == "HV":
        return state
    if basis != "PM":
        raise ConfigurationError(f"unknown measurement basis {basis!r}")
    for m in modes:
        # HWP at 22.5 deg maps |+> -> |H>, |-> -> |V>
        state = apply_element(state, hwp(m, Fraction(45, 2)))
    return state


def measure_polarization(state: OpticalState, modes: Sequence[str], basis: str = "HV") -> list:
    """[(outcome, probability, conditional state)] for one photon per measured mode."""
    modes = tuple(modes)
    for m in modes:
        if m not in state.modes:
            raise ConfigurationError(f"mode {m} not present")
    st = _basis_change(state, modes, basis)
    sym = {"HV": {"H": "H", "V": "V"}, "PM": {"H": "+", "V": "-"}}[basis]
    groups: dict = {}
    for key, c in st.terms.items():
        outcome = []
        rest = dict(key)
        for m in modes:
            found = [(lab, n) for lab, n in key if lab.name == m]
            if not found:
                raise ValueError(f"measuring empty mode {m}")
            if len(found) != 1 or found[0][1] != 1:
                raise ValueError(f"mode {m} does not hold exactly one photon")
            outcome.append(sym[found[0][0].pol])
            del rest[found[0][0]]
        groups.setdefault(tuple(outcome), {})[make_key(rest)] = c
    n0 = st.norm2()
    out = []
    remaining = st.modes - set(modes)
    for outcome in sorted(groups):
        cond = OpticalState(groups[outcome], remaining, st.truncation)
        p = to_real(cond.norm2() / n0) if not isinstance(n0, float) else float(cond.norm2()) / n0
        out.append((outcome, p, normalized(cond)))
    return out


def pair_bell_weights(state: OpticalState, x: str, y: str) -> list:
    """Unnormalized Bell weights of the polarization pair in modes (x, y).

    Everything else in the key is treated as environment and traced out.
    """
    env_vecs: dict = {}
    for key, c in state.terms.items():
        px = py = None
        rest = {}
        for lab, n in key:
            if lab.name == x:
                if n != 1 or px is not None:
                    raise ValueError(f"output mode {x} must hold exactly one photon")
                px = lab.pol
            elif lab.name == y:
                if n != 1 or py is not None:
                    raise ValueError(f"output mode {y} must hold exactly one photon")
                py = lab.pol
            else:
                rest[lab] = n
        if px is None or py is None:
            raise ValueError(f"output modes {x}, {y} must each hold one photon")
        env = make_key(rest)
        env_vecs.setdefault(env, {})[(px, py)] = c
    w = [0, 0, 0, 0]
    for env, v in env_vecs.items():
        f = key_factorial(env)
        hh, hv, vh, vv = (v.get(k, 0) for k in (("H", "H"), ("H", "V"), ("V", "H"), ("V", "V")))
        amps = {BellComponent.PHI_PLUS: hh + vv, BellComponent.PHI_MINUS: hh - vv,
                BellComponent.PSI_PLUS: hv + vh, BellComponent.PSI_MINUS: hv - vh}
        for comp, a in amps.items():
            val = abs2(Surd.lift(a) if not isinstance(a, (complex, float)) else a)
            half = Fraction(1, 2) if not isinstance(val, float) else 0.5
            w[comp.index] = w[comp.index] + val * f * half
    return [simplify(x) for x in w]


_PAULI_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}


def apply_pauli_to_weights(weights: Sequence, paulis: str) -> list:
    """Relabel Bell weights after local Paulis, one letter per qubit."""
    amp = ph = 0
    for p in paulis:
        a, z = _PAULI_BITS[p]
        amp ^= a
        ph ^= z
    out = [0, 0, 0, 0]
    for c in ORDER:
        out[BellComponent.from_bits(c.amplitude_bit ^ amp, c.phase_bit ^ ph).index] = weights[c.index]
    return out


# ---------------------------------------------------------------- spec types

@dataclass(frozen=True)
class Channel:
    """Stochastic step: with probability w apply the element list."""

    branches: tuple  # ((weight, (elements...), label), ...)

    def to_dict(self):
        return {"kind": "channel", "branches": [
            {"weight": encode_number(w), "label": lab, "elements": [e.to_dict() for e in els]}
            for w, els, lab in self.branches]}


@dataclass(frozen=True)
class Select:
    """Mid-circuit heralding: keep only terms matching the rule (detectors stay as spectators)."""

    rule: PostselectionRule
    label: str = "herald"

    def to_dict(self):
        return {"kind": "select", "label": self.label, "rule": self.rule.to_dict()}


def bitflip_channel(mode: str, prob, label: str = "") -> Channel:
    q = coerce(prob)
    return Channel(((1 - q, (), f"{label or mode}:ok"), (q, (hwp(mode, 45),), f"{label or mode}:flip")))


@dataclass(frozen=True)
class OutputRule:
    """Accepted detection class, its output pair and the Pauli fix-up.

    ``correction`` is applied always; ``odd_correction`` in addition when an
    odd number of '-' (or 'V') outcomes shows up in the measured modes.
    """

    when: PostselectionRule
    modes: tuple
    correction: str = "II"
    odd_correction: str = "II"
    label: str = ""

    def to_dict(self):
        return {"when": self.when.to_dict(), "modes": list(self.modes), "correction": self.correction,
                "odd_correction": self.odd_correction, "label": self.label}

    @classmethod
    def from_dict(cls, d):
        return cls(PostselectionRule.from_dict(d["when"]), tuple(d["modes"]), d.get("correction", "II"),
                   d.get("odd_correction", "II"), d.get("label", ""))


@dataclass(frozen=True)
class ProtocolSpec:
    name: str
    sources: tuple
    circuit: tuple
    outputs: tuple
    measurements: tuple = ()
    truncation: int = 4
    group_truncation: dict = field(default_factory=dict, hash=False)
    description: str = ""
    # linear optics conserves photon number: when every accepted pattern has
    # the same total, other sectors can be dropped before the circuit runs
    photon_number: int | None = None

    @property
    def rule(self) -> PostselectionRule:
        return AnyOf(tuple(o.when for o in self.outputs))

    def mode_check(self) -> None:
        """Every referenced mode is produced by a source or an element."""
        known = set()
        for s in self.sources:
            known |= set(s.modes)
        for step in self.circuit:
            els = []
            if isinstance(step, OpticalElement):
                els = [step]
            elif isinstance(step, Channel):
                els = [e for _, es, _ in step.branches for e in es]
            for e in els:
                missing = set(e.inputs) - known
                if missing:
                    raise ConfigurationError(f"{e.kind} uses unknown mode(s) {sorted(missing)}")
                known = (known - set(e.inputs)) | set(e.outputs) if isinstance(step, OpticalElement) else known | set(e.outputs)
        for m, _ in self.measurements:
            if m not in known:
                raise ConfigurationError(f"measured mode {m} is never produced")
        for o in self.outputs:
            for m in o.modes:
                if m not in known:
                    raise ConfigurationError(f"output mode {m} is never produced")

    # config round trip
    def to_dict(self) -> dict:
        steps = []
        for s in self.circuit:
            if isinstance(s, OpticalElement):
                steps.append({"kind": "element", **s.to_dict()})
            else:
                steps.append(s.to_dict())
        return {
            "name": self.name,
            "description": self.description,
            "truncation": self.truncation,
            "group_truncation": dict(self.group_truncation),
            "photon_number": self.photon_number,
            "sources": [s.to_dict() for s in self.sources],
            "circuit": steps,
            "measurements": [list(m) for m in self.measurements],
            "outputs": [o.to_dict() for o in self.outputs],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "ProtocolSpec":
        def element(e):
            params = {k: (decode_number(v) if k != "pol" else v) for k, v in e.get("params", {}).items()}
            return OpticalElement(e["kind"], tuple(e["inputs"]), tuple(e["outputs"]), params)

        steps = []
        for s in d["circuit"]:
            k = s["kind"]
            if k == "channel":
                steps.append(Channel(tuple((decode_number(b["weight"]), tuple(element(e) for e in b["elements"]),
                                            b.get("label", "")) for b in s["branches"])))
            elif k == "select":
                steps.append(Select(PostselectionRule.from_dict(s["rule"]), s.get("label", "herald")))
            else:
                steps.append(element(s))
        return cls(
            name=d["name"],
            sources=tuple(SourceSpec.from_dict(s) for s in d["sources"]),
            circuit=tuple(steps),
            outputs=tuple(OutputRule.from_dict(o) for o in d["outputs"]),
            measurements=tuple(tuple(m) for m in d.get("measurements", [])),
            truncation=int(d.get("truncation", 4)),
            group_truncation={k: int(v) for k, v in d.get("group_truncation", {}).items()},
            photon_number=d.get("photon_number"),
            description=d.get("description", ""),
        )

    @classmethod
    def from_json(cls, text: str) -> "ProtocolSpec":
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------- harness

def _initial_branches(spec: ProtocolSpec) -> list:
    groups: dict = {}
    for s in spec.sources:
        groups.setdefault(s.group, []).append(s)
    per_group = []
    for g, srcs in groups.items():
        trunc = spec.group_truncation.get(g, spec.truncation)
        combos = []
        for picks in iproduct(*[s.branches(trunc) for s in srcs]):
            w = 1
            st = None
            labels = []
            for wi, lab, si in picks:
                w = w * wi
                labels.append(lab)
                st = si if st is None else st.tensor(si, trunc)
            combos.append((w, tuple(labels), st))
        per_group.append(combos)
    out = []
    for picks in iproduct(*per_group):
        w = 1
        st = None
        labels: tuple = ()
        for wi, lab, si in picks:
            w = w * wi
            labels += lab
            st = si if st is None else st.tensor(si, spec.truncation)
        st = st.with_modes(st.modes) if st.truncation == spec.truncation \
            else OpticalState(st.terms, st.modes, spec.truncation)
        if spec.photon_number is not None:
            st = st.filter(lambda k: key_photons(k) == spec.photon_number)
        out.append((w, labels, st))
    return out


def _run_steps(branches: list, steps: Sequence) -> list:
    for step in steps:
        nxt = []
        for w, labels, st in branches:
            if isinstance(step, OpticalElement):
                nxt.append((w, labels, apply_element(st, step)))
            elif isinstance(step, Select):
                nxt.append((w, labels, st.filter(step.rule.matches)))
            elif isinstance(step, Channel):
                for cw, els, clab in step.branches:
                    if cw == 0:
                        continue
                    s2 = st
                    for e in els:
                        s2 = apply_element(s2, e)
                    nxt.append((w * cw, labels + (clab,), s2))
            else:
                raise ConfigurationError(f"unknown circuit step {step!r}")
        branches = nxt
    return branches


@dataclass
class BranchReport:
    labels: tuple
    weight: object
    accepted: object  # probability of acceptance within this branch


@dataclass
class ProtocolRun:
    result: PurificationResult
    branches: list
    rejected: object


def _ratio(a, b):
    a, b = simplify(a), simplify(b)
    if isinstance(a, Surd) or isinstance(b, Surd):
        return simplify(Surd.lift(a) / Surd.lift(b))
    if isinstance(a, float) or isinstance(b, float):
        return float(a) / float(b)
    return Fraction(a) / Fraction(b)


def run_protocol_detailed(spec: ProtocolSpec) -> ProtocolRun:
    spec.mode_check()
    init = _initial_branches(spec)
    norms = {i: b[2].norm2() for i, b in enumerate(init)}
    final = _run_steps([(w, (i,) + labels, st) for i, (w, labels, st) in enumerate(init)], spec.circuit)
    meas_modes = [m for m, _ in spec.measurements]
    total_w = [0, 0, 0, 0]
    success = 0
    reports = []
    for w, labels, st in final:
        n0 = norms[labels[0]]
        for m, basis in spec.measurements:
            st = _basis_change(st, [m], basis)
        acc_branch = 0
        for rule in spec.outputs:
            part = st.filter(rule.when.matches)
            if part.is_empty():
                continue
            even, odd = _split_parity(part, meas_modes)
            for sub, is_odd in ((even, False), (odd, True)):
                if sub.is_empty():
                    continue
                bw = pair_bell_weights(sub, *rule.modes)
                bw = apply_pauli_to_weights(bw, rule.correction)
                if is_odd:
                    bw = apply_pauli_to_weights(bw, rule.odd_correction)
                for j in range(4):
                    total_w[j] = total_w[j] + w * _ratio(bw[j], n0)
            acc_branch = acc_branch + _ratio(part.norm2(), n0)
        success = success + w * acc_branch
        reports.append(BranchReport(labels[1:], w, to_real(acc_branch) if acc_branch != 0 else acc_branch))
    success_r = to_real(success)
    out = None
    if success_r != 0:
        vals = [to_real(_ratio(x, success)) for x in total_w]
        if any(isinstance(v, float) for v in vals):
            vals = _float_normalize(vals)
        out = BellDiagonalState(tuple(vals))
    corrections = tuple(
        Correction("A", rule.correction, rule.label or "accepted pattern") for rule in spec.outputs
        if rule.correction != "II") + tuple(
        Correction("A", rule.odd_correction, "odd number of '-' outcomes") for rule in spec.outputs
        if rule.odd_correction != "II")
    if out is None:
        res = PurificationResult(0, BellDiagonalState((1, 0, 0, 0)), corrections)
    else:
        res = PurificationResult(success_r, out, corrections)
    return ProtocolRun(res, reports, 1 - success_r)


def _float_normalize(vals):
    out = [float(v) for v in vals]
    s = sum(out)
    out = [v / s for v in out]
    out[0] = 1 - sum(out[1:])
    return tuple(out)


def _split_parity(state: OpticalState, meas_modes: Sequence[str]):
    if not meas_modes:
        return state, state.filter(lambda k: False)

    def odd(key):
        vs = sum(n for lab, n in key if lab.name in meas_modes and lab.pol == "V")
        return vs % 2 == 1

    return state.filter(lambda k: not odd(k)), state.filter(odd)


def run_protocol(spec: ProtocolSpec) -> PurificationResult:
    return run_protocol_detailed(spec).result


def entanglement_swap_stage(state: OpticalState, detector_pairs: Sequence[tuple], detectors: Sequence[str] | None = None):
    """Keep terms with one photon in each detector of some listed pair and none in the others.

    Returns (probability, conditional state). The detector photons stay in
    the keys so distinct coincidence classes remain orthogonal.
    """
    dets = set(detectors or [d for pair in detector_pairs for d in pair])
    for d in dets:
        if d not in state.modes:
            raise ConfigurationError(f"detector mode {d} not present")
    rules = []
    for pair in detector_pairs:
        counts = {d: (1 if d in pair else 0) for d in dets}
        rules.append(Pattern(counts, only=False))
    return postselect(state, AnyOf(tuple(rules)))


def strip_modes(state: OpticalState, modes: Iterable[str]) -> OpticalState:
    """Drop photons in the given modes; only meaningful when they factor out."""
    modes = set(modes)
    out: dict = {}
    for key, c in state.terms.items():
        rest = {lab: n for lab, n in key if lab.name not in modes}
        k = make_key(rest)
        out[k] = out.get(k, 0) + c
    return OpticalState(out, state.modes - modes, state.truncation)


__all__ = [
    "Channel", "Select", "OutputRule", "ProtocolSpec", "ProtocolRun", "BranchReport", "bitflip_channel",
    "postselect", "measure_polarization", "pair_bell_weights", "apply_pauli_to_weights", "run_protocol",
    "run_protocol_detailed", "entanglement_swap_stage", "normalized", "strip_modes",
]
