"""Photon sources: ideal pairs, SPDC expansions, hyperentangled pairs, custom states.

Each source yields weighted pure branches. Channel noise that acts on a
freshly emitted pair (bit flip / phase flip on Bob's photon) is folded into
the branch list so the branch weights are exactly the error probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .._numeric import Surd, coerce, is_exact, sqrt_scalar
from ..bell_core import BellComponent
from .state import ConfigurationError, Mixture, ModeLabel, OpticalState

_R2 = Surd.inv_sqrt2()

BELL_NAMES = {c.symbol: c for c in BellComponent}
PRODUCT_NAMES = ("HH", "HV", "VH", "VV")


def pol_pair_terms(name: str) -> list:
    """[(coef, pol_a, pol_b)] for a Bell symbol or a product like 'HV'."""
    if name in PRODUCT_NAMES:
        return [(Surd(1), name[0], name[1])]
    c = BELL_NAMES.get(name)
    if c is None:
        raise ConfigurationError(f"unknown two-photon polarization state {name!r}")
    sign = -1 if c.phase_bit else 1
    if c.amplitude_bit == 0:
        return [(_R2, "H", "H"), (_R2 * sign, "V", "V")]
    return [(_R2, "H", "V"), (_R2 * sign, "V", "H")]


def flip_name(name: str, bit: bool, phase: bool) -> str:
    if name in PRODUCT_NAMES:
        if phase:
            raise ConfigurationError("phase flips are only defined for Bell inputs here")
        b = name[1]
        return name[0] + ({"H": "V", "V": "H"}[b] if bit else b)
    c = BELL_NAMES[name]
    return BellComponent.from_bits(c.amplitude_bit ^ int(bit), c.phase_bit ^ int(phase)).symbol


def _error_branches(bitflip, phaseflip):
    q, r = coerce(bitflip), coerce(phaseflip)
    out = []
    for bit, wb in ((False, 1 - q), (True, q)):
        for ph, wp in ((False, 1 - r), (True, r)):
            w = wb * wp
            if w != 0:
                out.append((w, bit, ph))
    return out


def _pair_operator(a: str, b: str, name: str) -> list:
    return [(c, ModeLabel(a, pa), ModeLabel(b, pb)) for c, pa, pb in pol_pair_terms(name)]


@dataclass(frozen=True)
class SourceSpec:
    """Declarative source description.

    kind:
      * ``pair``   ideal two-photon state on (a, b); params: state, bitflip, phaseflip
      * ``spdc``   vac + sqrt(p) A + (p/2) A^2 with A the normalized pair operator;
                   params: p, state, bitflip, phaseflip
      * ``hyper``  one photon pair in polarization x spatial mode on (a1, a2, b1, b2);
                   params: pol = [[weight, name], ...], spat = [[weight, name], ...],
                   eta, omega_pi (relative amplitude / phase of the second spatial term)
      * ``heralded_ghz`` post-herald state of the two-crystal three-photon resource on
                   (x1, x4, x5); params: p. Besides the GHZ term it keeps the
                   lower-order and double-emission leftovers
      * ``custom`` explicit superposition; params: terms = [[coef, [[mode, pol], ...]], ...]
    """

    kind: str
    modes: tuple
    params: dict = field(default_factory=dict, hash=False)
    group: str = "main"

    def branches(self, truncation: int = 4) -> list:
        """[(weight, label, OpticalState)]"""
        fn = {"pair": _pair_branches, "spdc": _spdc_branches, "hyper": _hyper_branches,
              "heralded_ghz": _heralded_ghz_branches, "custom": _custom_branches}.get(self.kind)
        if fn is None:
            raise ConfigurationError(f"unknown source kind {self.kind!r}")
        return fn(tuple(self.modes), self.params, truncation)

    def to_dict(self) -> dict:
        from .serialize import encode_number

        def enc(v):
            if isinstance(v, (list, tuple)):
                return [enc(x) for x in v]
            if isinstance(v, str):
                return v
            return encode_number(v)

        return {"kind": self.kind, "modes": list(self.modes), "group": self.group,
                "params": {k: enc(v) for k, v in self.params.items()}}

    @classmethod
    def from_dict(cls, d: dict) -> "SourceSpec":
        from .serialize import decode_number

        def dec(v):
            if isinstance(v, list):
                return [dec(x) for x in v]
            if isinstance(v, str):
                try:
                    return decode_number(v)
                except (ValueError, ZeroDivisionError):
                    return v
            return decode_number(v)

        return cls(d["kind"], tuple(d["modes"]), {k: dec(v) for k, v in d.get("params", {}).items()},
                   d.get("group", "main"))


def _pair_branches(modes, params, truncation):
    a, b = modes
    base = params.get("state", "phi+")
    out = []
    for w, bit, ph in _error_branches(params.get("bitflip", 0), params.get("phaseflip", 0)):
        name = flip_name(base, bit, ph)
        st = OpticalState.from_monomials([(c, (ma, mb)) for c, ma, mb in _pair_operator(a, b, name)],
                                         modes, truncation)
        out.append((w, f"{a}{b}:{name}", st))
    return out


def spdc_state(a: str, b: str, p, name: str = "phi+", truncation: int = 4) -> OpticalState:
    """vac + sqrt(p) A^dag|0> + (p/2) (A^dag)^2|0>, cut at the truncation."""
    sp = sqrt_scalar(p)
    pp = coerce(p)
    half_p = pp / 2 if is_exact(pp) else pp / 2.0
    op = _pair_operator(a, b, name)
    items = [(Surd(1), ())]
    for c, ma, mb in op:
        items.append((c * sp, (ma, mb)))
    if truncation >= 4:
        for c1, a1, b1 in op:
            for c2, a2, b2 in op:
                items.append((c1 * c2 * half_p, (a1, b1, a2, b2)))
    return OpticalState.from_monomials(items, (a, b), truncation)


def spdc_pair_source(p, bitflip_prob=0, modes=("a1", "b1"), phaseflip_prob=0, state: str = "phi+",
                     truncation: int = 4) -> Mixture:
    """Branch set {(1-q, expansion of the ideal pair), (q, bit-flipped expansion)}."""
    p = coerce(p)
    if not 0 < p < 1:
        raise ValueError("emission probability must lie in (0, 1)")
    src = SourceSpec("spdc", tuple(modes), {"p": p, "bitflip": bitflip_prob, "phaseflip": phaseflip_prob,
                                            "state": state})
    return Mixture(tuple((w, st) for w, _, st in src.branches(truncation)))


def _spdc_branches(modes, params, truncation):
    a, b = modes
    base = params.get("state", "phi+")
    out = []
    for w, bit, ph in _error_branches(params.get("bitflip", 0), params.get("phaseflip", 0)):
        name = flip_name(base, bit, ph)
        out.append((w, f"{a}{b}:{name}", spdc_state(a, b, params["p"], name, truncation)))
    return out


def _spatial_terms(name: str, eta=1, omega_pi=0) -> list:
    """[(coef, idx_a, idx_b)] for a spatial-mode Bell state over lanes 1/2."""
    from .elements import _phase

    c = BELL_NAMES.get(name)
    if c is None:
        raise ConfigurationError(f"unknown spatial Bell state {name!r}")
    sign = -1 if c.phase_bit else 1
    pairs = [(0, 0), (1, 1)] if c.amplitude_bit == 0 else [(0, 1), (1, 0)]
    if eta == 1 and omega_pi == 0:
        return [(_R2, *pairs[0]), (_R2 * sign, *pairs[1])]
    import math

    norm = 1 / math.sqrt(1 + float(eta) ** 2)
    second = complex(_phase(omega_pi)) * float(eta) * norm * sign
    return [(norm, *pairs[0]), (second, *pairs[1])]


def _hyper_branches(modes, params, truncation):
    a1, a2, b1, b2 = modes
    alane, blane = (a1, a2), (b1, b2)
    pol = params.get("pol", [[1, "phi+"]])
    spat = params.get("spat", [[1, "phi+"]])
    eta, om = params.get("eta", 1), params.get("omega_pi", 0)
    out = []
    for wp, pname in pol:
        for ws, sname in spat:
            w = coerce(wp) * coerce(ws)
            if w == 0:
                continue
            items = []
            for cp, pa, pb in pol_pair_terms(pname):
                for cs, ia, ib in _spatial_terms(sname, eta, om):
                    items.append((cp * cs, (ModeLabel(alane[ia], pa), ModeLabel(blane[ib], pb))))
            out.append((w, f"{pname}|s:{sname}", OpticalState.from_monomials(items, modes, truncation)))
    return out


def _custom_branches(modes, params, truncation):
    items = []
    for coef, labels in params["terms"]:
        items.append((coef, tuple(ModeLabel(m, p) for m, p in labels)))
    label = params.get("label", "custom")
    return [(coerce(params.get("weight", 1)), label, OpticalState.from_monomials(items, modes, truncation))]


def _heralded_ghz_branches(modes, params, truncation):
    """sqrt(p)/(2 sqrt2) (V1 + H4) + p/4 V1 H4 + p/sqrt2 (H5 H1 V1 + V5 H4 V4)
    + p/4 (V1 V1 + H4 H4) + p/2 GHZ(x1, x4, x5).

    Products of kets are read as products of creation operators, so V1 V1 is
    a doubly occupied mode. Left unnormalized: the overall herald rate is
    a common factor and cancels in every postselected ratio.
    params["terms"] = "ghz" keeps only the GHZ term.
    """
    x1, x4, x5 = modes
    p = coerce(params["p"])
    sp = sqrt_scalar(p)
    q4 = p / 4
    L = ModeLabel
    items = [
        (sp * _R2 / 2, (L(x1, "V"),)),
        (sp * _R2 / 2, (L(x4, "H"),)),
        (q4, (L(x1, "V"), L(x4, "H"))),
        (_R2 * p, (L(x5, "H"), L(x1, "H"), L(x1, "V"))),
        (_R2 * p, (L(x5, "V"), L(x4, "H"), L(x4, "V"))),
        (q4, (L(x1, "V"), L(x1, "V"))),
        (q4, (L(x4, "H"), L(x4, "H"))),
        (_R2 * p / 2, (L(x1, "H"), L(x4, "H"), L(x5, "H"))),
        (_R2 * p / 2, (L(x1, "V"), L(x4, "V"), L(x5, "V"))),
    ]
    terms = params.get("terms", "all")
    if terms == "ghz":
        items = items[-2:]
    elif terms != "all":
        raise ConfigurationError("terms must be 'all' or 'ghz'")
    return [(coerce(1), f"res:{x1}{x4}{x5}", OpticalState.from_monomials(items, modes, truncation))]


def hyper_weights(F) -> list:
    F = coerce(F)
    return [[F, "phi+"], [1 - F, "psi+"]]


__all__ = ["SourceSpec", "spdc_pair_source", "spdc_state", "pol_pair_terms", "hyper_weights"]
