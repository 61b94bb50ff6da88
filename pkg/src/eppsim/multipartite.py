"""GHZ-state purification: CNOT-based and parity-projection rounds, plus the
two-step scheme that turns discarded copies into Bell pairs and fuses them
back into GHZ states.

A GHZ basis state of n qubits is (|x> + (-1)^s |~x>)/sqrt2, with x an n-bit
string whose first bit is 0. ``pattern`` stores the remaining n-1 bits as an
integer (qubit 1 is the most significant bit), so for three parties
pattern 0 -> 000/111, 1 -> 001/110, 2 -> 010/101, 3 -> 011/100.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from ._numeric import TOL, check_probability, coerce, is_exact
from .bell_core import BellComponent, BellDiagonalState, Correction, PurificationResult


class GHZDomainError(ValueError):
    """Input outside what a GHZ round supports."""


@dataclass(frozen=True, order=True)
class GHZComponent:
    pattern: int
    phase_bit: int
    n: int = 3

    def __post_init__(self):
        if self.n < 2:
            raise GHZDomainError("a GHZ state needs at least two parties")
        if not 0 <= self.pattern < 2 ** (self.n - 1):
            raise GHZDomainError(f"pattern {self.pattern} out of range for n={self.n}")
        if self.phase_bit not in (0, 1):
            raise GHZDomainError("phase_bit must be 0 or 1")

    @property
    def bits(self) -> str:
        """Representative string starting with 0, e.g. '011'."""
        return "0" + format(self.pattern, f"0{self.n - 1}b") if self.n > 1 else "0"

    @classmethod
    def from_string(cls, s: str, phase_bit: int = 0) -> "GHZComponent":
        """Accepts 0/1 or H/V strings; either member of the pair {x, ~x}."""
        t = s.upper().replace("H", "0").replace("V", "1")
        if t[0] == "1":
            t = "".join("1" if c == "0" else "0" for c in t)
        return cls(int(t[1:], 2) if len(t) > 1 else 0, phase_bit, len(t))

    @classmethod
    def all(cls, n: int) -> list:
        return [cls(k, s, n) for k in range(2 ** (n - 1)) for s in (0, 1)]

    def label(self) -> str:
        hv = self.bits.replace("0", "H").replace("1", "V")
        return f"{hv}{'-' if self.phase_bit else '+'}"


@dataclass(frozen=True)
class GHZDiagonalState:
    n: int
    p: tuple  # sorted ((GHZComponent, weight), ...), zero weights dropped

    def __post_init__(self):
        items = {}
        for c, w in (self.p.items() if isinstance(self.p, Mapping) else self.p):
            if c.n != self.n:
                raise GHZDomainError("component party count does not match the state")
            w = coerce(w)
            if w < -TOL or w > 1 + TOL:
                raise GHZDomainError(f"weight {w} outside [0, 1]")
            if w != 0:
                items[c] = items.get(c, 0) + w
        vals = list(items.values())
        total = sum(vals)
        if (is_exact(*vals) and total != 1) or abs(float(total) - 1) > TOL:
            raise GHZDomainError(f"GHZ weights sum to {total}, not 1")
        object.__setattr__(self, "p", tuple(sorted(items.items())))

    @classmethod
    def from_weights(cls, weights: Mapping, n: int | None = None) -> "GHZDiagonalState":
        """Keys may be GHZComponent or strings like 'HHH' / ('VHH', 1)."""
        d = {}
        for key, w in weights.items():
            if isinstance(key, GHZComponent):
                c = key
            elif isinstance(key, tuple):
                c = GHZComponent.from_string(*key)
            else:
                c = GHZComponent.from_string(key)
            d[c] = d.get(c, 0) + w
        n = n if n is not None else next(iter(d)).n
        return cls(n, d)

    @classmethod
    def from_unnormalized(cls, n: int, weights: Mapping) -> tuple:
        vals = {c: coerce(w) for c, w in weights.items() if w != 0}
        tot = sum(vals.values())
        if tot == 0:
            raise ZeroDivisionError("all-zero weights cannot be normalized")
        out = {c: w / tot for c, w in vals.items()}
        if not is_exact(*out.values()):
            first = next(iter(out))
            out[first] = 1 - sum(w for c, w in out.items() if c != first)
        return tot, cls(n, out)

    def weight(self, c: GHZComponent):
        for k, w in self.p:
            if k == c:
                return w
        return coerce(0)

    def __getitem__(self, key):
        if not isinstance(key, GHZComponent):
            key = GHZComponent.from_string(*key) if isinstance(key, tuple) else GHZComponent.from_string(key)
        return self.weight(key)

    @property
    def fidelity(self):
        return self.weight(GHZComponent(0, 0, self.n))

    def as_dict(self) -> dict:
        return {c.label(): w for c, w in self.p}

    def isclose(self, other: "GHZDiagonalState", tol: float = TOL) -> bool:
        keys = {c for c, _ in self.p} | {c for c, _ in other.p}
        return all(abs(float(self.weight(c)) - float(other.weight(c))) <= tol for c in keys)


def ghz_bit_error_mixture(F, n: int = 3, flipped_qubit: int = 0) -> GHZDiagonalState:
    """F |GHZ+> + (1-F) with one qubit bit-flipped."""
    F = check_probability(F, "F")
    s = ["0"] * n
    s[flipped_qubit] = "1"
    return GHZDiagonalState.from_weights({"0" * n: F, "".join(s): 1 - F}, n)


def ghz_phase_error_mixture(F, n: int = 3) -> GHZDiagonalState:
    F = check_probability(F, "F")
    return GHZDiagonalState(n, {GHZComponent(0, 0, n): F, GHZComponent(0, 1, n): 1 - F})


def _pairs(state1, state2):
    for c1, w1 in state1.p:
        for c2, w2 in state2.p:
            yield c1, w1, c2, w2


def _half(x):
    return x * Fraction(1, 2) if is_exact(x) else x * 0.5


def mmepp_round(state: GHZDiagonalState, error_kind: str = "bit", other: GHZDiagonalState | None = None
                ) -> PurificationResult:
    """Two copies, transversal CNOT from copy 1 to copy 2, Z readout of copy 2.

    ``bit``: keep when every party reads the same value (patterns agree);
    the kept copy carries (x, s1 xor s2).
    ``phase``: Hadamards on every qubit before and after, keep on even
    number of 1s; the kept copy carries (x1 xor x2, s).
    """
    if not isinstance(state, GHZDiagonalState):
        raise GHZDomainError("mmepp_round needs a GHZDiagonalState")
    if state.n < 3:
        raise GHZDomainError("multipartite rounds need n >= 3")
    other = state if other is None else other
    if other.n != state.n:
        raise GHZDomainError("copies have different party counts")
    if error_kind not in ("bit", "phase"):
        raise GHZDomainError(f"error_kind must be 'bit' or 'phase', not {error_kind!r}")
    n = state.n
    kept: dict = {}
    for c1, w1, c2, w2 in _pairs(state, other):
        if error_kind == "bit":
            if c1.pattern != c2.pattern:
                continue
            out = GHZComponent(c1.pattern, c1.phase_bit ^ c2.phase_bit, n)
        else:
            if c1.phase_bit != c2.phase_bit:
                continue
            out = GHZComponent(c1.pattern ^ c2.pattern, c1.phase_bit, n)
        kept[out] = kept.get(out, 0) + w1 * w2
    if not kept:
        return PurificationResult(0, None)
    tot, st = GHZDiagonalState.from_unnormalized(n, kept)
    corr = () if error_kind == "bit" else (Correction("all", "H", "before and after the round"),)
    return PurificationResult(tot, st, corr)


def smepp_round(state: GHZDiagonalState, theta_pi_mode: bool = False, error_kind: str = "bit"
                ) -> PurificationResult:
    """Parity-projection version of the same round.

    Each party's QND keeps its two photons in the same polarization (phase
    shift theta). That happens only when the two patterns agree, and then with
    probability 1/2. With theta = pi the "all different" outcome is also usable,
    which doubles the yield. An odd number of V after the X-basis readout
    of copy 2 is fixed by one phase flip, so the output equals the CNOT round.
    """
    res = mmepp_round(state, error_kind)
    corr = res.corrections + (Correction("any", "Z", "odd number of V in copy 2 after Hadamards"),)
    prob = res.success_prob if theta_pi_mode else _half(res.success_prob)
    return PurificationResult(prob, res.output, corr)


# --- two-step scheme -------------------------------------------------------

PARTIES3 = ("a", "b", "c")


@dataclass(frozen=True)
class RecycledPairs:
    """Bell pairs left over from discarded copies: {(party, party): (weight, BellDiagonalState)}.

    ``weight`` is the probability (per pair of input copies) that the
    discarded branch delivers this pair.
    """

    pairs: tuple

    def __post_init__(self):
        d = dict(self.pairs) if not isinstance(self.pairs, dict) else self.pairs
        for key, (w, st) in d.items():
            w = coerce(w)
            if w < -TOL or w > 1 + TOL:
                raise ValueError(f"recycled weight {w} outside [0, 1]")
            if st is not None and not isinstance(st, BellDiagonalState):
                raise ValueError("recycled pair must be a BellDiagonalState")
        object.__setattr__(self, "pairs", tuple(sorted(d.items())))

    def __getitem__(self, key):
        return dict(self.pairs)[tuple(key)]

    @property
    def total_weight(self):
        return sum(w for _, (w, _) in self.pairs)


def _check_even_support(state: GHZDiagonalState):
    if state.n != 3:
        raise GHZDomainError("the two-step scheme is defined for three parties")
    for c, _ in state.p:
        if c.phase_bit:
            raise GHZDomainError(f"component {c.label()} is outside the phase-plus support")


def _odd_party(pattern_xor: int, n: int = 3) -> int:
    """Index of the single party on which two three-qubit patterns differ."""
    bits = "0" + format(pattern_xor, f"0{n - 1}b")
    ones = [i for i, b in enumerate(bits) if b == "1"]
    zeros = [i for i, b in enumerate(bits) if b == "0"]
    minority = ones if len(ones) < len(zeros) else zeros
    if len(minority) != 1:
        raise GHZDomainError("patterns differ on more than one party")
    return minority[0]


def dmepp_step1(state: GHZDiagonalState, theta_pi_mode: bool = True) -> tuple:
    """Parity-projection round that also harvests Bell pairs from mismatched copies.

    Kept branch: weights F_i^2 / N with N = sum F_i^2. Success is N with
    theta = pi (both parity outcomes usable) and N/2 otherwise.
    A mismatched pair of copies differs on exactly one party. Reading out that
    party and copy 2 in the X basis leaves a Bell pair between the other two
    parties of copy 1, phi+ or psi+ according to copy 1's pattern.
    """
    _check_even_support(state)
    res = smepp_round(state, theta_pi_mode=theta_pi_mode)
    raw: dict = {}
    for c1, w1, c2, w2 in _pairs(state, state):
        if c1.pattern == c2.pattern:
            continue
        k = _odd_party(c1.pattern ^ c2.pattern)
        i, j = [q for q in range(3) if q != k]
        bits = c1.bits
        amp = int(bits[i]) ^ int(bits[j])
        key = (PARTIES3[i], PARTIES3[j])
        acc = raw.setdefault(key, [0, 0, 0, 0])
        acc[BellComponent.from_bits(amp, 0).index] += w1 * w2
    pairs = {}
    for key, acc in raw.items():
        w, st = BellDiagonalState.from_unnormalized(acc)
        pairs[key] = (w, st)
    return res, RecycledPairs(pairs)


def dmepp_step2(pair1: BellDiagonalState, pair2: BellDiagonalState) -> GHZDiagonalState:
    """Fuse pair1 on (a, b) with pair2 on (a', c) at party a into a GHZ state on (a, b, c).

    Only phi+/psi+ inputs are handled. Both parity outcomes at a are usable
    (the odd one needs an X on c), so fusion succeeds with certainty.
    """
    allowed = {BellComponent.PHI_PLUS, BellComponent.PSI_PLUS}
    for p in (pair1, pair2):
        if p.support() - allowed:
            raise GHZDomainError("fusion expects phi+/psi+ mixtures")
    out: dict = {}
    for c1 in (BellComponent.PHI_PLUS, BellComponent.PSI_PLUS):
        for c2 in (BellComponent.PHI_PLUS, BellComponent.PSI_PLUS):
            w = pair1[c1] * pair2[c2]
            if w == 0:
                continue
            comp = GHZComponent((c1.amplitude_bit << 1) | c2.amplitude_bit, 0, 3)
            out[comp] = out.get(comp, 0) + w
    return GHZDiagonalState(3, out)


def dmepp_curves(F) -> dict:
    """Closed forms for F0 = F2 = F3 = (1-F)/3.

    eff_a = (1 - 2F + 4F^2)/3, eff_b = (2 - F + 2F^2)/3,
    fid_conv = 3F^2/(1 - 2F + 4F^2),
    fid_dmepp = 3F^2 (4 + 7F - 2F^2) / ((1 + 2F)^2 (2 - F + 2F^2)).
    eff_a is the single-round yield, eff_b the two-step yield (see dmepp_yield_count).
    """
    F = check_probability(F, "F")
    if F <= Fraction(1, 4):
        raise ValueError("curves are defined for F > 1/4")
    a = (1 - 2 * F + 4 * F * F) / 3
    b = (2 - F + 2 * F * F) / 3
    return {
        "eff_a": a,
        "eff_b": b,
        "fid_conv": 3 * F * F / (1 - 2 * F + 4 * F * F),
        "fid_dmepp": 3 * F * F * (4 + 7 * F - 2 * F * F) / ((1 + 2 * F) ** 2 * (2 - F + 2 * F * F)),
    }


def _werner_like(F) -> GHZDiagonalState:
    F = coerce(F)
    r = (1 - F) / 3
    return GHZDiagonalState.from_weights({"HHH": F, "VHH": r, "HVH": r, "HHV": r}, 3)


def dmepp_yield_count(F) -> dict:
    """Exact bookkeeping of both schemes per pair of input copies.

    conventional: step 1 only. two_step: step 1 plus every recycled Bell
    pair, two of which fuse into one GHZ state. Fidelities are the average
    over everything produced.
    """
    st = _werner_like(F)
    res, rec = dmepp_step1(st, theta_pi_mode=True)
    conv_eff = res.success_prob
    conv_f = res.output.fidelity
    ghz_from_pairs = 0
    f_weighted = 0
    for _, (w, pair) in rec.pairs:
        fused = dmepp_step2(pair, pair)
        ghz_from_pairs += _half(w)
        f_weighted += _half(w) * fused.fidelity
    two_eff = conv_eff + ghz_from_pairs
    two_f = (conv_eff * conv_f + f_weighted) / two_eff
    return {"conventional_eff": conv_eff, "conventional_fid": conv_f, "two_step_eff": two_eff,
            "two_step_fid": two_f}


def dmepp_yield_sample(F, copies: int = 100_000, seed: int = 0) -> dict:
    """Monte Carlo count: draw copies, pair them, run both schemes, count output states.

    Returns counts so the efficiency assignment can be read off directly.
    """
    st = _werner_like(F)
    comps = [c for c, _ in st.p]
    weights = [float(w) for _, w in st.p]
    rng = random.Random(seed)
    draws = rng.choices(comps, weights, k=2 * (copies // 2))
    conv = good_conv = 0
    pair_pool: dict = {}
    for c1, c2 in zip(draws[::2], draws[1::2]):
        if c1.pattern == c2.pattern:
            conv += 1
            good_conv += c1.pattern == 0
        else:
            k = _odd_party(c1.pattern ^ c2.pattern)
            i, j = [q for q in range(3) if q != k]
            amp = int(c1.bits[i]) ^ int(c1.bits[j])
            pair_pool.setdefault((i, j), []).append(amp)
    fused = good_fused = 0
    for amps in pair_pool.values():
        for a1, a2 in zip(amps[::2], amps[1::2]):
            fused += 1
            good_fused += (a1 == 0 and a2 == 0)
    n_pairs = copies // 2
    return {"input_pairs": n_pairs, "conventional_out": conv, "two_step_out": conv + fused,
            "conventional_good": good_conv, "two_step_good": good_conv + good_fused}


__all__ = [
    "GHZComponent", "GHZDiagonalState", "GHZDomainError", "RecycledPairs", "ghz_bit_error_mixture",
    "ghz_phase_error_mixture", "mmepp_round", "smepp_round", "dmepp_step1", "dmepp_step2", "dmepp_curves",
    "dmepp_yield_count", "dmepp_yield_sample",
]
