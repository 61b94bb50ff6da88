"""Bell-diagonal states and the gate-based bipartite purification maps.

Components are indexed by (amplitude_bit, phase_bit)::

    PHI_PLUS = 00, PHI_MINUS = 01, PSI_PLUS = 10, PSI_MINUS = 11

A bilateral CNOT (copy 1 controls copy 2 on both sides) acts on these labels
as ``amp2 ^= amp1`` and ``phase1 ^= phase2``. Keeping the source pair when the
two target qubits agree in Z leaves the source with ``phase1 ^ phase2`` and
requires ``amp1 == amp2``. Every map below is written out from that rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from ._numeric import TOL, Real, check_probability, coerce, is_exact


class BellComponent(Enum):
    PHI_PLUS = (0, 0)
    PHI_MINUS = (0, 1)
    PSI_PLUS = (1, 0)
    PSI_MINUS = (1, 1)

    @property
    def amplitude_bit(self) -> int:
        return self.value[0]

    @property
    def phase_bit(self) -> int:
        return self.value[1]

    @property
    def index(self) -> int:
        return 2 * self.value[0] + self.value[1]

    @classmethod
    def from_bits(cls, amp: int, phase: int) -> "BellComponent":
        return _BY_BITS[(amp & 1, phase & 1)]

    @property
    def symbol(self) -> str:
        return _SYMBOLS[self]


_BY_BITS = {c.value: c for c in BellComponent}
_SYMBOLS = {
    BellComponent.PHI_PLUS: "phi+",
    BellComponent.PHI_MINUS: "phi-",
    BellComponent.PSI_PLUS: "psi+",
    BellComponent.PSI_MINUS: "psi-",
}
ORDER = (BellComponent.PHI_PLUS, BellComponent.PHI_MINUS, BellComponent.PSI_PLUS, BellComponent.PSI_MINUS)


class UnsupportedMixtureError(ValueError):
    """Input has weight on components the protocol cannot handle."""


@dataclass(frozen=True)
class BellDiagonalState:
    """Probabilities over (phi+, phi-, psi+, psi-), in that order."""

    p: tuple

    def __post_init__(self):
        vals = tuple(coerce(x) for x in self.p)
        if len(vals) != 4:
            raise ValueError("a Bell-diagonal state has exactly four weights")
        for v in vals:
            if v < -TOL or v > 1 + TOL:
                raise ValueError(f"Bell weight {v} outside [0, 1]")
        total = sum(vals)
        if is_exact(*vals):
            if total != 1:
                raise ValueError(f"Bell weights sum to {total}, not 1")
        elif abs(total - 1) > TOL:
            raise ValueError(f"Bell weights sum to {total}, not 1")
        object.__setattr__(self, "p", vals)

    @classmethod
    def from_mapping(cls, weights: Mapping[BellComponent, Real]) -> "BellDiagonalState":
        return cls(tuple(weights.get(c, 0) for c in ORDER))

    @classmethod
    def from_unnormalized(cls, weights: Sequence[Real]) -> tuple[Real, "BellDiagonalState"]:
        """Normalize raw weights; returns (norm, state)."""
        w = [coerce(x) for x in weights]
        n = sum(w)
        if n == 0:
            raise ZeroDivisionError("all-zero weights cannot be normalized")
        if is_exact(*w):
            return n, cls(tuple(x / n for x in w))
        out = [x / n for x in w]
        # absorb rounding so the sum check is tight
        out[0] = 1 - sum(out[1:])
        return n, cls(tuple(out))

    def __getitem__(self, c: BellComponent) -> Real:
        return self.p[c.index]

    @property
    def fidelity(self) -> Real:
        return self.p[0]

    def support(self) -> set:
        return {c for c in ORDER if self[c] != 0}

    def as_dict(self) -> dict:
        return {c.symbol: self[c] for c in ORDER}

    def isclose(self, other: "BellDiagonalState", tol: float = TOL) -> bool:
        return all(abs(float(a) - float(b)) <= tol for a, b in zip(self.p, other.p))


@dataclass(frozen=True)
class Correction:
    party: str
    pauli: str
    condition: str = "always"


@dataclass(frozen=True)
class PurificationResult:
    success_prob: Real
    output: object
    corrections: tuple = field(default_factory=tuple)

    def __post_init__(self):
        s = coerce(self.success_prob)
        if s < -TOL or s > 1 + TOL:
            raise ValueError(f"success probability {s} outside [0, 1]")
        object.__setattr__(self, "success_prob", s)

    @property
    def fidelity(self):
        return self.output.fidelity


def make_werner(F: Real) -> BellDiagonalState:
    F = check_probability(F, "F")
    rest = (1 - F) / 3
    return BellDiagonalState((F, rest, rest, rest))


def twirl(state: BellDiagonalState) -> BellDiagonalState:
    return make_werner(state.fidelity)


def _bilateral_cnot_keep(p1: Sequence[Real], p2: Sequence[Real]) -> list:
    """Unnormalized kept weights after bilateral CNOT + equal-Z postselection."""
    out = [0, 0, 0, 0]
    for c1 in ORDER:
        for c2 in ORDER:
            if c1.amplitude_bit != c2.amplitude_bit:
                continue
            res = BellComponent.from_bits(c1.amplitude_bit, c1.phase_bit ^ c2.phase_bit)
            out[res.index] += p1[c1.index] * p2[c2.index]
    return out


def bilateral_cnot_round(s1: BellDiagonalState, s2: BellDiagonalState | None = None) -> PurificationResult:
    """One CNOT-based round without any pre-processing of the inputs."""
    s2 = s1 if s2 is None else s2
    kept = _bilateral_cnot_keep(s1.p, s2.p)
    n, out = BellDiagonalState.from_unnormalized(kept)
    return PurificationResult(n, out, ())


def bbpssw_round(state: BellDiagonalState, *, twirl_input: bool = True) -> PurificationResult:
    """Twirl to Werner form, then bilateral CNOT with equal-outcome postselection.

    For Werner input the kept weight is
    N = F^2 + 2F(1-F)/3 + 5(1-F)^2/9 and the new fidelity is
    (F^2 + (1-F)^2/9) / N.
    """
    if not isinstance(state, BellDiagonalState):
        raise ValueError("bbpssw_round needs a BellDiagonalState")
    s = twirl(state) if twirl_input else state
    return bilateral_cnot_round(s)


# Alice applies exp(-i pi/4 X), Bob exp(+i pi/4 X). On Bell labels this
# swaps phi- and psi- and leaves phi+, psi+ alone (checked against the
# state-vector oracle in the tests).
DEJMPS_PERMUTATION = {
    BellComponent.PHI_PLUS: BellComponent.PHI_PLUS,
    BellComponent.PHI_MINUS: BellComponent.PSI_MINUS,
    BellComponent.PSI_PLUS: BellComponent.PSI_PLUS,
    BellComponent.PSI_MINUS: BellComponent.PHI_MINUS,
}


def dejmps_rotate(state: BellDiagonalState) -> BellDiagonalState:
    out = [0, 0, 0, 0]
    for c in ORDER:
        out[DEJMPS_PERMUTATION[c].index] += state[c]
    return BellDiagonalState(tuple(out))


def dejmps_round(state: BellDiagonalState) -> PurificationResult:
    if not isinstance(state, BellDiagonalState):
        raise ValueError("dejmps_round needs a BellDiagonalState")
    return bilateral_cnot_round(dejmps_rotate(state))


def pan_pbs_round(state: BellDiagonalState) -> PurificationResult:
    """PBS parity-check protocol on two copies of F|phi+> + (1-F)|psi+>.

    F1 = F^2 / (F^2 + (1-F)^2), success (F^2 + (1-F)^2) / 2. The factor 1/2
    is the four-mode fraction of the same-parity branches.
    """
    bad = state.support() - {BellComponent.PHI_PLUS, BellComponent.PSI_PLUS}
    if bad:
        names = ", ".join(sorted(c.symbol for c in bad))
        raise UnsupportedMixtureError(f"PBS protocol only handles phi+/psi+ mixtures (got weight on {names})")
    F = state.fidelity
    G = state[BellComponent.PSI_PLUS]
    same = F * F + G * G
    half = Fraction(1, 2) if is_exact(same) else 0.5
    _, out = BellDiagonalState.from_unnormalized((F * F, 0, G * G, 0))
    return PurificationResult(same * half, out, (Correction("A", "Z", "odd number of '-' outcomes on a4, b4"),))


def pan_spdc_round(F, p) -> PurificationResult:
    """The PBS round fed by two SPDC sources kept up to double-pair emission.

    Two single pairs give F^2 (correct) and (1-F)^2 (bit-flipped) as before.
    A double pair from either source also fills all four modes; after the
    +/- readout it always leaves phi+, whatever the flips, and weighs as much
    as the single-pair terms together. Hence
    F2 = (1 + F^2) / (1 + F^2 + (1-F)^2) and success
    (p^2/2)(1 + F^2 + (1-F)^2) / (1 + 2p + 5p^2/2), the denominator being the
    norm of the two-source state cut at four photons.
    """
    F = check_probability(F, "F")
    p = coerce(p)
    if not 0 < p < 1:
        raise ValueError("emission probability must lie in (0, 1)")
    good = 1 + F * F
    bad = (1 - F) ** 2
    _, out = BellDiagonalState.from_unnormalized((good, 0, bad, 0))
    half = Fraction(1, 2) if is_exact(p, F) else 0.5
    succ = p * p * half * (good + bad) / (1 + 2 * p + 5 * half * p * p)
    return PurificationResult(succ, out, (Correction("A", "Z", "odd number of '-' outcomes on a4, b4"),))


def iterate_map(round_op: Callable[[BellDiagonalState], PurificationResult], state, k: int) -> list:
    """Fidelity and cumulative success probability over k successful rounds."""
    if k < 0:
        raise ValueError("k must be non-negative")
    traj = [(state.fidelity, coerce(1))]
    cum = coerce(1)
    for _ in range(k):
        res = round_op(state)
        cum = cum * res.success_prob
        state = res.output
        traj.append((state.fidelity, cum))
    return traj


def mixture(weights: Iterable[tuple[BellComponent, Real]]) -> BellDiagonalState:
    d: dict = {}
    for c, w in weights:
        d[c] = d.get(c, 0) + w
    return BellDiagonalState.from_mapping(d)


__all__ = [
    "BellComponent",
    "BellDiagonalState",
    "Correction",
    "PurificationResult",
    "UnsupportedMixtureError",
    "ORDER",
    "make_werner",
    "twirl",
    "bbpssw_round",
    "bilateral_cnot_round",
    "dejmps_round",
    "dejmps_rotate",
    "DEJMPS_PERMUTATION",
    "pan_pbs_round",
    "pan_spdc_round",
    "iterate_map",
    "mixture",
]
