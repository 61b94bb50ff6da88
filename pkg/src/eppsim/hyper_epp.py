"""Purification that spends a second degree of freedom (spatial mode or time bin)
instead of a second copy.

Closed forms live here; the wired optical circuits they are checked against
are the ``spepp``, ``deterministic_epp`` and ``single_copy_hyper`` presets.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct
from math import factorial

from ._numeric import check_probability, coerce, is_exact
from .bell_core import BellComponent, BellDiagonalState, Correction, PurificationResult, UnsupportedMixtureError

PHI_PLUS = BellComponent.PHI_PLUS
PSI_PLUS = BellComponent.PSI_PLUS


def _rank2(F) -> BellDiagonalState:
    F = check_probability(F, "F")
    return BellDiagonalState((F, 0, 1 - F, 0))


@dataclass(frozen=True)
class HyperDiagonalState:
    """Product of a polarization and a spatial (or time-bin) Bell-diagonal mixture."""

    pol: BellDiagonalState
    spat: BellDiagonalState
    dof: str = "spatial"

    @classmethod
    def rank2(cls, Fp, Fs, dof: str = "spatial") -> "HyperDiagonalState":
        return cls(_rank2(Fp), _rank2(Fs), dof)

    def weights(self) -> dict:
        return {(cp, cs): self.pol[cp] * self.spat[cs]
                for cp in BellComponent for cs in BellComponent if self.pol[cp] * self.spat[cs] != 0}

    @property
    def fidelity(self):
        return self.pol.fidelity * self.spat.fidelity


def single_copy_round(Fp, Fs, dof: str = "spatial") -> PurificationResult:
    """One hyperentangled pair; the polarization parity is compared with the
    spatial (or time-bin) parity and the pair is kept when they agree.

    F_n = FpFs / (FpFs + (1-Fp)(1-Fs)), success FpFs + (1-Fp)(1-Fs).
    """
    if dof not in ("spatial", "time-bin"):
        raise ValueError("dof must be 'spatial' or 'time-bin'")
    Fp, Fs = check_probability(Fp, "Fp"), check_probability(Fs, "Fs")
    good = Fp * Fs
    bad = (1 - Fp) * (1 - Fs)
    succ = good + bad
    if succ == 0:
        return PurificationResult(0, None)
    _, out = BellDiagonalState.from_unnormalized((good, 0, bad, 0))
    return PurificationResult(succ, out)


def spepp_round(F) -> PurificationResult:
    """Bit-flip mixture F phi+ + (1-F) psi+ with a perfect spatial phi+: keep
    the both-upper / both-lower outputs. Bit flips are removed completely."""
    F = check_probability(F, "F")
    if F == 0:
        return PurificationResult(0, None)
    return PurificationResult(F, BellDiagonalState((1, 0, 0, 0)) if is_exact(F) else BellDiagonalState((1.0, 0.0, 0.0, 0.0)))


def qnd_spdc_fidelity(p, F):
    """(2p + p^2 F^2) / (2p + p^2 [F^2 + (1-F)^2])."""
    p = coerce(p)
    if not 0 < p < 1:
        raise ValueError("emission probability must lie in (0, 1)")
    F = check_probability(F, "F")
    return (2 * p + p * p * F * F) / (2 * p + p * p * (F * F + (1 - F) ** 2))


# each photon term: (spatial lane, polarization); QND phase tag 0 -> theta, 1 -> theta'
_PAIR_TERMS = [((1, "H"), (1, "H")), ((1, "V"), (1, "V")), ((2, "H"), (2, "H")), ((2, "V"), (2, "V"))]


def _flip(term):
    (la, pa), (lb, pb) = term
    return (la, pa), (lb, "V" if pb == "H" else "H")


def _tag(photon) -> int:
    lane, pol = photon
    return 0 if (lane, pol) in ((1, "H"), (2, "V")) else 1


def qnd_spdc_enumeration(p, F, pairs: str = "distinguishable"):
    """Count the QND selection term by term. Returns (fidelity, kept weight).

    Two-photon emission (weight p): any phase mismatch is a bit flip and is
    undone, so the pair is always kept and correct. Four-photon emission:
    kept only when Alice and Bob both see theta + theta'. A kept four-photon
    state is good when neither pair was flipped.
    ``distinguishable``: two independent pairs, weight p^2, every ordered pair of terms
    equally likely. ``bosonic``: both pairs come from one normalized
    expansion (p/2)(A^dag)^2, and weights follow Fock-state norms.
    """
    p = coerce(p)
    F = check_probability(F, "F")
    good = p
    total = p
    for f1, f2 in iproduct((False, True), repeat=2):
        w_err = (1 - F if f1 else F) * (1 - F if f2 else F)
        if w_err == 0:
            continue
        t1 = [(_flip(t) if f1 else t) for t in _PAIR_TERMS]
        t2 = [(_flip(t) if f2 else t) for t in _PAIR_TERMS]
        if pairs == "distinguishable":
            kept = 0
            for a, b in iproduct(t1, t2):
                ta = _tag(a[0]) + _tag(b[0])
                tb = _tag(a[1]) + _tag(b[1])
                if ta == tb == 1:
                    kept += 1
            frac = Fraction(kept, 16)
            weight = p * p * frac
        elif pairs == "bosonic":
            poly: Counter = Counter()
            for a, b in iproduct(t1, t2):
                key = tuple(sorted([("A",) + a[0], ("B",) + a[1], ("A",) + b[0], ("B",) + b[1]]))
                poly[key] += 1
            norm_all = 0
            norm_kept = 0
            for key, c in poly.items():
                fact = 1
                for m in set(key):
                    fact *= factorial(key.count(m))
                n2 = c * c * fact
                norm_all += n2
                ta = sum(_tag(k[1:]) for k in key if k[0] == "A")
                tb = sum(_tag(k[1:]) for k in key if k[0] == "B")
                if ta == tb == 1:
                    norm_kept += n2
            # (p/2)^2 |(A/2)^2|0>|^2 with |A|0>|^2 = 4
            weight = p * p / 4 * Fraction(norm_kept, 16)
        else:
            raise ValueError("pairs must be 'distinguishable' or 'bosonic'")
        total += w_err * weight
        if not f1 and not f2:
            good += w_err * weight
    return good / total, total


def deterministic_round(pol_weights, spat: BellDiagonalState | None = None) -> PurificationResult:
    """Spatial entanglement is copied into polarization. Which detector fires
    tells the old polarization, and a psi+ signal is fixed with one X.

    ``pol_weights``: {name: weight} with Bell symbols or HH/HV/VH/VV (weights sum to 1).
    Requires a pure spatial phi+.
    """
    if spat is not None and spat.fidelity != 1:
        raise UnsupportedMixtureError("the deterministic scheme needs a pure spatial phi+")
    ws = [coerce(w) for w in pol_weights.values()]
    allowed = {c.symbol for c in BellComponent} | {"HH", "HV", "VH", "VV"}
    bad = set(pol_weights) - allowed
    if bad:
        raise UnsupportedMixtureError(f"unknown polarization components {sorted(bad)}")
    tot = sum(ws)
    if (is_exact(*ws) and tot != 1) or abs(float(tot) - 1) > 1e-12:
        raise ValueError("polarization weights must sum to 1")
    one = Fraction(1) if is_exact(*ws) else 1.0
    zero = one * 0
    return PurificationResult(one, BellDiagonalState((one, zero, zero, zero)),
                              (Correction("A", "X", "D2D7 or D5D4 coincidence"),))


# --- quantum-dot cavity -------------------------------------------------------


@dataclass(frozen=True)
class QDCavityParams:
    w_c: float
    w: float
    w_X: float
    g: float
    kappa: float
    kappa_s: float
    gamma: float

    def __post_init__(self):
        for name in ("g", "kappa", "kappa_s", "gamma"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


def qd_transmission(params: QDCavityParams) -> tuple:
    """Weak-excitation transmission t(w) of a double-sided cavity and r = 1 + t."""
    q = params
    ex = 1j * (q.w_X - q.w) + q.gamma / 2
    cav = 1j * (q.w_c - q.w) + q.kappa + q.kappa_s / 2
    den = ex * cav + q.g ** 2
    if abs(den) == 0:
        raise ZeroDivisionError("singular cavity parameters (denominator vanishes)")
    t = -q.kappa * ex / den
    return t, 1 + t


# --- two-step polarization-spatial purification ------------------------------

HEPP_BRANCHES = (
    # (polarization parity, spatial parity, disposition)
    ("same", "same", "keep"),
    ("different", "different", "discard"),
    ("same", "different", "recycle-polarization"),
    ("different", "same", "recycle-spatial"),
)


def hepp_branch_table(Fp, Fs) -> list:
    """[(pol parity, spatial parity, disposition, probability)] for two copies."""
    Fp, Fs = check_probability(Fp, "Fp"), check_probability(Fs, "Fs")
    Pp = Fp * Fp + (1 - Fp) ** 2
    Ps = Fs * Fs + (1 - Fs) ** 2
    prob = {"same": (Pp, Ps), "different": (1 - Pp, 1 - Ps)}
    return [(a, b, d, prob[a][0] * prob[b][1]) for a, b, d in HEPP_BRANCHES]


def hepp_two_step(Fp, Fs) -> dict:
    """Fidelities and efficiencies of the two-step scheme.

    Each DOF is purified independently to F' = F^2 / (F^2 + (1-F)^2).
    eff_without = PpPs keeps only the same/same branch. eff_with = Ps
    credits every recycle-spatial branch with one joined output. That needs a
    recycle-polarization partner for each of them, which is guaranteed when
    Pp >= Ps. ``eff_matched`` is the branch-table count that pairs the two
    recycle branches one to one. It equals eff_with when Pp >= Ps.
    """
    Fp, Fs = check_probability(Fp, "Fp"), check_probability(Fs, "Fs")
    Pp = Fp * Fp + (1 - Fp) ** 2
    Ps = Fs * Fs + (1 - Fs) ** 2
    Fp_out = Fp * Fp / Pp
    Fs_out = Fs * Fs / Ps
    table = {d: w for _, _, d, w in hepp_branch_table(Fp, Fs)}
    matched = table["keep"] + min(table["recycle-polarization"], table["recycle-spatial"])
    out = {
        "Fp_out": Fp_out,
        "Fs_out": Fs_out,
        "F_out": Fp_out * Fs_out,
        "eff_with_qsjm": Ps,
        "eff_without": Pp * Ps,
        "eff_matched": matched,
    }
    return out


__all__ = [
    "HyperDiagonalState", "single_copy_round", "spepp_round", "qnd_spdc_fidelity", "qnd_spdc_enumeration",
    "deterministic_round", "QDCavityParams", "qd_transmission", "HEPP_BRANCHES", "hepp_branch_table",
    "hepp_two_step",
]
