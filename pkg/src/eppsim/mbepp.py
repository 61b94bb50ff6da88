"""Measurement-based purification.

Two noisy pairs are teleported through two three-qubit GHZ resources by four
Bell analyzers (g1a1, g2a2, h1b1, h2b2); the surviving pair sits on (g3, h3).
The physical round, its linear-optics realization and the logical-qubit
(parity code) success and fidelity formulas live here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct
from math import comb
from typing import NamedTuple

import numpy as np

from ._numeric import check_probability, is_exact
from .bell_core import (ORDER, BellComponent, BellDiagonalState, Correction, PurificationResult,
                        bilateral_cnot_round)

ANALYZERS = ("g1a1", "g2a2", "h1b1", "h2b2")


@dataclass(frozen=True)
class BsaOutcome:
    """Bell results of the four analyzers, in ``ANALYZERS`` order."""

    results: tuple

    def __post_init__(self):
        res = tuple(self.results)
        if len(res) != 4:
            raise ValueError("a measurement-based round has exactly 4 analyzer results")
        if not all(isinstance(r, BellComponent) for r in res):
            raise TypeError("analyzer results must be BellComponent values")
        object.__setattr__(self, "results", res)

    @classmethod
    def parse(cls, text: str) -> "BsaOutcome":
        """'psi+,phi-,psi-,phi-'."""
        by_symbol = {c.symbol: c for c in ORDER}
        try:
            return cls(tuple(by_symbol[t.strip()] for t in text.split(",")))
        except KeyError as exc:
            raise ValueError(f"unknown Bell symbol {exc.args[0]!r}") from None

    @classmethod
    def all(cls) -> list:
        return [cls(r) for r in iproduct(ORDER, repeat=4)]

    @property
    def amplitude_bits(self) -> tuple:
        return tuple(r.amplitude_bit for r in self.results)

    @property
    def minus_parity(self) -> int:
        return sum(r.phase_bit for r in self.results) % 2


@dataclass(frozen=True)
class CorrectionRule:
    """One row of the outcome table.

    ``aligned``: Bob's amplitude pattern repeats Alice's (k3 = k1, k4 = k2).
    ``crossed``: it is the complement (k3 != k1, k4 != k2).
    The action is applied to the g3 qubit; "XZ" means Z first, then X.
    """

    amplitude_class: str
    minus_parity: int
    action: str

    def matches(self, outcome: BsaOutcome) -> bool:
        return _amplitude_class(outcome) == self.amplitude_class and outcome.minus_parity == self.minus_parity


def _amplitude_class(outcome: BsaOutcome) -> str | None:
    k1, k2, k3, k4 = outcome.amplitude_bits
    if k3 == k1 and k4 == k2:
        return "aligned"
    if k3 != k1 and k4 != k2:
        return "crossed"
    return None


OUTCOME_TABLE = (
    CorrectionRule("aligned", 0, "I"),
    CorrectionRule("aligned", 1, "Z"),
    CorrectionRule("crossed", 0, "X"),
    CorrectionRule("crossed", 1, "XZ"),
)


class Lookup(NamedTuple):
    accept: bool
    action: str | None
    rule: CorrectionRule | None


def correction_lookup(outcome: BsaOutcome) -> Lookup:
    """Accept iff Alice's and Bob's amplitude patterns agree up to a global flip."""
    for rule in OUTCOME_TABLE:
        if rule.matches(outcome):
            return Lookup(True, rule.action, rule)
    return Lookup(False, None, None)


def apply_action(component: BellComponent, action: str) -> BellComponent:
    """Label of a Bell state after a Pauli on one of its qubits (X flips the amplitude bit, Z the phase bit)."""
    amp, ph = component.amplitude_bit, component.phase_bit
    if "X" in action:
        amp ^= 1
    if "Z" in action:
        ph ^= 1
    return BellComponent.from_bits(amp, ph)


def mbepp_round_physical(rho1: BellDiagonalState, rho2: BellDiagonalState | None = None) -> PurificationResult:
    """Two Bell-diagonal pairs through ideal GHZ resources, corrected per ``OUTCOME_TABLE``.

    With matched amplitude bits every accepted outcome, after its correction,
    leaves (amp, phase1 xor phase2); mismatched ones are never accepted. That
    is the bilateral-CNOT label map without the four-mode factor 1/2, so for
    rank-2 inputs of fidelity F: F1 = F^2 / (F^2 + (1-F)^2), success F^2 + (1-F)^2.
    Any Bell-diagonal pair is accepted (the rank-2 case is the one usually quoted).
    """
    res = bilateral_cnot_round(rho1, rho2)
    corr = tuple(Correction("g3", r.action, f"{r.amplitude_class} amplitudes, "
                                            f"{'odd' if r.minus_parity else 'even'} '-' count")
                 for r in OUTCOME_TABLE if r.action != "I")
    return PurificationResult(res.success_prob, res.output, corr)


def mbepp_linear_optics(p=0.1, F=0.85, branch: str = "postselected") -> PurificationResult:
    """Twelve-mode coincidence of the linear-optics circuit, from the Fock engine.

    ``branch="postselected"`` keeps single-pair copies and GHZ resources only.
    ``branch="full"`` runs the whole ten-photon sector, takes minutes, and
    is not dominated by that branch (see the preset's docstring).
    """
    from .optics_engine import build_preset, run_protocol

    return run_protocol(build_preset("mbepp_linear", F=F, p=p, branch=branch))


# --- logical qubits -----------------------------------------------------------


@dataclass(frozen=True)
class QpcParams:
    """Parity code with n blocks of m photons per logical qubit."""

    n: int
    m: int

    def __post_init__(self):
        for name in ("n", "m"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise ValueError(f"{name} must be a positive integer")

    @property
    def photons_per_qubit(self) -> int:
        return self.n * self.m


@dataclass(frozen=True)
class LossModel:
    eta: object

    def __post_init__(self):
        object.__setattr__(self, "eta", check_probability(self.eta, "eta"))


@dataclass(frozen=True)
class QndErrorModel:
    pe: object

    def __post_init__(self):
        object.__setattr__(self, "pe", check_probability(self.pe, "pe"))


def _poly_mul(a: list, b: list) -> list:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_pow(a: list, k: int) -> list:
    out = [1]
    for _ in range(k):
        out = _poly_mul(out, a)
    return out


def qubit_survival_counts(qpc: QpcParams) -> list:
    """c[i]: number of ways to lose i of the n*m photons of one logical qubit
    and still complete its logical Bell analysis (every block keeps a photon,
    at least one block keeps all of them)."""
    m, n = qpc.m, qpc.n
    alive = [comb(m, l) for l in range(m)]          # block keeps >= 1 photon
    damaged = [0] + [comb(m, l) for l in range(1, m)]  # ... but lost at least one
    return [x - y for x, y in zip(_poly_pow(alive, n), _poly_pow(damaged, n))]


@dataclass(frozen=True)
class LossCounts:
    """Loss-pattern bookkeeping over the 4nm photons of the two noisy copies.

    joint[j]: j-loss placements under which all four analyses survive.
    per_bsa[j]: fraction of j-loss placements under which one given analysis
    survives (the same for all four by symmetry).
    """

    photons: int
    joint: tuple
    per_bsa: tuple

    @property
    def E(self) -> tuple:
        return tuple(int(x > 0) for x in self.joint)

    @property
    def threshold(self) -> int:
        return max(j for j, x in enumerate(self.joint) if x > 0)


def loss_counts(qpc: QpcParams) -> LossCounts:
    c = qubit_survival_counts(qpc)
    q = qpc.photons_per_qubit
    total = 4 * q
    joint = _poly_pow(c, 4)
    joint += [0] * (total + 1 - len(joint))
    per = []
    for j in range(total + 1):
        ok = sum(c[i] * comb(total - q, j - i) for i in range(min(j, len(c) - 1) + 1))
        per.append(Fraction(ok, comb(total, j)))
    return LossCounts(total, tuple(joint[:total + 1]), tuple(per))


def _pf(F):
    return F * F + (1 - F) ** 2


def loss_survival(qpc: QpcParams, loss: LossModel, reading: str = "joint"):
    """Probability that all four logical analyses survive photon loss.

    ``joint``: sum over j of the count of all-survivable placements,
    i.e. the exact probability. ``marginal``: each analysis survives with its
    own fraction P_j of j-loss placements, the four fractions multiplied as if
    independent, times E_j and the C(4nm, j) placements of j losses.
    """
    lc = loss_counts(qpc)
    eta = loss.eta
    tot = lc.photons
    out = 0
    for j in range(lc.threshold + 1):
        w = (1 - eta) ** j * eta ** (tot - j)
        if reading == "joint":
            out += lc.joint[j] * w
        elif reading == "marginal":
            pj = lc.per_bsa[j] if is_exact(eta) else float(lc.per_bsa[j])
            out += comb(tot, j) * pj ** 4 * lc.E[j] * w
        else:
            raise ValueError("reading must be 'joint' or 'marginal'")
    return out


def logical_pg(qpc: QpcParams, loss: LossModel, F, reading: str = "joint"):
    """Success probability under photon loss with perfect parity measurements."""
    F = check_probability(F, "F")
    return loss_survival(qpc, loss, reading) * _pf(F)


class QndWeights(NamedTuple):
    P1: object
    P2: object
    P3: object
    P4: object


def qnd_weights(qpc: QpcParams, qnd: QndErrorModel) -> QndWeights:
    """P1: a block's parity reads correctly given its m photons agree.
    P2 / P3: even / odd number of wrongly read blocks among n. P4 = P2^2 + P3^2."""
    pe = qnd.pe
    good, bad = (1 - pe) ** qpc.m, pe ** qpc.m
    P1 = good / (good + bad)
    P2 = sum(comb(qpc.n, i) * (1 - P1) ** i * P1 ** (qpc.n - i) for i in range(0, qpc.n + 1, 2))
    P3 = sum(comb(qpc.n, i) * (1 - P1) ** i * P1 ** (qpc.n - i) for i in range(1, qpc.n + 1, 2))
    return QndWeights(P1, P2, P3, P2 * P2 + P3 * P3)


def logical_pfg(qpc: QpcParams, F, qnd: QndErrorModel):
    """Acceptance probability with imperfect parity measurements."""
    F = check_probability(F, "F")
    _, P2, P3, P4 = qnd_weights(qpc, qnd)
    return _pf(F) * (P4 * P4 + 4 * P2 * P2 * P3 * P3) + 8 * P2 * P3 * P4 * F * (1 - F)


def logical_f2(qpc: QpcParams, F, qnd: QndErrorModel):
    F = check_probability(F, "F")
    _, P2, P3, P4 = qnd_weights(qpc, qnd)
    num = F * F * P4 * P4 + 4 * P2 * P2 * P3 * P3 * (1 - F) ** 2 + 4 * P2 * P3 * P4 * F * (1 - F)
    return num / logical_pfg(qpc, F, qnd)


def logical_pg_imperfect(qpc: QpcParams, loss: LossModel, F, qnd: QndErrorModel, reading: str = "joint"):
    """Loss survival times the imperfect-QND acceptance. The per-analysis loss
    fractions are taken to be the same as with perfect QND."""
    return loss_survival(qpc, loss, reading) * logical_pfg(qpc, F, qnd)


# --- Monte Carlo oracles --------------------------------------------------------


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float
    samples: int
    seed: int

    def agrees(self, value, sigmas: float = 3.0) -> bool:
        return abs(float(value) - self.mean) <= sigmas * max(self.stderr, 1e-15)


def _estimate(hits: np.ndarray, seed: int) -> Estimate:
    n = hits.size
    mean = float(hits.mean())
    return Estimate(mean, float(np.sqrt(mean * (1 - mean) / n)), n, seed)


def _loss_survives(rng, qpc: QpcParams, eta: float, samples: int) -> np.ndarray:
    kept = rng.random((samples, 4, qpc.n, qpc.m)) < eta
    intact = kept.all(axis=3)
    alive = kept.any(axis=3)
    ok = intact.any(axis=2) & alive.all(axis=2)
    return ok.all(axis=1)


def _block_read_errors(rng, qpc: QpcParams, pe: float, shape: tuple) -> np.ndarray:
    """Sample per-photon parity errors, keeping only blocks whose m readings agree."""
    err = rng.random(shape + (qpc.m,)) < pe
    bad = err.any(axis=-1) & ~err.all(axis=-1)
    while bad.any():
        err[bad] = rng.random((int(bad.sum()), qpc.m)) < pe
        bad = err.any(axis=-1) & ~err.all(axis=-1)
    return err.all(axis=-1)


def _qnd_trial(rng, qpc: QpcParams, F: float, pe: float, samples: int):
    """Label-level round: copies flip to psi+ with 1-F, each logical analysis
    misreads its amplitude bit when an odd number of blocks are misread.
    Returns (accepted, output is phi+)."""
    c = rng.random((samples, 2)) >= F
    blocks = _block_read_errors(rng, qpc, pe, (samples, 4, qpc.n))
    e = blocks.sum(axis=2) % 2 == 1
    e13 = e[:, 0] ^ e[:, 2]
    e24 = e[:, 1] ^ e[:, 3]
    accepted = (c[:, 0] ^ c[:, 1]) == (e13 ^ e24)
    good = ~(c[:, 0] ^ e13)
    return accepted, good


def mc_logical_success(qpc: QpcParams, loss: LossModel, F, qnd: QndErrorModel | None = None,
                       samples: int = 1_000_000, seed: int = 0) -> Estimate:
    """Loss placements and parity-readout errors sampled photon by photon."""
    rng = np.random.default_rng(seed)
    survive = _loss_survives(rng, qpc, float(loss.eta), samples)
    pe = 0.0 if qnd is None else float(qnd.pe)
    accepted, _ = _qnd_trial(rng, qpc, float(F), pe, samples)
    return _estimate(survive & accepted, seed)


def mc_logical_fidelity(qpc: QpcParams, F, qnd: QndErrorModel, samples: int = 1_000_000,
                        seed: int = 0) -> tuple:
    """(fidelity estimate, acceptance estimate) of the lossless logical round."""
    rng = np.random.default_rng(seed)
    accepted, good = _qnd_trial(rng, qpc, float(F), float(qnd.pe), samples)
    kept = good[accepted]
    return _estimate(kept, seed), _estimate(accepted, seed)


def mc_loss_survival(qpc: QpcParams, loss: LossModel, samples: int = 1_000_000, seed: int = 0) -> Estimate:
    rng = np.random.default_rng(seed)
    return _estimate(_loss_survives(rng, qpc, float(loss.eta), samples), seed)


__all__ = [
    "ANALYZERS", "BsaOutcome", "CorrectionRule", "OUTCOME_TABLE", "Lookup", "correction_lookup", "apply_action",
    "mbepp_round_physical", "mbepp_linear_optics", "QpcParams", "LossModel", "QndErrorModel",
    "qubit_survival_counts", "LossCounts", "loss_counts", "loss_survival", "logical_pg", "QndWeights",
    "qnd_weights", "logical_pfg", "logical_f2", "logical_pg_imperfect", "Estimate", "mc_logical_success",
    "mc_logical_fidelity", "mc_loss_survival",
]
