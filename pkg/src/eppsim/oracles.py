"""State-vector oracles for the gate-based maps.

These brute-force the circuits term by term and never look at the analytic
formulas, so they can be used to check them.
"""

from __future__ import annotations

from itertools import product as iproduct

import numpy as np

from . import qubits as qb
from .bell_core import ORDER, BellDiagonalState


def bilateral_cnot_oracle(s1: BellDiagonalState, s2: BellDiagonalState | None = None,
                          alice_gate: np.ndarray | None = None, bob_gate: np.ndarray | None = None):
    """Enumerate the 16 product terms of two Bell-diagonal copies.

    Qubit order is (a1, b1, a2, b2). Optional local gates are applied to both
    copies before the bilateral CNOT a1->a2, b1->b2. Returns
    ``(p_keep, p_reject, kept_bell_weights)`` where the weights are
    unnormalized (they sum to p_keep).
    """
    s2 = s1 if s2 is None else s2
    kept = np.zeros(4)
    rejected = 0.0
    for c1, c2 in iproduct(ORDER, ORDER):
        w = float(s1[c1]) * float(s2[c2])
        if w == 0:
            continue
        psi = qb.product(qb.BELL_VECTORS[c1], qb.BELL_VECTORS[c2])
        for gate, qs in ((alice_gate, (0, 2)), (bob_gate, (1, 3))):
            if gate is not None:
                for q in qs:
                    psi = qb.apply_1q(psi, gate, q)
        psi = qb.apply_cnot(psi, 0, 2)
        psi = qb.apply_cnot(psi, 1, 3)
        same = qb.project(qb.project(psi, 2, 0), 3, 0) + qb.project(qb.project(psi, 2, 1), 3, 1)
        diff = psi - same
        kept += w * qb.bell_weights(same, 0, 1)
        rejected += w * qb.norm2(diff)
    return float(kept.sum()), rejected, kept


def dejmps_oracle(state: BellDiagonalState):
    return bilateral_cnot_oracle(state, alice_gate=qb.rx(np.pi / 2), bob_gate=qb.rx(-np.pi / 2))


def bell_label_action(alice_gate: np.ndarray, bob_gate: np.ndarray) -> dict:
    """Where each Bell state lands under local gates (weights of the image)."""
    out = {}
    for c in ORDER:
        psi = qb.apply_1q(qb.apply_1q(qb.BELL_VECTORS[c], alice_gate, 0), bob_gate, 1)
        out[c] = qb.bell_weights(psi, 0, 1)
    return out


# --- GHZ oracles --------------------------------------------------------------


def ghz_vector(comp) -> np.ndarray:
    n = comp.n
    v = np.zeros((2,) * n, dtype=complex)
    x = tuple(int(b) for b in comp.bits)
    xbar = tuple(1 - b for b in x)
    v[x] = qb.S2
    v[xbar] = -qb.S2 if comp.phase_bit else qb.S2
    return v


def ghz_weights(psi: np.ndarray, qubits) -> dict:
    """Unnormalized GHZ-basis diagonal of the reduced state on ``qubits``."""
    from .multipartite import GHZComponent

    n = len(qubits)
    moved = np.moveaxis(psi, tuple(qubits), tuple(range(n)))
    rest = moved.reshape(2 ** n, -1)
    out = {}
    for c in GHZComponent.all(n):
        amps = ghz_vector(c).reshape(-1).conj() @ rest
        w = float(np.vdot(amps, amps).real)
        if w > 1e-15:
            out[c] = w
    return out


def _measure_all(psi: np.ndarray, qubits):
    """Yield (outcome bits, unnormalized projected state) for a Z readout of ``qubits``."""
    for bits in iproduct((0, 1), repeat=len(qubits)):
        phi = psi
        for q, b in zip(qubits, bits):
            phi = qb.project(phi, q, b)
        if qb.norm2(phi) > 1e-15:
            yield bits, phi


def _two_copies(state):
    for c1, w1 in state.p:
        for c2, w2 in state.p:
            yield float(w1) * float(w2), np.multiply.outer(ghz_vector(c1), ghz_vector(c2))


def _acc(total: dict, part: dict, scale: float = 1.0):
    for k, v in part.items():
        total[k] = total.get(k, 0.0) + scale * v


def mmepp_oracle(state, error_kind: str = "bit"):
    """Transversal CNOT round on 2n qubits; returns (p_keep, kept GHZ weights)."""
    n = state.n
    src, tgt = list(range(n)), list(range(n, 2 * n))
    kept: dict = {}
    for w, psi in _two_copies(state):
        if error_kind == "phase":
            for q in range(2 * n):
                psi = qb.apply_1q(psi, qb.H, q)
        for i in range(n):
            psi = qb.apply_cnot(psi, src[i], tgt[i])
        for bits, phi in _measure_all(psi, tgt):
            if error_kind == "bit":
                ok = len(set(bits)) == 1
            else:
                ok = sum(bits) % 2 == 0
            if not ok:
                continue
            if error_kind == "phase":
                for q in src:
                    phi = qb.apply_1q(phi, qb.H, q)
            _acc(kept, ghz_weights(phi, src), w)
    return sum(kept.values()), kept


def _pair_parity_projector(psi, q1, q2, same: bool):
    out = np.zeros_like(psi)
    for b in (0, 1):
        phi = qb.project(qb.project(psi, q1, b), q2, b if same else 1 - b)
        out += phi
    return out


def _x_readout(psi, qubits, fix_qubit):
    """X-basis readout of ``qubits``; an odd number of '-' is undone with Z on fix_qubit."""
    for q in qubits:
        psi = qb.apply_1q(psi, qb.H, q)
    for bits, phi in _measure_all(psi, qubits):
        if sum(bits) % 2:
            phi = qb.apply_1q(phi, qb.Z, fix_qubit)
        yield phi


def smepp_oracle(state, theta_pi_mode: bool = False):
    """Per-party parity projection of two copies, then X readout of copy 2."""
    n = state.n
    kept: dict = {}
    patterns = [(True,) * n] + ([(False,) * n] if theta_pi_mode else [])
    for w, psi in _two_copies(state):
        for pat in patterns:
            phi = psi
            for i, same in enumerate(pat):
                phi = _pair_parity_projector(phi, i, n + i, same)
            for out in _x_readout(phi, list(range(n, 2 * n)), 0):
                _acc(kept, ghz_weights(out, list(range(n))), w)
    return sum(kept.values()), kept


def recycle_oracle(state):
    """Three-party mismatched branches: parity outcomes with one odd party k.

    Party k of copy 1 and all of copy 2 are read out in X; the remaining two
    photons of copy 1 are returned as unnormalized Bell weights per party pair.
    """
    names = ("a", "b", "c")
    out: dict = {}
    for w, psi in _two_copies(state):
        for k in range(3):
            for flip in (False, True):
                pat = [not flip] * 3
                pat[k] = flip
                phi = psi
                for i, same in enumerate(pat):
                    phi = _pair_parity_projector(phi, i, 3 + i, same)
                i, j = [q for q in range(3) if q != k]
                for res in _x_readout(phi, [k, 3, 4, 5], i):
                    acc = out.setdefault((names[i], names[j]), np.zeros(4))
                    acc += w * qb.bell_weights(res, i, j)
    return out


def fusion_oracle(pair1: BellDiagonalState, pair2: BellDiagonalState):
    """Qubits (a1, b1, a2, c2): parity check on a1, a2, X readout of a2 -> GHZ on (a1, b1, c2)."""
    total: dict = {}
    for c1 in ORDER:
        for c2 in ORDER:
            w = float(pair1[c1]) * float(pair2[c2])
            if w == 0:
                continue
            psi = qb.product(qb.BELL_VECTORS[c1], qb.BELL_VECTORS[c2])
            for same in (True, False):
                phi = _pair_parity_projector(psi, 0, 2, same)
                if not same:
                    phi = qb.apply_1q(phi, qb.X, 3)
                for res in _x_readout(phi, [2], 0):
                    _acc(total, ghz_weights(res, [0, 1, 3]), w)
    return total


# --- measurement-based round --------------------------------------------------

# qubit order: g1 g2 g3 h1 h2 h3 a1 b1 a2 b2; analyzers (g1,a1) (g2,a2) (h1,b1) (h2,b2)
_MB_ANALYZERS = ((0, 6), (1, 8), (3, 7), (4, 9))


def measurement_round_oracle(c1, c2) -> dict:
    """Two GHZ resources and the Bell pairs c1 on (a1, b1), c2 on (a2, b2).

    Projects the four analyzer pairs onto every combination of Bell outcomes.
    Returns {(o1, o2, o3, o4): unnormalized state on (g3, h3)} for the 256
    outcome tuples, in analyzer order.
    """
    ghz = np.zeros((2, 2, 2), dtype=complex)
    ghz[0, 0, 0] = ghz[1, 1, 1] = qb.S2
    psi0 = qb.product(ghz, ghz, qb.BELL_VECTORS[c1], qb.BELL_VECTORS[c2])
    out = {}
    for outs in iproduct(ORDER, repeat=4):
        psi = psi0
        labels = list(range(10))
        for (q1, q2), c in zip(_MB_ANALYZERS, outs):
            i1, i2 = labels.index(q1), labels.index(q2)
            psi = np.tensordot(qb.BELL_VECTORS[c].conj(), psi, axes=([0, 1], [i1, i2]))
            labels = [q for q in labels if q not in (q1, q2)]
        out[outs] = psi
    return out
