"""Tiny dense state-vector toolkit used by the brute-force oracles.

Qubits are addressed by position in a tensor of shape (2,)*n; qubit 0 is the
leftmost factor.
"""

from __future__ import annotations

import numpy as np

from .bell_core import ORDER, BellComponent

S2 = 1 / np.sqrt(2)

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = S2 * np.array([[1, 1], [1, -1]], dtype=complex)
PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}


def rx(theta: float) -> np.ndarray:
    """exp(-i theta X / 2)."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def bell_vector(c: BellComponent) -> np.ndarray:
    amp, ph = c.value
    v = np.zeros((2, 2), dtype=complex)
    v[0, amp] = S2
    v[1, 1 - amp] = -S2 if ph else S2
    return v


BELL_VECTORS = {c: bell_vector(c) for c in ORDER}


def product(*factors: np.ndarray) -> np.ndarray:
    out = np.array(1, dtype=complex)
    for f in factors:
        out = np.multiply.outer(out, f)
    return out


def apply_1q(psi: np.ndarray, gate: np.ndarray, q: int) -> np.ndarray:
    psi = np.tensordot(gate, psi, axes=([1], [q]))
    return np.moveaxis(psi, 0, q)


def apply_cnot(psi: np.ndarray, control: int, target: int) -> np.ndarray:
    psi = psi.copy()
    idx = [slice(None)] * psi.ndim
    idx[control] = 1
    sub = psi[tuple(idx)]
    t = target if target < control else target - 1
    psi[tuple(idx)] = np.flip(sub, axis=t)
    return psi


def project(psi: np.ndarray, q: int, bit: int) -> np.ndarray:
    """Unnormalized projection of qubit q onto |bit>, qubit kept in place."""
    out = np.zeros_like(psi)
    idx = [slice(None)] * psi.ndim
    idx[q] = bit
    out[tuple(idx)] = psi[tuple(idx)]
    return out


def bell_weights(psi: np.ndarray, q1: int, q2: int) -> np.ndarray:
    """Diagonal of the reduced (q1, q2) state in the Bell basis, unnormalized."""
    moved = np.moveaxis(psi, (q1, q2), (0, 1))
    rest = moved.reshape(4, -1)
    out = np.empty(4)
    for c in ORDER:
        amps = bell_vector(c).reshape(4).conj() @ rest
        out[c.index] = float(np.vdot(amps, amps).real)
    return out


def norm2(psi: np.ndarray) -> float:
    return float(np.vdot(psi, psi).real)
