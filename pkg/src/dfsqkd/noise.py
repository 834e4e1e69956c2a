"""Collective-noise channels: the same unitary hits every photon of a quartet.

Two channel families are modeled.  Dephasing leaves |0> alone and phases |1>
by e^(i*phi); rotation turns |0> into cos(t)|0> + sin(t)|1> and |1> into
-sin(t)|0> + cos(t)|1>.  A noise policy decides how the parameter is drawn
for each transmitted quartet: held fixed, or redrawn uniformly per quartet
(the parameter is assumed constant while one quartet is in flight).
"""
from __future__ import annotations

from dataclasses import dataclass
from math import cos, isfinite, sin

import numpy as np

from .statevector import StateVector, apply_single_qubit


@dataclass(frozen=True)
class Fixed:
    """Noise parameter held at a constant value."""

    value: float

    def __post_init__(self):
        if not isfinite(self.value):
            raise ValueError("noise parameter must be finite")


@dataclass(frozen=True)
class UniformPerQuartet:
    """Noise parameter redrawn uniformly in [lo, hi] for every quartet."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (isfinite(self.lo) and isfinite(self.hi)):
            raise ValueError("bounds must be finite")
        if self.lo > self.hi:
            raise ValueError(f"lo={self.lo} exceeds hi={self.hi}")


NoisePolicy = Fixed | UniformPerQuartet


def sample_noise(policy: NoisePolicy, rand: np.random.Generator) -> float:
    """Draw one per-quartet noise parameter under the policy."""
    if isinstance(policy, Fixed):
        return policy.value
    return float(rand.uniform(policy.lo, policy.hi))


def _check_photons(s: StateVector, photons) -> list[int]:
    photons = list(photons)
    if len(set(photons)) != len(photons):
        raise ValueError(f"duplicate photon indices in {photons}")
    for q in photons:
        if not 0 <= q < s.num_qubits:
            raise ValueError(f"photon index {q} out of range")
    return photons


def collective_dephasing(s: StateVector, photons, phi: float) -> StateVector:
    """Apply diag(1, e^(i*phi)) to every listed photon."""
    photons = _check_photons(s, photons)
    if not isfinite(phi):
        raise ValueError("phi must be finite")
    idx = np.arange(len(s.amplitudes))
    ones = sum((idx >> (s.num_qubits - 1 - q)) & 1 for q in photons)
    return StateVector(s.num_qubits, s.amplitudes * np.exp(1j * phi * ones))


def rotation_matrix(theta: float) -> np.ndarray:
    """The collective-rotation single-photon unitary."""
    c, si = cos(theta), sin(theta)
    return np.array([[c, -si], [si, c]], dtype=complex)


def collective_rotation(s: StateVector, photons, theta: float) -> StateVector:
    """Rotate the polarization of every listed photon by the same angle."""
    photons = _check_photons(s, photons)
    if not isfinite(theta):
        raise ValueError("theta must be finite")
    u = rotation_matrix(theta)
    for q in photons:
        s = apply_single_qubit(s, q, u)
    return s
