"""The eight four-photon logical states and their decoding rules.

A key bit is carried by a product of two identical Bell states.  The
dephasing-immune variant uses the antiparallel pair {psi+, psi-}; the
rotation-immune variant uses {phi+, psi-}.  Which photons are paired is the
second degree of freedom: the neighboring pairing entangles photons (1,2)
and (3,4), the crossing pairing entangles (1,3) and (2,4); the two pairings
play the role of conjugate preparation bases.

Decoding needs only single-photon product measurements: in the variant's
key basis the two photons of a pair come out parallel for bit 0 and
antiparallel for bit 1 (dephasing keys are read in X, rotation keys in Z).

All state constants here are expanded in the computational basis with exact
dyadic amplitudes (0, +-1/4, +-1/2), so decomposition identities hold to
machine precision instead of accumulating Hadamard round-off.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .statevector import (
    BellOutcome,
    MeasBasis,
    StateVector,
    bell_state,
    product_probabilities,
)


class Variant(Enum):
    """Which collective noise the codewords are immune to."""

    DEPHASING = "dephasing"
    ROTATION = "rotation"

    @property
    def key_basis(self) -> MeasBasis:
        return MeasBasis.X if self is Variant.DEPHASING else MeasBasis.Z


class SpatialBasis(Enum):
    """Photon pairing pattern; the conjugate preparation bases."""

    NEIGHBORING = "neighboring"
    CROSSING = "crossing"

    @property
    def pairs(self) -> tuple[tuple[int, int], tuple[int, int]]:
        if self is SpatialBasis.NEIGHBORING:
            return ((0, 1), (2, 3))
        return ((0, 2), (1, 3))

    @property
    def other(self) -> "SpatialBasis":
        return (
            SpatialBasis.CROSSING
            if self is SpatialBasis.NEIGHBORING
            else SpatialBasis.NEIGHBORING
        )


@dataclass(frozen=True)
class LogicalState:
    """One of the eight codewords: variant x pairing x key bit."""

    variant: Variant
    spatial: SpatialBasis
    key_bit: int

    def __post_init__(self):
        if self.key_bit not in (0, 1):
            raise ValueError(f"key_bit must be 0 or 1, got {self.key_bit}")


class PairChecks(NamedTuple):
    """Per-pair parity consistency of a measured quartet against a codeword."""

    pair1_ok: bool
    pair2_ok: bool


class ComponentTerm(Enum):
    """Named half-norm superposition components of the codewords.

    A..D are X-basis patterns (carrying the dephasing states), E..H are the
    analogous Z-basis patterns (carrying the rotation states).
    """

    A = "a"
    B = "b"
    C = "c"
    D = "d"
    E = "e"
    F = "f"
    G = "g"
    H = "h"


def _x_pattern(pattern: str) -> np.ndarray:
    """Computational amplitudes of |pattern> with characters in {+,-}; exact 1/4s."""
    amps = np.empty(16, dtype=complex)
    for idx in range(16):
        sign = 1
        for pos, ch in enumerate(pattern):
            if ch == "-" and (idx >> (3 - pos)) & 1:
                sign = -sign
        amps[idx] = sign * 0.25
    return amps


def _x_component(p1: str, p2: str) -> StateVector:
    return StateVector(4, 0.5 * (_x_pattern(p1) + _x_pattern(p2)))


def _z_component(s1: str, s2: str) -> StateVector:
    amps = np.zeros(16, dtype=complex)
    amps[int(s1, 2)] = 0.5
    amps[int(s2, 2)] = 0.5
    return StateVector(4, amps)


_COMPONENT_STATES = {
    ComponentTerm.A: _x_component("++++", "----"),
    ComponentTerm.B: _x_component("++--", "--++"),
    ComponentTerm.C: _x_component("+-+-", "-+-+"),
    ComponentTerm.D: _x_component("+--+", "-++-"),
    ComponentTerm.E: _z_component("0000", "1111"),
    ComponentTerm.F: _z_component("0011", "1100"),
    ComponentTerm.G: _z_component("0101", "1010"),
    ComponentTerm.H: _z_component("0110", "1001"),
}


def component_state(term: ComponentTerm) -> StateVector:
    """The 4-photon constant attached to a component term (squared norm 1/2)."""
    return _COMPONENT_STATES[term]


# 2-photon building blocks as (support string, sign) pairs, amplitude 1/sqrt(2)
_PSI_PLUS = (("01", 1), ("10", 1))
_PSI_MINUS = (("01", 1), ("10", -1))
_PHI_PLUS = (("00", 1), ("11", 1))


def _block(variant: Variant, key_bit: int):
    if key_bit == 1:
        return _PSI_MINUS
    return _PSI_PLUS if variant is Variant.DEPHASING else _PHI_PLUS


@lru_cache(maxsize=None)
def build_codeword(ls: LogicalState) -> StateVector:
    """The normalized 4-photon state encoding ``ls`` (exact +-1/2 amplitudes)."""
    block = _block(ls.variant, ls.key_bit)
    (i1, j1), (i2, j2) = ls.spatial.pairs
    amps = np.zeros(16, dtype=complex)
    for s1, g1 in block:
        for s2, g2 in block:
            bits = [0] * 4
            bits[i1], bits[j1] = int(s1[0]), int(s1[1])
            bits[i2], bits[j2] = int(s2[0]), int(s2[1])
            idx = (bits[0] << 3) | (bits[1] << 2) | (bits[2] << 1) | bits[3]
            amps[idx] = 0.5 * g1 * g2
    return StateVector(4, amps)


def pair_block_product(
    block1: StateVector, block2: StateVector, spatial: SpatialBasis
) -> StateVector:
    """4-photon state with 2-photon states placed on the photons of a pairing."""
    (i1, j1), (i2, j2) = spatial.pairs
    t = np.zeros([2] * 4, dtype=complex)
    a1 = block1.amplitudes.reshape(2, 2)
    a2 = block2.amplitudes.reshape(2, 2)
    out = np.einsum("ab,cd->abcd", a1, a2)
    t = np.moveaxis(out, (0, 1, 2, 3), (i1, j1, i2, j2))
    return StateVector(4, t.reshape(-1))


@lru_cache(maxsize=None)
def bell_product(o1: BellOutcome, o2: BellOutcome, spatial: SpatialBasis) -> StateVector:
    """Product of two Bell states placed on a pairing (cached constant)."""
    return pair_block_product(bell_state(o1), bell_state(o2), spatial)


def logical_basis_states(variant: Variant) -> tuple[StateVector, StateVector]:
    """The two 2-photon blocks from which the variant's codewords are built."""

    def vec(block):
        amps = np.zeros(4, dtype=complex)
        for s, g in block:
            amps[int(s, 2)] = g / np.sqrt(2.0)
        return StateVector(2, amps)

    if variant is Variant.DEPHASING:
        zero = StateVector(2, np.array([0, 1, 0, 0], dtype=complex))  # |01>
        one = StateVector(2, np.array([0, 0, 1, 0], dtype=complex))  # |10>
        return zero, one
    return vec(_PHI_PLUS), vec(_PSI_MINUS)


def all_codewords(variant: Variant) -> tuple[LogicalState, ...]:
    """The four logical states of a variant, neighboring first."""
    return tuple(
        LogicalState(variant, s, b)
        for s in (SpatialBasis.NEIGHBORING, SpatialBasis.CROSSING)
        for b in (0, 1)
    )


def pair_parities(spatial: SpatialBasis, outcome: str) -> tuple[bool, bool]:
    """(pair1 parallel?, pair2 parallel?) of a 4-character outcome string."""
    if len(outcome) != 4:
        raise ValueError(f"expected 4 outcome bits, got {outcome!r}")
    (i1, j1), (i2, j2) = spatial.pairs
    return outcome[i1] == outcome[j1], outcome[i2] == outcome[j2]


def decode_key(variant: Variant, spatial: SpatialBasis, outcome: str) -> int | None:
    """Key bit from a key-basis outcome; None when the two pairs disagree.

    Parallel pairs decode to 0, antiparallel to 1 (in the variant's key
    basis both conventions coincide with the codeword supports).
    """
    p1, p2 = pair_parities(spatial, outcome)
    if p1 != p2:
        return None
    return 0 if p1 else 1


def check_consistency(ls: LogicalState, meas: MeasBasis, outcome: str) -> PairChecks:
    """Per-pair pass/fail of an outcome string against a revealed codeword."""
    p1, p2 = pair_parities(ls.spatial, outcome)
    if ls.variant is Variant.DEPHASING and meas is MeasBasis.Z:
        # psi+- live on {01, 10}: both pairs must be antiparallel
        return PairChecks(not p1, not p2)
    want_parallel = ls.key_bit == 0
    return PairChecks(p1 == want_parallel, p2 == want_parallel)


@lru_cache(maxsize=None)
def basis_support(ls: LogicalState, basis: MeasBasis) -> frozenset[str]:
    """Outcome strings with nonzero probability when measuring the codeword."""
    probs = product_probabilities(build_codeword(ls), basis)
    return frozenset(format(i, "04b") for i in range(16) if probs[i] > 1e-12)


def overlap_table(variant: Variant) -> np.ndarray:
    """|<i|j>| between codewords, ordered (N,0), (N,1), (C,0), (C,1)."""
    states = [build_codeword(ls) for ls in all_codewords(variant)]
    table = np.empty((4, 4))
    for i, a in enumerate(states):
        for j, b in enumerate(states):
            table[i, j] = abs(np.vdot(a.amplitudes, b.amplitudes))
    return table
