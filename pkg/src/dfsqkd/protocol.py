"""Alice/Bob session pipeline: prepare, transmit, check, sift.

One session is a deterministic function of its config (the seed drives a
single numpy Generator through every random choice).  The classical channel
is modeled as authenticated and error-free; its messages are recorded in
order on the session transcript, and Alice's basis string is only ever
appended after the error check passes, so basis secrecy before the check
holds by construction.  Error correction and privacy amplification are out
of scope; a no-op transcript entry marks where they would run.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .adversary import NO_ATTACK, AttackKind, EveSummary, attack_quartet, eve_finalize, validate_attack
from .codewords import (
    LogicalState,
    SpatialBasis,
    Variant,
    build_codeword,
    check_consistency,
    decode_key,
)
from .noise import Fixed, NoisePolicy, collective_dephasing, collective_rotation, sample_noise
from .statevector import MeasBasis, StateVector, measure_all


@dataclass(frozen=True)
class SessionConfig:
    """Parameters of one key-distribution session.

    ``n`` key quartets plus ``delta`` check quartets per basis are
    transmitted.  ``noise_split`` is the fraction of the per-quartet noise
    parameter applied before the adversary touches the channel (honest
    codewords are invariant either way).
    """

    n: int
    delta: int
    variant: Variant
    noise_policy: NoisePolicy = Fixed(0.0)
    abort_threshold: float = 0.01
    seed: int = 0
    noise_split: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.delta < 1:
            raise ValueError(f"delta must be >= 1, got {self.delta}")
        if not 0.0 <= self.abort_threshold <= 1.0:
            raise ValueError(f"abort_threshold must be in [0,1], got {self.abort_threshold}")
        if not 0.0 <= self.noise_split <= 1.0:
            raise ValueError(f"noise_split must be in [0,1], got {self.noise_split}")

    @property
    def total_quartets(self) -> int:
        return self.n + 2 * self.delta


@dataclass(frozen=True)
class AliceRecord:
    """Alice's secret choices: key bits and spatial-basis bits (0=N, 1=C)."""

    key_bits: str
    basis_bits: str


@dataclass(frozen=True)
class BobRecord:
    """Bob's check-position choices and all measurement outcomes."""

    check_positions_z: tuple[int, ...]
    check_positions_x: tuple[int, ...]
    outcomes: tuple[tuple[MeasBasis, str], ...]


@dataclass(frozen=True)
class SessionResult:
    observed_e_x: float
    observed_e_z: float
    observed_e_a: float
    aborted: bool
    alice_raw_key: str
    bob_raw_key: str
    inconsistent_count: int
    eve_stats: EveSummary | None
    transcript: tuple[dict, ...]


def spatial_from_bit(bit) -> SpatialBasis:
    return SpatialBasis.CROSSING if int(bit) else SpatialBasis.NEIGHBORING


def alice_prepare(
    cfg: SessionConfig, rand: np.random.Generator
) -> tuple[AliceRecord, list[StateVector]]:
    """Draw K and B uniformly and encode one codeword per position."""
    total = cfg.total_quartets
    k_bits = rand.integers(0, 2, size=total)
    b_bits = rand.integers(0, 2, size=total)
    quartets = [
        build_codeword(LogicalState(cfg.variant, spatial_from_bit(b), int(k)))
        for k, b in zip(k_bits, b_bits)
    ]
    record = AliceRecord(
        "".join(str(int(k)) for k in k_bits), "".join(str(int(b)) for b in b_bits)
    )
    return record, quartets


def _apply_channel(cfg: SessionConfig, state: StateVector, param: float) -> StateVector:
    if param == 0.0:
        return state
    photons = range(state.num_qubits)
    if cfg.variant is Variant.DEPHASING:
        return collective_dephasing(state, photons, param)
    return collective_rotation(state, photons, param)


def bob_measure(
    cfg: SessionConfig, quartets: list[StateVector], rand: np.random.Generator
) -> BobRecord:
    """Pick disjoint Z/X check sets of size delta; measure everything else in
    the variant's key basis."""
    total = cfg.total_quartets
    if len(quartets) != total:
        raise ValueError(f"expected {total} quartets, got {len(quartets)}")
    perm = rand.permutation(total)
    z_set = frozenset(int(i) for i in perm[: cfg.delta])
    x_set = frozenset(int(i) for i in perm[cfg.delta : 2 * cfg.delta])
    key_basis = cfg.variant.key_basis
    outcomes = []
    for i, q in enumerate(quartets):
        basis = MeasBasis.Z if i in z_set else MeasBasis.X if i in x_set else key_basis
        bits, _ = measure_all(q, basis, rand)
        outcomes.append((basis, bits))
    return BobRecord(tuple(sorted(z_set)), tuple(sorted(x_set)), tuple(outcomes))


def _revealed_state(cfg: SessionConfig, alice: AliceRecord, pos: int) -> LogicalState:
    return LogicalState(
        cfg.variant, spatial_from_bit(alice.basis_bits[pos]), int(alice.key_bits[pos])
    )


def run_check(
    alice: AliceRecord, bob: BobRecord, cfg: SessionConfig
) -> tuple[float, float, bool]:
    """Score both pairs of every check quartet against the revealed state."""

    def rate(positions, meas):
        fails = 0
        for pos in positions:
            basis, bits = bob.outcomes[pos]
            checks = check_consistency(_revealed_state(cfg, alice, pos), basis, bits)
            fails += (not checks.pair1_ok) + (not checks.pair2_ok)
        return fails / (2 * len(positions))

    e_z = rate(bob.check_positions_z, MeasBasis.Z)
    e_x = rate(bob.check_positions_x, MeasBasis.X)
    abort = (e_x + e_z) / 2 > cfg.abort_threshold
    return e_x, e_z, abort


def sift(
    alice: AliceRecord, bob: BobRecord, cfg: SessionConfig
) -> tuple[str, str, int]:
    """Decode key positions with the announced bases; drop inconsistent ones."""
    checks = set(bob.check_positions_z) | set(bob.check_positions_x)
    a_key: list[str] = []
    b_key: list[str] = []
    inconsistent = 0
    for pos in range(cfg.total_quartets):
        if pos in checks:
            continue
        _, bits = bob.outcomes[pos]
        bit = decode_key(cfg.variant, spatial_from_bit(alice.basis_bits[pos]), bits)
        if bit is None:
            inconsistent += 1
            continue
        a_key.append(alice.key_bits[pos])
        b_key.append(str(bit))
    return "".join(a_key), "".join(b_key), inconsistent


def run_session(cfg: SessionConfig, attack: AttackKind = NO_ATTACK) -> SessionResult:
    """Run steps S1-S6 with the adversary interposed on the quantum channel."""
    validate_attack(attack, cfg.variant)
    rand = np.random.default_rng(cfg.seed)
    alice, quartets = alice_prepare(cfg, rand)

    active = attack.kind != "none"
    records = {}
    transmitted = []
    for i, state in enumerate(quartets):
        param = sample_noise(cfg.noise_policy, rand)
        state = _apply_channel(cfg, state, param * cfg.noise_split)
        if active:
            state, records[i] = attack_quartet(attack, cfg.variant, state, rand)
        state = _apply_channel(cfg, state, param * (1.0 - cfg.noise_split))
        transmitted.append(state)

    bob = bob_measure(cfg, transmitted, rand)
    transcript = [
        {
            "kind": "check_positions",
            "z": list(bob.check_positions_z),
            "x": list(bob.check_positions_x),
        },
        {"kind": "check_state_reveal", "count": 2 * cfg.delta},
    ]
    e_x, e_z, abort = run_check(alice, bob, cfg)
    e_a = (e_x + e_z) / 2
    transcript.append(
        {"kind": "check_result", "e_x": e_x, "e_z": e_z, "e_a": e_a, "abort": abort}
    )
    if abort:
        return SessionResult(e_x, e_z, e_a, True, "", "", 0, None, tuple(transcript))

    transcript.append({"kind": "basis_announcement", "basis_bits": alice.basis_bits})
    a_key, b_key, inconsistent = sift(alice, bob, cfg)
    transcript.append({"kind": "post_processing", "applied": False})

    eve_stats = None
    if active:
        announced = [spatial_from_bit(b) for b in alice.basis_bits]
        eve_stats = eve_finalize(records, announced, alice.key_bits)
    return SessionResult(
        e_x, e_z, e_a, False, a_key, b_key, inconsistent, eve_stats, tuple(transcript)
    )
