"""Eavesdropper strategies acting quartet-by-quartet on the quantum channel.

Every strategy records what Eve learned and commits her key guesses as a
table indexed by the spatial basis *before* Alice announces it; finalization
later just looks the announcement up.  Attack identifiers:

  none     pass-through (no interception)
  mrp-*    measure all four photons in the X/Z product basis, resend the
           observed product eigenstate
  mre-*    measure in the product basis, resend a codeword drawn uniformly
           from those whose support contains the observed string
  bell     guess the pairing, Bell-measure both pairs; outcomes outside the
           variant's two-state alphabet expose a wrong guess (entanglement
           swapping), in which case Eve resends a codeword of the switched
           pairing; otherwise she resends the Bell pairs she measured
  cnot-*   extract the parity of two control photons onto an ancilla with
           two controlled flips along the X/Z direction, measure the
           ancilla, forward the four photons

Only the combinations with an analyzed error-rate row are allowed per
variant; anything else raises UnsupportedAttackError.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codewords import (
    LogicalState,
    SpatialBasis,
    Variant,
    all_codewords,
    basis_support,
    bell_product,
    build_codeword,
    decode_key,
)
from .statevector import (
    BellOutcome,
    MeasBasis,
    StateVector,
    _qubit_projections,
    _sample_index,
    apply_cnot,
    inner_product,
    measure_all,
    measure_bell_pair,
    product_eigenstate,
    tensor,
)

ATTACK_IDS = ("none", "mrp-x", "mrp-z", "mre-x", "mre-z", "bell", "cnot-x", "cnot-z")

SUPPORTED_ATTACKS = {
    Variant.DEPHASING: ("mrp-x", "mre-x", "bell", "cnot-x"),
    Variant.ROTATION: ("mrp-x", "mre-x", "mrp-z", "mre-z", "bell", "cnot-z"),
}

BELL_ALPHABET = {
    Variant.DEPHASING: frozenset({BellOutcome.PSI_PLUS, BellOutcome.PSI_MINUS}),
    Variant.ROTATION: frozenset({BellOutcome.PHI_PLUS, BellOutcome.PSI_MINUS}),
}


class UnsupportedAttackError(ValueError):
    """Attack/variant combination with no analyzed error-rate row."""


@dataclass(frozen=True)
class AttackKind:
    """Strategy selector with interception probability.

    ``cnot_controls`` are the photons whose parity the cnot-* strategies
    extract; the default (2, 3) targets photons 3 and 4, the alternative
    (1, 3) targets photons 2 and 4 (a crossing pair).
    """

    kind: str
    p: float = 1.0
    cnot_controls: tuple[int, int] = (2, 3)

    def __post_init__(self):
        if self.kind not in ATTACK_IDS:
            raise ValueError(f"unknown attack kind {self.kind!r}; choose from {ATTACK_IDS}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"interception probability must be in [0,1], got {self.p}")
        c = self.cnot_controls
        if len(c) != 2 or c[0] == c[1] or not all(0 <= q < 4 for q in c):
            raise ValueError(f"cnot_controls must be two distinct photons in 0..3, got {c}")

    @property
    def meas_basis(self) -> MeasBasis | None:
        if self.kind.endswith("-x"):
            return MeasBasis.X
        if self.kind.endswith("-z"):
            return MeasBasis.Z
        return None


NO_ATTACK = AttackKind("none")


@dataclass(frozen=True)
class EveRecord:
    """Eve's per-quartet notes and committed deferred guesses.

    ``guess_by_spatial`` maps each possible announced pairing to a key-bit
    guess; it is fully populated when the quartet is attacked, so finalizing
    never feeds information back into the attack.
    """

    intercepted: bool
    note: dict
    pre_guess: int | None
    guess_by_spatial: dict[SpatialBasis, int] | None


@dataclass(frozen=True)
class EveSummary:
    """Outcome of evaluating Eve's deferred guesses against the true key."""

    intercepted_count: int
    guessed_bits: dict[int, int]
    pre_accuracy: float | None
    post_accuracy: float | None


def validate_attack(attack: AttackKind, variant: Variant):
    if attack.kind != "none" and attack.kind not in SUPPORTED_ATTACKS[variant]:
        raise UnsupportedAttackError(
            f"attack {attack.kind!r} has no analyzed row for variant {variant.value}"
        )


def _coin(rand: np.random.Generator) -> int:
    return int(rand.integers(2))


def _guess_or_coin(bit: int | None, rand: np.random.Generator) -> int:
    return bit if bit is not None else _coin(rand)


def _measure_resend(attack, variant, s, rand, entangled: bool):
    basis = attack.meas_basis
    bits, collapsed = measure_all(s, basis, rand)
    note = {"strategy": attack.kind, "measured": bits}
    if entangled:
        cands = [ls for ls in all_codewords(variant) if bits in basis_support(ls, basis)]
        if cands:
            pick = cands[int(rand.integers(len(cands)))]
            resent = build_codeword(pick)
            note["resent"] = (pick.spatial.value, pick.key_bit)
        else:  # off-support string; fall back to the product eigenstate
            resent = collapsed
            note["resent"] = "product"
        by_spatial = {
            sp: next((ls.key_bit for ls in cands if ls.spatial is sp), None)
            for sp in SpatialBasis
        }
    else:
        resent = collapsed
        note["resent"] = "product"
        by_spatial = {sp: decode_key(variant, sp, bits) for sp in SpatialBasis}
    guesses = {sp: _guess_or_coin(b, rand) for sp, b in by_spatial.items()}
    gn, gc = by_spatial[SpatialBasis.NEIGHBORING], by_spatial[SpatialBasis.CROSSING]
    pre = gn if gn == gc and gn is not None else None
    return resent, EveRecord(True, note, _guess_or_coin(pre, rand), guesses)


def joint_bell_probability(
    state: StateVector, spatial: SpatialBasis, o1: BellOutcome, o2: BellOutcome
) -> float:
    """Probability of the joint Bell outcome when measuring both pairs of a pairing."""
    return abs(inner_product(bell_product(o1, o2, spatial), state)) ** 2


def _bell_resend(attack, variant, s, rand):
    guess = SpatialBasis.NEIGHBORING if rand.integers(2) == 0 else SpatialBasis.CROSSING
    pair1, pair2 = guess.pairs
    o1, s1 = measure_bell_pair(s, *pair1, rand)
    o2, _ = measure_bell_pair(s1, *pair2, rand)
    alphabet = BELL_ALPHABET[variant]
    detected = o1 not in alphabet or o2 not in alphabet
    note = {
        "strategy": "bell",
        "guessed_pairing": guess.value,
        "outcomes": (o1.value, o2.value),
        "detected_wrong_pairing": detected,
    }
    if not detected:
        resent = bell_product(o1, o2, guess)
        dec = 0 if o1 in (BellOutcome.PSI_PLUS, BellOutcome.PHI_PLUS) else 1
        guesses = {guess: dec, guess.other: _coin(rand)}
        return resent, EveRecord(True, note, dec, guesses)
    switched = guess.other
    cands = [
        b
        for b in (0, 1)
        if joint_bell_probability(
            build_codeword(LogicalState(variant, switched, b)), guess, o1, o2
        )
        > 1e-12
    ]
    bit = cands[0] if len(cands) == 1 else _coin(rand)
    note["resent"] = (switched.value, bit)
    resent = build_codeword(LogicalState(variant, switched, bit))
    guesses = {switched: bit, guess: _coin(rand)}
    return resent, EveRecord(True, note, bit, guesses)


def _detach_last_qubit(s: StateVector, basis: MeasBasis, bit: int) -> StateVector:
    eig = product_eigenstate(1, str(bit), basis).amplitudes
    rest = s.amplitudes.reshape(-1, 2) @ eig.conj()
    return StateVector(s.num_qubits - 1, rest)


def _cnot_pipeline(attack, s):
    """Ancilla outcome distribution and both forwarded 4-photon branches.

    Physically: adjoin the ancilla, run both controlled flips, project on the
    ancilla.  Memoized on the input state, which the sampling loop sees over
    and over for the handful of distinct transmitted states.
    """
    direction = attack.meas_basis
    ancilla = product_eigenstate(1, "0", direction)  # |+> for X, |0> for Z
    work = tensor(s, ancilla)
    for control in attack.cnot_controls:
        work = apply_cnot(work, control, 4, direction)
    probs, branches = _qubit_projections(work, 4, direction)
    forwarded = tuple(
        None if b is None else _detach_last_qubit(b, direction, bit)
        for bit, b in enumerate(branches)
    )
    return probs, forwarded


def _cnot_parity(attack, variant, s, rand):
    direction = attack.meas_basis
    memo = s._memo()
    key = ("cnot", direction, attack.cnot_controls)
    cached = memo.get(key)
    if cached is None:
        cached = _cnot_pipeline(attack, s)
        memo[key] = cached
    probs, forwarded = cached
    parity_bit = _sample_index(probs, rand)
    note = {
        "strategy": attack.kind,
        "controls": attack.cnot_controls,
        "ancilla_outcome": parity_bit,
    }
    controls = tuple(sorted(attack.cnot_controls))
    guesses = {
        sp: (parity_bit if controls in sp.pairs else _coin(rand)) for sp in SpatialBasis
    }
    return forwarded[parity_bit], EveRecord(True, note, parity_bit, guesses)


def attack_quartet(
    attack: AttackKind, variant: Variant, s: StateVector, rand: np.random.Generator
) -> tuple[StateVector, EveRecord]:
    """Apply one attack to one transmitted quartet.

    Interception happens with probability ``attack.p``; a skipped quartet is
    forwarded untouched with an ``intercepted=False`` record.
    """
    validate_attack(attack, variant)
    if attack.kind == "none":
        return s, EveRecord(False, {}, None, None)
    if attack.p < 1.0 and rand.random() >= attack.p:
        return s, EveRecord(False, {"strategy": attack.kind}, None, None)
    if attack.kind in ("mrp-x", "mrp-z"):
        return _measure_resend(attack, variant, s, rand, entangled=False)
    if attack.kind in ("mre-x", "mre-z"):
        return _measure_resend(attack, variant, s, rand, entangled=True)
    if attack.kind == "bell":
        return _bell_resend(attack, variant, s, rand)
    return _cnot_parity(attack, variant, s, rand)


def eve_finalize(
    records: dict[int, EveRecord], announced: list[SpatialBasis], true_key_bits: str
) -> EveSummary:
    """Evaluate Eve's committed guesses once the spatial bases are public."""
    guessed: dict[int, int] = {}
    pre_hits = post_hits = 0
    intercepted = 0
    for pos, rec in sorted(records.items()):
        if not rec.intercepted:
            continue
        intercepted += 1
        guess = rec.guess_by_spatial[announced[pos]]
        guessed[pos] = guess
        truth = int(true_key_bits[pos])
        post_hits += guess == truth
        pre_hits += rec.pre_guess == truth
    if intercepted == 0:
        return EveSummary(0, {}, None, None)
    return EveSummary(intercepted, guessed, pre_hits / intercepted, post_hits / intercepted)
