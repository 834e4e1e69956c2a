"""Simulator and analysis toolkit for two DFS-encoded QKD protocols.

Four-photon codewords built from identical Bell pairs ride out collective
dephasing or collective rotation untouched; the photon pairing (neighboring
vs crossing) acts as the secret preparation basis, so no sifted instance is
lost to basis mismatch.  The package provides the exact small-qubit
statevector engine, the codeword algebra, the Alice/Bob session pipeline,
the analyzed eavesdropping strategies, and an exact oracle that reproduces
the published attack error-rate tables.
"""

from .adversary import (
    ATTACK_IDS,
    NO_ATTACK,
    SUPPORTED_ATTACKS,
    AttackKind,
    EveRecord,
    EveSummary,
    UnsupportedAttackError,
    attack_quartet,
    eve_finalize,
)
from .codewords import (
    ComponentTerm,
    LogicalState,
    PairChecks,
    SpatialBasis,
    Variant,
    all_codewords,
    basis_support,
    build_codeword,
    check_consistency,
    component_state,
    decode_key,
    logical_basis_states,
    overlap_table,
)
from .noise import (
    Fixed,
    NoisePolicy,
    UniformPerQuartet,
    collective_dephasing,
    collective_rotation,
    sample_noise,
)
from .oracle import (
    AttackReport,
    ErrorRates,
    McErrorRates,
    attack_report,
    eve_information,
    exact_error_rates,
    mc_error_rates,
    table_rows,
)
from .protocol import (
    AliceRecord,
    BobRecord,
    SessionConfig,
    SessionResult,
    alice_prepare,
    bob_measure,
    run_check,
    run_session,
    sift,
)
from .statevector import (
    BellOutcome,
    MeasBasis,
    StateVector,
    apply_cnot,
    apply_single_qubit,
    basis_state,
    bell_pair_probabilities,
    bell_projection,
    bell_state,
    fidelity,
    inner_product,
    measure_all,
    measure_bell_pair,
    measure_qubit,
    tensor,
)

__version__ = "0.1.0"
