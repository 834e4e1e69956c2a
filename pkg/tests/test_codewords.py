import numpy as np
import pytest

from dfsqkd.codewords import (
    ComponentTerm,
    LogicalState,
    SpatialBasis,
    Variant,
    all_codewords,
    basis_support,
    bell_product,
    build_codeword,
    check_consistency,
    component_state,
    decode_key,
    logical_basis_states,
    overlap_table,
    pair_block_product,
)
from dfsqkd.statevector import (
    BellOutcome,
    MeasBasis,
    bell_state,
    inner_product,
    measure_all,
    tensor,
)

N, C = SpatialBasis.NEIGHBORING, SpatialBasis.CROSSING
DP, RT = Variant.DEPHASING, Variant.ROTATION
A, B, Cc, D, E, F, G, H = ComponentTerm


def comp(term):
    return component_state(term).amplitudes


class TestConstruction:
    def test_neighboring_is_plain_tensor(self):
        got = build_codeword(LogicalState(DP, N, 0))
        ref = tensor(bell_state(BellOutcome.PSI_PLUS), bell_state(BellOutcome.PSI_PLUS))
        np.testing.assert_allclose(got.amplitudes, ref.amplitudes, atol=1e-15)

    def test_crossing_places_pairs_on_1_3_and_2_4(self):
        # independent reference: kron in pair order, then swap photons 2 and 3
        psi_m = bell_state(BellOutcome.PSI_MINUS).amplitudes
        ref = np.kron(psi_m, psi_m).reshape([2] * 4).transpose(0, 2, 1, 3).reshape(-1)
        got = build_codeword(LogicalState(DP, C, 1))
        np.testing.assert_allclose(got.amplitudes, ref, atol=1e-15)

    def test_all_normalized_dyadic(self):
        for v in Variant:
            for ls in all_codewords(v):
                amps = build_codeword(ls).amplitudes
                assert abs(np.linalg.norm(amps) - 1) < 1e-15
                nonzero = amps[np.abs(amps) > 0]
                np.testing.assert_allclose(np.abs(nonzero), 0.5)

    def test_component_norms_are_half(self):
        for term in ComponentTerm:
            assert abs(np.vdot(comp(term), comp(term)).real - 0.5) < 1e-15


class TestDecompositionIdentities:
    """Amplitude-wise identities between codewords and the a..h constants.

    With |+-> = (|0> +- |1>)/sqrt(2) the x-basis expansion of psi+ is
    (|++> - |-->)/sqrt(2), so the two bit-0 dephasing states carry a relative
    minus sign between their components (a-b and a-c); the remaining six
    identities have the signs of the bit-1 and rotation forms.
    """

    CASES = [
        (LogicalState(DP, N, 0), A, -1, B),
        (LogicalState(DP, N, 1), Cc, -1, D),
        (LogicalState(DP, C, 0), A, -1, Cc),
        (LogicalState(DP, C, 1), B, -1, D),
        (LogicalState(RT, N, 0), E, +1, F),
        (LogicalState(RT, N, 1), G, -1, H),
        (LogicalState(RT, C, 0), E, +1, G),
        (LogicalState(RT, C, 1), F, -1, H),
    ]

    @pytest.mark.parametrize("ls,t1,sign,t2", CASES)
    def test_identity(self, ls, t1, sign, t2):
        np.testing.assert_allclose(
            build_codeword(ls).amplitudes, comp(t1) + sign * comp(t2), atol=1e-12
        )

    def test_x_components_have_quarter_amplitudes(self):
        for term in (A, B, Cc, D):
            nonzero = comp(term)[np.abs(comp(term)) > 0]
            np.testing.assert_allclose(np.abs(nonzero), 0.25)


class TestLogicalBasis:
    def test_dephasing_blocks(self):
        zero, one = logical_basis_states(DP)
        np.testing.assert_allclose(zero.amplitudes, [0, 1, 0, 0])
        np.testing.assert_allclose(one.amplitudes, [0, 0, 1, 0])

    def test_rotation_blocks(self):
        zero, one = logical_basis_states(RT)
        np.testing.assert_allclose(zero.amplitudes, bell_state(BellOutcome.PHI_PLUS).amplitudes)
        np.testing.assert_allclose(one.amplitudes, bell_state(BellOutcome.PSI_MINUS).amplitudes)

    @pytest.mark.parametrize("variant", list(Variant))
    def test_orthonormal(self, variant):
        zero, one = logical_basis_states(variant)
        assert abs(inner_product(zero, zero) - 1) < 1e-12
        assert abs(inner_product(one, one) - 1) < 1e-12
        assert abs(inner_product(zero, one)) < 1e-12


class TestDecode:
    # outcome strings use "0" for + and "1" for - when read in the X basis
    @pytest.mark.parametrize(
        "variant,spatial,outcome,expected",
        [
            (DP, N, "0011", 0),   # ++-- : both neighboring pairs parallel
            (RT, N, "0101", 1),   # both neighboring pairs antiparallel
            (DP, N, "0001", None),  # +++- : pairs disagree
            (DP, C, "0011", 1),   # crossing pairs antiparallel
            (RT, C, "0101", 0),
        ],
    )
    def test_examples(self, variant, spatial, outcome, expected):
        assert decode_key(variant, spatial, outcome) == expected

    def test_rejects_wrong_length(self):
        with pytest.raises(ValueError):
            decode_key(DP, N, "001")

    @pytest.mark.parametrize("variant", list(Variant))
    def test_round_trip(self, variant):
        rng = np.random.default_rng(31)
        basis = variant.key_basis
        for ls in all_codewords(variant):
            cw = build_codeword(ls)
            for _ in range(10_000):
                bits, _ = measure_all(cw, basis, rng)
                assert decode_key(variant, ls.spatial, bits) == ls.key_bit


class TestChecks:
    @pytest.mark.parametrize(
        "ls,basis,outcome,expected",
        [
            (LogicalState(DP, N, 0), MeasBasis.Z, "0110", (True, True)),
            (LogicalState(DP, N, 0), MeasBasis.X, "0101", (False, False)),
            (LogicalState(RT, C, 0), MeasBasis.X, "0000", (True, True)),
            (LogicalState(DP, N, 1), MeasBasis.X, "0101", (True, True)),
            (LogicalState(DP, C, 0), MeasBasis.Z, "0011", (True, True)),
            (LogicalState(RT, N, 1), MeasBasis.Z, "0110", (True, True)),
            (LogicalState(RT, N, 1), MeasBasis.Z, "0011", (False, False)),
        ],
    )
    def test_examples(self, ls, basis, outcome, expected):
        assert tuple(check_consistency(ls, basis, outcome)) == expected

    @pytest.mark.parametrize("variant", list(Variant))
    @pytest.mark.parametrize("basis", list(MeasBasis))
    def test_honest_measurements_always_pass(self, variant, basis):
        rng = np.random.default_rng(97)
        for ls in all_codewords(variant):
            cw = build_codeword(ls)
            for _ in range(10_000):
                bits, _ = measure_all(cw, basis, rng)
                assert check_consistency(ls, basis, bits) == (True, True)


class TestSupports:
    def test_supports_are_disjoint_four_string_sets(self):
        for variant in Variant:
            basis = variant.key_basis
            for spatial in SpatialBasis:
                s0 = basis_support(LogicalState(variant, spatial, 0), basis)
                s1 = basis_support(LogicalState(variant, spatial, 1), basis)
                assert len(s0) == len(s1) == 4
                assert not (s0 & s1)

    def test_every_string_belongs_to_one_codeword_per_pairing(self):
        for variant in Variant:
            basis = variant.key_basis
            union = set()
            for ls in all_codewords(variant):
                union |= basis_support(ls, basis)
            assert len(union) == 16


class TestOverlaps:
    @pytest.mark.parametrize("variant", list(Variant))
    def test_structure(self, variant):
        table = overlap_table(variant)
        np.testing.assert_allclose(np.diag(table), 1.0, atol=1e-12)
        # order: (N,0), (N,1), (C,0), (C,1)
        assert abs(table[0, 1]) < 1e-12 and abs(table[2, 3]) < 1e-12
        for i, j in ((0, 2), (1, 3)):
            assert abs(table[i, j] - 0.5) < 1e-12
        np.testing.assert_allclose(table, table.T, atol=1e-12)


class TestBellProduct:
    def test_matches_block_placement(self):
        got = bell_product(BellOutcome.PHI_MINUS, BellOutcome.PSI_PLUS, C)
        ref = pair_block_product(
            bell_state(BellOutcome.PHI_MINUS), bell_state(BellOutcome.PSI_PLUS), C
        )
        np.testing.assert_allclose(got.amplitudes, ref.amplitudes)

    def test_codewords_are_bell_products(self):
        for variant in Variant:
            for ls in all_codewords(variant):
                block = (
                    BellOutcome.PSI_MINUS
                    if ls.key_bit == 1
                    else (BellOutcome.PSI_PLUS if variant is DP else BellOutcome.PHI_PLUS)
                )
                np.testing.assert_allclose(
                    build_codeword(ls).amplitudes,
                    bell_product(block, block, ls.spatial).amplitudes,
                    atol=1e-15,
                )


def test_logical_state_rejects_bad_bit():
    with pytest.raises(ValueError):
        LogicalState(DP, N, 2)
