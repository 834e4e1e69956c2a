import numpy as np
import pytest

from dfsqkd.statevector import (
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
    product_eigenstate,
    product_probabilities,
    tensor,
)
from dfsqkd.codewords import LogicalState, SpatialBasis, Variant, build_codeword

# ---------------------------------------------------------------------------
# independent reference constructions (raw numpy, no engine code)

_K0 = np.array([1, 0], dtype=complex)
_K1 = np.array([0, 1], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_PSI_PLUS = (np.kron(_K0, _K1) + np.kron(_K1, _K0)) / np.sqrt(2)


def _ref_x_probs(amps: np.ndarray) -> np.ndarray:
    n = int(np.log2(len(amps)))
    h = np.array([[1.0]], dtype=complex)
    for _ in range(n):
        h = np.kron(h, _H)
    return np.abs(h @ amps) ** 2


def _random_state(rng, n) -> StateVector:
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return StateVector(n, v / np.linalg.norm(v))


def _random_unitary(rng) -> np.ndarray:
    m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(m)
    return q * (np.diag(r) / np.abs(np.diag(r)))


class TestBasisState:
    def test_two_qubit(self):
        s = basis_state(2, "01")
        np.testing.assert_allclose(s.amplitudes, [0, 1, 0, 0])

    def test_four_qubit_origin(self):
        s = basis_state(4, "0000")
        assert s.amplitudes[0] == 1 and np.count_nonzero(s.amplitudes) == 1

    def test_single(self):
        np.testing.assert_allclose(basis_state(1, "1").amplitudes, [0, 1])

    @pytest.mark.parametrize("n", [0, 6, -1])
    def test_rejects_bad_size(self, n):
        with pytest.raises(ValueError):
            basis_state(n, "0" * max(n, 1))

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError):
            basis_state(2, "011")


class TestTensor:
    def test_basis_concatenation(self):
        s = tensor(basis_state(1, "0"), basis_state(1, "1"))
        np.testing.assert_allclose(s.amplitudes, basis_state(2, "01").amplitudes)

    def test_bell_pair_product_expansion(self):
        # reference: plain kron of the literal pair amplitudes
        ref = np.kron(_PSI_PLUS, _PSI_PLUS)
        got = tensor(bell_state(BellOutcome.PSI_PLUS), bell_state(BellOutcome.PSI_PLUS))
        np.testing.assert_allclose(got.amplitudes, ref, atol=1e-15)
        # four equal amplitudes of 1/2 on 0101, 0110, 1001, 1010
        nz = {i: a for i, a in enumerate(got.amplitudes) if abs(a) > 1e-12}
        assert set(nz) == {0b0101, 0b0110, 0b1001, 0b1010}
        np.testing.assert_allclose(list(nz.values()), [0.5] * 4)

    def test_norm_multiplicative(self):
        rng = np.random.default_rng(3)
        s = _random_state(rng, 3)
        assert abs(tensor(s, basis_state(1, "0")).norm() - 1.0) < 1e-12

    def test_rejects_too_many_qubits(self):
        with pytest.raises(ValueError):
            tensor(_random_state(np.random.default_rng(0), 3), _random_state(np.random.default_rng(1), 3))


class TestSingleQubit:
    def test_identity(self):
        rng = np.random.default_rng(5)
        s = _random_state(rng, 4)
        out = apply_single_qubit(s, 2, np.eye(2))
        np.testing.assert_allclose(out.amplitudes, s.amplitudes, atol=1e-15)

    def test_quarter_turn_flips_zero(self):
        u = np.array([[0, -1], [1, 0]], dtype=complex)  # rotation by pi/2
        out = apply_single_qubit(basis_state(1, "0"), 0, u)
        np.testing.assert_allclose(out.amplitudes, [0, 1], atol=1e-15)

    def test_phase_on_both_qubits_is_global(self):
        phi = 0.7
        u = np.diag([1, np.exp(1j * phi)])
        s = bell_state(BellOutcome.PSI_PLUS)
        out = apply_single_qubit(apply_single_qubit(s, 0, u), 1, u)
        assert abs(fidelity(out, s) - 1.0) < 1e-12
        assert abs(inner_product(s, out) - np.exp(1j * phi)) < 1e-12

    def test_rejects_non_unitary(self):
        with pytest.raises(ValueError):
            apply_single_qubit(basis_state(1, "0"), 0, np.array([[1, 0], [0, 2.0]]))

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            apply_single_qubit(basis_state(2, "00"), 2, np.eye(2))


class TestCnot:
    def test_z_truth_table(self):
        out = apply_cnot(basis_state(2, "10"), 0, 1)
        np.testing.assert_allclose(out.amplitudes, basis_state(2, "11").amplitudes)

    def test_x_truth_table(self):
        # control |->, target |+> -> |->; bits: "1"=minus
        s = product_eigenstate(2, "10", MeasBasis.X)
        out = apply_cnot(s, 0, 1, MeasBasis.X)
        np.testing.assert_allclose(
            out.amplitudes, product_eigenstate(2, "11", MeasBasis.X).amplitudes, atol=1e-15
        )

    def test_x_cnot_is_hadamard_conjugated(self):
        rng = np.random.default_rng(11)
        s = _random_state(rng, 2)
        via_x = apply_cnot(s, 0, 1, MeasBasis.X)
        byhand = s
        for q in (0, 1):
            byhand = apply_single_qubit(byhand, q, _H)
        byhand = apply_cnot(byhand, 0, 1, MeasBasis.Z)
        for q in (0, 1):
            byhand = apply_single_qubit(byhand, q, _H)
        np.testing.assert_allclose(via_x.amplitudes, byhand.amplitudes, atol=1e-12)

    def test_x_parity_extraction_leaves_codeword_alone(self):
        # photons 3,4 of the neighboring bit-0 dephasing state are X-parallel,
        # so controlled flips from them never touch a |+> ancilla
        cw = build_codeword(LogicalState(Variant.DEPHASING, SpatialBasis.NEIGHBORING, 0))
        s = tensor(cw, product_eigenstate(1, "0", MeasBasis.X))
        out = apply_cnot(apply_cnot(s, 2, 4, MeasBasis.X), 3, 4, MeasBasis.X)
        assert abs(fidelity(out, s) - 1.0) < 1e-12

    def test_rejects_equal_wires(self):
        with pytest.raises(ValueError):
            apply_cnot(basis_state(2, "00"), 1, 1)


class TestMeasureAll:
    def test_deterministic_basis_state(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            bits, collapsed = measure_all(basis_state(2, "01"), MeasBasis.Z, rng)
            assert bits == "01"
            np.testing.assert_allclose(collapsed.amplitudes, basis_state(2, "01").amplitudes)

    def test_x_distribution_of_neighboring_codeword(self):
        cw = build_codeword(LogicalState(Variant.DEPHASING, SpatialBasis.NEIGHBORING, 0))
        ref = _ref_x_probs(cw.amplitudes)
        np.testing.assert_allclose(product_probabilities(cw, MeasBasis.X), ref, atol=1e-12)
        expect = {"0000": 0.25, "1111": 0.25, "0011": 0.25, "1100": 0.25}
        got = {format(i, "04b"): p for i, p in enumerate(ref) if p > 1e-12}
        assert got.keys() == expect.keys()
        np.testing.assert_allclose(sorted(got.values()), sorted(expect.values()), atol=1e-12)
        # sampled frequencies agree
        rng = np.random.default_rng(7)
        counts = {k: 0 for k in expect}
        n = 8000
        for _ in range(n):
            bits, _ = measure_all(cw, MeasBasis.X, rng)
            counts[bits] += 1
        sigma = np.sqrt(0.25 * 0.75 / n)
        for k in expect:
            assert abs(counts[k] / n - 0.25) < 3 * sigma

    def test_z_distribution_of_rotation_codeword(self):
        cw = build_codeword(LogicalState(Variant.ROTATION, SpatialBasis.NEIGHBORING, 0))
        probs = product_probabilities(cw, MeasBasis.Z)
        got = {format(i, "04b"): p for i, p in enumerate(probs) if p > 1e-12}
        assert got.keys() == {"0000", "1111", "0011", "1100"}
        np.testing.assert_allclose(list(got.values()), [0.25] * 4, atol=1e-12)

    def test_collapsed_is_product_eigenstate(self):
        rng = np.random.default_rng(13)
        s = _random_state(rng, 3)
        bits, collapsed = measure_all(s, MeasBasis.X, rng)
        np.testing.assert_allclose(
            collapsed.amplitudes, product_eigenstate(3, bits, MeasBasis.X).amplitudes
        )


class TestMeasureQubit:
    def test_collapse_and_bit(self):
        rng = np.random.default_rng(2)
        bit, collapsed = measure_qubit(basis_state(2, "10"), 0, MeasBasis.Z, rng)
        assert bit == 1
        np.testing.assert_allclose(collapsed.amplitudes, basis_state(2, "10").amplitudes)

    def test_x_measurement_of_plus(self):
        rng = np.random.default_rng(2)
        s = product_eigenstate(2, "01", MeasBasis.X)
        bit, collapsed = measure_qubit(s, 1, MeasBasis.X, rng)
        assert bit == 1
        np.testing.assert_allclose(collapsed.amplitudes, s.amplitudes, atol=1e-12)

    def test_statistics(self):
        rng = np.random.default_rng(21)
        s = StateVector(1, np.array([np.sqrt(0.3), np.sqrt(0.7)], dtype=complex))
        hits = sum(measure_qubit(s, 0, MeasBasis.Z, rng)[0] for _ in range(5000))
        assert abs(hits / 5000 - 0.7) < 3 * np.sqrt(0.3 * 0.7 / 5000)


class TestBellMeasurement:
    def test_bell_pair_is_deterministic(self):
        rng = np.random.default_rng(4)
        outcome, collapsed = measure_bell_pair(bell_state(BellOutcome.PSI_PLUS), 0, 1, rng)
        assert outcome is BellOutcome.PSI_PLUS
        assert abs(fidelity(collapsed, bell_state(BellOutcome.PSI_PLUS)) - 1) < 1e-12

    def test_neighboring_pair_of_neighboring_codeword(self):
        cw = build_codeword(LogicalState(Variant.DEPHASING, SpatialBasis.NEIGHBORING, 0))
        probs = bell_pair_probabilities(cw, 0, 1)
        np.testing.assert_allclose(probs, [0, 0, 1, 0], atol=1e-12)  # psi+ certain

    def test_swapping_joint_distribution(self):
        # crossing bit-0 state measured on neighboring pairs: the four joint
        # outcomes are the perfectly correlated pairs, each with weight 1/4
        cw = build_codeword(LogicalState(Variant.DEPHASING, SpatialBasis.CROSSING, 0))
        first = bell_pair_probabilities(cw, 0, 1)
        np.testing.assert_allclose(first, [0.25] * 4, atol=1e-12)
        rng = np.random.default_rng(9)
        joint = {}
        for _ in range(4000):
            o1, mid = measure_bell_pair(cw, 0, 1, rng)
            o2, _ = measure_bell_pair(mid, 2, 3, rng)
            joint[(o1, o2)] = joint.get((o1, o2), 0) + 1
        assert set(joint) == {(o, o) for o in BellOutcome}
        sigma = np.sqrt(0.25 * 0.75 / 4000)
        for count in joint.values():
            assert abs(count / 4000 - 0.25) < 3 * sigma

    def test_rejects_equal_indices(self):
        with pytest.raises(ValueError):
            measure_bell_pair(basis_state(2, "00"), 0, 0, np.random.default_rng(0))


class TestInnerProduct:
    def test_orthogonal_codewords(self):
        a = build_codeword(LogicalState(Variant.DEPHASING, SpatialBasis.NEIGHBORING, 0))
        b = build_codeword(LogicalState(Variant.DEPHASING, SpatialBasis.NEIGHBORING, 1))
        assert abs(inner_product(a, b)) < 1e-12

    def test_cross_pairing_overlap_is_half(self):
        for bit in (0, 1):
            a = build_codeword(LogicalState(Variant.DEPHASING, SpatialBasis.CROSSING, bit))
            b = build_codeword(LogicalState(Variant.DEPHASING, SpatialBasis.NEIGHBORING, bit))
            assert abs(inner_product(a, b) - 0.5) < 1e-12

    def test_self_overlap(self):
        s = bell_state(BellOutcome.PSI_PLUS)
        assert abs(inner_product(s, s) - 1.0) < 1e-12

    def test_conjugate_linear_in_first_argument(self):
        rng = np.random.default_rng(17)
        a, b = _random_state(rng, 2), _random_state(rng, 2)
        phase = np.exp(0.37j)
        a_shifted = StateVector(2, phase * a.amplitudes)
        assert abs(inner_product(a_shifted, b) - np.conj(phase) * inner_product(a, b)) < 1e-12
        assert abs(inner_product(a, b) - np.conj(inner_product(b, a))) < 1e-12

    def test_rejects_dimension_mismatch(self):
        with pytest.raises(ValueError):
            inner_product(basis_state(1, "0"), basis_state(2, "00"))


class TestInvariants:
    def test_norm_preserved_by_unitaries(self):
        rng = np.random.default_rng(100)
        for _ in range(20):
            n = int(rng.integers(1, 6))
            s = _random_state(rng, n)
            s = apply_single_qubit(s, int(rng.integers(n)), _random_unitary(rng))
            if n >= 2:
                q = rng.choice(n, size=2, replace=False)
                s = apply_cnot(s, int(q[0]), int(q[1]), MeasBasis.X)
            assert abs(s.norm() - 1.0) < 1e-12

    def test_measurement_completeness(self):
        rng = np.random.default_rng(200)
        for _ in range(10):
            s = _random_state(rng, 4)
            for basis in MeasBasis:
                assert abs(product_probabilities(s, basis).sum() - 1) < 1e-12
            assert abs(bell_pair_probabilities(s, 1, 3).sum() - 1) < 1e-12

    def test_sampling_determinism(self):
        s = build_codeword(LogicalState(Variant.ROTATION, SpatialBasis.CROSSING, 1))
        seq1 = [measure_all(s, MeasBasis.Z, np.random.default_rng(42))[0] for _ in range(1)]
        runs = []
        for _ in range(2):
            rng = np.random.default_rng(42)
            runs.append(
                [measure_all(s, b, rng)[0] for b in (MeasBasis.Z, MeasBasis.X) for _ in range(50)]
            )
        assert runs[0] == runs[1]
        assert seq1[0] == runs[0][0]

    def test_bell_projectors_resolve_identity(self):
        rng = np.random.default_rng(300)
        for _ in range(20):
            n = int(rng.integers(2, 6))
            s = _random_state(rng, n)
            q = rng.choice(n, size=2, replace=False)
            total = sum(
                bell_projection(s, int(q[0]), int(q[1]), o).amplitudes for o in BellOutcome
            )
            assert np.max(np.abs(total - s.amplitudes)) < 1e-12

    def test_rejects_nonfinite_amplitudes(self):
        with pytest.raises(ValueError):
            StateVector(1, np.array([np.nan, 0.0]))
        with pytest.raises(ValueError):
            StateVector(1, np.array([np.inf, 0.0]))
