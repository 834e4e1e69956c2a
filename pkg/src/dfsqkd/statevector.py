"""Dense statevector engine for up to five qubits.

Qubit 0 is the most significant bit of the basis index, so the basis label
"0110" reads left to right as qubits 0..3 (photon order = bit order).  All
operations are pure: they return new values and never mutate their inputs.
Measurement outcomes are sampled by inverse CDF from a single uniform draw,
so a fixed ``numpy.random.Generator`` seed reproduces a run exactly.

In the X basis the outcome character "0" stands for |+> and "1" for |->.

Dimensions are tiny (<= 32 amplitudes), so gates and measurements go
through cached full-size matrices and index permutations rather than
axis-shuffling, which keeps the per-call numpy overhead low in the Monte
Carlo hot loops.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from math import isfinite

import numpy as np

MAX_QUBITS = 5
NORM_TOL = 1e-12
UNITARY_TOL = 1e-10

_SQRT1_2 = 1.0 / np.sqrt(2.0)
_HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) * _SQRT1_2


class MeasBasis(Enum):
    """Single-particle product measurement basis."""

    Z = "Z"
    X = "X"


class BellOutcome(Enum):
    """The four Bell states of a qubit pair."""

    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"
    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitudes over the computational basis of ``num_qubits`` qubits.

    Amplitudes must be finite; they need not be normalized (intermediate
    constants such as projections may carry norm < 1), but every public
    operation that transforms a normalized state preserves its norm to
    within 1e-12.  Compare states with ``fidelity`` or on ``amplitudes``,
    not ``==``.
    """

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise ValueError(f"num_qubits must be in 1..{MAX_QUBITS}, got {self.num_qubits}")
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (2**self.num_qubits,):
            raise ValueError(
                f"expected {2**self.num_qubits} amplitudes, got shape {amps.shape}"
            )
        if not isfinite(abs(complex(np.vdot(amps, amps)))):
            raise ValueError("amplitudes must be finite")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amplitudes, self.amplitudes).real))

    def _require_normalized(self):
        if abs(self.norm() - 1.0) > 1e-9:
            raise ValueError(f"state is not normalized (norm {self.norm()})")

    def _memo(self) -> dict:
        # lazily attached cache for derived values (CDFs, collapse branches);
        # sound because amplitudes are immutable
        m = self.__dict__.get("_memo_cache")
        if m is None:
            m = {}
            object.__setattr__(self, "_memo_cache", m)
        return m


def _wrap(num_qubits: int, amps: np.ndarray) -> StateVector:
    """Internal constructor for freshly computed, owned complex arrays."""
    s = object.__new__(StateVector)
    amps.flags.writeable = False
    object.__setattr__(s, "num_qubits", num_qubits)
    object.__setattr__(s, "amplitudes", amps)
    return s


def basis_state(num_qubits: int, bits: str) -> StateVector:
    """Computational basis state |bits>, qubit 0 first."""
    if len(bits) != num_qubits:
        raise ValueError(f"bits {bits!r} does not match num_qubits={num_qubits}")
    if not 1 <= num_qubits <= MAX_QUBITS:
        raise ValueError(f"num_qubits must be in 1..{MAX_QUBITS}, got {num_qubits}")
    amps = np.zeros(2**num_qubits, dtype=complex)
    amps[int(bits, 2)] = 1.0
    return _wrap(num_qubits, amps)


@lru_cache(maxsize=None)
def bell_state(outcome: BellOutcome) -> StateVector:
    """Two-qubit Bell state constant."""
    a, b = {
        BellOutcome.PHI_PLUS: ("00", "11"),
        BellOutcome.PHI_MINUS: ("00", "11"),
        BellOutcome.PSI_PLUS: ("01", "10"),
        BellOutcome.PSI_MINUS: ("01", "10"),
    }[outcome]
    sign = -1.0 if outcome in (BellOutcome.PHI_MINUS, BellOutcome.PSI_MINUS) else 1.0
    amps = np.zeros(4, dtype=complex)
    amps[int(a, 2)] = _SQRT1_2
    amps[int(b, 2)] = sign * _SQRT1_2
    return _wrap(2, amps)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Kronecker product; qubits of ``a`` come first (most significant)."""
    n = a.num_qubits + b.num_qubits
    if n > MAX_QUBITS:
        raise ValueError(f"combined qubit count {n} exceeds {MAX_QUBITS}")
    return _wrap(n, np.multiply.outer(a.amplitudes, b.amplitudes).reshape(-1))


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b>, conjugate-linear in the first argument."""
    if a.num_qubits != b.num_qubits:
        raise ValueError("qubit counts differ")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>| — insensitive to global phase."""
    return abs(inner_product(a, b))


def _check_index(s: StateVector, q: int):
    if not 0 <= q < s.num_qubits:
        raise ValueError(f"qubit index {q} out of range for {s.num_qubits} qubits")


def apply_single_qubit(s: StateVector, q: int, u: np.ndarray) -> StateVector:
    """Apply a 2x2 unitary to qubit ``q``."""
    _check_index(s, q)
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {u.shape}")
    if np.max(np.abs(u @ u.conj().T - np.eye(2))) > UNITARY_TOL:
        raise ValueError("matrix is not unitary")
    n = s.num_qubits
    t = s.amplitudes.reshape(2**q, 2, -1)
    out = np.empty_like(t)
    out[:, 0, :] = u[0, 0] * t[:, 0, :] + u[0, 1] * t[:, 1, :]
    out[:, 1, :] = u[1, 0] * t[:, 0, :] + u[1, 1] * t[:, 1, :]
    return _wrap(n, out.reshape(-1))


@lru_cache(maxsize=None)
def _cnot_full(n: int, control: int, target: int, basis: MeasBasis) -> np.ndarray:
    """Full 2^n x 2^n matrix of the (possibly X-conjugated) CNOT."""
    dim = 2**n
    cbit, tbit = 1 << (n - 1 - control), 1 << (n - 1 - target)
    perm = np.arange(dim)
    flip = (perm & cbit) != 0
    perm = np.where(flip, perm ^ tbit, perm)
    m = np.zeros((dim, dim), dtype=complex)
    m[perm, np.arange(dim)] = 1.0
    if basis is MeasBasis.X:
        h = _hadamard_full(n)  # conjugating every wire leaves spectators alone
        m = h @ m @ h
    m.flags.writeable = False
    return m


def apply_cnot(
    s: StateVector, control: int, target: int, basis: MeasBasis = MeasBasis.Z
) -> StateVector:
    """Controlled flip of ``target`` by ``control``.

    Z basis: the standard CNOT.  X basis: the Hadamard-conjugated CNOT,
    which flips |+> <-> |-> on the target when the control is |->.
    """
    if control == target:
        raise ValueError("control and target must differ")
    _check_index(s, control)
    _check_index(s, target)
    return _wrap(s.num_qubits, _cnot_full(s.num_qubits, control, target, basis) @ s.amplitudes)


@lru_cache(maxsize=None)
def _hadamard_full(n: int) -> np.ndarray:
    m = np.array([[1.0 + 0j]])
    for _ in range(n):
        m = np.kron(m, _HADAMARD)
    m.flags.writeable = False
    return m


def _x_rotated(amps: np.ndarray, n: int) -> np.ndarray:
    return _hadamard_full(n) @ amps


def product_probabilities(s: StateVector, basis: MeasBasis) -> np.ndarray:
    """Born probabilities over the 2^n outcomes of a product measurement."""
    amps = s.amplitudes
    if basis is MeasBasis.X:
        amps = _x_rotated(amps, s.num_qubits)
    return amps.real**2 + amps.imag**2


def _sample_index(probs: np.ndarray, rand: np.random.Generator) -> int:
    # inverse CDF with a single uniform draw
    cdf = np.cumsum(probs)
    u = rand.random() * cdf[-1]
    return min(int(np.searchsorted(cdf, u, side="right")), len(probs) - 1)


@lru_cache(maxsize=None)
def product_eigenstate(num_qubits: int, bits: str, basis: MeasBasis) -> StateVector:
    """The product basis vector for an outcome string ("0"=+, "1"=- in X)."""
    v = basis_state(num_qubits, bits)
    if basis is MeasBasis.Z:
        return v
    return _wrap(num_qubits, _x_rotated(v.amplitudes, num_qubits))


def _product_cdf(s: StateVector, basis: MeasBasis) -> np.ndarray:
    memo = s._memo()
    cdf = memo.get(basis)
    if cdf is None:
        s._require_normalized()
        cdf = np.cumsum(product_probabilities(s, basis))
        memo[basis] = cdf
    return cdf


def measure_all(
    s: StateVector, basis: MeasBasis, rand: np.random.Generator
) -> tuple[str, StateVector]:
    """Measure every qubit in the product basis; returns (bits, collapsed)."""
    cdf = _product_cdf(s, basis)
    u = rand.random() * cdf[-1]
    idx = min(int(np.searchsorted(cdf, u, side="right")), len(cdf) - 1)
    bits = format(idx, f"0{s.num_qubits}b")
    return bits, product_eigenstate(s.num_qubits, bits, basis)


def _qubit_projections(
    s: StateVector, q: int, basis: MeasBasis
) -> tuple[np.ndarray, tuple[StateVector | None, StateVector | None]]:
    """Outcome probabilities and both normalized collapse branches for one qubit
    (a zero-probability branch is None)."""
    s._require_normalized()
    _check_index(s, q)
    n = s.num_qubits
    amps = s.amplitudes
    if basis is MeasBasis.X:
        amps = _hadamard_embed(n, q) @ amps
    t = amps.reshape(2**q, 2, -1)
    w = t.real**2 + t.imag**2
    probs = np.array([w[:, 0, :].sum(), w[:, 1, :].sum()])
    states = []
    for bit in (0, 1):
        if probs[bit] < 1e-15:
            states.append(None)
            continue
        out = t.copy()
        out[:, 1 - bit, :] = 0.0
        out = out.reshape(-1) / np.sqrt(probs[bit])
        if basis is MeasBasis.X:
            out = _hadamard_embed(n, q) @ out
        states.append(_wrap(n, out))
    return probs, (states[0], states[1])


def measure_qubit(
    s: StateVector, q: int, basis: MeasBasis, rand: np.random.Generator
) -> tuple[int, StateVector]:
    """Measure a single qubit; returns (bit, collapsed full state)."""
    memo = s._memo()
    key = ("q", q, basis)
    cached = memo.get(key)
    if cached is None:
        cached = _qubit_projections(s, q, basis)
        memo[key] = cached
    probs, states = cached
    bit = _sample_index(probs, rand)
    return bit, states[bit]


@lru_cache(maxsize=None)
def _hadamard_embed(n: int, q: int) -> np.ndarray:
    """Hadamard on qubit q, identity elsewhere, as a full matrix."""
    m = np.array([[1.0 + 0j]])
    for i in range(n):
        m = np.kron(m, _HADAMARD if i == q else np.eye(2))
    m.flags.writeable = False
    return m


_BELL_MATRIX = np.array(
    [bell_state(o).amplitudes for o in BellOutcome]
)  # rows: Bell kets in the pair's computational basis


@lru_cache(maxsize=None)
def _pair_perm(n: int, q1: int, q2: int) -> tuple[np.ndarray, np.ndarray]:
    """Index permutation gathering (q1, q2) as the leading axes, and its inverse."""
    order = [q1, q2] + [i for i in range(n) if i not in (q1, q2)]
    perm = np.transpose(np.arange(2**n).reshape([2] * n), order).reshape(-1)
    inv = np.empty_like(perm)
    inv[perm] = np.arange(2**n)
    for a in (perm, inv):
        a.flags.writeable = False
    return perm, inv


def _pair_bell_amplitudes(s: StateVector, q1: int, q2: int) -> np.ndarray:
    """(4, 2^(n-2)) array: row k = rest-of-system amplitude vector for outcome k."""
    perm, _ = _pair_perm(s.num_qubits, q1, q2)
    return _BELL_MATRIX.conj() @ s.amplitudes[perm].reshape(4, -1)


def _check_pair(s: StateVector, q1: int, q2: int):
    if q1 == q2:
        raise ValueError("pair indices must differ")
    _check_index(s, q1)
    _check_index(s, q2)


def bell_pair_probabilities(s: StateVector, q1: int, q2: int) -> np.ndarray:
    """Born probabilities of the four Bell outcomes on a pair, in BellOutcome order."""
    _check_pair(s, q1, q2)
    c = _pair_bell_amplitudes(s, q1, q2)
    return np.sum(c.real**2 + c.imag**2, axis=1)


def bell_projection(s: StateVector, q1: int, q2: int, outcome: BellOutcome) -> StateVector:
    """Unnormalized projection of the pair onto one Bell state."""
    _check_pair(s, q1, q2)
    k = list(BellOutcome).index(outcome)
    c = _pair_bell_amplitudes(s, q1, q2)[k]
    _, inv = _pair_perm(s.num_qubits, q1, q2)
    flat = np.multiply.outer(_BELL_MATRIX[k], c).reshape(-1)
    return _wrap(s.num_qubits, flat[inv])


_BELL_OUTCOMES = tuple(BellOutcome)


def measure_bell_pair(
    s: StateVector, q1: int, q2: int, rand: np.random.Generator
) -> tuple[BellOutcome, StateVector]:
    """Project qubits (q1, q2) onto a Bell state sampled by the Born rule."""
    memo = s._memo()
    key = ("b", q1, q2)
    cached = memo.get(key)
    if cached is None:
        s._require_normalized()
        _check_pair(s, q1, q2)
        c = _pair_bell_amplitudes(s, q1, q2)
        probs = np.sum(c.real**2 + c.imag**2, axis=1)
        cached = (probs, c, [None, None, None, None])
        memo[key] = cached
    probs, c, collapses = cached
    k = _sample_index(probs, rand)
    collapsed = collapses[k]
    if collapsed is None:
        _, inv = _pair_perm(s.num_qubits, q1, q2)
        flat = np.multiply.outer(_BELL_MATRIX[k], c[k] / np.sqrt(probs[k])).reshape(-1)
        collapsed = _wrap(s.num_qubits, flat[inv])
        collapses[k] = collapsed
    return _BELL_OUTCOMES[k], collapsed
