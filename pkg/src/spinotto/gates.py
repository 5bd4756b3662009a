"""Ideal unitary gates on labeled registers, plus the reset channel.

Every gate used here (SWAP, CNotNot, Toffoli, and the 3-bit entropy
compression COMP) is a classical permutation of computational-basis
states, so conjugating a diagonal state always yields a diagonal state.
Gates are instantaneous and perfect; their matrices are validated to be
both unitary and 0/1 permutations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .qmath import DensityMatrix, partial_trace, permute_register, _square_complex

ATOL = 1e-12


@dataclass(frozen=True)
class GateUnitary:
    """Unitary permutation matrix bound to an ordered set of qubit labels."""

    matrix: np.ndarray
    acts_on: tuple[str, ...]
    name: str

    def __post_init__(self):
        arr = _square_complex(self.matrix).copy()
        acts_on = tuple(str(q) for q in self.acts_on)
        if arr.shape[0] != 2 ** len(acts_on):
            raise ValueError(
                f"gate {self.name}: dimension {arr.shape[0]} does not match "
                f"{len(acts_on)} labels"
            )
        identity = np.eye(arr.shape[0])
        if np.max(np.abs(arr @ arr.conj().T - identity)) > ATOL:
            raise ValueError(f"gate {self.name} is not unitary within {ATOL}")
        # This gate set is purely classical: entries must be exactly 0 or 1.
        if not np.array_equal(np.abs(arr) ** 2, np.abs(arr)) or np.any(arr.imag != 0):
            raise ValueError(f"gate {self.name} is not a 0/1 permutation matrix")
        arr.setflags(write=False)
        object.__setattr__(self, "matrix", arr)
        object.__setattr__(self, "acts_on", acts_on)


def from_permutation(perm: Sequence[int], acts_on: Sequence[str], name: str) -> GateUnitary:
    """Gate sending basis state ``i`` to basis state ``perm[i]``."""
    dim = len(perm)
    matrix = np.zeros((dim, dim))
    for src, dst in enumerate(perm):
        matrix[dst, src] = 1.0
    return GateUnitary(matrix.astype(complex), tuple(acts_on), name)


def _bit(index: int, position: int, width: int) -> int:
    return (index >> (width - 1 - position)) & 1


def swap_unitary(register: Sequence[str], a: str, b: str) -> GateUnitary:
    """SWAP of qubits ``a`` and ``b``, identity on the other register slots."""
    register = tuple(register)
    if a == b:
        raise ValueError("cannot swap a qubit with itself")
    for label in (a, b):
        if label not in register:
            raise KeyError(f"unknown qubit label {label!r}; register is {register}")
    k = len(register)
    pa, pb = register.index(a), register.index(b)
    perm = []
    for idx in range(2**k):
        bit_a = _bit(idx, pa, k)
        bit_b = _bit(idx, pb, k)
        swapped = idx
        swapped &= ~((1 << (k - 1 - pa)) | (1 << (k - 1 - pb)))
        swapped |= bit_b << (k - 1 - pa)
        swapped |= bit_a << (k - 1 - pb)
        perm.append(swapped)
    return from_permutation(perm, register, f"SWAP({a},{b})")


def cnotnot_unitary(register: Sequence[str], control: str, targets: Sequence[str]) -> GateUnitary:
    """Flip every target bit when the control bit is 1."""
    register = tuple(register)
    positions = [register.index(q) for q in (control, *targets)]  # raises on unknown
    k = len(register)
    pc = positions[0]
    perm = []
    for idx in range(2**k):
        out = idx
        if _bit(idx, pc, k) == 1:
            for pt in positions[1:]:
                out ^= 1 << (k - 1 - pt)
        perm.append(out)
    return from_permutation(perm, register, f"CNotNot({control}->{','.join(targets)})")


def toffoli_unitary(register: Sequence[str], controls: Sequence[str], target: str) -> GateUnitary:
    """Flip the target bit when every control bit is 1."""
    register = tuple(register)
    control_pos = [register.index(q) for q in controls]
    pt = register.index(target)
    k = len(register)
    perm = []
    for idx in range(2**k):
        out = idx
        if all(_bit(idx, pc, k) == 1 for pc in control_pos):
            out ^= 1 << (k - 1 - pt)
        perm.append(out)
    return from_permutation(perm, register, f"Toffoli({','.join(controls)}->{target})")


def comp_unitary(register: Sequence[str]) -> GateUnitary:
    """3-bit entropy compression gate on a (target, compression, reset) register.

    Built as CNotNot * Toffoli * CNotNot with the target controlling the
    CNotNots and the compression/reset pair controlling the Toffoli.  The
    net permutation exchanges ``|011>`` and ``|100>`` (target bit high)
    and fixes every other basis state, which is what pumps population
    toward the target's ``|0>`` level.
    """
    register = tuple(register)
    if len(register) != 3:
        raise ValueError(f"compression gate needs a 3-qubit register, got {register}")
    target, compression, reset = register
    cnn = cnotnot_unitary(register, target, (compression, reset))
    tof = toffoli_unitary(register, (compression, reset), target)
    matrix = cnn.matrix @ tof.matrix @ cnn.matrix
    return GateUnitary(matrix, register, "COMP")


def apply(gate: GateUnitary, rho: DensityMatrix) -> DensityMatrix:
    """Conjugate a state: ``U rho U^dagger``.

    The gate register must contain exactly the state's qubits; if the
    orders differ the gate is permuted to match.
    """
    if set(gate.acts_on) != set(rho.qubits):
        raise ValueError(
            f"gate {gate.name} acts on {gate.acts_on}, state register is {rho.qubits}"
        )
    matrix = gate.matrix
    if gate.acts_on != rho.qubits:
        matrix = permute_register(matrix, gate.acts_on, rho.qubits)
    return DensityMatrix(matrix @ rho.matrix @ matrix.conj().T, rho.qubits)


def reset_channel(
    rho: DensityMatrix, reset_label: str, thermal_reset_state: DensityMatrix
) -> DensityMatrix:
    """Re-thermalize one qubit against the bath.

    Returns the tensor product of every other qubit's single-qubit
    marginal with the fresh thermal state in the reset slot.  All
    correlations are discarded; non-reset marginals are preserved
    exactly, so the channel is idempotent.
    """
    if reset_label not in rho.qubits:
        raise KeyError(f"unknown qubit label {reset_label!r}; register is {rho.qubits}")
    if thermal_reset_state.dim != 2:
        raise ValueError("thermal_reset_state must be a single-qubit state")
    matrix = np.ones((1, 1), dtype=complex)
    for q in rho.qubits:
        factor = (
            thermal_reset_state.matrix
            if q == reset_label
            else partial_trace(rho, {q}).matrix
        )
        matrix = np.kron(matrix, factor)
    # Renormalize away round-off in the marginal traces; without this the
    # deficit doubles on every reset and compounds over a long run.
    matrix /= np.real(np.trace(matrix))
    return DensityMatrix(matrix, rho.qubits)
