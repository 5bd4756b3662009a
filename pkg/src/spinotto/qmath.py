"""Dense complex linear algebra for few-qubit density matrices.

States live on a labeled register of spin-1/2 slots in big-endian order:
the first label owns the most significant bit of a computational-basis
index.  Operators are plain complex ``numpy`` arrays; ``DensityMatrix``
adds the slot labels and enforces the physical invariants on every
construction.  Register sizes stay at or below four qubits, so everything
is dense and eager (no sparse or iterative machinery).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

# Entrywise absolute tolerance for matrix equality and invariant checks.
ATOL = 1e-12
# Eigenvalues may dip this far below zero before a state is rejected.
EIGENVALUE_FLOOR = -1e-10
# Hamiltonians are validated relative to their own magnitude; entries are
# ~1e-25 J in SI units, so an absolute test would pass garbage.
HERMITICITY_RTOL = 1e-9


class StateInvariantError(ValueError):
    """A matrix violated a density-matrix invariant (trace, Hermiticity, PSD)."""


def _square_complex(matrix) -> np.ndarray:
    arr = np.asarray(matrix, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    dim = arr.shape[0]
    if dim == 0 or dim & (dim - 1):
        raise ValueError(f"matrix dimension {dim} is not a power of two")
    return arr


def matrices_close(a, b, atol: float = ATOL) -> bool:
    """Entrywise equality under an explicit absolute tolerance."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        return False
    return bool(np.max(np.abs(a - b)) <= atol)


def is_diagonal(matrix, atol: float = ATOL) -> bool:
    arr = np.asarray(matrix)
    off = arr - np.diag(np.diag(arr))
    return bool(np.max(np.abs(off)) <= atol)


def is_hermitian(matrix, rtol: float = HERMITICITY_RTOL) -> bool:
    arr = np.asarray(matrix)
    scale = max(float(np.max(np.abs(arr))), np.finfo(float).tiny)
    return bool(np.max(np.abs(arr - arr.conj().T)) <= rtol * scale)


@dataclass(frozen=True)
class DensityMatrix:
    """Labeled density matrix over an ordered qubit register.

    Parameters
    ----------
    matrix:
        Complex ``2**k x 2**k`` array, unit trace, Hermitian, positive
        semidefinite (eigenvalues above ``EIGENVALUE_FLOOR``).
    qubits:
        One label per tensor slot, first label = most significant bit.
    """

    matrix: np.ndarray
    qubits: tuple[str, ...]

    def __post_init__(self):
        arr = _square_complex(self.matrix).copy()
        qubits = tuple(str(q) for q in self.qubits)
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"duplicate qubit labels: {qubits}")
        if arr.shape[0] != 2 ** len(qubits):
            raise ValueError(
                f"matrix dimension {arr.shape[0]} does not match "
                f"{len(qubits)} qubit labels"
            )
        tr = complex(np.trace(arr))
        if abs(tr - 1.0) > ATOL:
            raise StateInvariantError(f"trace is {tr}, expected 1 within {ATOL}")
        if np.max(np.abs(arr - arr.conj().T)) > ATOL:
            raise StateInvariantError("matrix is not Hermitian within tolerance")
        eigenvalues = np.linalg.eigvalsh(arr)
        if float(eigenvalues.min()) < EIGENVALUE_FLOOR:
            raise StateInvariantError(
                f"negative eigenvalue {eigenvalues.min():.3e} below "
                f"{EIGENVALUE_FLOOR:.0e}, state is not positive semidefinite"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "matrix", arr)
        object.__setattr__(self, "qubits", qubits)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def populations(self) -> np.ndarray:
        """Real diagonal in computational-basis order."""
        return np.real(np.diag(self.matrix)).copy()

    def close_to(self, other: "DensityMatrix", atol: float = ATOL) -> bool:
        return self.qubits == other.qubits and matrices_close(
            self.matrix, other.matrix, atol
        )


def single_qubit_state(polarization: float, label: str) -> DensityMatrix:
    """Diagonal spin-1/2 state with the given up/down population difference."""
    eps = float(polarization)
    if not -1.0 <= eps <= 1.0:
        raise ValueError(f"polarization {eps} outside [-1, 1]")
    return DensityMatrix(np.diag([(1 + eps) / 2, (1 - eps) / 2]).astype(complex), (label,))


def kron(a, b) -> np.ndarray:
    """Tensor product with slot order (a then b); a owns the high bits."""
    return np.kron(_square_complex(a), _square_complex(b))


def product_state(*factors: DensityMatrix) -> DensityMatrix:
    """Tensor product of states; labels concatenate in argument order."""
    if not factors:
        raise ValueError("need at least one factor")
    matrix = factors[0].matrix
    labels: tuple[str, ...] = factors[0].qubits
    for f in factors[1:]:
        matrix = np.kron(matrix, f.matrix)
        labels = labels + f.qubits
    return DensityMatrix(matrix, labels)


def partial_trace(rho: DensityMatrix, keep: Iterable[str]) -> DensityMatrix:
    """Trace out every qubit not named in ``keep``.

    The result keeps the surviving labels in their original relative
    order and preserves the unit trace.
    """
    keep_set = set(keep)
    if not keep_set:
        raise ValueError("keep must name at least one qubit")
    unknown = keep_set - set(rho.qubits)
    if unknown:
        raise KeyError(f"unknown qubit labels {sorted(unknown)}; register is {rho.qubits}")

    k = len(rho.qubits)
    kept_positions = [i for i, q in enumerate(rho.qubits) if q in keep_set]
    if len(kept_positions) == k:
        return rho

    tensor = rho.matrix.reshape((2,) * (2 * k))
    # Row axis i and column axis k+i share an index when qubit i is traced.
    row_idx = list(range(k))
    col_idx = [k + i if i in kept_positions else i for i in range(k)]
    out_idx = [i for i in kept_positions] + [k + i for i in kept_positions]
    reduced = np.einsum(tensor, row_idx + col_idx, out_idx)
    m = 2 ** len(kept_positions)
    labels = tuple(rho.qubits[i] for i in kept_positions)
    return DensityMatrix(reduced.reshape((m, m)), labels)


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Uhlmann fidelity ``(tr sqrt(sqrt(rho) sigma sqrt(rho)))**2`` in [0, 1].

    For commuting diagonal states this reduces to the squared
    Bhattacharyya overlap of the two population vectors.
    """
    if rho.dim != sigma.dim:
        raise ValueError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    w, v = np.linalg.eigh(rho.matrix)
    sqrt_rho = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    inner = sqrt_rho @ sigma.matrix @ sqrt_rho
    eigenvalues = np.linalg.eigvalsh(inner)
    root_sum = float(np.sum(np.sqrt(np.clip(eigenvalues, 0.0, None))))
    return min(1.0, root_sum**2)


def permute_register(matrix, src: Sequence[str], dst: Sequence[str]) -> np.ndarray:
    """Reorder the tensor slots of an operator from ``src`` to ``dst`` order."""
    src = tuple(src)
    dst = tuple(dst)
    if sorted(src) != sorted(dst) or len(set(src)) != len(src):
        raise ValueError(f"{dst} is not a permutation of {src}")
    arr = _square_complex(matrix)
    k = len(src)
    if arr.shape[0] != 2**k:
        raise ValueError(f"operator dimension {arr.shape[0]} does not match {k} labels")
    src_pos = {q: i for i, q in enumerate(src)}
    perm = np.empty(2**k, dtype=np.intp)
    for idx in range(2**k):
        src_idx = 0
        for i, q in enumerate(dst):
            bit = (idx >> (k - 1 - i)) & 1
            src_idx |= bit << (k - 1 - src_pos[q])
        perm[idx] = src_idx
    return arr[np.ix_(perm, perm)]


def evolve_lvn(
    rho0: DensityMatrix,
    hamiltonian_at: Callable[[float], np.ndarray],
    t_span: tuple[float, float],
    dt: float,
    hbar: float,
) -> DensityMatrix:
    """Integrate the Liouville-von Neumann equation with fixed-step RK4.

    Solves ``drho/dt = -(i/hbar) [H(t), rho]`` from ``t_span[0]`` to
    ``t_span[1]``.  The state is re-symmetrized after every step; trace is
    conserved to round-off because the commutator is traceless.  The step
    must tile the span exactly (within 1e-9 relative).

    Raises
    ------
    ValueError
        If ``H(t)`` is non-Hermitian beyond tolerance, has the wrong
        dimension, or the step does not divide the span.
    """
    t0, t1 = float(t_span[0]), float(t_span[1])
    span = t1 - t0
    if span < 0:
        raise ValueError(f"t_span runs backwards: {t_span}")
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if span == 0:
        return rho0
    n_steps = max(1, round(span / dt))
    if abs(n_steps * dt - span) > 1e-9 * span:
        raise ValueError(f"dt={dt} does not tile the span {span} evenly")
    h = span / n_steps

    dim = rho0.dim

    def deriv(t: float, state: np.ndarray) -> np.ndarray:
        ham = np.asarray(hamiltonian_at(t), dtype=complex)
        if ham.shape != (dim, dim):
            raise ValueError(f"H(t) has shape {ham.shape}, state is {dim}x{dim}")
        if not is_hermitian(ham):
            raise ValueError(f"H(t={t}) is not Hermitian within tolerance")
        return (-1j / hbar) * (ham @ state - state @ ham)

    rho = rho0.matrix.astype(complex).copy()
    for step in range(n_steps):
        t = t0 + step * h
        k1 = deriv(t, rho)
        k2 = deriv(t + h / 2, rho + (h / 2) * k1)
        k3 = deriv(t + h / 2, rho + (h / 2) * k2)
        k4 = deriv(t + h, rho + h * k3)
        rho = rho + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(rho, rho0.qubits)
