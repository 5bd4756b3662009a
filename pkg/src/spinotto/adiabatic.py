"""Finite-time field-ramp strokes and the local work bookkeeping.

A stroke ramps the static field between ``B_z`` and ``B_z/2`` over half a
drive period ``tau`` with a ``sin(pi t / tau)`` profile.  Because the
drive contains only Iz terms it commutes with itself at all times, so
diagonal (population) states are exact fixed points; coherences pick up
phases only.  Work is evaluated from the target qubit's local Hamiltonian
and marginal state at the stroke endpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qmath import DensityMatrix, StateInvariantError, evolve_lvn, is_diagonal
from .spinsys import CODATA2018, PhysicalConstants, SpinSystem, static_hamiltonian

COMPRESSION = "compression"  # full field -> half field
EXPANSION = "expansion"  # half field -> full field

# The compressed field is half the reference field throughout.
COMPRESSED_FIELD_SCALE = 0.5

# Defaults: the drive commutes with itself, so diagonal-state results are
# independent of tau and dt; these only set the integrator workload.
DEFAULT_TAU = 0.1
DEFAULT_STEPS = 10_000


@dataclass(frozen=True)
class StrokeSpec:
    """Direction and timing of one field ramp (the stroke lasts ``tau/2``)."""

    direction: str
    tau: float = DEFAULT_TAU
    dt: float | None = None  # defaults to tau / 10_000

    def __post_init__(self):
        if self.direction not in (COMPRESSION, EXPANSION):
            raise ValueError(
                f"direction must be {COMPRESSION!r} or {EXPANSION!r}, got {self.direction!r}"
            )
        if self.tau <= 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        dt = self.resolved_dt
        if dt <= 0:
            raise ValueError(f"dt must be positive, got {dt}")
        half = self.tau / 2
        steps = round(half / dt)
        if steps < 1 or abs(steps * dt - half) > 1e-9 * half:
            raise ValueError(f"dt={dt} does not tile the stroke duration {half} evenly")

    @property
    def resolved_dt(self) -> float:
        return self.dt if self.dt is not None else self.tau / DEFAULT_STEPS

    @property
    def duration(self) -> float:
        return self.tau / 2


def drive_hamiltonian(
    sys: SpinSystem,
    spec: StrokeSpec,
    t: float,
    constants: PhysicalConstants = CODATA2018,
) -> np.ndarray:
    """Register Hamiltonian at time ``t`` within the stroke.

    The Zeeman part interpolates between the full-field and half-field
    Hamiltonians with weight ``sin(pi t / tau)`` while the scalar
    couplings stay fixed.  The convex-combination form ``(1-s) H_start +
    s H_end`` is used so the endpoints reproduce the static Hamiltonians
    bit for bit.
    """
    if not 0.0 <= t <= spec.duration:
        raise ValueError(f"t={t} outside the stroke interval [0, {spec.duration}]")
    h_full = static_hamiltonian(sys, 1.0, constants)
    h_half = static_hamiltonian(sys, COMPRESSED_FIELD_SCALE, constants)
    start, end = (h_full, h_half) if spec.direction == COMPRESSION else (h_half, h_full)
    s = math.sin(math.pi * t / spec.tau)
    return (1.0 - s) * start + s * end


def evolve_stroke(
    rho: DensityMatrix,
    sys: SpinSystem,
    spec: StrokeSpec,
    constants: PhysicalConstants = CODATA2018,
) -> DensityMatrix:
    """Propagate a register state through one field ramp.

    Diagonal inputs must come back with identical populations (the drive
    is diagonal at every instant); a drift above 1e-12 raises.
    """
    h_full = static_hamiltonian(sys, 1.0, constants)
    h_half = static_hamiltonian(sys, COMPRESSED_FIELD_SCALE, constants)
    start, end = (h_full, h_half) if spec.direction == COMPRESSION else (h_half, h_full)
    start_diag = np.diag(start).copy()
    end_diag = np.diag(end).copy()

    def hamiltonian_at(t: float) -> np.ndarray:
        s = math.sin(math.pi * t / spec.tau)
        return np.diag((1.0 - s) * start_diag + s * end_diag)

    evolved = evolve_lvn(
        rho, hamiltonian_at, (0.0, spec.duration), spec.resolved_dt, constants.hbar
    )
    if is_diagonal(rho.matrix):
        drift = float(np.max(np.abs(evolved.populations - rho.populations)))
        if drift > 1e-12:
            raise StateInvariantError(
                f"{spec.direction} stroke moved diagonal populations by {drift:.3e}"
            )
    return evolved


def stroke_work(
    h_local_start: np.ndarray,
    rho_local_start: DensityMatrix,
    h_local_end: np.ndarray,
    rho_local_end: DensityMatrix,
) -> float:
    """Work output of one stroke, ``Tr[H rho]`` at start minus end (J/molecule).

    Positive values mean energy extracted from the working qubit.
    """
    h_start = np.asarray(h_local_start, dtype=complex)
    h_end = np.asarray(h_local_end, dtype=complex)
    if h_start.shape != rho_local_start.matrix.shape or h_end.shape != rho_local_end.matrix.shape:
        raise ValueError("Hamiltonian and state dimensions do not match")
    before = np.trace(h_start @ rho_local_start.matrix)
    after = np.trace(h_end @ rho_local_end.matrix)
    return float(np.real(before - after))
