"""NMR spin-system definition, thermal states, and polarization helpers.

A ``SpinSystem`` is an ordered register of spin-1/2 nuclei in a static
field ``B_z`` with weak scalar (Iz-Iz) couplings, in contact with a heat
bath.  Conventions: ``|0> = spin-up = lower energy`` (``H = -hbar w Iz``
with ``Iz|0> = +1/2|0>``), so thermal polarizations are positive.

Systems can be built in code, from the built-in ``tce`` preset, or from
an INI-style configuration file (see ``from_config_file``).
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .qmath import DensityMatrix, is_diagonal, is_hermitian, partial_trace

TWO_PI = 2.0 * math.pi


class ConfigError(ValueError):
    """A system definition (preset name, file, or values) is invalid."""


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA-2018 values; override only by constructing a new instance."""

    hbar: float = 1.054_571_817e-34  # J*s
    k_boltzmann: float = 1.380_649e-23  # J/K
    avogadro: float = 6.022_140_76e23  # 1/mol


CODATA2018 = PhysicalConstants()


class Role(str, Enum):
    TARGET = "target"
    COMPRESSION = "compression"
    RESET = "reset"
    SWAP_PARTNER = "swap-partner"


@dataclass(frozen=True)
class QubitSpec:
    """One nuclear spin.

    ``omega_over_2pi`` optionally pins the Larmor frequency (MHz) at the
    reference field; when unset it is derived as ``gamma * B_z``.  The
    explicit value wins because tabulated spectrometer frequencies include
    chemical shielding that the bare gyromagnetic ratio does not.
    """

    label: str
    role: Role
    gamma_over_2pi: float  # MHz/T
    t1: float  # seconds
    omega_over_2pi: float | None = None  # MHz at field_scale 1

    def __post_init__(self):
        if self.gamma_over_2pi <= 0:
            raise ConfigError(f"qubit {self.label}: gamma must be positive")
        if self.t1 <= 0:
            raise ConfigError(f"qubit {self.label}: t1 must be positive")
        if self.omega_over_2pi is not None and self.omega_over_2pi <= 0:
            raise ConfigError(f"qubit {self.label}: omega must be positive")


@dataclass(frozen=True)
class SpinSystem:
    """Ordered qubit register + pairwise couplings + field + bath.

    ``j_over_2pi`` maps unordered label pairs to coupling strengths in Hz;
    it is symmetrized and checked for self-couplings on construction.
    """

    qubits: tuple[QubitSpec, ...]
    j_over_2pi: dict[tuple[str, str], float]  # Hz per unordered pair
    b_field: float  # tesla
    bath_temperature: float  # kelvin

    def __post_init__(self):
        labels = [q.label for q in self.qubits]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"duplicate qubit labels: {labels}")
        if self.b_field <= 0:
            raise ConfigError("b_field must be positive")
        if self.bath_temperature <= 0:
            raise ConfigError("bath_temperature must be positive")
        canonical: dict[tuple[str, str], float] = {}
        for (a, b), j in self.j_over_2pi.items():
            if a == b:
                raise ConfigError(f"self-coupling on {a}")
            if a not in labels or b not in labels:
                raise ConfigError(f"coupling {a}-{b} names unknown qubits")
            key = (a, b) if a < b else (b, a)
            if key in canonical and canonical[key] != j:
                raise ConfigError(f"conflicting J values for pair {key}")
            canonical[key] = float(j)
        object.__setattr__(self, "j_over_2pi", canonical)
        object.__setattr__(self, "qubits", tuple(self.qubits))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(q.label for q in self.qubits)

    def qubit(self, label: str) -> QubitSpec:
        for q in self.qubits:
            if q.label == label:
                return q
        raise KeyError(f"unknown qubit label {label!r}; register is {self.labels}")

    def omega(self, label: str, field_scale: float = 1.0) -> float:
        """Larmor angular frequency in rad/s at the scaled field."""
        q = self.qubit(label)
        mhz = q.omega_over_2pi if q.omega_over_2pi is not None else q.gamma_over_2pi * self.b_field
        return TWO_PI * 1e6 * mhz * field_scale

    def j_coupling(self, a: str, b: str) -> float:
        """Scalar coupling J/2pi in Hz for the unordered pair, 0 if absent."""
        self.qubit(a)
        self.qubit(b)
        key = (a, b) if a < b else (b, a)
        return self.j_over_2pi.get(key, 0.0)

    def label_for_role(self, role: Role) -> str:
        matches = [q.label for q in self.qubits if q.role == role]
        if len(matches) != 1:
            raise ConfigError(
                f"need exactly one {role.value} qubit, found {len(matches)}"
            )
        return matches[0]

    def has_role(self, role: Role) -> bool:
        return any(q.role == role for q in self.qubits)


def tce_system() -> SpinSystem:
    """Built-in 3-qubit TCE (trichloroethylene) register at 300 K.

    Two slow-relaxing carbons serve as target and compression qubits; the
    fast-relaxing proton is the reset qubit.  The static field corresponds
    to a 500 MHz spectrometer (derived from the proton frequency).
    """
    gamma_h = 42.477  # MHz/T
    omega_h = 500.13  # MHz
    return SpinSystem(
        qubits=(
            QubitSpec("C1", Role.TARGET, gamma_over_2pi=10.7084, t1=43.0, omega_over_2pi=125.77),
            QubitSpec("C2", Role.COMPRESSION, gamma_over_2pi=10.7084, t1=20.0, omega_over_2pi=125.77),
            QubitSpec("H", Role.RESET, gamma_over_2pi=gamma_h, t1=3.5, omega_over_2pi=omega_h),
        ),
        j_over_2pi={("C1", "C2"): 103.0, ("C1", "H"): 9.0, ("C2", "H"): 200.8},
        b_field=omega_h / gamma_h,
        bath_temperature=300.0,
    )


PRESETS = {"tce": tce_system}


# ---------------------------------------------------------------------------
# Hamiltonians and thermal states
# ---------------------------------------------------------------------------


def zeeman_hamiltonian(omega: float, constants: PhysicalConstants = CODATA2018) -> np.ndarray:
    """Single-qubit ``-hbar*omega*Iz`` as a 2x2 diagonal matrix (joules)."""
    return np.diag([-constants.hbar * omega / 2, +constants.hbar * omega / 2]).astype(complex)


def local_hamiltonian(
    sys: SpinSystem,
    label: str,
    field_scale: float = 1.0,
    constants: PhysicalConstants = CODATA2018,
) -> np.ndarray:
    """Local Zeeman Hamiltonian of one register qubit at the scaled field."""
    return zeeman_hamiltonian(sys.omega(label, field_scale), constants)


def static_hamiltonian(
    sys: SpinSystem,
    field_scale: float = 1.0,
    constants: PhysicalConstants = CODATA2018,
) -> np.ndarray:
    """Lab-frame register Hamiltonian at a scaled static field.

    ``H = -hbar * sum_i (field_scale * w_i) Iz_i
    + hbar * sum_{i<j} 2pi J_ij Iz_i Iz_j``, diagonal in the
    computational basis.  Scaling the field scales every Zeeman term and
    leaves the scalar couplings untouched.
    """
    if field_scale <= 0:
        raise ValueError(f"field_scale must be positive, got {field_scale}")
    labels = sys.labels
    k = len(labels)
    omegas = [sys.omega(q, field_scale) for q in labels]
    pairs = [
        (i, j, TWO_PI * sys.j_coupling(labels[i], labels[j]))
        for i in range(k)
        for j in range(i + 1, k)
        if sys.j_coupling(labels[i], labels[j]) != 0.0
    ]
    hbar = constants.hbar
    diag = np.zeros(2**k)
    for idx in range(2**k):
        sz = [0.5 if ((idx >> (k - 1 - i)) & 1) == 0 else -0.5 for i in range(k)]
        energy = -hbar * sum(w * s for w, s in zip(omegas, sz))
        energy += hbar * sum(jw * sz[i] * sz[j] for i, j, jw in pairs)
        diag[idx] = energy
    return np.diag(diag).astype(complex)


def gibbs_state(
    hamiltonian: np.ndarray,
    temperature: float,
    qubits: tuple[str, ...],
    constants: PhysicalConstants = CODATA2018,
) -> DensityMatrix:
    """Thermal state ``exp(-H/kT) / Z`` of a Hermitian Hamiltonian."""
    if temperature <= 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    h = np.asarray(hamiltonian, dtype=complex)
    if not is_hermitian(h):
        raise ValueError("Hamiltonian is not Hermitian within tolerance")
    beta = 1.0 / (constants.k_boltzmann * temperature)
    if is_diagonal(h, atol=0.0):
        energies = np.real(np.diag(h))
        weights = np.exp(-beta * (energies - energies.min()))
        return DensityMatrix(np.diag(weights / weights.sum()).astype(complex), qubits)
    energies, vectors = np.linalg.eigh(h)
    weights = np.exp(-beta * (energies - energies.min()))
    weights /= weights.sum()
    return DensityMatrix((vectors * weights) @ vectors.conj().T, qubits)


def thermal_state(
    sys: SpinSystem,
    field_scale: float = 1.0,
    constants: PhysicalConstants = CODATA2018,
) -> DensityMatrix:
    """Register Gibbs state at the bath temperature and scaled field."""
    h = static_hamiltonian(sys, field_scale, constants)
    return gibbs_state(h, sys.bath_temperature, sys.labels, constants)


def qubit_marginal(rho: DensityMatrix, label: str) -> DensityMatrix:
    """Single-qubit reduced state, by partial trace over everything else."""
    return partial_trace(rho, {label})


# ---------------------------------------------------------------------------
# Polarization / spin temperature
# ---------------------------------------------------------------------------


def polarization(rho_1q: DensityMatrix) -> float:
    """Population difference ``P_up - P_down`` of a single-qubit state."""
    if rho_1q.dim != 2:
        raise ValueError(f"expected a single-qubit state, got dim {rho_1q.dim}")
    diff = rho_1q.matrix[0, 0] - rho_1q.matrix[1, 1]
    if abs(diff.imag) > 1e-12:
        raise ValueError(f"diagonal has imaginary residue {diff.imag:.3e}")
    return float(diff.real)


def thermal_polarization(
    omega: float, temperature: float, constants: PhysicalConstants = CODATA2018
) -> float:
    """Equilibrium polarization ``tanh(hbar*omega / 2 k_B T)``."""
    return math.tanh(constants.hbar * omega / (2.0 * constants.k_boltzmann * temperature))


def effective_temperature(
    epsilon: float, omega: float, constants: PhysicalConstants = CODATA2018
) -> float:
    """Spin temperature whose thermal polarization at ``omega`` is ``epsilon``.

    Exact inverse of :func:`thermal_polarization`.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"polarization {epsilon} outside (0, 1)")
    if omega <= 0:
        raise ValueError(f"omega must be positive, got {omega}")
    return constants.hbar * omega / (2.0 * constants.k_boltzmann * math.atanh(epsilon))


# ---------------------------------------------------------------------------
# Configuration files
# ---------------------------------------------------------------------------

_CONFIG_DOC = """\
INI schema (see README for a complete example):

[system]
temperature_kelvin = 300.0
b_field_tesla = 11.774       # or: reference_qubit = H / reference_omega_mhz = 500.13

[qubit.<LABEL>]              # one section per qubit, register order = file order
role = target                # target | compression | reset | swap-partner
gamma_mhz_per_tesla = 10.7084
t1_seconds = 43.0
omega_mhz = 125.77           # optional explicit Larmor frequency at full field

[j_coupling]                 # optional; keys are unordered label pairs
C1-C2 = 103.0                # Hz
"""


def from_config_text(text: str, origin: str = "<config>") -> SpinSystem:
    """Parse a spin-system definition from INI-formatted text."""
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";")
    )
    parser.optionxform = str  # keep label case
    try:
        parser.read_string(text, source=origin)
    except configparser.Error as exc:
        raise ConfigError(f"{origin}: {exc}") from exc

    if "system" not in parser:
        raise ConfigError(f"{origin}: missing [system] section\n{_CONFIG_DOC}")
    system = parser["system"]

    def _positive(section, key: str, where: str) -> float:
        try:
            value = float(section[key])
        except KeyError:
            raise ConfigError(f"{origin}: {where} is missing {key}") from None
        except ValueError:
            raise ConfigError(f"{origin}: {where}: {key} is not a number") from None
        if value <= 0:
            raise ConfigError(f"{origin}: {where}: {key} must be positive")
        return value

    temperature = _positive(system, "temperature_kelvin", "[system]")

    qubit_sections = [s for s in parser.sections() if s.startswith("qubit.")]
    if not qubit_sections:
        raise ConfigError(f"{origin}: no [qubit.<LABEL>] sections\n{_CONFIG_DOC}")
    qubits = []
    for section_name in qubit_sections:
        label = section_name.split(".", 1)[1]
        section = parser[section_name]
        role_text = section.get("role", "")
        try:
            role = Role(role_text)
        except ValueError:
            raise ConfigError(
                f"{origin}: [{section_name}]: role must be one of "
                f"{[r.value for r in Role]}, got {role_text!r}"
            ) from None
        omega_mhz = None
        if "omega_mhz" in section:
            omega_mhz = _positive(section, "omega_mhz", f"[{section_name}]")
        qubits.append(
            QubitSpec(
                label=label,
                role=role,
                gamma_over_2pi=_positive(section, "gamma_mhz_per_tesla", f"[{section_name}]"),
                t1=_positive(section, "t1_seconds", f"[{section_name}]"),
                omega_over_2pi=omega_mhz,
            )
        )

    labels = [q.label for q in qubits]
    if "b_field_tesla" in system:
        b_field = _positive(system, "b_field_tesla", "[system]")
    elif "reference_qubit" in system:
        ref = system["reference_qubit"].strip()
        if ref not in labels:
            raise ConfigError(f"{origin}: reference_qubit {ref!r} is not a defined qubit")
        ref_omega = _positive(system, "reference_omega_mhz", "[system]")
        ref_gamma = next(q.gamma_over_2pi for q in qubits if q.label == ref)
        b_field = ref_omega / ref_gamma
    else:
        raise ConfigError(
            f"{origin}: [system] needs b_field_tesla or "
            f"reference_qubit + reference_omega_mhz"
        )

    couplings: dict[tuple[str, str], float] = {}
    if "j_coupling" in parser:
        for key, value in parser["j_coupling"].items():
            parts = key.split("-")
            if len(parts) != 2:
                raise ConfigError(f"{origin}: [j_coupling] key {key!r} is not LABEL-LABEL")
            try:
                couplings[(parts[0], parts[1])] = float(value)
            except ValueError:
                raise ConfigError(f"{origin}: [j_coupling] {key}: not a number") from None

    try:
        return SpinSystem(
            qubits=tuple(qubits),
            j_over_2pi=couplings,
            b_field=b_field,
            bath_temperature=temperature,
        )
    except ConfigError as exc:
        raise ConfigError(f"{origin}: {exc}") from exc


def from_config_file(path: str | Path) -> SpinSystem:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config not found: {path}")
    return from_config_text(path.read_text(), origin=str(path))


def load_system(source: str | Path) -> SpinSystem:
    """Resolve a preset name (e.g. ``tce``) or a config-file path."""
    name = str(source)
    if name in PRESETS:
        return PRESETS[name]()
    return from_config_file(source)
