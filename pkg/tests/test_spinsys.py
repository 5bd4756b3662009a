import math

import numpy as np
import pytest

import oracles
from spinotto.qmath import DensityMatrix
from spinotto.spinsys import (
    CODATA2018,
    ConfigError,
    QubitSpec,
    Role,
    SpinSystem,
    effective_temperature,
    from_config_text,
    gibbs_state,
    load_system,
    polarization,
    qubit_marginal,
    static_hamiltonian,
    tce_system,
    thermal_polarization,
    thermal_state,
)

TWO_PI = 2.0 * math.pi
HBAR = CODATA2018.hbar


def single_spin(omega_mhz: float, role=Role.TARGET) -> SpinSystem:
    return SpinSystem(
        qubits=(QubitSpec("q", role, gamma_over_2pi=10.0, t1=1.0, omega_over_2pi=omega_mhz),),
        j_over_2pi={},
        b_field=omega_mhz / 10.0,
        bath_temperature=300.0,
    )


class TestTcePreset:
    def test_table_values(self, tce):
        by_label = {q.label: q for q in tce.qubits}
        assert by_label["C1"].role is Role.TARGET
        assert by_label["C2"].role is Role.COMPRESSION
        assert by_label["H"].role is Role.RESET
        assert by_label["C1"].gamma_over_2pi == 10.7084
        assert by_label["H"].gamma_over_2pi == 42.477
        assert (by_label["C1"].t1, by_label["C2"].t1, by_label["H"].t1) == (43.0, 20.0, 3.5)
        assert tce.j_coupling("C1", "C2") == 103.0
        assert tce.j_coupling("C1", "H") == 9.0
        assert tce.j_coupling("C2", "H") == 200.8
        assert tce.bath_temperature == 300.0

    def test_frequencies(self, tce):
        assert tce.omega("C1") == pytest.approx(TWO_PI * 125.77e6, rel=1e-12)
        assert tce.omega("H") == pytest.approx(TWO_PI * 500.13e6, rel=1e-12)
        # field derived from the proton line
        assert tce.omega("H") == pytest.approx(
            TWO_PI * 1e6 * 42.477 * tce.b_field, rel=1e-12
        )
        assert tce.omega("C1", 0.5) == pytest.approx(TWO_PI * 62.885e6, rel=1e-12)

    def test_role_lookup(self, tce):
        assert tce.label_for_role(Role.TARGET) == "C1"
        assert not tce.has_role(Role.SWAP_PARTNER)
        with pytest.raises(ConfigError, match="swap-partner"):
            tce.label_for_role(Role.SWAP_PARTNER)


class TestSpinSystemValidation:
    def test_rejects_duplicate_labels(self):
        q = QubitSpec("a", Role.TARGET, 10.0, 1.0)
        with pytest.raises(ConfigError, match="duplicate"):
            SpinSystem((q, q), {}, 1.0, 300.0)

    def test_rejects_self_coupling(self):
        q = QubitSpec("a", Role.TARGET, 10.0, 1.0)
        with pytest.raises(ConfigError, match="self-coupling"):
            SpinSystem((q,), {("a", "a"): 1.0}, 1.0, 300.0)

    def test_rejects_unknown_coupling_label(self):
        q = QubitSpec("a", Role.TARGET, 10.0, 1.0)
        with pytest.raises(ConfigError, match="unknown"):
            SpinSystem((q,), {("a", "b"): 1.0}, 1.0, 300.0)

    def test_rejects_conflicting_symmetric_values(self):
        qs = (QubitSpec("a", Role.TARGET, 10.0, 1.0), QubitSpec("b", Role.RESET, 10.0, 1.0))
        with pytest.raises(ConfigError, match="conflicting"):
            SpinSystem(qs, {("a", "b"): 1.0, ("b", "a"): 2.0}, 1.0, 300.0)

    def test_symmetric_duplicates_allowed_when_equal(self):
        qs = (QubitSpec("a", Role.TARGET, 10.0, 1.0), QubitSpec("b", Role.RESET, 10.0, 1.0))
        sys = SpinSystem(qs, {("b", "a"): 1.5}, 1.0, 300.0)
        assert sys.j_coupling("a", "b") == 1.5
        assert sys.j_coupling("b", "a") == 1.5

    def test_rejects_nonpositive_parameters(self):
        with pytest.raises(ConfigError):
            QubitSpec("a", Role.TARGET, -1.0, 1.0)
        with pytest.raises(ConfigError):
            QubitSpec("a", Role.TARGET, 1.0, 0.0)
        q = QubitSpec("a", Role.TARGET, 10.0, 1.0)
        with pytest.raises(ConfigError):
            SpinSystem((q,), {}, -1.0, 300.0)
        with pytest.raises(ConfigError):
            SpinSystem((q,), {}, 1.0, 0.0)


class TestStaticHamiltonian:
    def test_single_qubit_zeeman(self):
        sys = single_spin(100.0)
        h = static_hamiltonian(sys, 1.0)
        omega = sys.omega("q")
        expected = np.diag([-HBAR * omega / 2, +HBAR * omega / 2])
        assert np.allclose(h, expected, rtol=1e-14)

    def test_tce_ground_entry_by_hand(self, tce):
        # |000>: every spin up, so Zeeman gives -hbar*(sum w)/2 and each
        # J pair contributes +hbar*2pi*J/4.
        h = static_hamiltonian(tce, 1.0)
        omega_sum = tce.omega("C1") + tce.omega("C2") + tce.omega("H")
        j_sum = TWO_PI * (103.0 + 9.0 + 200.8)
        expected = -HBAR * omega_sum / 2 + HBAR * j_sum / 4
        assert h[0, 0].real == pytest.approx(expected, rel=1e-12)
        assert h[0, 0].imag == 0.0

    def test_half_field_scales_zeeman_only(self, tce):
        h_full = np.diag(static_hamiltonian(tce, 1.0)).real
        h_half = np.diag(static_hamiltonian(tce, 0.5)).real
        no_j = SpinSystem(tce.qubits, {}, tce.b_field, tce.bath_temperature)
        z_full = np.diag(static_hamiltonian(no_j, 1.0)).real
        j_part = h_full - z_full
        assert np.allclose(h_half, 0.5 * z_full + j_part, rtol=1e-12)

    def test_always_real_diagonal(self, tce):
        for scale in (1.0, 0.5, 0.25):
            h = static_hamiltonian(tce, scale)
            assert np.array_equal(h, np.diag(np.diag(h)))
            assert np.all(np.diag(h).imag == 0.0)

    def test_rejects_nonpositive_scale(self, tce):
        with pytest.raises(ValueError):
            static_hamiltonian(tce, 0.0)


class TestGibbsState:
    def test_infinite_temperature_limit(self, tce):
        h = static_hamiltonian(tce, 1.0)
        rho = gibbs_state(h, 1e12, tce.labels)
        assert np.max(np.abs(rho.matrix - np.eye(8) / 8)) <= 1e-10

    def test_single_qubit_polarization(self):
        sys = single_spin(500.13)
        rho = gibbs_state(static_hamiltonian(sys, 1.0), 300.0, ("q",))
        eps = polarization(rho)
        assert eps == pytest.approx(oracles.eps_thermal(oracles.mhz(500.13)), abs=1e-12)
        assert eps == pytest.approx(4.000e-5, rel=1e-3)

    def test_tce_target_marginal(self, tce_thermal):
        eps = polarization(qubit_marginal(tce_thermal, "C1"))
        assert eps == pytest.approx(1.006e-5, rel=1e-3)

    def test_populations_decrease_with_energy(self, tce):
        h = static_hamiltonian(tce, 1.0)
        rho = gibbs_state(h, tce.bath_temperature, tce.labels)
        energies = np.diag(h).real
        populations = rho.populations
        order = np.argsort(energies)
        assert np.all(np.diff(populations[order]) < 0)

    def test_matches_expm_oracle(self, tce):
        h = static_hamiltonian(tce, 0.5)
        rho = gibbs_state(h, tce.bath_temperature, tce.labels)
        expected = oracles.gibbs_by_expm(h, tce.bath_temperature)
        assert np.max(np.abs(rho.matrix - expected)) <= 1e-12

    def test_rejects_nonpositive_temperature(self, tce):
        with pytest.raises(ValueError):
            gibbs_state(static_hamiltonian(tce), 0.0, tce.labels)


class TestPolarization:
    def test_maximally_mixed(self):
        rho = DensityMatrix(np.eye(2) / 2, ("a",))
        assert polarization(rho) == 0.0

    def test_pure_up(self):
        rho = DensityMatrix(np.diag([1.0, 0.0]).astype(complex), ("a",))
        assert polarization(rho) == 1.0

    def test_hydrogen_half_field(self, tce):
        rho = thermal_state(tce, 0.5)
        eps = polarization(qubit_marginal(rho, "H"))
        assert eps == pytest.approx(2.000e-5, rel=1e-3)

    def test_rejects_multi_qubit_input(self, tce_thermal):
        with pytest.raises(ValueError, match="single-qubit"):
            polarization(tce_thermal)


class TestThermalPolarization:
    def test_zero_frequency_limit(self):
        assert thermal_polarization(1e-30, 300.0) == pytest.approx(0.0, abs=1e-20)

    def test_carbon_full_field(self):
        got = thermal_polarization(TWO_PI * 125.77e6, 300.0)
        assert got == pytest.approx(oracles.eps_thermal(oracles.mhz(125.77)), rel=1e-9)
        assert got == pytest.approx(1.006e-5, rel=1e-3)

    def test_hydrogen_full_field(self):
        got = thermal_polarization(TWO_PI * 500.13e6, 300.0)
        assert got == pytest.approx(oracles.eps_thermal(oracles.mhz(500.13)), rel=1e-9)
        assert got == pytest.approx(4.000e-5, rel=1e-3)


class TestEffectiveTemperature:
    def test_round_trip(self):
        omega = TWO_PI * 125.77e6
        eps = thermal_polarization(omega, 300.0)
        assert effective_temperature(eps, omega) == pytest.approx(300.0, rel=1e-9)

    def test_half_field_anchor_after_one_round(self):
        omega = TWO_PI * 62.885e6
        assert effective_temperature(3.0e-5, omega) == pytest.approx(50.3, abs=0.1)

    def test_half_field_anchor_at_ceiling(self):
        omega = TWO_PI * 62.885e6
        assert effective_temperature(4.0e-5, omega) == pytest.approx(37.7, abs=0.1)

    @pytest.mark.parametrize("eps", [0.0, 1.0, -0.1, 1.5])
    def test_rejects_out_of_range(self, eps):
        with pytest.raises(ValueError):
            effective_temperature(eps, TWO_PI * 1e6)


def test_marginal_polarization_matches_tanh_everywhere(tce):
    # J couplings perturb the thermal marginals far below this tolerance.
    for scale in (1.0, 0.5, 0.25):
        rho = thermal_state(tce, scale)
        for q in tce.labels:
            eps = polarization(qubit_marginal(rho, q))
            expected = thermal_polarization(tce.omega(q, scale), tce.bath_temperature)
            assert abs(eps - expected) <= 2e-9


TCE_CONFIG = """\
[system]
temperature_kelvin = 300.0
reference_qubit = H
reference_omega_mhz = 500.13

[qubit.C1]
role = target
gamma_mhz_per_tesla = 10.7084
t1_seconds = 43.0
omega_mhz = 125.77

[qubit.C2]
role = compression
gamma_mhz_per_tesla = 10.7084
t1_seconds = 20.0
omega_mhz = 125.77

[qubit.H]
role = reset
gamma_mhz_per_tesla = 42.477
t1_seconds = 3.5
omega_mhz = 500.13

[j_coupling]
C1-C2 = 103.0
C1-H = 9.0
C2-H = 200.8
"""


class TestConfig:
    def test_round_trip_matches_preset(self, tce):
        sys = from_config_text(TCE_CONFIG)
        assert sys == tce

    def test_explicit_field(self):
        text = TCE_CONFIG.replace(
            "reference_qubit = H\nreference_omega_mhz = 500.13",
            "b_field_tesla = 11.774136591567203",
        )
        sys = from_config_text(text)
        assert sys.b_field == pytest.approx(tce_system().b_field, rel=1e-12)

    def test_load_system_preset_and_file(self, tce, tmp_path):
        assert load_system("tce") == tce
        path = tmp_path / "custom.cfg"
        path.write_text(TCE_CONFIG)
        assert load_system(path) == tce

    def test_missing_file(self):
        with pytest.raises(ConfigError, match="not found"):
            load_system("missing.cfg")

    @pytest.mark.parametrize(
        "mangle,message",
        [
            (lambda t: t.replace("[system]\ntemperature_kelvin = 300.0\n", "[system]\n"), "temperature_kelvin"),
            (lambda t: t.replace("role = target", "role = boss"), "role"),
            (lambda t: t.replace("t1_seconds = 43.0", "t1_seconds = -1"), "positive"),
            (lambda t: t.replace("C1-C2", "C1-C9"), "unknown"),
            (lambda t: t.replace("reference_qubit = H", "reference_qubit = Z"), "reference_qubit"),
            (lambda t: t.replace("C1-C2 = 103.0", "C1C2 = 103.0"), "LABEL-LABEL"),
        ],
    )
    def test_rejects_bad_configs(self, mangle, message):
        with pytest.raises(ConfigError, match=message):
            from_config_text(mangle(TCE_CONFIG))

    def test_missing_field_definition(self):
        text = TCE_CONFIG.replace(
            "reference_qubit = H\nreference_omega_mhz = 500.13\n", ""
        )
        with pytest.raises(ConfigError, match="b_field_tesla"):
            from_config_text(text)
