import math

import numpy as np
import pytest

from covertlab import fock
from covertlab.channels import (
    ChannelError,
    ChannelParams,
    CompletenessError,
    FockOperator,
    KrausChannel,
    PAULI_I,
    PAULI_Z,
    PAULIS,
    PauliVector,
    ProjectionError,
    apply,
    choi_state,
    depolarizing_vector,
    lossy_thermal_kraus,
    pauli_apply,
    pauli_convolve,
    qubit_project,
    single_rail_state,
    twirl_from_choi,
    willie_port_kraus,
)
from covertlab.fock import DensityMatrix, thermal_state
from covertlab.oracles import random_density


class TestChannelParams:
    def test_validation(self):
        with pytest.raises(ChannelError):
            ChannelParams(1.2, 0.1)
        with pytest.raises(ChannelError):
            ChannelParams(0.5, -0.1)

    def test_gain_and_tau(self):
        p = ChannelParams(0.9, 0.1)
        assert p.gain == pytest.approx(1.01)
        assert p.tau == pytest.approx(0.9 / 1.01)


class TestLossyThermalKraus:
    def test_eta_one_is_identity(self, rng):
        channel = lossy_thermal_kraus(ChannelParams(1.0, 0.7), 12)
        assert len(channel.operators) == 1
        rho = random_density(rng, 12)
        assert np.allclose(apply(channel, rho).data, rho.data, atol=1e-12)

    def test_vacuum_maps_to_thermal(self):
        params = ChannelParams(0.9, 0.1)
        channel = lossy_thermal_kraus(params, 30)
        out = apply(channel, thermal_state(0.0, 30))
        ref = thermal_state((1 - 0.9) * 0.1, 30)
        assert np.max(np.abs(out.data - ref.data)) < 1e-9

    def test_completeness_on_half_cutoff_subspace(self):
        for params, dim in ((ChannelParams(0.8, 0.3), 40), (ChannelParams(0.5, 1.0), 48)):
            channel = lossy_thermal_kraus(params, dim)
            assert channel.completeness_defect((dim - 1) // 2) < 1e-8

    def test_cutoff_too_small_raises(self):
        # one amplifier excitation is never enough at high gain
        with pytest.raises(CompletenessError):
            lossy_thermal_kraus(ChannelParams(0.2, 60.0), 8, photon_cutoff=1)

    def test_willie_port_vacuum(self):
        params = ChannelParams(0.5, 1.0)
        channel = willie_port_kraus(params, 40)
        out = apply(channel, thermal_state(0.0, 40))
        ref = thermal_state(0.5, 40)
        assert np.max(np.abs(out.data - ref.data)) < 1e-9

    def test_energy_bookkeeping(self, rng):
        params = ChannelParams(0.7, 0.4)
        dim = 40
        bob = lossy_thermal_kraus(params, dim)
        willie = willie_port_kraus(params, dim)
        for _ in range(5):
            beta_sq = float(rng.random())
            r = math.sqrt(beta_sq * (1 - beta_sq)) * float(rng.random())
            phi = 2 * math.pi * float(rng.random())
            rho = single_rail_state(beta_sq, r * complex(math.cos(phi), math.sin(phi)), dim)
            mean_in = rho.mean_photon_number()
            total = apply(bob, rho).mean_photon_number() + apply(willie, rho).mean_photon_number()
            assert total == pytest.approx(mean_in + params.nbar_b, abs=1e-8)


class TestApply:
    def test_linearity(self, rng):
        channel = lossy_thermal_kraus(ChannelParams(0.6, 0.2), 20)
        rho, sigma = random_density(rng, 20), random_density(rng, 20)
        lam = 0.3
        mixed = DensityMatrix(20, lam * rho.data + (1 - lam) * sigma.data)
        direct = apply(channel, mixed).data
        split = lam * apply(channel, rho).data + (1 - lam) * apply(channel, sigma).data
        assert np.allclose(direct, split, atol=1e-12)

    def test_dim_mismatch(self, rng):
        channel = lossy_thermal_kraus(ChannelParams(0.6, 0.2), 20)
        with pytest.raises(fock.DimensionError):
            apply(channel, random_density(rng, 10))


class TestQubitProject:
    def test_qubit_input_unchanged(self, rng):
        rho = random_density(rng, 2)
        padded = DensityMatrix(5, np.pad(rho.data, ((0, 3), (0, 3))))
        success, projected = qubit_project(padded)
        assert success == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(projected.data, rho.data, atol=1e-12)

    def test_thermal_one_success(self):
        success, _ = qubit_project(thermal_state(1.0, 30))
        assert success == pytest.approx(0.75, abs=1e-9)

    def test_degenerate_projection(self):
        data = np.zeros((4, 4), dtype=complex)
        data[3, 3] = 1.0
        with pytest.raises(ProjectionError):
            qubit_project(DensityMatrix(4, data))


class TestPauliMachinery:
    def test_depolarizing_vector_endpoints(self):
        assert depolarizing_vector(0.0).as_array() == pytest.approx([1, 0, 0, 0])
        assert depolarizing_vector(1.0).as_array() == pytest.approx([0.25] * 4)

    def test_full_depolarizing_maps_to_maximally_mixed(self):
        pure = single_rail_state(0.0, 0.0, 2)  # |0><0|
        out = pauli_apply(depolarizing_vector(1.0), pure)
        assert np.allclose(out.data, np.eye(2) / 2)

    def test_identity_channel(self, rng):
        rho = random_density(rng, 2)
        out = pauli_apply(PauliVector(1, 0, 0, 0), rho)
        assert np.allclose(out.data, rho.data)

    def test_two_qubit_action_on_second(self, rng):
        rho = random_density(rng, 4)
        vec = PauliVector(0.0, 0.0, 0.0, 1.0)
        out = pauli_apply(vec, rho)
        big = np.kron(PAULI_I, PAULI_Z)
        assert np.allclose(out.data, big @ rho.data @ big)

    def test_vector_validation(self):
        with pytest.raises(ChannelError):
            PauliVector(0.5, 0.5, 0.5, -0.5)
        with pytest.raises(ChannelError):
            PauliVector(0.5, 0.2, 0.2, 0.2)

    def test_convolution_against_direct_composition(self, rng):
        a = PauliVector(0.7, 0.1, 0.1, 0.1)
        b = PauliVector(0.4, 0.3, 0.2, 0.1)
        rho = random_density(rng, 2)
        composed = pauli_apply(a, pauli_apply(b, rho))
        assert np.allclose(pauli_apply(pauli_convolve(a, b), rho).data, composed.data, atol=1e-12)

    def test_convolution_with_depolarizing(self):
        q = PauliVector(0.85, 0.08, 0.05, 0.02)
        f = 0.13
        out = pauli_convolve(depolarizing_vector(f), q).as_array()
        assert out == pytest.approx((1 - f) * q.as_array() + f / 4.0, abs=1e-15)


def _qubit_channel(*ops):
    return KrausChannel(tuple(FockOperator(2, op) for op in ops), 2, 2)


class TestChoiAndTwirl:
    def test_identity_choi_is_bell_state(self):
        choi, pre = choi_state(_qubit_channel(np.eye(2, dtype=complex)))
        bell = np.zeros((4, 4), dtype=complex)
        for i in (0, 3):
            for j in (0, 3):
                bell[i, j] = 0.5
        assert pre == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(choi.data, bell, atol=1e-12)
        assert twirl_from_choi(choi).as_array() == pytest.approx([1, 0, 0, 0], abs=1e-12)

    def test_lossless_channel_choi(self):
        channel = lossy_thermal_kraus(ChannelParams(1.0, 0.4), 10)
        choi, pre = choi_state(channel)
        assert pre == pytest.approx(1.0, abs=1e-12)
        assert choi.data[0, 3] == pytest.approx(0.5, abs=1e-12)

    def test_z_channel_twirl(self):
        choi, _ = choi_state(_qubit_channel(PAULI_Z.copy()))
        assert twirl_from_choi(choi).as_array() == pytest.approx([0, 0, 0, 1], abs=1e-12)

    def test_choi_zero_structure(self):
        channel = lossy_thermal_kraus(ChannelParams(0.9, 0.1), 24)
        choi, _ = choi_state(channel)
        expected_nonzero = {(0, 0), (1, 1), (2, 2), (3, 3), (0, 3), (3, 0)}
        for i in range(4):
            for j in range(4):
                if (i, j) not in expected_nonzero:
                    assert abs(choi.data[i, j]) < 1e-12

    def test_twirl_identity_for_physical_channel(self, rng):
        # the twirl average of the projected channel equals the Pauli channel
        # with the Choi Bell overlaps, scaled by the projection success
        params = ChannelParams(0.85, 0.2)
        dim = 28
        channel = lossy_thermal_kraus(params, dim)
        choi, success = choi_state(channel)
        vec = twirl_from_choi(choi)
        rho = random_density(rng, 2)
        twirled = np.zeros((2, 2), dtype=complex)
        for p in PAULIS:
            inp = np.zeros((dim, dim), dtype=complex)
            inp[:2, :2] = p @ rho.data @ p.conj().T
            out = apply(channel, DensityMatrix(dim, inp))
            twirled += p.conj().T @ out.data[:2, :2] @ p
        twirled /= 4.0
        reference = success * pauli_apply(vec, rho).data
        assert np.max(np.abs(twirled - reference)) < 1e-8
