import numpy as np
import pytest

from opo_sidebands.cavity import mirror_set, phase_matrix, scattering
from opo_sidebands.covariance import output_covariance, physicality_report, to_sa_blocks
from opo_sidebands.numerics import commutator_metric, direct_sum
from opo_sidebands.oracle import rk4_gain
from opo_sidebands.phonon import (
    N_EXTENDED_SLOTS,
    PhononParams,
    extended_drift,
    extended_gain,
    extended_labels,
    extended_scattering,
    lift_phase,
    optomech_blocks,
    thermal_input_covariance,
)
from opo_sidebands.sideband import MeanFields, drift_matrix_full, gain_matrix_full

# swaps every (a, a^dag) slot pair
SWAP18 = np.kron(np.eye(9), np.array([[0, 1], [1, 0]]))


@pytest.fixture(scope="module")
def ref_phonons():
    return PhononParams.reference()


class TestParams:
    def test_reference_couplings(self, ref_phonons):
        g = ref_phonons.g
        assert (g[0, 0], g[2, 0], g[1, 0], g[1, 1]) == (8.0e-3, 3.6e-3, 1.9e-3, 2.7e-3)
        assert np.count_nonzero(g) == 4
        assert ref_phonons.n_th == 100

    def test_matches_reference_config(self, ref_cfg, ref_phonons):
        assert np.array_equal(ref_cfg.phonon_params().g, ref_phonons.g)

    @pytest.mark.parametrize("kwargs", [{"n_th": -1.0}, {"g": np.full((3, 3), np.nan)},
                                        {"g": np.zeros((2, 3))}, {"convention": "bare"}])
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(ValueError):
            PhononParams(**kwargs)

    def test_immutable_table(self, ref_phonons):
        with pytest.raises(ValueError):
            ref_phonons.g[0, 0] = 1.0

    def test_effective_factor_is_unit_phase(self):
        pp = PhononParams.reference()
        assert pp.carrier_factors(MeanFields(2.0, -0.5j, 0.0)) == (1, -1j, 1)

    def test_labels(self):
        labels = extended_labels()
        assert len(labels) == N_EXTENDED_SLOTS
        assert labels[12:14] == ["d1", "d1^dag"]


class TestBlocks:
    def test_zero_couplings(self, ref_fields):
        J, K = optomech_blocks(PhononParams(), ref_fields)
        assert J.shape == (12, 6) and K.shape == (6, 12)
        assert not np.any(J) and not np.any(K)

    def test_single_coupling_structure(self, ref_fields):
        g = np.zeros((3, 3))
        g[0, 0] = 8.0e-3
        J, _ = optomech_blocks(PhononParams(g, convention="chi_scaled"), ref_fields)
        nz = J[np.nonzero(J)]
        assert nz.size == 4
        np.testing.assert_allclose(np.abs(nz), 8.0e-3 * abs(ref_fields.chi_alpha0), rtol=1e-15)

    def test_printed_l_blocks(self):
        a = 0.3 + 0.4j
        g = np.zeros((3, 3))
        g[1, 2] = 0.5
        J, K = optomech_blocks(PhononParams(g, convention="chi_scaled"), MeanFields(0, a, 0))
        np.testing.assert_array_equal(J[2:4, 4:6], 0.5 * np.array([[a, 0], [0, -np.conj(a)]]))
        np.testing.assert_array_equal(J[8:10, 4:6], 0.5 * np.array([[0, a], [-np.conj(a), 0]]))
        np.testing.assert_array_equal(K[:, :6], J[:6].conj().T)
        np.testing.assert_array_equal(K[:, 6:], -J[6:].conj().T)


class TestDrift:
    def test_reduces_without_couplings(self, ref_fields):
        m = extended_drift(ref_fields, PhononParams())
        assert np.array_equal(m, direct_sum(drift_matrix_full(ref_fields), np.zeros((6, 6))))

    def test_phonon_block_zero(self, ref_fields, ref_phonons):
        assert not np.any(extended_drift(ref_fields, ref_phonons)[12:, 12:])

    def test_hermitian_hamiltonian_pattern(self, ref_fields, ref_phonons):
        # the equation of a^dag is the conjugate of the equation of a
        m = extended_drift(ref_fields, ref_phonons)
        np.testing.assert_allclose(SWAP18 @ m.conj() @ SWAP18, m, atol=1e-15)

    def test_commutator_preserved(self, ref_fields, ref_phonons):
        g = extended_gain(ref_fields, ref_phonons)
        k = commutator_metric(9)
        np.testing.assert_allclose(g @ k @ g.conj().T, k, atol=1e-10)


class TestGain:
    def test_reduces_without_couplings(self, ref_fields):
        np.testing.assert_allclose(extended_gain(ref_fields, PhononParams()),
                                   direct_sum(gain_matrix_full(ref_fields), np.eye(6)), atol=1e-12)

    def test_phonons_act_back_on_light(self, ref_fields, ref_phonons):
        diff = extended_gain(ref_fields, ref_phonons)[:12, :12] - gain_matrix_full(ref_fields)
        assert np.max(np.abs(diff)) > 1e-6

    def test_rk4_oracle(self, ref_fields, ref_phonons):
        m = extended_drift(ref_fields, ref_phonons)
        np.testing.assert_allclose(rk4_gain(m), extended_gain(ref_fields, ref_phonons), atol=1e-8)


class TestScattering:
    def test_reduces_without_couplings(self, ref_cfg, ref_fields):
        mirrors = mirror_set(ref_cfg.losses())
        phase = phase_matrix(ref_cfg.operating_point())
        refl, trans = scattering(mirrors, phase, gain_matrix_full(ref_fields))
        erefl, etrans = extended_scattering(mirrors, phase, extended_gain(ref_fields, PhononParams()))
        np.testing.assert_allclose(erefl[:12, :12], refl, atol=1e-12)
        np.testing.assert_allclose(etrans[:12, :12], trans, atol=1e-12)

    def test_bath_reaches_output(self, ref_cfg, ref_fields, ref_phonons):
        _, trans = extended_scattering(mirror_set(ref_cfg.losses()), phase_matrix(ref_cfg.operating_point()),
                                       extended_gain(ref_fields, ref_phonons))
        assert np.max(np.abs(trans[:12, 12:])) > 1e-6

    def test_metric_isometry(self, ref_cfg, ref_fields, ref_phonons):
        refl, trans = extended_scattering(mirror_set(ref_cfg.losses()), phase_matrix(ref_cfg.operating_point()),
                                          extended_gain(ref_fields, ref_phonons))
        k = commutator_metric(9)
        out = refl @ k @ refl.conj().T + trans @ k @ trans.conj().T
        np.testing.assert_allclose(out, k, atol=1e-10)

    def test_lift_phase(self, ref_cfg):
        p = lift_phase(phase_matrix(ref_cfg.operating_point()))
        assert p.shape == (18, 18) and not np.any(p[12:, 12:])


class TestThermalInput:
    def test_zero_temperature_is_vacuum(self):
        assert np.array_equal(thermal_input_covariance(PhononParams(n_th=0.0)), np.eye(36))

    def test_reference_occupation(self, ref_phonons):
        d = np.diag(thermal_input_covariance(ref_phonons))
        expected = np.concatenate([np.ones(12), np.full(6, 201.0)])
        np.testing.assert_array_equal(d, np.concatenate([expected, expected]))

    def test_block_structure(self, ref_phonons):
        v = thermal_input_covariance(ref_phonons)
        assert v.shape == (36, 36)
        assert not np.any(v - np.diag(np.diag(v)))


@pytest.fixture(scope="module")
def runs(ref_cfg):
    """Reference point without reservoirs, with n_th = 100 and with n_th = 0."""
    cfg = ref_cfg.replace(detection_enabled=False)
    bare = output_covariance(cfg, phonons=False)
    hot = output_covariance(cfg, phonons=True)
    cold = output_covariance(cfg.replace(n_thermal=0.0), phonons=True)
    return bare, hot, cold


class TestOutputSignature:
    def test_extra_phase_noise(self, runs):
        bare, hot, _ = runs
        d = np.diag(to_sa_blocks(hot).V_s - to_sa_blocks(bare).V_s)
        dq, dp = d[1::2], d[0::2]
        assert np.all(dq > 0)
        assert np.all(dq >= 10 * np.abs(dp))

    def test_e_terms_appear(self, runs):
        _, hot, _ = runs
        vs = to_sa_blocks(hot).V_s
        e_terms = [abs(vs[i, j]) for i in range(6) for j in range(i + 1, 6) if (i + j) % 2]
        assert max(e_terms) > 1e-6

    def test_zero_temperature_residue_nonzero(self, runs):
        bare, _, cold = runs
        assert np.max(np.abs(cold.matrix - bare.matrix)) > 0
        assert physicality_report(cold).purity < physicality_report(bare).purity

    def test_zero_temperature_residue_is_psd(self, runs):
        bare, _, cold = runs
        assert np.linalg.eigvalsh(cold.matrix - bare.matrix).min() >= -1e-12

    def test_purity_drops(self, runs):
        bare, hot, _ = runs
        assert physicality_report(hot).purity < physicality_report(bare).purity
