import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from opo_sidebands.cavity import (
    OscillationBoundaryError,
    cavity_loop,
    loop_matrix,
    mirror_set,
    phase_matrix,
    propagator,
    reflection_matrix,
    scattering,
    sideband_phases,
    transmission_matrix,
)
from opo_sidebands.numerics import commutator_metric
from opo_sidebands.oracle import scalar_fabry_perot
from opo_sidebands.sideband import MeanFields, gain_matrix_full, lambda_transform
from opo_sidebands.steady_state import CavityLosses, OperatingPoint, mean_fields

losses_st = st.builds(
    CavityLosses,
    st.tuples(*[st.floats(0.01, 2.0)] * 3),
    st.tuples(*[st.floats(0.0, 2.0)] * 3),
)
points_st = st.builds(
    OperatingPoint,
    st.just(0.0),
    st.floats(-1e9, 1e9),
    st.tuples(*[st.floats(-1e9, 1e9)] * 3),
    st.just((4.3e9, 4.3e9, 4.3e9)),
)

NO_GAIN = np.eye(12)


def k_isometry_defect(refl, trans):
    k = commutator_metric(refl.shape[0] // 2)
    return np.max(np.abs(refl @ k @ refl.conj().T + trans @ k @ trans.conj().T - k))


class TestMirrors:
    def test_perfect_mirror(self):
        m = mirror_set(CavityLosses((0, 0, 0), (0, 0, 0)))
        assert np.array_equal(m.R, np.eye(12))
        assert not np.any(m.T)

    def test_pump_coupler(self, ref_cfg):
        m = mirror_set(ref_cfg.losses())
        assert m.R[0, 0].real == pytest.approx(np.sqrt(0.70), rel=1e-15)
        assert m.R[7, 7] == m.R[0, 0]

    @given(losses_st)
    def test_energy_conservation(self, losses):
        assert mirror_set(losses).unitarity_defect() <= 1e-14

    def test_injection_hook_breaks_unitarity(self, ref_cfg):
        assert mirror_set(ref_cfg.losses(), 1.01).unitarity_defect() > 1e-3

    def test_layout(self, ref_cfg):
        m = mirror_set(ref_cfg.losses())
        d = np.diag(m.R).real
        assert np.array_equal(d[:6], d[6:])
        assert np.array_equal(d[0::2], d[1::2])

    def test_lifted(self, ref_cfg):
        m = mirror_set(ref_cfg.losses()).lifted(6)
        assert m.size == 18
        assert not np.any(m.R[12:, 12:])
        assert np.array_equal(m.T[12:, 12:], np.eye(6))


class TestPhases:
    def test_resonant_degenerate(self):
        assert not np.any(phase_matrix(OperatingPoint(1.5, 0.0)))

    def test_opposite_sideband_phases(self):
        p = np.diag(phase_matrix(OperatingPoint(1.5, 21e6)))
        np.testing.assert_array_equal(p[:6], -p[6:])

    def test_creation_slots_negated(self):
        p = np.diag(phase_matrix(OperatingPoint(1.5, 21e6, (1e6, -2e6, 3e6))))
        np.testing.assert_array_equal(p[0::2], -p[1::2])

    def test_reference_value(self):
        # 2 pi * 21 MHz / (2 * 4.3 GHz)
        phi = sideband_phases(OperatingPoint(1.5, 21e6), +1)
        np.testing.assert_allclose(phi, 2 * np.pi * 21e6 / (2 * 4.3e9), rtol=1e-15)
        assert phi[0] == pytest.approx(1.5344e-2, rel=1e-4)

    def test_detuning_in_rad_per_s(self):
        phi = sideband_phases(OperatingPoint(1.0, 0.0, (8.6e9, 0, 0)), +1)
        assert phi[0] == pytest.approx(1.0)

    def test_symmetric_option(self):
        p = np.diag(phase_matrix(OperatingPoint(1.5, 21e6), symmetric_sidebands=True))
        np.testing.assert_array_equal(p[:6], p[6:])

    @given(points_st)
    def test_unit_modulus_propagator(self, op):
        e = np.diag(propagator(phase_matrix(op)))
        np.testing.assert_allclose(np.abs(e), 1.0, atol=1e-15)


class TestLoop:
    def test_lossless_is_singular(self):
        mirrors = mirror_set(CavityLosses((0, 0, 0), (0, 0, 0)))
        with pytest.raises(OscillationBoundaryError) as info:
            cavity_loop(mirrors, np.zeros((12, 12)), NO_GAIN)
        assert info.value.pivot == 0.0

    def test_geometric_series(self, ref_cfg):
        losses = ref_cfg.losses()
        mirrors = mirror_set(losses)
        d = cavity_loop(mirrors, np.zeros((12, 12)), NO_GAIN)
        rr = np.exp(-np.asarray(losses.gamma) - np.asarray(losses.gamma_prime))
        np.testing.assert_allclose(d, np.diag(np.tile(np.repeat(1 / (1 - rr), 2), 2)), atol=1e-14)

    def test_resolvent_inverts_loop(self, ref_cfg, ref_fields):
        mirrors = mirror_set(ref_cfg.losses())
        phase = phase_matrix(ref_cfg.operating_point())
        g = gain_matrix_full(ref_fields)
        d = cavity_loop(mirrors, phase, g)
        np.testing.assert_allclose(loop_matrix(mirrors, phase, g) @ d, np.eye(12), atol=1e-10)


class TestScattering:
    def test_lossless_empty_cavity_is_all_pass(self):
        losses = CavityLosses((0.2, 0.05, 0.3), (0.0, 0.0, 0.0))
        refl = reflection_matrix(mirror_set(losses), phase_matrix(OperatingPoint(0.0, 3e7)), NO_GAIN)
        np.testing.assert_allclose(np.abs(np.diag(refl)), 1.0, atol=1e-14)

    def test_no_mixing_without_gain(self, ref_cfg):
        refl = reflection_matrix(mirror_set(ref_cfg.losses()), phase_matrix(ref_cfg.operating_point()), NO_GAIN)
        assert not np.any(refl - np.diag(np.diag(refl)))

    def test_gain_mixes_modes_and_sidebands(self, ref_cfg, ref_fields):
        refl = reflection_matrix(mirror_set(ref_cfg.losses()), phase_matrix(ref_cfg.operating_point()),
                                 gain_matrix_full(ref_fields))
        for n in range(3):
            for m in range(3):
                if n != m:
                    assert np.max(np.abs(refl[2 * n:2 * n + 2, 2 * m:2 * m + 2])) > 1e-6
        assert np.max(np.abs(refl[:6, 6:])) > 1e-3

    def test_no_spurious_loss_no_transmission(self):
        losses = CavityLosses((0.2, 0.05, 0.05), (0.0, 0.0, 0.0))
        trans = transmission_matrix(mirror_set(losses), phase_matrix(OperatingPoint(1.5, 2e7)),
                                    gain_matrix_full(MeanFields(0.1, 0.05, 0.05)))
        assert not np.any(trans)

    @given(losses_st, points_st)
    def test_passive_unitarity(self, losses, op):
        refl, trans = scattering(mirror_set(losses), phase_matrix(op), NO_GAIN)
        out = refl @ refl.conj().T + trans @ trans.conj().T
        np.testing.assert_allclose(out, np.eye(12), atol=1e-10)

    @given(losses_st, points_st)
    def test_matches_scalar_fabry_perot(self, losses, op):
        phase = phase_matrix(op)
        refl = reflection_matrix(mirror_set(losses), phase, NO_GAIN)
        g = np.tile(np.repeat(losses.gamma, 2), 2)
        gp = np.tile(np.repeat(losses.gamma_prime, 2), 2)
        np.testing.assert_allclose(np.diag(refl), scalar_fabry_perot(g, gp, np.diag(phase)), atol=1e-12)

    @pytest.mark.parametrize("sigma", [1.05, 1.5, 1.75])
    def test_output_modes_are_bosonic(self, ref_cfg, sigma):
        cfg = ref_cfg.replace(sigma=sigma)
        mf = mean_fields(cfg.operating_point(), cfg.losses())
        refl, trans = scattering(mirror_set(cfg.losses()), phase_matrix(cfg.operating_point()), gain_matrix_full(mf))
        assert k_isometry_defect(refl, trans) <= 1e-10

    def test_sa_coupling_comes_from_sideband_phases(self, ref_cfg, ref_fields):
        lam = lambda_transform()
        mirrors = mirror_set(ref_cfg.losses())
        g = gain_matrix_full(ref_fields)
        op = ref_cfg.operating_point()
        sym = lam @ reflection_matrix(mirrors, phase_matrix(op, symmetric_sidebands=True), g) @ lam
        assert np.max(np.abs(sym[:6, 6:])) <= 1e-12 and np.max(np.abs(sym[6:, :6])) <= 1e-12
        opp = lam @ reflection_matrix(mirrors, phase_matrix(op), g) @ lam
        assert np.max(np.abs(opp[:6, 6:])) > 1e-4

    def test_boundary_error_from_scattering(self):
        mirrors = mirror_set(CavityLosses((0, 0, 0), (0, 0, 0)))
        with pytest.raises(OscillationBoundaryError):
            scattering(mirrors, np.zeros((12, 12)), NO_GAIN)
