import pytest

from patchorder.presets import (SELF_INIT_MU_SCHEDULE, deblur_preset, gaussian_preset,
                                named_preset, poisson_preset, preset_names, sr_preset,
                                with_mu)


class TestGaussianPreset:
    def test_tabulated_values(self):
        for sigma, num in ((25, 2.5), (50, 5.0), (75, 8.0), (100, 12.0)):
            p = gaussian_preset(sigma)
            assert p.mu == pytest.approx(num / (100.0 * 49.0), rel=1e-12)
            assert p.sigma == sigma
            assert p.problem == "gauss"

    def test_shared_parameters(self):
        p = gaussian_preset(50)
        assert (p.patch_side, p.window_side) == (7, 121)
        assert p.delta == 1e6
        assert (p.gamma_edge, p.g_thr, p.m_max) == (1.5, 3.5, 20.0)
        assert (p.epsilon_r, p.epsilon_p, p.penalty_scale) == (0.1, 1e-3, 1.0)
        assert p.n_shifts == 49
        assert p.binning == 1

    def test_interpolation(self):
        mid = gaussian_preset(62.5).mu
        lo, hi = gaussian_preset(50).mu, gaussian_preset(75).mu
        assert mid == pytest.approx(0.5 * (lo + hi), rel=1e-12)
        # clamped outside the table
        assert gaussian_preset(10).mu == gaussian_preset(25).mu
        assert gaussian_preset(300).mu == gaussian_preset(100).mu


class TestDeblurPreset:
    def test_tabulated_values(self):
        table = {1: 9.0, 2: 24.0, 3: 1.6, 4: 140.0, 5: 8.0, 6: 500.0}
        for scenario, num in table.items():
            p = deblur_preset(scenario)
            assert p.mu == pytest.approx(num / (1e5 * 49.0), rel=1e-12)
            assert p.scenario == scenario

    def test_noise_levels(self):
        assert deblur_preset(4).sigma == pytest.approx(7.0)
        assert deblur_preset(1).sigma == pytest.approx(2.0 ** 0.5)
        assert deblur_preset(6).sigma == pytest.approx(8.0)

    def test_unknown_scenario(self):
        with pytest.raises(ValueError):
            deblur_preset(7)


class TestSrPreset:
    def test_noiseless(self):
        p = sr_preset(False)
        assert p.mu == pytest.approx(1.0 / (1e5 * 49.0), rel=1e-12)
        assert p.sigma == 0.0
        assert (p.sr_factor, p.sr_blur_std, p.sr_blur_size) == (3, 1.6, 7)

    def test_noisy(self):
        p = sr_preset(True)
        assert p.mu == pytest.approx(9.0 / (1e5 * 49.0), rel=1e-12)
        assert p.sigma == 5.0


class TestPoissonPreset:
    def test_high_peak_geometry(self):
        p = poisson_preset(4.0)
        assert (p.patch_side, p.window_side) == (9, 201)
        assert p.binning == 1
        assert p.m_max == 5.0
        assert p.epsilon_f == 1e-3
        assert (p.g_thr, p.gamma_edge) == (20.0, 2.5)
        assert p.mu == pytest.approx(0.6 / 81.0, rel=1e-12)

    def test_low_peak_defaults_to_binning(self):
        p = poisson_preset(0.5)
        assert p.binning == 3
        assert (p.patch_side, p.window_side) == (7, 101)
        assert (p.g_thr, p.gamma_edge) == (10.0, 2.5)
        assert p.mu == pytest.approx(0.55 / 49.0, rel=1e-12)

    def test_edge_detection_disabled_rows(self):
        for peak, num in ((2.0, 0.9), (1.0, 1.35), (0.2, 0.95), (0.1, 1.15)):
            p = poisson_preset(peak)
            assert p.g_thr is None and p.gamma_edge == 1.0
            assert p.mu == pytest.approx(num / p.n_shifts, rel=1e-12)

    def test_binning_override(self):
        p = poisson_preset(4.0, binning=3)
        assert p.binning == 3
        assert (p.patch_side, p.window_side) == (7, 101)

    def test_unknown_peak(self):
        with pytest.raises(ValueError):
            poisson_preset(3.0)


class TestLookup:
    def test_named_round_trip(self):
        for name in preset_names():
            assert named_preset(name).name == name

    def test_expected_names_present(self):
        names = preset_names()
        for expected in ("gauss-sigma50", "deblur-scenario4", "sr-noisy",
                         "sr-noiseless", "poisson-peak0.5"):
            assert expected in names

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            named_preset("gauss-sigma51")

    def test_with_mu(self):
        p = with_mu(gaussian_preset(50), 0.123)
        assert p.mu == 0.123
        assert p.sigma == 50.0


def test_self_init_schedule():
    assert SELF_INIT_MU_SCHEDULE == (0.45, 0.12, 0.08)
