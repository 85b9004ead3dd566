import numpy as np
import pytest

from defect_spectro.errors import SingularDesign, ValidationError
from defect_spectro.stark import StarkSeries, effective_field, fit_stark, parameter_covariance, stark_shift


def exact_series(dmu, dalpha, eps, fields, zpl0=2.0):
    shifts = stark_shift(fields, dmu, dalpha, eps)
    return StarkSeries("s", zpl0, tuple(zip(fields, zpl0 + shifts)))


def test_fixture_series_recovers_published_parameters(reference_dataset):
    fit = fit_stark(reference_dataset.stark_series["PaV2-2"], 5.7)
    assert fit.delta_mu == pytest.approx(1.23, rel=1e-9)
    assert fit.delta_alpha == pytest.approx(0.12, rel=1e-9)
    fit = fit_stark(reference_dataset.stark_series["PaV2-1"], 5.7)
    assert fit.delta_mu == pytest.approx(0.02, rel=1e-9)
    assert fit.delta_alpha == pytest.approx(0.025, rel=1e-9)


def test_hand_computed_three_point_fit():
    # eps = 1: shift = -dmu E - dalpha E^2 / 2 with dmu = 2, dalpha = 4
    series = StarkSeries("h", 1.0, ((-1.0, 1.0 + 2 - 2), (0.5, 1.0 - 1 - 0.5), (1.0, 1.0 - 2 - 2)))
    fit = fit_stark(series, 1.0)
    assert fit.delta_mu == pytest.approx(2.0, abs=1e-12)
    assert fit.delta_alpha == pytest.approx(4.0, abs=1e-12)
    assert fit.residual_rms < 1e-12


def test_symmetric_fields_zero_dipole():
    fields = np.array([-0.2, -0.1, 0.1, 0.2])
    fit = fit_stark(exact_series(0.0, 0.5, 5.7, fields), 5.7)
    assert abs(fit.delta_mu) < 1e-12


def test_noise_free_covariance_vanishes():
    fit = fit_stark(exact_series(1.0, 0.1, 5.7, np.linspace(-0.2, 0.2, 7)), 5.7)
    assert np.all(np.abs(fit.covariance) < 1e-20)


def test_monte_carlo_noise_matches_propagated_uncertainty():
    rng = np.random.default_rng(20240601)
    fields = np.linspace(-0.3, 0.3, 11)
    eps, dmu, dalpha, sigma = 5.7, 1.23, 0.12, 1e-4
    clean = exact_series(dmu, dalpha, eps, fields)
    cov = parameter_covariance(clean, eps, sigma)
    std = np.sqrt(np.diag(cov))
    draws = []
    for _ in range(2000):
        noisy = tuple((e, z + rng.normal(0, sigma)) for e, z in clean.points)
        fit = fit_stark(StarkSeries("n", clean.zpl0, noisy), eps)
        draws.append((fit.delta_mu, fit.delta_alpha))
    draws = np.array(draws)
    inside = np.all(np.abs(draws - [dmu, dalpha]) <= 3 * std, axis=1).mean()
    assert inside >= 0.99
    emp = draws.std(axis=0)
    assert np.all(np.abs(emp / std - 1) < 0.15)


def test_too_few_points():
    with pytest.raises(ValidationError):
        StarkSeries("x", 1.0, ((0.0, 1.0), (0.1, 1.1)))


def test_duplicate_fields():
    with pytest.raises(ValidationError):
        StarkSeries("x", 1.0, ((0.1, 1.0), (0.1, 1.1), (0.2, 1.2)))


def test_all_zero_fields_is_singular():
    series = StarkSeries("x", 1.0, ((0.0, 1.0), (1e-300, 1.0), (-1e-300, 1.0)))
    with pytest.raises(SingularDesign):
        fit_stark(series, 5.7)


def test_dielectric_below_one_rejected():
    with pytest.raises(ValueError):
        fit_stark(exact_series(1, 1, 2, np.array([-1.0, 0.5, 1.0])), 0.5)


def test_effective_field_published_values():
    assert effective_field(1.23) == pytest.approx(1.7, rel=0.05)
    assert effective_field(0.02) == pytest.approx(0.028, rel=0.05)


def test_effective_field_scalings():
    base = effective_field(1.0)
    assert effective_field(1.0, z_scale=2.0) == pytest.approx(base / 8, rel=1e-15)
    assert effective_field(1.0, shielding=100.0) == pytest.approx(base / 100, rel=1e-15)
    with pytest.raises(ValueError):
        effective_field(1.0, shielding=0.5)
    with pytest.raises(ValueError):
        effective_field(1.0, z_scale=0.0)


def test_effective_field_linear_in_dipole():
    for dmu in (0.01, 0.5, 3.0):
        assert effective_field(dmu) == pytest.approx(dmu * effective_field(1.0), rel=1e-15)


def test_fit_invariant_under_common_offset():
    s = exact_series(0.8, 0.2, 5.7, np.linspace(-0.2, 0.2, 5))
    moved = StarkSeries("m", s.zpl0 + 0.5, tuple((e, z + 0.5) for e, z in s.points))
    a, b = fit_stark(s, 5.7), fit_stark(moved, 5.7)
    assert b.delta_mu == pytest.approx(a.delta_mu, rel=1e-9)
    assert b.delta_alpha == pytest.approx(a.delta_alpha, rel=1e-9)
    # shifting only the points (not zpl0) changes the answer: no hidden intercept
    drift = StarkSeries("d", s.zpl0, tuple((e, z + 0.5) for e, z in s.points))
    assert fit_stark(drift, 5.7).residual_rms > 1e-3
