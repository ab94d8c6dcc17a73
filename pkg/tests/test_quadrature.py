import math
import warnings

import numpy as np
import pytest

from liouville_cyl.errors import BudgetExceeded, ConfigError, MCAbort
from liouville_cyl.quadrature import (
    Exponential,
    Hyperplane,
    IntegrationResult,
    Laplace,
    PowerLaw,
    ProductSampler,
    QuadratureConfig,
    Tabulated,
    Uniform,
    combine,
    integrate_adaptive,
    integrate_mc,
    integrate_tail,
    load_config,
)

# mpmath: int_0^inf e^{-2 pi b^2 x} (1 - e^{-pi x})^{-8 b^2} dx at b = 0.3
TAIL_B03 = 2.72942258269229514


def test_config_validation():
    with pytest.raises(ConfigError):
        QuadratureConfig(rel_tol=0.0)
    with pytest.raises(ConfigError):
        QuadratureConfig(mc_samples=0)
    with pytest.raises(ConfigError):
        QuadratureConfig.from_mapping({"bogus": 1})


def test_config_from_mapping_coerces_strings():
    cfg = QuadratureConfig.from_mapping({"rel_tol": "1e-6", "mc-samples": "1e4", "strict": "yes"})
    assert cfg.rel_tol == 1e-6 and cfg.mc_samples == 10_000 and cfg.strict


def test_load_config(tmp_path):
    p = tmp_path / "q.ini"
    p.write_text("[quadrature]\nrel_tol = 1e-5\nmc_seed = 7\n")
    cfg = load_config(p)
    assert cfg.rel_tol == 1e-5 and cfg.mc_seed == 7
    (tmp_path / "bad.ini").write_text("[other]\nx = 1\n")
    with pytest.raises(ConfigError):
        load_config(tmp_path / "bad.ini")


def test_smooth_1d():
    r = integrate_adaptive(lambda p: np.cos(p[:, 0]), [(0.0, 2.0)])
    assert r.converged
    assert r.value.real == pytest.approx(math.sin(2.0), rel=1e-13)


def test_endpoint_singularity():
    r = integrate_adaptive(lambda p: p[:, 0] ** -0.5, [(0.0, 1.0)], singular=[Hyperplane((1.0,), 0.0, 0.5)])
    assert r.converged
    assert abs(r.value - 2.0) < 1e-12


def test_interior_singularity_with_nearby_partner():
    # two singular points 2e-7 apart; mpmath reference
    d = 2e-7
    planes = [Hyperplane((1.0,), -d / 2, 0.36), Hyperplane((1.0,), d / 2, 0.36)]
    r = integrate_adaptive(
        lambda p: np.abs(p[:, 0] + d / 2) ** -0.36 * np.abs(p[:, 0] - d / 2) ** -0.36, [(-1.0, 1.0)], singular=planes
    )
    assert r.converged
    assert abs(r.value - 7.10355582179110212682678259368) < max(r.error_estimate, 1e-7)


def test_diagonal_singularity_2d():
    r = integrate_adaptive(
        lambda p: np.abs(p[:, 0] - p[:, 1]) ** -0.5,
        [(0.0, 1.0), (0.0, 1.0)],
        QuadratureConfig(rel_tol=1e-8),
        [Hyperplane((1.0, -1.0), 0.0, 0.5)],
    )
    assert r.converged
    assert abs(r.value - 8.0 / 3.0) < 1e-9


def test_product_singularity_3d():
    f = lambda p: np.prod(np.abs(p - 0.3), axis=1) ** -0.3
    planes = [Hyperplane(n, 0.3, 0.3) for n in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
    r = integrate_adaptive(f, [(0.0, 1.0)] * 3, QuadratureConfig(rel_tol=1e-7), planes)
    one = (0.3**0.7 + 0.7**0.7) / 0.7
    assert r.value.real == pytest.approx(one**3, rel=1e-9)


def test_complex_integrand():
    r = integrate_adaptive(lambda p: np.exp(1j * p[:, 0]), [(0.0, math.pi)])
    assert abs(r.value - 2j) < 1e-13


def test_tail_integral_matches_reference():
    b = 0.3
    f = lambda x: np.exp(-2 * np.pi * b * b * x) * (-np.expm1(-np.pi * x)) ** (-8 * b * b)
    r = integrate_tail(f, 2 * np.pi * b * b, QuadratureConfig(rel_tol=1e-11, abs_tol=1e-13), 8 * b * b)
    assert r.converged
    assert r.value.real == pytest.approx(TAIL_B03, rel=1e-11)


def test_semi_infinite_lower_axis():
    r = integrate_adaptive(lambda p: np.exp(p[:, 0]), [(-math.inf, 0.0)], decay=1.0)
    assert r.value.real == pytest.approx(1.0, rel=1e-10)


def test_divergent_integral_reports_failure():
    r = integrate_adaptive(lambda p: p[:, 0] ** -2.0, [(0.0, 1.0)], singular=[Hyperplane((1.0,), 0.0, 2.0)])
    assert not r.converged
    assert r.error_estimate == math.inf


def test_budget_exhaustion_nonstrict_and_strict():
    f = lambda p: np.abs(p[:, 0] - 1 / 3) ** -0.9
    r = integrate_adaptive(f, [(0.0, 1.0)], QuadratureConfig(max_evals=200))
    assert not r.converged
    with pytest.raises(BudgetExceeded) as exc:
        integrate_adaptive(f, [(0.0, 1.0)], QuadratureConfig(max_evals=200, strict=True))
    assert isinstance(exc.value.result, IntegrationResult)


def test_combine_and_scaled():
    a = IntegrationResult(1.0, 0.1, 10, True)
    b = IntegrationResult(2j, 0.2, 5, False)
    c = combine([a, b])
    assert c.value == 1 + 2j and c.error_estimate == pytest.approx(0.3) and c.evals == 15 and not c.converged
    assert a.scaled(-2j).value == -2j and a.scaled(-2j).error_estimate == pytest.approx(0.2)


@pytest.mark.parametrize(
    "component, check",
    [
        (Uniform(-1.0, 3.0), lambda x: (x >= -1) & (x <= 3)),
        (Exponential(2.0, 1.0), lambda x: x >= 1),
        (Laplace(1.5, 0.5), lambda x: np.isfinite(x)),
        (PowerLaw(0.5, 0.0, 2.0), lambda x: (x >= 0) & (x <= 2)),
    ],
)
def test_sampler_pdfs_are_normalised(component, check):
    u = np.linspace(0.01, 0.99, 20_001)
    x, pdf = component.sample(u)
    assert np.all(check(x))
    # the reported pdf must be the reciprocal derivative of the quantile map
    dx = np.gradient(x, u)
    assert np.allclose((pdf * dx)[1:-1], 1.0, rtol=1e-4)


def test_tabulated_sampler_exact_pdf():
    grid = np.linspace(-1, 1, 101)
    dens = np.exp(-(grid**2))
    s = Tabulated(grid, dens)
    u = (np.arange(50_000) + 0.5) / 50_000
    x, pdf = s.sample(u)
    assert np.all((x >= -1) & (x <= 1))
    assert np.mean(1.0 / pdf) == pytest.approx(2.0, rel=1e-6)


def test_mc_gaussian_integral_and_error():
    cfg = QuadratureConfig(mc_samples=200_000, mc_seed=3)
    sampler = ProductSampler([Laplace(1.0), Laplace(1.0)])
    r = integrate_mc(lambda p: np.exp(-np.sum(p**2, axis=1)), sampler, cfg)
    assert abs(r.value - math.pi) < 4 * r.error_estimate
    assert r.error_estimate < 0.01


def test_mc_is_deterministic_and_seed_dependent():
    sampler = ProductSampler([Uniform(0.0, 1.0), Uniform(0.0, 1.0)])
    f = lambda p: np.sin(p[:, 0] * p[:, 1])
    cfg = QuadratureConfig(mc_samples=20_000, mc_seed=11)
    a = integrate_mc(f, sampler, cfg)
    b = integrate_mc(f, sampler, cfg)
    c = integrate_mc(f, sampler, cfg.replace(mc_seed=12))
    assert a.value == b.value and a.error_estimate == b.error_estimate
    assert a.value != c.value


def test_mc_chunk_size_does_not_change_result():
    sampler = ProductSampler([Uniform(0.0, 1.0)])
    f = lambda p: p[:, 0] ** 2
    cfg = QuadratureConfig(mc_samples=10_000, mc_seed=5)
    assert integrate_mc(f, sampler, cfg, chunk=97).value == integrate_mc(f, sampler, cfg, chunk=1 << 16).value


def test_mc_abort_on_nonfinite():
    sampler = ProductSampler([Uniform(0.0, 1.0)])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(MCAbort):
            integrate_mc(lambda p: np.full(len(p), np.nan), sampler, QuadratureConfig(mc_samples=1000))
