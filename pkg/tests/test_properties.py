import math

import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from liouville_cyl.correlators import CorrelatorSpec, lorentzian_correlator
from liouville_cyl.kernels import green_complex, green_euclidean, lightcone_distance, wrap
from liouville_cyl.oracles import neutral_two_point
from liouville_cyl.quadrature import ProductSampler, QuadratureConfig, Uniform, integrate_mc

times = st.floats(-3.0, 3.0, allow_nan=False)
spaces = st.floats(-1.0, 1.0, allow_nan=False)


@given(times, spaces)
def test_green_is_even_and_periodic(t, x):
    assume(abs(t) > 1e-3 or abs(wrap(x)) > 1e-3)
    g = green_euclidean((t, x))
    assert math.isclose(g, green_euclidean((-t, -x)), rel_tol=1e-12, abs_tol=1e-12)
    assert math.isclose(g, green_euclidean((t, x + 2.0)), rel_tol=1e-12, abs_tol=1e-12)


@given(st.floats(0.0, 3.0), times, spaces)
def test_green_bounds_in_right_half_plane(re, im, x):
    tau = complex(re, im)
    assume(lightcone_distance(tau, x) > 1e-6)
    h = complex(green_complex(tau, x)) + math.pi * tau / 2
    # -log(1 - q) with |q| <= 1
    assert abs(h.imag) <= math.pi / 2 + 1e-12
    assert h.real >= -math.log(2.0) - 1e-12


@given(st.floats(-1.0, 1.0), st.floats(-1.0, 1.0), st.floats(0.05, 0.45))
def test_spacelike_two_point_order_independent(t, x, alpha):
    assume(abs(wrap(x)) - abs(t) > 0.01 and abs(t) < 1.0)
    a = neutral_two_point(alpha, t, x, 12)
    b = neutral_two_point(alpha, t, x, 21)
    assert abs(a - b) <= 1e-12 * abs(a)


@given(st.floats(0.05, 0.95), st.floats(-0.9, 0.9))
@settings(max_examples=25, deadline=None)
def test_lorentzian_neutral_pair_is_oracle(t, x):
    assume(lightcone_distance(1j * t, x) > 0.02)
    spec = CorrelatorSpec.build(0.3, 1.0, [0.2, -0.2], [(0.0, 0.0), (t, x)])
    assert abs(lorentzian_correlator(spec).value - neutral_two_point(0.2, t, x, 12)) < 1e-12


@given(st.integers(0, 2**32), st.floats(-3, 3), st.floats(-3, 3))
@settings(max_examples=20, deadline=None)
def test_mc_is_linear_and_deterministic(seed, a, c):
    sampler = ProductSampler([Uniform(0.0, 1.0), Uniform(-1.0, 1.0)])
    cfg = QuadratureConfig(mc_samples=2_000, mc_seed=seed)
    f = lambda p: np.cos(p[:, 0] + p[:, 1])
    g = lambda p: p[:, 0] * p[:, 1] ** 2
    rf = integrate_mc(f, sampler, cfg).value
    rg = integrate_mc(g, sampler, cfg).value
    rh = integrate_mc(lambda p: a * f(p) + c * g(p), sampler, cfg).value
    assert abs(rh - (a * rf + c * rg)) < 1e-12 * (1 + abs(rh))
    assert integrate_mc(f, sampler, cfg).value == rf
