import cmath
import math

import numpy as np
import pytest

from liouville_cyl.correlators import (
    CorrelatorSpec,
    Insertion,
    ScreeningPosition,
    Visit,
    build_contour,
    euclidean_correlator,
    exchange_adjacent,
    lorentzian_correlator,
    renormalization_factor,
    screening_number,
    sector_weights,
    time_ordered_g,
    torus_correlator,
)
from liouville_cyl.errors import (
    DomainError,
    LightConeViolation,
    NonIntegerScreening,
    SingularConfiguration,
)
from liouville_cyl.kernels import CylinderPoint, TorusSpec, green_boundary, green_euclidean
from liouville_cyl.oracles import neutral_two_point
from liouville_cyl.quadrature import QuadratureConfig

B = 0.3
IB03 = 7.09892495781284442399032740053
FAST = QuadratureConfig(rel_tol=1e-7)


def tadpole(point, b=B, mu=1.0):
    return CorrelatorSpec.build(b, mu, [-b], [point])


def test_screening_number():
    assert screening_number([-0.3, -0.3, 0.3], 0.3) == 1
    assert screening_number([0.3], 0.3) == -1
    with pytest.raises(NonIntegerScreening) as exc:
        screening_number([-0.2], 0.3)
    assert exc.value.deviation == pytest.approx(1 / 3)


def test_spec_sorted_by_label_and_validated():
    spec = CorrelatorSpec.build(B, 1.0, [-B, 0.0], [(0, 0), (1, 0.5)], labels=[5, 2])
    assert [i.label for i in spec.insertions] == [2, 5]
    assert spec.w == 1 and spec.k == 2
    with pytest.raises(DomainError):
        CorrelatorSpec.build(B, 1.0, [-B, 0.0], [(0, 0), (1, 0.5)], labels=[1, 1])
    with pytest.raises(DomainError):
        CorrelatorSpec.build(B, 1.0, [-2.0], [(0, 0)])
    with pytest.raises(DomainError):
        CorrelatorSpec.build(0.9, 1.0, [-0.9], [(0, 0)])


def test_translated_spec():
    spec = tadpole((0.1, 0.9)).translated(1.0, 0.3)
    p = spec.insertions[0].point
    assert (p.t, p.x) == pytest.approx((1.1, -0.8), abs=1e-14)


def test_sector_weights():
    assert sector_weights(3, 1) == [((0,), 1.0), ((1,), 1.0), ((2,), 1.0)]
    w2 = dict(sector_weights(2, 2))
    assert w2 == {(0, 0): 0.5, (0, 1): 1.0, (1, 1): 0.5}
    # total weight reproduces n^w / w!
    assert sum(w for _, w in sector_weights(4, 3)) == pytest.approx(4**3 / 6)


def test_contour_segments():
    ins = [Insertion(0.0, (0.0, 0.0), 1), Insertion(0.0, (0.5, 0.3), 2), Insertion(0.0, (0.5, -0.2), 3),
           Insertion(0.0, (0.1, 0.1), 4)]
    c = build_contour(ins)
    kinds = [(s.kind, s.index, s.orientation) for s in c.segments]
    # the zero-length piece between labels 2 and 3 is dropped
    assert kinds == [("left-tail", 0, 1), ("vertical", 1, 1), ("vertical", 3, -1), ("right-tail", 4, 1)]
    assert c.segment(3).jacobian == pytest.approx(-0.4j)
    assert c.segment(0).position(2.0) == complex(-2.0, 0.0)


def test_time_ordered_g():
    ins = [Insertion(0.0, (0.0, 0.0), 1), Insertion(0.0, (0.6, 0.2), 2)]
    c = build_contour(ins)
    v1, v2 = Visit(1, CylinderPoint(0, 0)), Visit(2, CylinderPoint(0.6, 0.2))
    assert time_ordered_g(c, v1, v2) == pytest.approx(green_boundary(0.6, 0.2))
    assert time_ordered_g(c, v2, v1) == time_ordered_g(c, v1, v2)
    # a screening point on the vertical between the visits is later than visit 1
    s = ScreeningPosition(1, 0.5, 0.0)
    assert time_ordered_g(c, s, v1) == pytest.approx(green_boundary(0.3, 0.0))
    assert time_ordered_g(c, s, v2) == pytest.approx(green_boundary(0.3, 0.2))
    # left tail: later than nothing; the difference to visit 1 has Re tau = +c
    s0 = ScreeningPosition(0, 0.4, 0.1)
    from liouville_cyl.kernels import green_complex

    assert time_ordered_g(c, s0, v1) == pytest.approx(complex(green_complex(0.4 + 0j, -0.1)))


def test_w_zero_euclidean_is_free_product():
    spec = CorrelatorSpec.build(B, 1.0, [0.2, -0.2], [(0, 0), (0.4, 0.5)])
    r = euclidean_correlator(spec)
    assert r.error_estimate == 0 and r.converged
    assert r.value == pytest.approx(math.exp(4 * 0.04 * green_euclidean((0.4, 0.5))), rel=1e-14)


def test_negative_screening_is_exact_zero():
    spec = CorrelatorSpec.build(B, 1.0, [B], [(0, 0.2)])
    for fn in (euclidean_correlator, lorentzian_correlator):
        r = fn(spec)
        assert r.value == 0 and r.converged and r.w == -1
    assert torus_correlator(spec, TorusSpec(4.0)).value == 0


def test_size_limits():
    with pytest.raises(DomainError):
        euclidean_correlator(CorrelatorSpec.build(B, 1.0, [-B] * 4, [(i * 0.1, i * 0.3) for i in range(4)]))
    with pytest.raises(DomainError):
        euclidean_correlator(CorrelatorSpec.build(B, 1.0, [0.0] * 5, [(i * 0.1, i * 0.3) for i in range(5)]))


def test_coincident_insertions_rejected():
    spec = CorrelatorSpec.build(B, 1.0, [B, -B], [(0, 0), (0, 2.0)])
    with pytest.raises(SingularConfiguration):
        euclidean_correlator(spec)


def test_lightcone_pair_named():
    spec = CorrelatorSpec.build(B, 1.0, [B, -B], [(0, 0), (0.5, 0.5)], labels=[3, 8])
    with pytest.raises(LightConeViolation) as exc:
        lorentzian_correlator(spec)
    assert exc.value.pair == (3, 8)


def test_euclidean_tadpole_matches_oracle():
    r = euclidean_correlator(tadpole((0.2, 0.3)), QuadratureConfig(rel_tol=1e-8))
    assert r.converged
    assert r.value.real == pytest.approx(-IB03, rel=1e-8)


def test_euclidean_tadpole_scales_with_mu():
    r = euclidean_correlator(tadpole((0.0, 0.0), mu=2.5), FAST)
    assert r.value.real == pytest.approx(-2.5 * IB03, rel=1e-6)


@pytest.mark.parametrize("point", [(0.0, 0.0), (1.3, -0.7)])
def test_lorentzian_tadpole_matches_oracle(point):
    r = lorentzian_correlator(tadpole(point), FAST)
    assert r.converged
    assert abs(r.value + IB03) < 1e-6 * IB03


def test_lorentzian_w0_matches_closed_form():
    alpha = 0.3
    for t, x in [(0.7, 0.25), (0.2, 0.6)]:
        spec = CorrelatorSpec.build(B, 1.0, [alpha, -alpha], [(0, 0), (t, x)])
        r = lorentzian_correlator(spec)
        assert abs(r.value - neutral_two_point(alpha, t, x, 12)) < 1e-12


def test_equal_time_lorentzian_equals_euclidean():
    spec = CorrelatorSpec.build(B, 1.0, [B, -2 * B], [(0.2, 0.0), (0.2, 0.6)])
    e = euclidean_correlator(spec, FAST)
    l = lorentzian_correlator(spec, FAST)
    assert abs(e.value - l.value) < 3 * (e.error_estimate + l.error_estimate) + 1e-12


def test_lorentzian_details_per_sector():
    spec = CorrelatorSpec.build(B, 1.0, [B, -2 * B], [(0.0, 0.0), (0.6, 0.2)])
    r = lorentzian_correlator(spec, FAST)
    assert set(r.details) == {"(0,)", "(1,)", "(2,)"}


def test_spacelike_exchange_w1():
    spec = CorrelatorSpec.build(B, 1.0, [B, -2 * B], [(0.0, 0.0), (0.2, 0.7)])
    r1, r2 = exchange_adjacent(spec, 1, QuadratureConfig(rel_tol=1e-6))
    assert abs(r1.value - r2.value) < max(1e-3 * abs(r1.value), 3 * (r1.error_estimate + r2.error_estimate))


def test_timelike_exchange_w1_differs():
    spec = CorrelatorSpec.build(B, 1.0, [B, -2 * B], [(0.0, 0.0), (0.6, 0.2)])
    r1, r2 = exchange_adjacent(spec, 1, FAST)
    assert abs(r1.value - r2.value) > 100 * (r1.error_estimate + r2.error_estimate)


def test_exchange_position_validated():
    spec = CorrelatorSpec.build(B, 1.0, [B, -2 * B], [(0.0, 0.0), (0.6, 0.2)])
    with pytest.raises(DomainError):
        exchange_adjacent(spec, 2)


def test_w2_euclidean_vs_equal_time_lorentzian():
    # two Monte Carlo routes with different samplers
    spec = CorrelatorSpec.build(B, 1.0, [-B, -B], [(0.0, -0.5), (0.0, 0.5)])
    cfg = QuadratureConfig(mc_samples=100_000, mc_seed=1)
    e = euclidean_correlator(spec, cfg)
    l = lorentzian_correlator(spec, cfg)
    assert e.method == "euclidean:mc" and l.method == "lorentzian:mc"
    assert abs(e.value - l.value) < 4 * math.hypot(e.error_estimate, l.error_estimate)


def test_renormalization_factor():
    spec = CorrelatorSpec.build(B, 1.0, [0.2, -0.2], [(0, 0), (0.4, 0.5)])
    expected = math.exp(math.pi * 4.0 / 3.0 * (0.2 * 0.1 + (-0.2) * 0.5))
    assert renormalization_factor(spec, 4.0) == pytest.approx(expected, rel=1e-14)


def test_torus_two_point_equal_time_converges_fast():
    spec = CorrelatorSpec.build(B, 1.0, [0.2, -0.2], [(0.0, 0.0), (0.0, 0.5)])
    cyl = euclidean_correlator(spec).value
    errs = []
    for T in (2.0, 4.0, 8.0):
        v = renormalization_factor(spec, T) * torus_correlator(spec, TorusSpec(T)).value
        errs.append(abs(v / cyl - 1))
    assert errs[0] > errs[1]
    assert errs[2] < 1e-12


def test_torus_two_point_off_slice_error_is_algebraic():
    # relative error ~ pi alpha^2 t^2 / T from the zero-mode term
    spec = CorrelatorSpec.build(B, 1.0, [0.2, -0.2], [(0.0, 0.0), (1.0, 0.5)])
    cyl = euclidean_correlator(spec).value
    T = 8.0
    v = renormalization_factor(spec, T) * torus_correlator(spec, TorusSpec(T)).value
    assert v / cyl - 1 == pytest.approx(math.expm1(4 * 0.04 * math.pi / (4 * T)), rel=1e-6)


def test_torus_truncated_close_to_exact():
    spec = CorrelatorSpec.build(B, 1.0, [0.2, -0.2], [(0.0, 0.0), (0.3, 0.5)])
    a = torus_correlator(spec, TorusSpec(2.0, 512), truncated=True).value
    b = torus_correlator(spec, TorusSpec(2.0)).value
    assert abs(a / b - 1) < 1e-4


def test_torus_tadpole_trends_to_cylinder():
    errs = []
    for T in (2.0, 4.0):
        spec = tadpole((0.0, 0.0))
        v = renormalization_factor(spec, T) * torus_correlator(spec, TorusSpec(T), FAST).value
        errs.append(abs(v.real + IB03))
    assert errs[1] < errs[0]


def test_torus_outside_range():
    with pytest.raises(DomainError):
        torus_correlator(tadpole((3.0, 0.0)), TorusSpec(2.0))


def test_complex_charge_conjugation():
    # Euclidean correlator of conjugate charges is the conjugate
    a = 0.1 + 0.05j
    spec = CorrelatorSpec.build(B, 1.0, [a, -a], [(0, 0), (0.4, 0.5)])
    specc = CorrelatorSpec.build(B, 1.0, [a.conjugate(), -a.conjugate()], [(0, 0), (0.4, 0.5)])
    assert euclidean_correlator(specc).value == pytest.approx(euclidean_correlator(spec).value.conjugate())
    assert cmath.isfinite(euclidean_correlator(spec).value)
