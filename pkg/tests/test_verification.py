import pytest

from liouville_cyl.quadrature import QuadratureConfig
from liouville_cyl.verification import SUITE_DEFAULTS, SUITES, Check, run_suite


def test_check_line_tags():
    assert Check("a", 1.0, 2.0, True).line().startswith("PASS")
    assert Check("a", 3.0, 2.0, False).line().startswith("FAIL")
    assert Check("a", 3.0, 2.0, True, "no-claim").line().startswith("INFO")


def test_every_suite_has_defaults():
    assert set(SUITES) == set(SUITE_DEFAULTS)
    with pytest.raises(KeyError):
        run_suite("bogus")


@pytest.mark.parametrize("name", ["translation", "conjugation", "zero-charge", "euclidean-symmetry", "negative-w"])
def test_deterministic_suites_pass(name):
    checks = run_suite(name)
    assert checks and all(c.passed for c in checks), [c.line() for c in checks if not c.passed]


def test_locality_suite_passes_and_has_control():
    checks = run_suite("locality", n_pairs=3)
    assert len(checks) == 4 and all(c.passed for c in checks)
    assert "timelike" in checks[-1].name


def test_locality_suite_w0():
    assert all(c.passed for c in run_suite("locality", w=0, n_pairs=2))
    with pytest.raises(ValueError):
        run_suite("locality", w=2)


def test_hermiticity_suite_small_sample():
    checks = run_suite("hermiticity", cfg=QuadratureConfig(mc_samples=50_000))
    assert len(checks) == 2 and all(c.passed for c in checks)


def test_hermiticity_suite_large_b_uses_admissible_charges():
    checks = run_suite("hermiticity", b=0.45, cfg=QuadratureConfig(mc_samples=20_000))
    assert "(-1,-1)" in checks[0].name


def test_indefiniteness_no_claim_above_threshold():
    checks = run_suite("indefiniteness", b=0.4, eps=(0.3, 0.2), cfg=QuadratureConfig(mc_samples=5_000))
    assert all(c.passed for c in checks)
    assert all(c.note == "no-claim" for c in checks[1:])


@pytest.mark.slow
def test_indefiniteness_suite_default():
    checks = run_suite("indefiniteness")
    assert all(c.passed for c in checks), [c.line() for c in checks]
