"""Closed-form reference values.

Generalized hypergeometric series, the neutral two-point function with its
exchange phase and vacuum commutator, and the one-point (tadpole) constant

    I_b = (2 / (pi b^2)) 3F2(2b^2, 2b^2, b^2; 1, b^2 + 1; 1)

together with two integral representations used for cross-checks.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import hyp2f1

from .errors import DomainError, SlowConvergence
from .kernels import DELTA_LC, green_boundary, wrap
from .quadrature import Hyperplane, QuadratureConfig, integrate_adaptive, integrate_tail

__all__ = [
    "HypergeometricSpec",
    "pochhammer",
    "hypergeometric_pFq",
    "tadpole_Ib",
    "tadpole_t_integral",
    "tadpole_y_integral",
    "tadpole_constant",
    "angular_average",
    "neutral_two_point",
    "vacuum_commutator",
    "SERIES_CAP",
]

SERIES_CAP = 10**7
B_MAX = 2.0**-0.5


def pochhammer(a, n):
    """Rising factorial ``(a)_n = a (a+1) ... (a+n-1)``."""
    n = int(n)
    if n < 0:
        raise DomainError(f"Pochhammer index must be >= 0, got {n}")
    out = 1.0
    for i in range(n):
        out *= a + i
    return out


@dataclass(frozen=True)
class HypergeometricSpec:
    top: tuple
    bottom: tuple
    z: float

    def __post_init__(self):
        object.__setattr__(self, "top", tuple(float(a) for a in self.top))
        object.__setattr__(self, "bottom", tuple(float(b) for b in self.bottom))
        object.__setattr__(self, "z", float(self.z))
        for b in self.bottom:
            if b <= 0 and b == int(b):
                raise DomainError(f"bottom parameter {b} is a nonpositive integer")
        p, q = len(self.top), len(self.bottom)
        terminating = any(a <= 0 and a == int(a) for a in self.top)
        if terminating:
            return
        if p > q + 1 or (p == q + 1 and abs(self.z) > 1):
            raise DomainError(f"{p}F{q} series diverges at z={self.z}")
        if p == q + 1 and abs(self.z) == 1:
            excess = sum(self.bottom) - sum(self.top)
            if not excess > 0:
                raise DomainError(
                    f"{p}F{q} at |z|=1 needs sum(bottom) - sum(top) > 0, got {excess:.6g}"
                )


def hypergeometric_pFq(spec, cap=SERIES_CAP, rtol=1e-16, chunk=1 << 16):
    """Sum the defining series of ``pFq(top; bottom; z)``.

    Terms are generated from their ratio in vectorised chunks.  Summation
    stops once ``|term| < rtol * |partial|``; if the cap is reached first a
    :class:`SlowConvergence` warning is emitted and the partial sum returned.
    """
    if not isinstance(spec, HypergeometricSpec):
        spec = HypergeometricSpec(*spec)
    top = np.array(spec.top)
    bot = np.array(spec.bottom)
    z = spec.z
    total = 1.0
    term = 1.0
    n0 = 0
    while n0 < cap:
        m = min(chunk, cap - n0)
        n = np.arange(n0, n0 + m, dtype=float)
        ratio = z / (n + 1.0)
        for a in top:
            ratio = ratio * (a + n)
        for b in bot:
            ratio = ratio / (b + n)
        terms = term * np.cumprod(ratio)
        small = np.abs(terms) < rtol * np.abs(total + np.cumsum(terms))
        if np.any(small):
            stop = int(np.argmax(small)) + 1
            return float(total + math.fsum(terms[:stop]))
        total += math.fsum(terms)
        term = terms[-1]
        if term == 0.0:
            return float(total)
        n0 += m
    warnings.warn(
        f"hypergeometric series hit the {cap}-term cap (last term {term:.3g})",
        SlowConvergence,
        stacklevel=2,
    )
    return float(total)


def _check_b(b):
    b = float(b)
    if not 0 < b < B_MAX:
        raise DomainError(f"coupling must satisfy 0 < b < 2**-0.5, got b={b}")
    return b


def tadpole_Ib(b, cap=SERIES_CAP):
    """The one-point constant ``I_b`` from the 3F2 series at unit argument."""
    b = _check_b(b)
    b2 = b * b
    f = hypergeometric_pFq(HypergeometricSpec((2 * b2, 2 * b2, b2), (1.0, b2 + 1.0), 1.0), cap=cap)
    return 2.0 / (math.pi * b2) * f


def tadpole_constant(b, mu=1.0):
    """Constant value ``c_b = -mu I_b`` of the one-point function."""
    return -float(mu) * tadpole_Ib(b)


def tadpole_t_integral(b, cfg=None):
    """``I_b = 4 int_0^inf e^{-2 pi b^2 t} 2F1(2b^2, 2b^2; 1; e^{-2 pi t}) dt``.

    The Gauss function comes from :func:`scipy.special.hyp2f1`.
    """
    b = _check_b(b)
    b2 = b * b
    cfg = cfg or QuadratureConfig(rel_tol=1e-11, abs_tol=1e-13)

    def f(t):
        return 4.0 * np.exp(-2 * np.pi * b2 * t) * hyp2f1(2 * b2, 2 * b2, 1.0, np.exp(-2 * np.pi * t))

    return integrate_tail(f, 2 * np.pi * b2, cfg, singular_exponent=4 * b2 - 1.0)


def tadpole_y_integral(b, cfg=None):
    """``I_b = (2/pi) int_0^1 y^{b^2-1} 2F1(2b^2, 2b^2; 1; y) dy``.

    Computed after the substitution ``s = y**(b^2)``, which absorbs the
    ``y^{b^2-1}`` endpoint singularity exactly.
    """
    b = _check_b(b)
    b2 = b * b
    cfg = cfg or QuadratureConfig(rel_tol=1e-11, abs_tol=1e-13)

    def f(p):
        s = p[:, 0]
        return 2.0 / (np.pi * b2) * hyp2f1(2 * b2, 2 * b2, 1.0, s ** (1.0 / b2))

    return integrate_adaptive(f, [(0.0, 1.0)], cfg, [Hyperplane((1.0,), 1.0, 4 * b2 - 1.0)])


def angular_average(b, q, cfg=None):
    """``(1/pi) int_{-pi}^{pi} (1 - q e^{i th})^{-2b^2} (1 - q e^{-i th})^{-2b^2} d th``."""
    b2 = float(b) ** 2
    cfg = cfg or QuadratureConfig(rel_tol=1e-12, abs_tol=1e-14)

    def f(p):
        th = p[:, 0]
        w = 1.0 - q * np.exp(1j * th)
        return (w * np.conj(w)).real ** (-2 * b2) / np.pi

    return integrate_adaptive(f, [(-np.pi, np.pi)], cfg)


def neutral_two_point(alpha, t, x, order=12, b=None, delta_lc=DELTA_LC):
    """Neutral pair ``V_alpha(0,0) V_{-alpha}(t,x)`` (order 12) or reversed (21)."""
    alpha = float(alpha)
    if b is not None and not 0 < alpha < 1.0 / (2.0 * b):
        raise DomainError(f"alpha must lie in (0, 1/(2b)), got {alpha}")
    if order in (12, "12"):
        g = green_boundary(t, x, delta_lc)
    elif order in (21, "21"):
        g = green_boundary(-t, -x, delta_lc)
    else:
        raise DomainError(f"order must be 12 or 21, got {order!r}")
    return complex(np.exp(4.0 * alpha * alpha * g))


def _sine_product(t, x):
    return 4.0 * math.sin(math.pi * (t + x) / 2.0) * math.sin(math.pi * (t - x) / 2.0)


def vacuum_commutator(alpha, t, x, delta_lc=DELTA_LC):
    """Vacuum matrix element of the commutator of a neutral pair.

    Zero for ``0 < |t| < |x|`` and ``-2i sin(2 pi alpha^2) S^{-2 alpha^2}``
    with ``S = 4 sin(pi(t+x)/2) sin(pi(t-x)/2)`` for ``|x| < t < 2 - |x|``
    (odd in ``t``).  ``x`` is reduced mod 2 and reflected to ``[0, 1]``.
    """
    alpha = float(alpha)
    t = float(t)
    green_boundary(t, x, delta_lc)  # light-cone check
    xr = abs(float(wrap(x)))
    sign = 1.0 if t >= 0 else -1.0
    at = abs(t)
    if at < xr:
        return 0j
    if at < 2.0 - xr:
        s = _sine_product(at, xr)
        return sign * (-2j) * math.sin(2 * math.pi * alpha * alpha) * s ** (-2 * alpha * alpha)
    raise DomainError(
        f"no closed form for the commutator at |t| = {at} >= 2 - |x| = {2 - xr}; "
        "use the general Lorentzian evaluator"
    )
