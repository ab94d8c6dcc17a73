"""Green's functions and heat kernels on the cylinder and the flat torus.

The cylinder is ``M = R x [-1, 1]`` with the spatial coordinate identified
mod 2.  The basic object is

    g(t, x) = -pi|t|/2 - log|1 - exp(-pi|t| + i pi x)|,

together with its holomorphic continuation in the time variable to the
right half-plane and its boundary values on the imaginary axis.  The torus
``M_T = [-T, T] x [-1, 1]`` carries the mean-zero Green's function ``g_T``
and its Fourier truncations.

Array helpers (leading underscore, plus :func:`green_complex` and
:func:`green_real`) do no validation and are what the integrators call in
their inner loops; the public point functions validate and raise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, LightConePoint, SingularPoint

DELTA_LC = 1e-9
SERIES_RTOL = 1e-16
SERIES_CAP = 10**6

__all__ = [
    "CylinderPoint",
    "ComplexTimePoint",
    "TorusSpec",
    "DELTA_LC",
    "wrap",
    "d1",
    "green_euclidean",
    "green_analytic",
    "green_boundary",
    "green_reflected",
    "green_complex",
    "green_real",
    "lightcone_distance",
    "lattice_sum_1d",
    "zeta_cos_identity",
    "heat_kernel",
    "torus_green_truncated",
    "torus_green",
    "torus_green_array",
    "torus_green_truncated_array",
]


def wrap(x):
    """Reduce ``x`` mod 2 into ``[-1, 1)``."""
    return np.remainder(np.asarray(x, dtype=float) + 1.0, 2.0) - 1.0


def d1(x):
    """Wrapped spatial distance ``min_m |x + 2m|``."""
    return np.abs(wrap(x))


def _dist_2z(y):
    # distance from y to the lattice 2Z
    return np.abs(wrap(y))


@dataclass(frozen=True)
class CylinderPoint:
    """A point ``(t, x)`` of the cylinder, ``x`` stored mod 2 in ``[-1, 1)``."""

    t: float
    x: float

    def __post_init__(self):
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "x", float(wrap(self.x)))

    def __sub__(self, other):
        return (self.t - other.t, float(wrap(self.x - other.x)))

    def shifted(self, a, theta):
        return CylinderPoint(self.t + a, self.x + theta)


@dataclass(frozen=True)
class ComplexTimePoint:
    tau: complex
    x: float

    def __post_init__(self):
        object.__setattr__(self, "tau", complex(self.tau))
        object.__setattr__(self, "x", float(wrap(self.x)))


@dataclass(frozen=True)
class TorusSpec:
    """Torus ``[-T, T] x [-1, 1]``; ``N`` is the Fourier cutoff when used."""

    T: float
    N: int = 64

    def __post_init__(self):
        if not self.T > 0:
            raise DomainError(f"torus half-length must be positive, got T={self.T}")
        if int(self.N) < 1:
            raise DomainError(f"Fourier cutoff must be >= 1, got N={self.N}")
        object.__setattr__(self, "N", int(self.N))


# ---------------------------------------------------------------------------
# vectorised cores


def _log_one_minus_exp(a, theta):
    """Principal ``log(1 - exp(-a + i theta))`` for ``a >= 0``.

    The real part of the argument is formed as ``-expm1(-a) + 2 e^{-a}
    sin^2(theta/2)`` so it is nonnegative by construction and accurate near
    the light cone.
    """
    theta = np.remainder(theta + np.pi, 2.0 * np.pi) - np.pi
    ea = np.exp(-a)
    re = -np.expm1(-a) + 2.0 * ea * np.sin(0.5 * theta) ** 2
    im = -ea * np.sin(theta)
    return 0.5 * np.log(re * re + im * im) + 1j * np.arctan2(im, re)


def green_complex(tau, x):
    """Continued Green's function for ``Re(tau) >= 0`` (arrays, no checks).

    Arguments with negative real part follow the reflected convention
    ``g(a + ib, x) := g(-a + ib, x)``.
    """
    tau = np.asarray(tau, dtype=complex)
    x = np.asarray(x, dtype=float)
    a = np.abs(tau.real)
    bt = tau.imag
    tau_r = a + 1j * bt
    # 1 - exp(-pi tau +/- i pi x): modulus factor exp(-pi a), phase -pi b +/- pi x
    lp = _log_one_minus_exp(np.pi * a, np.pi * (x - bt))
    lm = _log_one_minus_exp(np.pi * a, -np.pi * (x + bt))
    return -0.5 * np.pi * tau_r - 0.5 * (lp + lm)


def green_real(t, x):
    """Euclidean ``g(t, x)`` on arrays (no checks)."""
    a = np.pi * np.abs(np.asarray(t, dtype=float))
    theta = np.pi * np.asarray(x, dtype=float)
    theta = np.remainder(theta + np.pi, 2.0 * np.pi) - np.pi
    ea = np.exp(-a)
    re = -np.expm1(-a) + 2.0 * ea * np.sin(0.5 * theta) ** 2
    im = ea * np.sin(theta)
    return -0.5 * a - 0.5 * np.log(re * re + im * im)


def lightcone_distance(tau, x):
    """``min(d_+, d_-)`` with ``d_pm = min_k |tau +/- i x - 2 i k|``."""
    tau = np.asarray(tau, dtype=complex)
    x = np.asarray(x, dtype=float)
    a = tau.real
    dp = np.hypot(a, _dist_2z(tau.imag + x))
    dm = np.hypot(a, _dist_2z(tau.imag - x))
    out = np.minimum(dp, dm)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# validated point evaluations


def _as_point(p):
    if isinstance(p, CylinderPoint):
        return p.t, p.x
    t, x = p
    return float(t), float(x)


def green_euclidean(p, delta_lc=DELTA_LC):
    """Cylinder Green's function ``g(t, x)``.

    Raises :class:`SingularPoint` within ``delta_lc`` of ``{0} x 2Z``.
    """
    t, x = _as_point(p)
    if math.hypot(t, float(_dist_2z(x))) <= delta_lc:
        raise SingularPoint(f"g(t, x) is singular at (t, x) = ({t}, {x})")
    return float(green_real(t, x))


def green_analytic(p, x=None, delta_lc=DELTA_LC):
    """Holomorphic continuation of ``g`` to ``Re(tau) > 0``."""
    if isinstance(p, ComplexTimePoint):
        tau, x = p.tau, p.x
    else:
        tau = complex(p)
    if not tau.real > 0:
        raise DomainError(f"green_analytic needs Re(tau) > 0, got tau={tau}")
    for sign in (1.0, -1.0):
        z = 1.0 - np.exp(-np.pi * tau + sign * 1j * np.pi * x)
        if not z.real > 0:
            raise DomainError(f"log argument left the right half-plane at tau={tau}, x={x}")
    return complex(green_complex(tau, x))


def green_boundary(t, x, delta_lc=DELTA_LC):
    """Boundary value ``g(i t, x)``; undefined where ``t +/- x`` is in 2Z."""
    t = float(t)
    x = float(x)
    dp = float(_dist_2z(t + x))
    dm = float(_dist_2z(t - x))
    if min(dp, dm) <= delta_lc:
        raise LightConePoint(
            f"g(i t, x) is undefined on the light cone: t={t}, x={x}, "
            f"dist(t+x, 2Z)={dp:.3g}, dist(t-x, 2Z)={dm:.3g}"
        )
    return complex(green_complex(1j * t, x))


def green_reflected(tau, x, delta_lc=DELTA_LC):
    """Dispatch on the sign of ``Re(tau)`` using the reflection convention."""
    tau = complex(tau)
    a = tau.real
    if a > 0:
        return green_analytic(tau, x, delta_lc=delta_lc)
    if a < 0:
        return green_analytic(complex(-a, tau.imag), x, delta_lc=delta_lc)
    return green_boundary(tau.imag, x, delta_lc=delta_lc)


# ---------------------------------------------------------------------------
# lattice identities


def _sum_series(term, start=0, rtol=SERIES_RTOL, cap=SERIES_CAP):
    """Sum ``term(n)`` for ``n >= start`` until ``|term| < rtol * |running|``."""
    total = 0.0
    for n in range(start, start + cap):
        tn = term(n)
        total += tn
        if abs(tn) <= rtol * abs(total):
            break
    return total


def lattice_sum_1d(a, theta):
    """``sum_k e^{ik theta} / (k^2 + a^2)`` via the Poisson-summed exponential series."""
    a = float(a)
    if not a > 0:
        raise DomainError(f"lattice_sum_1d needs a > 0, got {a}")
    th = float(theta)
    th = math.remainder(th, 2.0 * math.pi)  # now in [-pi, pi]

    def term(k):
        if k == 0:
            return math.exp(-a * abs(th))
        return math.exp(-a * (2.0 * math.pi * k + th)) + math.exp(-a * (2.0 * math.pi * k - th))

    return math.pi / a * _sum_series(term)


def zeta_cos_identity(theta):
    """Closed form of ``(1/pi) sum_{m != 0} e^{i m theta} / m^2`` on ``[-2pi, 2pi]``."""
    theta = float(theta)
    if abs(theta) > 2.0 * math.pi * (1 + 1e-15):
        raise DomainError(f"zeta_cos_identity holds for |theta| <= 2 pi, got {theta}")
    return math.pi / 3.0 - abs(theta) + theta * theta / (2.0 * math.pi)


# ---------------------------------------------------------------------------
# heat kernel


def _theta_spectral(s, x, L):
    # (1/2L) sum_m exp(-s pi^2 m^2 / L^2 + i pi m x / L)
    c = s * math.pi**2 / L**2
    w = math.pi * x / L

    def term(m):
        if m == 0:
            return 1.0
        return 2.0 * math.exp(-c * m * m) * math.cos(m * w)

    total = 1.0
    for m in range(1, SERIES_CAP):
        env = 2.0 * math.exp(-c * m * m)
        total += env * math.cos(m * w)
        if env <= SERIES_RTOL * abs(total):
            break
    return total / (2.0 * L)


def _theta_image(s, x, L):
    # (1 / 2 sqrt(pi s)) sum_k exp(-(x - 2 L k)^2 / 4 s)
    x = math.remainder(x, 2.0 * L)
    total = math.exp(-x * x / (4.0 * s))
    for k in range(1, SERIES_CAP):
        tp = math.exp(-((x - 2.0 * L * k) ** 2) / (4.0 * s))
        tm = math.exp(-((x + 2.0 * L * k) ** 2) / (4.0 * s))
        total += tp + tm
        if tp + tm <= SERIES_RTOL * total:
            break
    return total / (2.0 * math.sqrt(math.pi * s))


def heat_kernel(spec, s, x, y, mode="auto"):
    """Heat kernel on the torus ``M_T`` at time ``s``.

    ``mode`` is ``"spectral"`` (eigenfunction sum), ``"image"`` (sum over
    periodic images of the Gaussian) or ``"auto"``, which uses the image sum
    for ``s < min(T, 1)**2 / pi`` and the spectral sum otherwise.
    """
    s = float(s)
    if not s > 0:
        raise DomainError(f"heat kernel needs s > 0, got {s}")
    T = spec.T
    if mode == "auto":
        mode = "image" if s < min(T, 1.0) ** 2 / math.pi else "spectral"
    if mode == "spectral":
        return _theta_spectral(s, float(x), T) * _theta_spectral(s, float(y), 1.0)
    if mode == "image":
        return _theta_image(s, float(x), T) * _theta_image(s, float(y), 1.0)
    raise DomainError(f"unknown heat kernel mode {mode!r}")


# ---------------------------------------------------------------------------
# torus Green's functions


def torus_green_truncated_array(T, N, dt, dx):
    """Symmetric Fourier sum ``g_{T,N}(dt, dx)`` on arrays."""
    dt = np.atleast_1d(np.asarray(dt, dtype=float))
    dx = np.atleast_1d(np.asarray(dx, dtype=float))
    m = np.arange(-N, N + 1)
    n = np.arange(-N, N + 1)
    lam = np.pi**2 * ((m[:, None] / T) ** 2 + n[None, :] ** 2)
    lam[N, N] = np.inf
    W = 1.0 / lam
    am = np.pi * np.outer(dt, m) / T  # (P, 2N+1)
    bn = np.pi * np.outer(dx, n)
    cm, sm = np.cos(am), np.sin(am)
    cn, sn = np.cos(bn), np.sin(bn)
    # sum_{m,n} W_mn cos(a_m + b_n) = c_m W c_n - s_m W s_n
    val = np.einsum("pm,mn,pn->p", cm, W, cn) - np.einsum("pm,mn,pn->p", sm, W, sn)
    return np.pi / (2.0 * T) * val


def _torus_correction(T, t, x):
    # sum_{n>=1} cos(pi n x)/n * sum_{k != 0} exp(-pi n |t + 2kT|), |t| <= T
    t = np.abs(t)
    nmax = int(math.ceil(40.0 / (math.pi * T))) + 2
    out = np.zeros(np.broadcast(t, x).shape)
    for n in range(1, nmax + 1):
        q = math.exp(-2.0 * math.pi * n * T)
        env = (np.exp(-math.pi * n * (2.0 * T - t)) + np.exp(-math.pi * n * (2.0 * T + t))) / (1.0 - q)
        out = out + np.cos(math.pi * n * x) * env / n
        if np.max(env) / n < 1e-18:
            break
    return out


def torus_green_array(T, dt, dx):
    """Exact ``g_T(dt, dx)`` on arrays (no coincidence check).

    For ``dt != 0`` the zero-mode closed form plus the k = 0 image summed in
    closed form, plus the exponentially small ``k != 0`` images.  For
    ``dt == 0`` the conditionally convergent cosine series is split into
    ``-log|1 - e^{i pi dx}|`` and an absolutely convergent remainder.
    """
    dt = np.asarray(dt, dtype=float)
    dx = wrap(dx)
    t = np.remainder(dt + T, 2.0 * T) - T
    at = np.abs(t)
    zero_mode = np.pi * T / 6.0 - 0.5 * np.pi * at + np.pi * t * t / (4.0 * T)
    nonzero = green_real(t, dx) + 0.5 * np.pi * at + _torus_correction(T, t, dx)
    # dt == 0: pi T / 6 + S(x) + sum cos(pi n x) c_n(T), S(x) = -log|1 - e^{i pi x}|
    at_zero = t == 0.0
    if np.any(at_zero):
        x0 = dx[at_zero] if dx.ndim else dx
        s_x = green_real(0.0, x0)
        c_sum = np.zeros(np.shape(x0))
        for n in range(1, int(math.ceil(40.0 / (math.pi * T))) + 3):
            cn = 2.0 / (n * math.expm1(2.0 * math.pi * n * T))
            c_sum = c_sum + np.cos(math.pi * n * x0) * cn
            if cn < 1e-18:
                break
        zero_branch = np.pi * T / 6.0 + s_x + c_sum
        res = zero_mode + nonzero
        if res.ndim:
            res = res.copy()
            res[at_zero] = zero_branch
        else:
            res = zero_branch
        return res
    return zero_mode + nonzero


def _torus_check(spec, u, v, delta_lc):
    ut, ux = _as_point(u)
    vt, vx = _as_point(v)
    T = spec.T
    dt = math.remainder(ut - vt, 2.0 * T)
    dx = float(wrap(ux - vx))
    if math.hypot(dt, dx) <= delta_lc:
        raise SingularPoint(f"torus Green's function is singular at coincident points {u}, {v}")
    return ut - vt, ux - vx


def torus_green(spec, u, v, delta_lc=DELTA_LC):
    """Mean-zero torus Green's function ``G_T(u, v) = g_T(u - v)``."""
    dt, dx = _torus_check(spec, u, v, delta_lc)
    return float(torus_green_array(spec.T, dt, dx))


def torus_green_truncated(spec, u, v):
    """Fourier truncation ``G_{T,N}(u, v)`` with ``|m|, |n| <= N``."""
    ut, ux = _as_point(u)
    vt, vx = _as_point(v)
    return float(torus_green_truncated_array(spec.T, spec.N, ut - vt, ux - vx)[0])
