"""Smeared vertex operators and the vacuum functional.

``O_{f,n}`` smears the vertex operator of charge ``b n`` against a bump
function ``f``.  The vacuum functional of an ordered monomial
``O_{f_1,n_1} ... O_{f_k,n_k}`` is

    omega = int f_1(u_1) ... f_k(u_k) C^L_{b n}(u_1, ..., u_k) du,

with ``C^L`` the Lorentzian point correlator.  It is estimated by one joint
Monte Carlo integral per contour sector.  That integral samples the
insertion points from the bumps together with the screening variables,
instead of nesting a point-correlator evaluation inside every sample.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .correlators import (
    CorrelatorResult,
    ModelParams,
    free_log_factor,
    lorentzian_log_integrand,
    sector_weights,
)
from .errors import ChargeOutOfRange, DomainError, MCAbort, NotSpacelike
from .kernels import CylinderPoint, d1, lightcone_distance, wrap
from .oracles import tadpole_constant
from .quadrature import (
    Exponential,
    Hyperplane,
    ProductSampler,
    QuadratureConfig,
    Tabulated,
    Uniform,
    integrate_adaptive,
    integrate_mc,
)

__all__ = [
    "BumpFunction",
    "SmearedMonomial",
    "Residual",
    "ProbePoint",
    "bump_profile",
    "allowed_charges",
    "omega",
    "hermiticity_residual",
    "indefiniteness_probe",
    "smeared_locality_residual",
    "check_spacelike",
]

REJECT_LIMIT = 0.01
_GRID = np.linspace(-1.0, 1.0, 4097)


def bump_profile(s):
    """``exp(-1/(1 - s^2))`` on ``(-1, 1)``, zero outside."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
    return out


@functools.lru_cache(maxsize=None)
def _profile_mass():
    cfg = QuadratureConfig(rel_tol=1e-14, abs_tol=1e-16)
    return integrate_adaptive(lambda p: bump_profile(p[:, 0]), [(-1.0, 1.0)], cfg).value.real


@dataclass(frozen=True)
class BumpFunction:
    """Product bump of unit mass centred at ``center``, times a complex ``scale``."""

    center: CylinderPoint
    half_widths: tuple
    scale: complex = 1.0

    def __post_init__(self):
        if not isinstance(self.center, CylinderPoint):
            object.__setattr__(self, "center", CylinderPoint(*self.center))
        et, ex = (float(v) for v in self.half_widths)
        if not (et > 0 and ex > 0):
            raise DomainError(f"bump half-widths must be positive, got {self.half_widths}")
        if ex >= 1.0:
            raise DomainError("spatial half-width must be below 1 so the support does not wrap onto itself")
        object.__setattr__(self, "half_widths", (et, ex))
        object.__setattr__(self, "scale", complex(self.scale))

    @property
    def normalization(self):
        z = _profile_mass()
        return 1.0 / (z * z * self.half_widths[0] * self.half_widths[1])

    def __call__(self, t, x):
        et, ex = self.half_widths
        st = (np.asarray(t, dtype=float) - self.center.t) / et
        sx = wrap(np.asarray(x, dtype=float) - self.center.x) / ex
        return self.scale * self.normalization * bump_profile(st) * bump_profile(sx)

    def conj(self):
        return BumpFunction(self.center, self.half_widths, self.scale.conjugate())

    def scaled(self, c):
        return BumpFunction(self.center, self.half_widths, self.scale * complex(c))

    def translated(self, a, theta):
        return BumpFunction(self.center.shifted(a, theta), self.half_widths, self.scale)

    def support_box(self):
        et, ex = self.half_widths
        return (self.center.t - et, self.center.t + et), (self.center.x - ex, self.center.x + ex)

    def samplers(self):
        et, ex = self.half_widths
        dens = bump_profile(_GRID)
        return (
            Tabulated(self.center.t + et * _GRID, dens),
            Tabulated(self.center.x + ex * _GRID, dens),
        )


def allowed_charges(b):
    """Charge indices ``n`` with ``|n| < 1 / (sqrt(2) b)``."""
    nmax = 1.0 / (math.sqrt(2.0) * b)
    top = math.ceil(nmax) - 1 if nmax == math.ceil(nmax) else math.floor(nmax)
    return list(range(-top, top + 1))


@dataclass(frozen=True)
class SmearedMonomial:
    """Ordered product of smeared vertex operators ``(f, n)``."""

    factors: tuple = ()

    def __post_init__(self):
        facs = []
        for f, n in self.factors:
            if not isinstance(f, BumpFunction):
                raise DomainError("factors must pair a BumpFunction with an integer charge index")
            if int(n) != n:
                raise DomainError(f"charge index must be an integer, got {n}")
            facs.append((f, int(n)))
        object.__setattr__(self, "factors", tuple(facs))

    @classmethod
    def single(cls, f, n):
        return cls(((f, n),))

    def __mul__(self, other):
        return SmearedMonomial(self.factors + other.factors)

    def star(self):
        """Reverse the order and conjugate every test function."""
        return SmearedMonomial(tuple((f.conj(), n) for f, n in reversed(self.factors)))

    def translated(self, a, theta):
        return SmearedMonomial(tuple((f.translated(a, theta), n) for f, n in self.factors))

    def scaled(self, c):
        if not self.factors:
            raise DomainError("cannot scale the empty monomial through a test function")
        (f, n), rest = self.factors[0], self.factors[1:]
        return SmearedMonomial(((f.scaled(c), n),) + rest)

    @property
    def charges(self):
        return [n for _, n in self.factors]

    def __len__(self):
        return len(self.factors)


def _validate_charges(m, b):
    nmax = 1.0 / (math.sqrt(2.0) * b)
    for _, n in m.factors:
        if not abs(n) < nmax:
            raise ChargeOutOfRange(f"charge index {n} violates |n| < 1/(sqrt(2) b) = {nmax:.6g}")


def _sector_seed(seed, idx):
    return (int(seed) * 1_000_003 + 7919 * (idx + 1)) % 2**64


def omega(m, params, cfg=None):
    """Vacuum functional of the ordered monomial ``m``.

    Samples within ``cfg.delta_lc`` of the light cone of any ordered
    difference are rejected and counted.  Their share of the mean absolute
    weight goes into the error, and a rejected fraction above 1% aborts
    the run.
    """
    cfg = cfg or QuadratureConfig()
    if not isinstance(params, ModelParams):
        params = ModelParams(*params)
    if len(m) == 0:
        return CorrelatorResult(1.0, 0.0, 0, True, 0, "omega:empty")
    b, mu = params.b, params.mu
    _validate_charges(m, b)
    ns = np.array(m.charges)
    w = int(-ns.sum())
    if w < 0:
        return CorrelatorResult(0.0, 0.0, 0, True, w, "omega:negative-w")
    k = len(m)
    alpha = (b * ns).astype(complex)
    bumps = [f for f, _ in m.factors]
    scale = np.prod([f.scale for f in bumps])
    ext_comps = []
    for f in bumps:
        ext_comps += list(f.samplers())
    sigma = 2.0 * math.pi * b * b
    sectors = sector_weights(k + 1, w) if w > 0 else [((), 1.0)]
    total, var, evals, rejected = 0j, 0.0, 0, 0
    abs_mass = 0.0
    for idx, (seg, weight) in enumerate(sectors):
        comps = list(ext_comps)
        for s in seg:
            comps.append(Exponential(sigma) if s in (0, k) else Uniform(0.0, 1.0))
            comps.append(Uniform(-1.0, 1.0))
        sampler = ProductSampler(comps)
        counter = {"rej": 0, "abs": 0.0}

        def integrand(p, seg=seg, weight=weight, counter=counter):
            n = p.shape[0]
            et, ex = p[:, 0 : 2 * k : 2], p[:, 1 : 2 * k : 2]
            dens = np.ones(n)
            for j, f in enumerate(bumps):
                dens = dens * f.normalization * bump_profile((et[:, j] - f.center.t) / f.half_widths[0]) * bump_profile(
                    wrap(ex[:, j] - f.center.x) / f.half_widths[1]
                )
            lf = free_log_factor(alpha, et, ex)
            near = np.zeros(n, dtype=bool)
            for j in range(k):
                for jj in range(j + 1, k):
                    near |= lightcone_distance(1j * (et[:, jj] - et[:, j]), ex[:, jj] - ex[:, j]) <= cfg.delta_lc
            jac = np.ones(n, dtype=complex)
            if w > 0:
                c, y = p[:, 2 * k :: 2], p[:, 2 * k + 1 :: 2]
                ls, jac, nr = lorentzian_log_integrand(b, alpha, et, ex, seg, c, y, cfg.delta_lc)
                lf = lf + ls
                near |= nr
            safe = np.where(near, 0.0, lf)
            val = np.where(near, 0.0, dens * jac * np.exp(safe)) * weight
            counter["rej"] += int(near.sum())
            counter["abs"] += float(np.sum(np.abs(val)))
            return val

        res = integrate_mc(integrand, sampler, cfg.replace(mc_seed=_sector_seed(cfg.mc_seed, idx)))
        total += res.value
        var += res.error_estimate**2
        evals += res.evals
        rejected += counter["rej"]
        abs_mass += counter["abs"] / max(res.evals, 1)
    frac = rejected / max(evals, 1)
    if frac > REJECT_LIMIT:
        raise MCAbort(
            f"{rejected} of {evals} samples fell within delta_lc={cfg.delta_lc} of the light cone",
            count=rejected,
        )
    pref = scale * (-mu) ** w
    err = abs(pref) * (math.sqrt(var) + frac * abs_mass)
    return CorrelatorResult(
        pref * total, err, evals, True, w, "omega:mc", {"rejected": rejected, "sectors": len(sectors)}
    )


@dataclass
class Residual:
    """``|left - right|`` with the combined standard error of two independent estimates."""

    value: float
    error: float
    left: CorrelatorResult
    right: CorrelatorResult

    def consistent(self, n_sigma=3.0, rel=0.0):
        scale = max(abs(self.left.value), abs(self.right.value))
        return self.value <= max(n_sigma * self.error, rel * scale)


def _independent(cfg, salt):
    return cfg.replace(mc_seed=(int(cfg.mc_seed) + 0x9E3779B97F4A7C15 * salt) % 2**64)


def hermiticity_residual(m, params, cfg=None):
    """``|omega(m*) - conj(omega(m))|`` from independently seeded estimates."""
    cfg = cfg or QuadratureConfig()
    left = omega(m.star(), params, _independent(cfg, 1))
    right = omega(m, params, _independent(cfg, 2))
    right_c = CorrelatorResult(right.value.conjugate(), right.error_estimate, right.evals, right.converged, right.w, right.method)
    diff = abs(left.value - right_c.value)
    return Residual(diff, math.hypot(left.error_estimate, right.error_estimate), left, right_c)


@dataclass
class ProbePoint:
    eps: float
    omega_aa: CorrelatorResult
    value: float
    error: float
    claim: bool = True
    details: dict = field(default_factory=dict)


def indefiniteness_probe(eps_list, params, cfg=None, center=(0.0, 0.0)):
    """``omega(A_eps A_eps) - c_b^2`` for ``A_eps = O_{f_eps, -1}``.

    ``f_eps`` is the bump of half-width ``eps`` in both directions.  The
    constant ``c_b = -mu I_b`` comes from the series oracle.  For
    ``b >= 8**-0.5`` the points are returned with ``claim = False``.
    """
    cfg = cfg or QuadratureConfig()
    if not isinstance(params, ModelParams):
        params = ModelParams(*params)
    claim = params.b < 8.0**-0.5
    cb = tadpole_constant(params.b, params.mu)
    out = []
    for i, eps in enumerate(eps_list):
        eps = float(eps)
        if not 0 < eps < 0.5:
            raise DomainError(f"eps must lie in (0, 1/2), got {eps}")
        f = BumpFunction(CylinderPoint(*center), (eps, eps))
        A = SmearedMonomial.single(f, -1)
        r = omega(A.star() * A, params, _independent(cfg, 10 + i))
        out.append(ProbePoint(eps, r, r.value.real - cb * cb, r.error_estimate, claim, {"c_b": cb}))
    return out


def check_spacelike(A, B, margin=0.0):
    """Raise :class:`NotSpacelike` unless all supports of ``A`` and ``B`` are spacelike."""
    worst = None
    for f, _ in A.factors:
        for g, _ in B.factors:
            dt = abs(f.center.t - g.center.t) + f.half_widths[0] + g.half_widths[0]
            dx = float(d1(f.center.x - g.center.x)) - f.half_widths[1] - g.half_widths[1]
            gap = dx - dt
            if worst is None or gap < worst[0]:
                worst = (gap, f, g)
    if worst is not None and not worst[0] > margin:
        gap, f, g = worst
        raise NotSpacelike(
            f"supports around {f.center} and {g.center} are not spacelike separated "
            f"(gap {gap:.4g} <= margin {margin})",
            closest=(f.center, g.center),
        )


def smeared_locality_residual(A, B, params, cfg=None, margin=0.0):
    """``|omega(AB) - omega(BA)|`` for spacelike separated monomials."""
    cfg = cfg or QuadratureConfig()
    check_spacelike(A, B, margin)
    left = omega(A * B, params, _independent(cfg, 3))
    right = omega(B * A, params, _independent(cfg, 4))
    return Residual(abs(left.value - right.value), math.hypot(left.error_estimate, right.error_estimate), left, right)
