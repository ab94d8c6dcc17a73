"""Numerical integration engine.

Two integrators share one result type:

* :func:`integrate_adaptive` runs nested, batched Gauss-Kronrod (7/15)
  quadrature over boxes of dimension at most 3.  Singularities are declared
  up front as affine hyperplanes ``n . u = c`` along which the integrand
  blows up like ``dist**(-p)``.  Each 1D pass splits at the singular points,
  applies a power substitution that removes the endpoint singularity, and
  never samples closer than ``delta_lc`` to a declared hyperplane.  The
  skipped sliver is estimated from the power law and its uncertainty goes
  into the error.  Semi-infinite axes are truncated at a radius set by a
  declared exponential decay rate.
* :func:`integrate_mc` runs stratified Monte Carlo with a product
  importance density and a counter-based RNG keyed by ``(seed, stratum)``.
"""

from __future__ import annotations

import configparser
import dataclasses
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import BudgetExceeded, ConfigError, DomainError, MCAbort

__all__ = [
    "QuadratureConfig",
    "IntegrationResult",
    "Hyperplane",
    "integrate_adaptive",
    "integrate_tail",
    "integrate_mc",
    "combine",
    "Uniform",
    "Exponential",
    "Laplace",
    "PowerLaw",
    "Tabulated",
    "ProductSampler",
    "load_config",
]


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and budgets shared by every integrator."""

    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_evals: int = 50_000_000
    tail_cutoff_sigma: float | None = None
    mc_seed: int = 0
    mc_samples: int = 200_000
    delta_lc: float = 1e-9
    mc_strata: int = 64
    strict: bool = False

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ConfigError("rel_tol and abs_tol must be positive")
        if int(self.max_evals) < 1:
            raise ConfigError("max_evals must be >= 1")
        if int(self.mc_samples) < 1:
            raise ConfigError("mc_samples must be >= 1")
        if int(self.mc_strata) < 1:
            raise ConfigError("mc_strata must be >= 1")
        if not self.delta_lc >= 0:
            raise ConfigError("delta_lc must be nonnegative")
        if self.tail_cutoff_sigma is not None and not self.tail_cutoff_sigma > 0:
            raise ConfigError("tail_cutoff_sigma must be positive when given")
        if not 0 <= int(self.mc_seed) < 2**64:
            raise ConfigError("mc_seed must be a 64-bit unsigned integer")

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_mapping(cls, data):
        known = {f.name: f for f in dataclasses.fields(cls)}
        kwargs = {}
        for key, raw in data.items():
            name = key.replace("-", "_")
            if name not in known:
                raise ConfigError(f"unknown quadrature config key {key!r}")
            kwargs[name] = _coerce(name, raw)
        return cls(**kwargs)


_INT_FIELDS = {"max_evals", "mc_seed", "mc_samples", "mc_strata"}


def _coerce(name, raw):
    if raw is None:
        return None
    if name == "strict":
        if isinstance(raw, str):
            return raw.strip().lower() in {"1", "true", "yes", "on"}
        return bool(raw)
    if name == "tail_cutoff_sigma" and isinstance(raw, str) and raw.strip().lower() in {"", "none"}:
        return None
    try:
        if name in _INT_FIELDS:
            return int(float(raw)) if isinstance(raw, str) and "e" in raw.lower() else int(raw)
        return float(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {name}: {raw!r}") from exc


def load_config(path):
    """Read a ``[quadrature]`` section from an INI-style key-value file."""
    parser = configparser.ConfigParser()
    if not parser.read(path):
        raise ConfigError(f"cannot read config file {path}")
    if "quadrature" not in parser:
        raise ConfigError(f"{path} has no [quadrature] section")
    return QuadratureConfig.from_mapping(dict(parser["quadrature"]))


@dataclass
class IntegrationResult:
    value: complex
    error_estimate: float
    evals: int
    converged: bool

    def __post_init__(self):
        self.value = complex(self.value)
        self.error_estimate = float(self.error_estimate)

    def scaled(self, c):
        c = complex(c)
        return IntegrationResult(self.value * c, self.error_estimate * abs(c), self.evals, self.converged)


def combine(results):
    """Sum of independent integration results; errors add linearly."""
    results = list(results)
    return IntegrationResult(
        sum((r.value for r in results), 0j),
        sum(r.error_estimate for r in results),
        sum(r.evals for r in results),
        all(r.converged for r in results),
    )


@dataclass(frozen=True)
class Hyperplane:
    """Singular set ``normal . u = offset`` with blow-up ``dist**(-exponent)``."""

    normal: tuple
    offset: float
    exponent: float

    def __post_init__(self):
        n = tuple(float(v) for v in self.normal)
        if not any(v != 0.0 for v in n):
            raise DomainError("hyperplane normal must be nonzero")
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", float(self.offset))
        object.__setattr__(self, "exponent", float(self.exponent))


# ---------------------------------------------------------------------------
# Gauss-Kronrod 7/15

_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
W_K = np.concatenate([_WGK[:-1], _WGK[::-1]])
W_G = np.zeros(15)
W_G[[1, 3, 5]] = _WG[:3]
W_G[7] = _WG[3]
W_G[[9, 11, 13]] = _WG[2::-1]

_EPS = np.finfo(float).eps


class _Budget:
    def __init__(self, limit):
        self.limit = int(limit)
        self.used = 0

    @property
    def exhausted(self):
        return self.used >= self.limit


# ---------------------------------------------------------------------------
# hyperplane projection for nested integration


def _normalize(n, c):
    n = np.asarray(n, dtype=float)
    s = np.linalg.norm(n)
    n = n / s
    c = c / s
    i = np.flatnonzero(np.abs(n) > 1e-14)[0]
    if n[i] < 0:
        n, c = -n, -c
    return n, c


def _dedupe(planes):
    out = []
    for n, c, p in planes:
        n, c = _normalize(n, c)
        for k, (m, d, q) in enumerate(out):
            if np.allclose(m, n, atol=1e-12) and abs(d - c) < 1e-12:
                out[k] = (m, d, max(p, q))
                break
        else:
            out.append((n, c, p))
    return out


def _project_planes(planes, lo, hi):
    """Eliminate the last coordinate: singular sets of the partial integral."""
    keep, moving = [], []
    for n, c, p in planes:
        if abs(n[-1]) < 1e-14:
            keep.append((n[:-1], c, p))
        else:
            moving.append((n, c, p))
    out = [pl for pl in keep if np.any(np.abs(pl[0]) > 1e-14)]
    for i in range(len(moving)):
        n1, c1, p1 = moving[i]
        for face in (lo, hi):
            if np.isfinite(face):
                nn = n1[:-1]
                if np.any(np.abs(nn) > 1e-14):
                    out.append((nn, c1 - n1[-1] * face, p1 - 1.0))
        for j in range(i + 1, len(moving)):
            n2, c2, p2 = moving[j]
            nn = n2[-1] * n1[:-1] - n1[-1] * n2[:-1]
            cc = n2[-1] * c1 - n1[-1] * c2
            if np.any(np.abs(nn) > 1e-12):
                out.append((nn, cc, p1 + p2 - 1.0))
    return _dedupe(out) if out else []


def _map_power(p):
    if p <= 0:
        return 2.0
    if p < 1:
        return 1.0 / (1.0 - p)
    return 4.0


# ---------------------------------------------------------------------------
# nested batched adaptive integration


@dataclass
class _Ctx:
    f: Callable
    dim: int
    lo: np.ndarray
    hi: np.ndarray
    sigma: np.ndarray
    planes: list  # planes[l]: list of (normal in l+1 dims, offset, exponent)
    rel_tol: list
    abs_tol: list
    delta: float
    budget: _Budget
    max_rounds: int = 80
    flags: dict = field(default_factory=lambda: {"budget": False, "stuck": False})


def _eval_level(ctx, level, prefix, x):
    """Integrand of the level-``level`` 1D problem at nodes ``x``.

    ``prefix`` has shape (n, level); ``x`` has shape (n, m).  Returns values
    and inner error estimates, both of shape (n, m).
    """
    n, m = x.shape
    pts = np.concatenate(
        [np.repeat(prefix, m, axis=0), x.reshape(-1, 1)], axis=1
    )
    if level == ctx.dim - 1:
        ctx.budget.used += pts.shape[0]
        vals = np.asarray(ctx.f(pts), dtype=complex).reshape(n, m)
        return vals, np.zeros((n, m))
    v, e, _ = _solve_level(ctx, level + 1, pts)
    return v.reshape(n, m), e.reshape(n, m)


def _build_pieces(ctx, level, prefix):
    """Split each problem's interval at singular points.

    Returns per-piece arrays (pid, anchor, length, k, s0) with the piece
    parametrised as ``x = anchor + length * s**k`` for ``s`` in ``[s0, 1]``,
    plus cut records ``(pid, x0, direction, delta, p, span)`` for the sliver
    estimate next to the singular point ``x0``.
    """
    lo, hi = ctx.lo[level], ctx.hi[level]
    planes = [pl for pl in ctx.planes[level] if abs(pl[0][-1]) > 1e-14]
    P = prefix.shape[0]
    pid, anchor, length, kmap, s0 = [], [], [], [], []
    cuts = []
    if planes:
        nrm = np.array([pl[0] for pl in planes])
        off = np.array([pl[1] for pl in planes])
        pex = np.array([pl[2] for pl in planes])
        xs = (off[None, :] - prefix @ nrm[:, :-1].T) / nrm[None, :, -1]
        dl = ctx.delta * np.linalg.norm(nrm, axis=1) / np.abs(nrm[:, -1])
    for q in range(P):
        pts = []
        if planes:
            for xv, pv, dv in zip(xs[q], pex, dl):
                if lo - dv < xv < hi + dv:
                    pts.append((min(max(xv, lo), hi), pv, dv))
        pts.sort()
        merged = []
        for xv, pv, dv in pts:
            if merged and xv - merged[-1][0] <= max(dv, merged[-1][2], 1e-13 * (1 + abs(xv))):
                x0, p0, d0 = merged[-1]
                merged[-1] = (x0, max(p0, pv), max(d0, dv))
            else:
                merged.append((xv, pv, dv))
        # endpoints with their singular exponent (None if regular)
        nodes = [(lo, None, 0.0)]
        for xv, pv, dv in merged:
            if abs(xv - lo) <= dv:
                nodes[0] = (lo, pv, dv)
            elif abs(xv - hi) <= dv:
                continue
            else:
                nodes.append((xv, pv, dv))
        end = (hi, None, 0.0)
        for xv, pv, dv in merged:
            if abs(xv - hi) <= dv:
                end = (hi, pv, dv)
        nodes.append(end)
        for (a, pa, da), (bb, pb, db) in zip(nodes[:-1], nodes[1:]):
            if bb - a <= 0:
                continue
            sa = pa is not None and pa > 0
            sb = pb is not None and pb > 0
            ca = a + (da if sa else 0.0)
            cb = bb - (db if sb else 0.0)
            if cb <= ca:
                continue
            span = bb - a
            if sa:
                cuts.append((q, a, 1.0, da, pa, span))
            if sb:
                cuts.append((q, bb, -1.0, db, pb, span))
            # the power map is anchored at the singular point itself; the
            # excluded sliver becomes a lower limit s0 > 0 in s-space
            if pa is not None and pb is not None:
                mid = 0.5 * (a + bb)
                for anc, L, p, dd, sg in ((a, mid - a, pa, da, sa), (bb, mid - bb, pb, db, sb)):
                    k = _map_power(p)
                    pid.append(q); anchor.append(anc); length.append(L); kmap.append(k)
                    s0.append((dd / abs(L)) ** (1.0 / k) if sg else 0.0)
            elif pa is not None:
                k = _map_power(pa)
                pid.append(q); anchor.append(a); length.append(bb - a); kmap.append(k)
                s0.append((da / (bb - a)) ** (1.0 / k) if sa else 0.0)
            elif pb is not None:
                k = _map_power(pb)
                pid.append(q); anchor.append(bb); length.append(a - bb); kmap.append(k)
                s0.append((db / (bb - a)) ** (1.0 / k) if sb else 0.0)
            else:
                pid.append(q); anchor.append(a); length.append(bb - a); kmap.append(1.0); s0.append(0.0)
    return (np.array(pid, dtype=int), np.array(anchor), np.array(length), np.array(kmap), np.array(s0)), cuts


def _sliver(f1, f2, d, p, span):
    """Integral over ``[0, d]`` of ``C x^-p (1 + a x)`` fitted to ``f(d), f(2d)``.

    Returns the estimate and an error bound of second order in ``d``.
    """
    if 4.0 * d < span and f1 != 0 and np.isfinite(f2):
        rho = f2 / (f1 * 2.0**-p)
        ad = (rho - 1.0) / (2.0 - rho)
        if abs(ad) < 0.5:
            s = d * f1 / (1.0 + ad) * (1.0 / (1.0 - p) + ad / (2.0 - p))
            return s, abs(s) * max(abs(ad), d / span) ** 2 + 1e-3 * abs(s * ad)
    s = d * f1 / (1.0 - p)
    return s, abs(s) * d / span


def _solve_level(ctx, level, prefix):
    """Adaptive 1D integration of every problem in ``prefix`` at ``level``."""
    P = prefix.shape[0]
    rel_tol, abs_tol = ctx.rel_tol[level], ctx.abs_tol[level]
    (ppid, anchor, length, kmap, s0), cuts = _build_pieces(ctx, level, prefix)

    extra_val = np.zeros(P, dtype=complex)
    extra_err = np.zeros(P)
    # sliver estimates at cut points and truncation-face values share one batch
    face_rows = []
    if cuts:
        # each cut is sampled at distances delta and 2 delta from the singularity
        cp = np.array([c[0] for c in cuts] * 2)
        cx = np.array([c[1] + c[2] * c[3] for c in cuts] + [c[1] + 2.0 * c[2] * c[3] for c in cuts])
        face_rows.append(("cut", cp, cx))
    if np.isfinite(ctx.sigma[level]):
        face_rows.append(("tail", np.arange(P), np.full(P, ctx.hi[level])))
    for kind, rp, rx in face_rows:
        fv, fe = _eval_level(ctx, level, prefix[rp], rx[:, None])
        fv, fe = fv[:, 0], fe[:, 0]
        if kind == "cut":
            nc = len(cuts)
            for i, (q, _, _, d, p, span) in enumerate(cuts):
                if p >= 1:
                    extra_err[q] = np.inf
                    continue
                s, e = _sliver(fv[i], fv[nc + i], d, p, span)
                extra_val[q] += s
                extra_err[q] += e + d * (fe[i] + fe[nc + i]) / (1.0 - p)
        else:
            extra_err[rp] += (np.abs(fv) + fe) / ctx.sigma[level]

    # interval arrays, in s-space of each piece
    ipiece = np.arange(len(ppid))
    s_lo = s0.copy()
    s_hi = np.ones(len(ppid))
    ival = np.zeros(len(ppid), dtype=complex)
    ierr = np.zeros(len(ppid))
    iabs = np.zeros(len(ppid))
    todo = np.ones(len(ppid), dtype=bool)
    done = np.zeros(P, dtype=bool)
    total = np.zeros(P, dtype=complex)
    terr = np.zeros(P)

    for _ in range(ctx.max_rounds):
        idx = np.flatnonzero(todo)
        if idx.size:
            pc = ipiece[idx]
            half = 0.5 * (s_hi[idx] - s_lo[idx])
            mid = 0.5 * (s_hi[idx] + s_lo[idx])
            s = mid[:, None] + half[:, None] * NODES[None, :]
            k = kmap[pc][:, None]
            L = length[pc][:, None]
            x = anchor[pc][:, None] + L * s**k
            jac = np.abs(L) * k * s ** (k - 1.0) * half[:, None]
            fv, fe = _eval_level(ctx, level, prefix[ppid[pc]], x)
            fj = fv * jac
            resk = fj @ W_K
            resg = fj @ W_G
            reskh = resk / 2.0
            resasc = np.sum(W_K * np.abs(fj - reskh[:, None]), axis=1)
            resabs = np.sum(W_K * np.abs(fj), axis=1)
            err = np.abs(resk - resg)
            nz = (resasc > 0) & (err > 0)
            err[nz] = resasc[nz] * np.minimum(1.0, (200.0 * err[nz] / resasc[nz]) ** 1.5)
            err = np.maximum(err, 50.0 * _EPS * resabs)
            err = err + (fe * jac) @ W_K
            bad = ~np.isfinite(resk)
            if np.any(bad):
                err[bad] = np.inf
                resk[bad] = 0.0
            ival[idx] = resk
            ierr[idx] = err
            iabs[idx] = np.where(np.isfinite(resabs), resabs, 0.0)
            todo[idx] = False
        prob = ppid[ipiece]
        total = np.bincount(prob, weights=ival.real, minlength=P) + 1j * np.bincount(
            prob, weights=ival.imag, minlength=P
        )
        total = total + extra_val
        terr = np.bincount(prob, weights=ierr, minlength=P) + extra_err
        tol = np.maximum(abs_tol, rel_tol * np.abs(total))
        # below this floor further bisection only accumulates rounding error
        floor = 200.0 * _EPS * np.bincount(prob, weights=iabs, minlength=P)
        done = terr <= np.maximum(tol, floor)
        # sliver and tail errors do not shrink under refinement; stop once
        # they dominate what bisection can still remove
        with np.errstate(invalid="ignore"):
            refinable = terr - extra_err > extra_err
        hopeless = ~done & (extra_err >= tol) & ~refinable
        if np.all(done | hopeless) or ctx.budget.exhausted:
            if ctx.budget.exhausted and not np.all(done | hopeless):
                ctx.flags["budget"] = True
            break
        # refine the worst intervals of each unconverged problem
        open_iv = ~(done | hopeless)[prob]
        if not np.any(open_iv):
            break
        worst = np.zeros(P)
        np.maximum.at(worst, prob[open_iv], ierr[open_iv])
        split = open_iv & (ierr >= 0.25 * worst[prob]) & (s_hi - s_lo > 1e-13)
        split &= np.isfinite(ierr) | (s_hi - s_lo > 1e-13)
        if not np.any(split):
            ctx.flags["stuck"] = True
            break
        sidx = np.flatnonzero(split)
        midp = 0.5 * (s_lo[sidx] + s_hi[sidx])
        new_piece = ipiece[sidx]
        new_lo = midp
        new_hi = s_hi[sidx].copy()
        s_hi[sidx] = midp
        todo[sidx] = True
        ipiece = np.concatenate([ipiece, new_piece])
        s_lo = np.concatenate([s_lo, new_lo])
        s_hi = np.concatenate([s_hi, new_hi])
        ival = np.concatenate([ival, np.zeros(sidx.size, dtype=complex)])
        ierr = np.concatenate([ierr, np.zeros(sidx.size)])
        iabs = np.concatenate([iabs, np.zeros(sidx.size)])
        todo = np.concatenate([todo, np.ones(sidx.size, dtype=bool)])
    else:
        ctx.flags["stuck"] = True
    return total, terr, done


def integrate_adaptive(f, bounds, cfg=None, singular=(), decay=None):
    """Nested adaptive quadrature over a box of dimension at most 3.

    ``f`` maps an ``(M, d)`` array of points to ``M`` real or complex values.
    ``bounds`` lists ``(lo, hi)`` per axis; an axis may be semi-infinite if
    a decay rate is given for it in ``decay`` (a dict ``axis -> sigma`` or a
    single float for every infinite axis).  ``singular`` is a sequence of
    :class:`Hyperplane`.
    """
    cfg = cfg or QuadratureConfig()
    bounds = [(float(a), float(b)) for a, b in bounds]
    d = len(bounds)
    if not 1 <= d <= 3:
        raise DomainError(f"integrate_adaptive handles dimension 1..3, got {d}")
    lo = np.empty(d)
    hi = np.empty(d)
    sigma = np.full(d, np.inf)
    tol_for_r = min(cfg.abs_tol, cfg.rel_tol)
    flip = np.ones(d)
    for i, (a, b) in enumerate(bounds):
        if not a < b:
            raise DomainError(f"empty or reversed interval on axis {i}: ({a}, {b})")
        if np.isinf(a) and np.isinf(b):
            raise DomainError("doubly infinite axes must be split by the caller")
        if np.isinf(a) or np.isinf(b):
            if isinstance(decay, dict):
                sg = decay.get(i)
            elif decay is not None:
                sg = decay
            else:
                sg = cfg.tail_cutoff_sigma
            if sg is None or not sg > 0:
                raise DomainError(f"axis {i} is infinite but has no positive decay rate")
            R = (math.log(1.0 / tol_for_r) + math.log(101.0)) / sg
            sigma[i] = sg
            if np.isinf(b):
                lo[i], hi[i] = a, a + R
            else:
                # reflect so the truncation face is always the upper bound
                flip[i] = -1.0
                lo[i], hi[i] = -b, -b + R
        else:
            lo[i], hi[i] = a, b

    planes = []
    for h in singular:
        if len(h.normal) != d:
            raise DomainError("hyperplane dimension does not match the box")
        planes.append((np.array(h.normal) * flip, h.offset, h.exponent))
    planes = _dedupe(planes) if planes else []
    per_level = [None] * d
    per_level[d - 1] = planes
    for lvl in range(d - 1, 0, -1):
        per_level[lvl - 1] = _project_planes(per_level[lvl], lo[lvl], hi[lvl]) if per_level[lvl] else []

    if np.all(flip == 1.0):
        g = f
    else:
        def g(pts):
            return f(pts * flip)

    rel = [cfg.rel_tol / 10.0**i for i in range(d)]
    ab = [cfg.abs_tol / 10.0**i for i in range(d)]
    ctx = _Ctx(g, d, lo, hi, sigma, per_level, rel, ab, cfg.delta_lc, _Budget(cfg.max_evals))
    val, err, ok = _solve_level(ctx, 0, np.zeros((1, 0)))
    value, error = complex(val[0]), float(err[0])
    converged = bool(ok[0]) and np.isfinite(error) and not ctx.flags["budget"]
    res = IntegrationResult(value, error, ctx.budget.used, converged)
    if ctx.flags["budget"] and cfg.strict:
        raise BudgetExceeded(f"max_evals={cfg.max_evals} exhausted before convergence", result=res)
    return res


def integrate_tail(f, sigma, cfg=None, singular_exponent=None):
    """Integral of a scalar function over ``[0, inf)`` with decay ``e^{-sigma x}``.

    ``f`` maps a 1D array to values.  ``singular_exponent`` declares an
    endpoint blow-up ``x**(-p)`` at the origin.
    """
    if sigma is None or not sigma > 0:
        raise DomainError(f"integrate_tail needs a positive decay rate, got {sigma}")
    sing = ()
    if singular_exponent is not None:
        sing = (Hyperplane((1.0,), 0.0, singular_exponent),)
    return integrate_adaptive(lambda p: f(p[:, 0]), [(0.0, math.inf)], cfg, sing, decay=float(sigma))


# ---------------------------------------------------------------------------
# Monte Carlo


class _Component:
    """1D importance density: maps uniforms to points and returns the pdf."""

    def sample(self, u):
        raise NotImplementedError


@dataclass(frozen=True)
class Uniform(_Component):
    lo: float = 0.0
    hi: float = 1.0

    def sample(self, u):
        w = self.hi - self.lo
        return self.lo + w * u, np.full_like(u, 1.0 / w)


@dataclass(frozen=True)
class Exponential(_Component):
    """Density ``rate * exp(-rate (x - origin))`` on ``[origin, inf)``."""

    rate: float
    origin: float = 0.0

    def sample(self, u):
        x = -np.log1p(-u) / self.rate
        return self.origin + x, self.rate * np.exp(-self.rate * x)


@dataclass(frozen=True)
class Laplace(_Component):
    rate: float
    center: float = 0.0

    def sample(self, u):
        v = 2.0 * u - 1.0
        x = -np.sign(v) * np.log1p(-np.abs(v)) / self.rate
        return self.center + x, 0.5 * self.rate * np.exp(-self.rate * np.abs(x))


@dataclass(frozen=True)
class PowerLaw(_Component):
    """Density proportional to ``(x - lo)**(-p)`` on ``[lo, hi]``, ``p < 1``."""

    p: float
    lo: float = 0.0
    hi: float = 1.0

    def sample(self, u):
        L = self.hi - self.lo
        q = 1.0 - self.p
        y = L * u ** (1.0 / q)
        return self.lo + y, q * y ** (-self.p) / L**q


class Tabulated(_Component):
    """Density given on a grid, sampled by inverting the linearly interpolated CDF.

    The reported pdf is the exact derivative of that interpolated CDF, so
    importance weights stay unbiased even though the table is approximate.
    """

    def __init__(self, grid, density):
        grid = np.asarray(grid, dtype=float)
        density = np.maximum(np.asarray(density, dtype=float), 0.0)
        cell = 0.5 * (density[1:] + density[:-1]) * np.diff(grid)
        cdf = np.concatenate([[0.0], np.cumsum(cell)])
        if not cdf[-1] > 0:
            raise DomainError("tabulated density has zero mass")
        self.grid = grid
        self.cdf = cdf / cdf[-1]
        self.cell_pdf = (np.diff(self.cdf) / np.diff(grid))

    def sample(self, u):
        x = np.interp(u, self.cdf, self.grid)
        j = np.clip(np.searchsorted(self.grid, x, side="right") - 1, 0, len(self.cell_pdf) - 1)
        return x, self.cell_pdf[j]


class ProductSampler:
    """Product of independent 1D components."""

    def __init__(self, components):
        self.components = list(components)
        if not self.components:
            raise DomainError("ProductSampler needs at least one component")

    @property
    def dim(self):
        return len(self.components)

    def sample(self, u):
        xs, pdf = [], np.ones(u.shape[0])
        for i, c in enumerate(self.components):
            x, p = c.sample(u[:, i])
            xs.append(x)
            pdf = pdf * p
        return np.stack(xs, axis=1), pdf


def _stratum_rng(seed, stratum):
    key = np.array([int(seed) & (2**64 - 1), int(stratum)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def integrate_mc(f, sampler, cfg=None, chunk=1 << 16):
    """Stratified importance-sampled Monte Carlo estimate of ``int f``.

    Strata split the first uniform coordinate into ``cfg.mc_strata`` equal
    slabs.  Each stratum draws from its own Philox stream keyed by
    ``(mc_seed, stratum)``, and strata are reduced in index order.
    The error estimate is the stratified standard error.
    """
    cfg = cfg or QuadratureConfig()
    S = min(int(cfg.mc_strata), int(cfg.mc_samples))
    n_per = max(1, int(cfg.mc_samples) // S)
    d = sampler.dim
    means = np.zeros(S, dtype=complex)
    varis = np.zeros(S)
    evals = 0
    for s in range(S):
        rng = _stratum_rng(cfg.mc_seed, s)
        acc = 0j
        acc2 = 0.0
        left = n_per
        while left > 0:
            m = min(left, chunk)
            u = rng.random((m, d))
            u[:, 0] = (s + u[:, 0]) / S
            x, pdf = sampler.sample(u)
            vals = np.asarray(f(x), dtype=complex)
            w = vals / pdf
            bad = ~np.isfinite(w)
            if np.any(bad):
                first = x[np.flatnonzero(bad)[0]]
                raise MCAbort(
                    f"integrand returned {int(bad.sum())} non-finite values; first at {first.tolist()}",
                    count=int(bad.sum()),
                    first_point=first,
                )
            acc += w.sum()
            acc2 += float(np.sum(np.abs(w) ** 2))
            left -= m
            evals += m
        mean = acc / n_per
        means[s] = mean
        if n_per > 1:
            varis[s] = max(acc2 / n_per - abs(mean) ** 2, 0.0) * n_per / (n_per - 1)
    value = means.mean()
    err = math.sqrt(varis.sum() / (n_per * S * S))
    return IntegrationResult(value, err, evals, True)
