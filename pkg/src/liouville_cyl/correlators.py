"""Euclidean, Lorentzian and finite-volume correlators of vertex operators.

A correlator of charges ``alpha_1..alpha_k`` at points ``q_1..q_k`` is
nonzero only when the screening number ``w = -sum(alpha) / b`` is a
nonnegative integer, in which case it is

    (-mu)^w / w! * exp(-4 sum_{j<j'} alpha_j alpha_j' g(q_j - q_j'))
        * int exp(-4b sum_{j,l} alpha_j g(q_j - u_l) - 4b^2 sum_{l<l'} g(u_l - u_l')) du

with the integral over ``w`` screening positions.  In the Euclidean
correlator ``g`` is the cylinder Green's function and the screening
positions range over the cylinder.  In the Lorentzian correlator the
insertions sit at imaginary times ``i t_j`` and the screening time runs
along a contour: in from ``i t_1 - inf``, through ``i t_1, ..., i t_k`` in
label order, and out to ``i t_k + inf``.  There ``g`` is evaluated on
time-ordered differences (later minus earlier along the contour).

Screening integrals are split by which contour segment each screening
variable lies on.  For ``w = 1`` each piece is a 2D adaptive integral.
Larger ``w`` uses Monte Carlo.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DomainError,
    LightConeViolation,
    NonIntegerScreening,
    SingularConfiguration,
)
from .kernels import (
    CylinderPoint,
    TorusSpec,
    green_complex,
    green_real,
    lightcone_distance,
    torus_green_array,
    torus_green_truncated_array,
    wrap,
)
from .quadrature import (
    Exponential,
    Hyperplane,
    IntegrationResult,
    Laplace,
    ProductSampler,
    QuadratureConfig,
    Uniform,
    combine,
    integrate_adaptive,
    integrate_mc,
)

__all__ = [
    "Charge",
    "Insertion",
    "ModelParams",
    "CorrelatorSpec",
    "CorrelatorResult",
    "Segment",
    "Contour",
    "Visit",
    "ScreeningPosition",
    "screening_number",
    "build_contour",
    "time_ordered_g",
    "euclidean_correlator",
    "lorentzian_correlator",
    "torus_correlator",
    "renormalization_factor",
    "exchange_adjacent",
    "sector_weights",
    "lorentzian_log_integrand",
    "free_log_factor",
    "INTEGER_TOL",
    "MAX_W",
    "MAX_K",
]

INTEGER_TOL = 1e-9
MAX_W = 3
MAX_K = 4
B_MAX = 2.0**-0.5


# ---------------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class Charge:
    alpha: complex

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))


@dataclass(frozen=True)
class ModelParams:
    """Coupling ``b`` in ``(0, 2**-0.5)`` and cosmological constant ``mu > 0``."""

    b: float
    mu: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "mu", float(self.mu))
        if not 0 < self.b < B_MAX:
            raise DomainError(f"coupling must satisfy 0 < b < 2**-0.5, got b={self.b}")
        if not self.mu > 0:
            raise DomainError(f"mu must be positive, got {self.mu}")


@dataclass(frozen=True)
class Insertion:
    charge: Charge
    point: CylinderPoint
    label: int

    def __post_init__(self):
        if not isinstance(self.charge, Charge):
            object.__setattr__(self, "charge", Charge(self.charge))
        if not isinstance(self.point, CylinderPoint):
            object.__setattr__(self, "point", CylinderPoint(*self.point))
        object.__setattr__(self, "label", int(self.label))

    @property
    def alpha(self):
        return self.charge.alpha


def screening_number(charges, b, integer_tol=INTEGER_TOL):
    """Nearest integer to ``-sum(alpha) / b``, or :class:`NonIntegerScreening`."""
    total = sum(complex(c.alpha if isinstance(c, Charge) else c) for c in charges)
    raw = -total / float(b)
    w = int(round(raw.real))
    dev = max(abs(raw.real - w), abs(total.imag))
    if dev > integer_tol:
        raise NonIntegerScreening(
            f"-sum(alpha)/b = {raw:.12g} is not an integer (deviation {dev:.3g})", deviation=dev
        )
    return w


@dataclass(frozen=True)
class CorrelatorSpec:
    """Model parameters and insertions, kept sorted by label."""

    params: ModelParams
    insertions: tuple
    integer_tol: float = INTEGER_TOL

    def __post_init__(self):
        ins = tuple(sorted(self.insertions, key=lambda i: i.label))
        labels = [i.label for i in ins]
        if len(set(labels)) != len(labels):
            raise DomainError(f"insertion labels must be distinct, got {labels}")
        object.__setattr__(self, "insertions", ins)
        b = self.params.b
        for i in ins:
            if not i.alpha.real > -1.0 / (2.0 * b):
                raise DomainError(
                    f"charge {i.alpha} at label {i.label} violates Re(alpha) > -1/(2b) = {-1 / (2 * b):.6g}"
                )
        # validates integrality eagerly
        screening_number([i.charge for i in ins], b, self.integer_tol)

    @classmethod
    def build(cls, b, mu, alphas, points, labels=None):
        labels = list(range(1, len(alphas) + 1)) if labels is None else labels
        params = ModelParams(b, mu)
        ins = [Insertion(Charge(a), CylinderPoint(*p), lab) for a, p, lab in zip(alphas, points, labels)]
        return cls(params, tuple(ins))

    @property
    def w(self):
        return screening_number([i.charge for i in self.insertions], self.params.b, self.integer_tol)

    @property
    def k(self):
        return len(self.insertions)

    @property
    def alphas(self):
        return np.array([i.alpha for i in self.insertions], dtype=complex)

    @property
    def times(self):
        return np.array([i.point.t for i in self.insertions])

    @property
    def xs(self):
        return np.array([i.point.x for i in self.insertions])

    def with_points(self, points):
        ins = tuple(
            Insertion(i.charge, CylinderPoint(*p), i.label) for i, p in zip(self.insertions, points)
        )
        return dataclasses.replace(self, insertions=ins)

    def translated(self, a, theta):
        return self.with_points([(i.point.t + a, i.point.x + theta) for i in self.insertions])


@dataclass
class CorrelatorResult:
    value: complex
    error_estimate: float
    evals: int
    converged: bool
    w: int = 0
    method: str = ""
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        self.value = complex(self.value)
        self.error_estimate = float(self.error_estimate)

    def to_dict(self):
        return {
            "re": self.value.real,
            "im": self.value.imag,
            "error": self.error_estimate,
            "evals": int(self.evals),
            "converged": bool(self.converged),
            "w": int(self.w),
            "method": self.method,
        }


def _exact(value, w, method):
    return CorrelatorResult(value, 0.0, 0, True, w, method)


def _check_size(spec, w):
    if spec.k > MAX_K:
        raise DomainError(f"at most {MAX_K} insertions are supported, got {spec.k}")
    if w > MAX_W:
        raise DomainError(f"screening number at most {MAX_W} is supported, got {w}")


# ---------------------------------------------------------------------------
# contour


@dataclass(frozen=True)
class Segment:
    """One piece of the contour.

    ``index`` 0 is the incoming tail, ``k`` the outgoing tail, and
    ``1..k-1`` the vertical pieces between consecutive visits.  Points are
    ``start + (end - start) * c`` on vertical pieces and ``start -/+ c`` on
    the tails, with ``c`` in ``(0, 1)`` or ``(0, inf)``.
    """

    kind: str
    index: int
    start: complex
    end: complex
    orientation: int

    @property
    def jacobian(self):
        if self.kind == "vertical":
            return self.end - self.start
        return 1.0

    def position(self, c):
        if self.kind == "left-tail":
            return self.end - c
        if self.kind == "right-tail":
            return self.start + c
        return self.start + (self.end - self.start) * c


@dataclass(frozen=True)
class Contour:
    segments: tuple
    marked_visits: tuple  # (label, imaginary position)

    def segment(self, index):
        for s in self.segments:
            if s.index == index:
                return s
        raise DomainError(f"contour has no segment with index {index}")


def build_contour(insertions):
    """Contour visiting ``i t_j`` in label order; zero-length pieces are dropped."""
    ins = sorted(insertions, key=lambda i: i.label)
    if not ins:
        raise DomainError("a contour needs at least one insertion")
    ts = [i.point.t for i in ins]
    k = len(ts)
    segs = [Segment("left-tail", 0, complex(-math.inf, ts[0]), 1j * ts[0], 1)]
    for r in range(1, k):
        a, b = ts[r - 1], ts[r]
        if b != a:
            segs.append(Segment("vertical", r, 1j * a, 1j * b, 1 if b > a else -1))
    segs.append(Segment("right-tail", k, 1j * ts[-1], complex(math.inf, ts[-1]), 1))
    visits = tuple((i.label, 1j * i.point.t) for i in ins)
    return Contour(tuple(segs), visits)


@dataclass(frozen=True)
class Visit:
    """Marked visit of the contour by the insertion at ordinal ``position`` (1-based)."""

    position: int
    point: CylinderPoint


@dataclass(frozen=True)
class ScreeningPosition:
    segment: int
    c: float
    x: float


def _order_key(a):
    # contour order: (segment-or-visit rank, within-segment coordinate)
    if isinstance(a, Visit):
        return (a.position, 1, 0.0)
    key = -a.c if a.segment == 0 else a.c
    return (a.segment, 2, key) if a.segment > 0 else (0, 2, key)


def _complex_point(contour, a):
    if isinstance(a, Visit):
        return 1j * a.point.t, a.point.x
    return contour.segment(a.segment).position(a.c), a.x


def time_ordered_g(contour, a, b, delta_lc=1e-9):
    """``g`` of the contour-ordered difference (later minus earlier) of ``a`` and ``b``.

    Screening positions are ordered by contour parameter, visits by label,
    and a screening position on segment ``s`` comes after visit ``j`` iff
    ``s >= j``.  Symmetric in its two arguments.
    """
    ka, kb = _order_key(a), _order_key(b)
    if isinstance(a, ScreeningPosition) and isinstance(b, Visit):
        later_a = a.segment >= b.position
    elif isinstance(a, Visit) and isinstance(b, ScreeningPosition):
        later_a = not (b.segment >= a.position)
    else:
        later_a = ka > kb
    (ta, xa), (tb, xb) = _complex_point(contour, a), _complex_point(contour, b)
    tau, x = (ta - tb, xa - xb) if later_a else (tb - ta, xb - xa)
    x = float(wrap(x))
    if lightcone_distance(tau, x) <= delta_lc:
        from .errors import LightConePoint

        raise LightConePoint(f"ordered difference ({tau}, {x}) lies on the light cone")
    return complex(green_complex(tau, x))


# ---------------------------------------------------------------------------
# vectorised integrands


def free_log_factor(alpha, et, ex, lorentzian=True):
    """``-4 sum_{j<j'} alpha_j alpha_j' g(v_j' - v_j)`` for externals in label order.

    ``et`` and ``ex`` have shape (n, k).  In the Lorentzian case the
    difference is the boundary value at imaginary time ``t_j' - t_j``.
    """
    n, k = et.shape
    out = np.zeros(n, dtype=complex)
    for j in range(k):
        for jj in range(j + 1, k):
            dt = et[:, jj] - et[:, j]
            dx = ex[:, jj] - ex[:, j]
            g = green_complex(1j * dt, dx) if lorentzian else green_real(dt, dx)
            out += -4.0 * alpha[j] * alpha[jj] * g
    return out


def _screen_positions(seg, c, et):
    """Real and imaginary parts of the contour positions of screening points."""
    n, k = et.shape
    re = np.zeros_like(c)
    im = np.zeros_like(c)
    for l, s in enumerate(seg):
        if s == 0:
            re[:, l] = -c[:, l]
            im[:, l] = et[:, 0]
        elif s == k:
            re[:, l] = c[:, l]
            im[:, l] = et[:, k - 1]
        else:
            im[:, l] = et[:, s - 1] + c[:, l] * (et[:, s] - et[:, s - 1])
    return re, im


def lorentzian_log_integrand(b, alpha, et, ex, seg, c, y, delta_lc=0.0):
    """Log of the contour integrand for screening points on segments ``seg``.

    Returns ``(log_f, jac, near)`` where ``jac`` is the product of segment
    Jacobians and ``near`` flags samples within ``delta_lc`` of the light
    cone of some ordered difference.
    """
    n, k = et.shape
    w = len(seg)
    re, im = _screen_positions(seg, c, et)
    logf = np.zeros(n, dtype=complex)
    near = np.zeros(n, dtype=bool)
    for l, s in enumerate(seg):
        for j in range(1, k + 1):
            if s >= j:
                tr, ti, xx = re[:, l], im[:, l] - et[:, j - 1], y[:, l] - ex[:, j - 1]
            else:
                tr, ti, xx = -re[:, l], et[:, j - 1] - im[:, l], ex[:, j - 1] - y[:, l]
            tau = tr + 1j * ti
            if delta_lc > 0:
                near |= lightcone_distance(tau, xx) <= delta_lc
            logf += -4.0 * b * alpha[j - 1] * green_complex(tau, xx)
    for l in range(w):
        for ll in range(l + 1, w):
            sl, sll = seg[l], seg[ll]
            if sl != sll:
                later_l = np.full(n, sl > sll)
            elif sl == 0:
                later_l = c[:, l] < c[:, ll]
            else:
                later_l = c[:, l] > c[:, ll]
            sgn = np.where(later_l, 1.0, -1.0)
            tau = sgn * ((re[:, l] - re[:, ll]) + 1j * (im[:, l] - im[:, ll]))
            xx = sgn * (y[:, l] - y[:, ll])
            if delta_lc > 0:
                near |= lightcone_distance(tau, xx) <= delta_lc
            logf += -4.0 * b * b * green_complex(tau, xx)
    jac = np.ones(n, dtype=complex)
    for s in seg:
        if 0 < s < k:
            jac = jac * 1j * (et[:, s] - et[:, s - 1])
    return logf, jac, near


def _euclid_log_integrand(b, alpha, et, ex, t, y):
    n, w = t.shape
    logf = np.zeros(n, dtype=complex)
    for l in range(w):
        for j in range(et.shape[1]):
            logf += -4.0 * b * alpha[j] * green_real(t[:, l] - et[:, j], y[:, l] - ex[:, j])
        for ll in range(l + 1, w):
            logf += -4.0 * b * b * green_real(t[:, l] - t[:, ll], y[:, l] - y[:, ll])
    return logf


def sector_weights(n_segments, w):
    """Segment multisets with weight ``1 / prod(m_i!)``."""
    out = []
    for combo in itertools.combinations_with_replacement(range(n_segments), w):
        counts = [combo.count(s) for s in set(combo)]
        out.append((combo, 1.0 / math.prod(math.factorial(m) for m in counts)))
    return out


# ---------------------------------------------------------------------------
# singular sets in the (c, y) plane for one screening variable


def _offsets_in_window(lo, hi, pad=0.0):
    """Shifts ``2m`` with ``[lo + 2m, hi + 2m]`` meeting ``[-1 - pad, 1 + pad]``."""
    m_lo = math.floor((-1.0 - pad - hi) / 2.0)
    m_hi = math.ceil((1.0 + pad - lo) / 2.0)
    return [2.0 * m for m in range(m_lo, m_hi + 1)
            if lo + 2.0 * m <= 1.0 + pad and hi + 2.0 * m >= -1.0 - pad]


def _point_planes(ys, p, cface=None):
    """Lines ``y = y*`` (inner) for a point singularity of 2D exponent ``p``."""
    planes = []
    for ystar in ys:
        for sh in _offsets_in_window(ystar, ystar, 1e-12):
            planes.append(Hyperplane((0.0, 1.0), ystar + sh, min(p, 0.5)))
    if cface is not None:
        planes.append(Hyperplane((1.0, 0.0), cface, p - 1.0))
    return planes


def _mod2_equal(a, b, tol=1e-12):
    return abs(float(wrap(a - b))) < tol


def _tail_planes(b, alpha, et, ex, seg_index):
    """Singular points on the face ``c = 0`` of a tail segment."""
    k = len(et)
    tref = et[0] if seg_index == 0 else et[-1]
    planes = []
    pmax = -1.0
    for j in range(k):
        p_half = -2.0 * b * alpha[j].real
        d = et[j] - tref
        yp, ym = ex[j] + d, ex[j] - d
        if _mod2_equal(yp, ym):
            p = 2.0 * p_half
            planes += _point_planes([float(wrap(yp))], p)
        else:
            p = p_half
            planes += _point_planes([float(wrap(yp)), float(wrap(ym))], p)
        pmax = max(pmax, p)
    planes.append(Hyperplane((1.0, 0.0), 0.0, pmax - 1.0))
    return planes


def _vertical_planes(b, alpha, et, ex, r):
    """Light-cone lines ``y + s (t_r + c D - t_j) = x_j + 2m`` on vertical segment ``r``."""
    t0, t1 = et[r - 1], et[r]
    D = t1 - t0
    planes = []
    for j in range(len(et)):
        p = -2.0 * b * alpha[j].real
        for s in (1.0, -1.0):
            base = ex[j] - s * (t0 - et[j])
            # y = base - s D c for c in [0, 1]
            ends = (base, base - s * D)
            for sh in _offsets_in_window(min(ends), max(ends), 1e-12):
                planes.append(Hyperplane((s * D, 1.0), base + sh, p))
    return _merge_coincident(planes)


def _merge_coincident(planes):
    # coincident light-cone lines from the two signs add their exponents
    out = {}
    for h in planes:
        n = np.array(h.normal)
        nn = n / np.linalg.norm(n)
        c = h.offset / np.linalg.norm(n)
        if nn[np.flatnonzero(np.abs(nn) > 1e-14)[0]] < 0:
            nn, c = -nn, -c
        key = (round(nn[0], 12), round(nn[1], 12), round(c, 12))
        if key in out:
            old = out[key]
            out[key] = Hyperplane(old.normal, old.offset, old.exponent + h.exponent)
        else:
            out[key] = h
    return list(out.values())


# ---------------------------------------------------------------------------
# checks


def _check_coincident(spec, delta_lc):
    ins = spec.insertions
    for a in range(len(ins)):
        for c in range(a + 1, len(ins)):
            p, q = ins[a].point, ins[c].point
            if math.hypot(p.t - q.t, float(abs(wrap(p.x - q.x)))) <= delta_lc:
                raise SingularConfiguration(
                    f"insertions {ins[a].label} and {ins[c].label} coincide at {p}"
                )


def _check_lightcone(spec, delta_lc):
    ins = spec.insertions
    for a in range(len(ins)):
        for c in range(a + 1, len(ins)):
            dt = ins[c].point.t - ins[a].point.t
            dx = ins[c].point.x - ins[a].point.x
            margin = float(min(abs(wrap(dt + dx)), abs(wrap(dt - dx))))
            if margin <= delta_lc:
                pair = (ins[a].label, ins[c].label)
                raise LightConeViolation(
                    f"insertions {pair[0]} and {pair[1]} are light-like separated "
                    f"(margin {margin:.3g} <= {delta_lc:.3g})",
                    pair=pair,
                    margin=margin,
                )


def _prefactor(mu, w):
    return (-mu) ** w


# ---------------------------------------------------------------------------
# Euclidean


def euclidean_correlator(spec, cfg=None):
    """Cylinder correlator of the insertions in ``spec``."""
    cfg = cfg or QuadratureConfig()
    w = spec.w
    if w < 0:
        return _exact(0.0, w, "euclidean:negative-w")
    _check_size(spec, w)
    _check_coincident(spec, cfg.delta_lc)
    b, mu = spec.params.b, spec.params.mu
    alpha = spec.alphas
    et, ex = spec.times[None, :], spec.xs[None, :]
    free = np.exp(free_log_factor(alpha, et, ex, lorentzian=False)[0])
    if w == 0:
        return _exact(free, 0, "euclidean:free")
    pref = _prefactor(mu, w) / math.factorial(w) * free
    sigma = 2.0 * math.pi * b * b
    if w == 1:
        res = _euclid_w1(b, alpha, spec.times, spec.xs, sigma, cfg)
        method = "euclidean:adaptive"
    else:
        res = _euclid_mc(b, alpha, spec.times, spec.xs, w, sigma, cfg)
        method = "euclidean:mc"
    out = res.scaled(pref)
    return CorrelatorResult(out.value, out.error_estimate, out.evals, out.converged, w, method)


def _euclid_w1(b, alpha, ts, xs, sigma, cfg):
    def f(p):
        t, y = p[:, :1], p[:, 1:]
        n = p.shape[0]
        lf = _euclid_log_integrand(b, alpha, np.broadcast_to(ts, (n, len(ts))), np.broadcast_to(xs, (n, len(xs))), t, y)
        return np.exp(lf)

    planes = []
    for j in range(len(ts)):
        p = -4.0 * b * alpha[j].real
        planes += _point_planes([xs[j]], p)
        planes.append(Hyperplane((1.0, 0.0), ts[j], p - 1.0))
    t_lo, t_hi = float(np.min(ts)), float(np.max(ts))
    parts = [
        integrate_adaptive(f, [(-math.inf, t_lo), (-1.0, 1.0)], cfg, planes, decay={0: sigma}),
        integrate_adaptive(f, [(t_hi, math.inf), (-1.0, 1.0)], cfg, planes, decay={0: sigma}),
    ]
    if t_hi > t_lo:
        parts.append(integrate_adaptive(f, [(t_lo, t_hi), (-1.0, 1.0)], cfg, planes))
    return combine(parts)


def _euclid_mc(b, alpha, ts, xs, w, sigma, cfg):
    center = float(np.mean(ts))
    comps = []
    for _ in range(w):
        comps += [Laplace(sigma, center), Uniform(-1.0, 1.0)]
    sampler = ProductSampler(comps)

    def f(p):
        n = p.shape[0]
        t, y = p[:, 0::2], p[:, 1::2]
        lf = _euclid_log_integrand(b, alpha, np.broadcast_to(ts, (n, len(ts))), np.broadcast_to(xs, (n, len(xs))), t, y)
        return np.exp(lf)

    return integrate_mc(f, sampler, cfg)


# ---------------------------------------------------------------------------
# Lorentzian


def lorentzian_correlator(spec, cfg=None):
    """Contour-ordered correlator with insertions at imaginary times ``i t_j``."""
    cfg = cfg or QuadratureConfig()
    w = spec.w
    if w < 0:
        return _exact(0.0, w, "lorentzian:negative-w")
    _check_size(spec, w)
    _check_lightcone(spec, cfg.delta_lc)
    b, mu = spec.params.b, spec.params.mu
    alpha = spec.alphas
    ts, xs = spec.times, spec.xs
    free = np.exp(free_log_factor(alpha, ts[None, :], xs[None, :])[0])
    if w == 0:
        return _exact(free, 0, "lorentzian:free")
    contour = build_contour(spec.insertions)
    seg_ids = [s.index for s in contour.segments]
    sigma = 2.0 * math.pi * b * b
    parts = []
    details = {}
    for combo, weight in sector_weights(len(seg_ids), w):
        seg = tuple(seg_ids[i] for i in combo)
        if w == 1:
            r = _lorentz_w1(b, alpha, ts, xs, seg[0], sigma, cfg)
        else:
            r = _lorentz_mc(b, alpha, ts, xs, seg, sigma, cfg)
        r = r.scaled(weight)
        details[str(seg)] = (r.value.real, r.value.imag, r.error_estimate)
        parts.append(r)
    total = combine(parts).scaled(_prefactor(mu, w) * free)
    method = "lorentzian:adaptive" if w == 1 else "lorentzian:mc"
    return CorrelatorResult(total.value, total.error_estimate, total.evals, total.converged, w, method, details)


def _lorentz_w1(b, alpha, ts, xs, s, sigma, cfg):
    k = len(ts)
    seg = (s,)

    def f(p):
        n = p.shape[0]
        lf, jac, _ = lorentzian_log_integrand(
            b, alpha, np.broadcast_to(ts, (n, k)), np.broadcast_to(xs, (n, k)), seg, p[:, :1], p[:, 1:]
        )
        return jac * np.exp(lf)

    if s == 0 or s == k:
        planes = _tail_planes(b, alpha, ts, xs, s)
        return integrate_adaptive(f, [(0.0, math.inf), (-1.0, 1.0)], cfg, planes, decay={0: sigma})
    planes = _vertical_planes(b, alpha, ts, xs, s)
    return integrate_adaptive(f, [(0.0, 1.0), (-1.0, 1.0)], cfg, planes)


def _lorentz_mc(b, alpha, ts, xs, seg, sigma, cfg):
    k = len(ts)
    comps = []
    for s in seg:
        comps.append(Exponential(sigma) if s in (0, k) else Uniform(0.0, 1.0))
        comps.append(Uniform(-1.0, 1.0))
    sampler = ProductSampler(comps)

    def f(p):
        n = p.shape[0]
        lf, jac, near = lorentzian_log_integrand(
            b, alpha, np.broadcast_to(ts, (n, k)), np.broadcast_to(xs, (n, k)), seg,
            p[:, 0::2], p[:, 1::2], cfg.delta_lc,
        )
        val = jac * np.exp(np.where(near, -np.inf, lf))
        return val

    return integrate_mc(f, sampler, cfg)


def exchange_adjacent(spec, p, cfg=None):
    """Correlator in the given order and with insertions ``p, p+1`` exchanged.

    ``p`` is a 1-based position in label order.
    """
    if not 1 <= p <= spec.k - 1:
        raise DomainError(f"exchange position must be in 1..{spec.k - 1}, got {p}")
    ins = list(spec.insertions)
    labels = [i.label for i in ins]
    a, c = ins[p - 1], ins[p]
    ins[p - 1] = Insertion(c.charge, c.point, labels[p - 1])
    ins[p] = Insertion(a.charge, a.point, labels[p])
    swapped = dataclasses.replace(spec, insertions=tuple(ins))
    return lorentzian_correlator(spec, cfg), lorentzian_correlator(swapped, cfg)


# ---------------------------------------------------------------------------
# torus


def renormalization_factor(spec, T):
    """``exp{(pi T / 3) sum_j alpha_j (b - alpha_j)}``."""
    b = spec.params.b
    a = spec.alphas
    return complex(np.exp(math.pi * T / 3.0 * np.sum(a * (b - a))))


def torus_correlator(spec, torus, cfg=None, truncated=False):
    """Finite-volume correlator on ``[-T, T] x [-1, 1]``.

    Uses the exact mean-zero Green's function, or its Fourier truncation
    at ``torus.N`` when ``truncated`` is set.
    """
    cfg = cfg or QuadratureConfig()
    w = spec.w
    if w < 0:
        return _exact(0.0, w, "torus:negative-w")
    _check_size(spec, w)
    _check_coincident(spec, cfg.delta_lc)
    T = torus.T
    for i in spec.insertions:
        if abs(i.point.t) > T:
            raise DomainError(f"insertion {i.label} at t={i.point.t} lies outside [-T, T]")
    if truncated:
        def G(dt, dx):
            shape = np.shape(dt)
            return torus_green_truncated_array(T, torus.N, np.ravel(dt), np.ravel(dx)).reshape(shape)
    else:
        def G(dt, dx):
            return torus_green_array(T, dt, dx)

    b, mu = spec.params.b, spec.params.mu
    alpha = spec.alphas
    ts, xs = spec.times, spec.xs
    lf = 0j
    for j in range(spec.k):
        for jj in range(j + 1, spec.k):
            lf += -4.0 * alpha[j] * alpha[jj] * complex(np.asarray(G(np.array([ts[jj] - ts[j]]), np.array([xs[jj] - xs[j]])))[0])
    free = np.exp(lf)
    if w == 0:
        return _exact(free, 0, "torus:free")

    def logint(t, y):
        out = np.zeros(t.shape[0], dtype=complex)
        for l in range(t.shape[1]):
            for j in range(spec.k):
                out += -4.0 * b * alpha[j] * G(t[:, l] - ts[j], y[:, l] - xs[j])
            for ll in range(l + 1, t.shape[1]):
                out += -4.0 * b * b * G(t[:, l] - t[:, ll], y[:, l] - y[:, ll])
        return out

    pref = _prefactor(mu, w) / math.factorial(w) * free
    if w == 1:
        planes = []
        for j in range(spec.k):
            p = -4.0 * b * alpha[j].real
            planes += _point_planes([xs[j]], p)
            planes.append(Hyperplane((1.0, 0.0), ts[j], p - 1.0))
        res = integrate_adaptive(lambda p: np.exp(logint(p[:, :1], p[:, 1:])), [(-T, T), (-1.0, 1.0)], cfg, planes)
        method = "torus:adaptive"
    else:
        comps = []
        for _ in range(w):
            comps += [Uniform(-T, T), Uniform(-1.0, 1.0)]
        res = integrate_mc(lambda p: np.exp(logint(p[:, 0::2], p[:, 1::2])), ProductSampler(comps), cfg)
        method = "torus:mc"
    out = res.scaled(pref)
    return CorrelatorResult(out.value, out.error_estimate, out.evals, out.converged, w, method)
