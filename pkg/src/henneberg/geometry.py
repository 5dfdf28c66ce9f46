"""Björling solver, isometry-group verification, flux and curve diagnostics.

The Björling solution through a planar analytic curve gamma with planar unit
normal eta reduces, because eta x gamma' = (0, 0, s) with s the signed
analytic speed, to

    X(u, v) = (Re x(w), Re y(w), sign * Im Int_{w0}^w s(w) dw),  w = u + i v.

For finite trigonometric sums with rational frequencies every ingredient is
a Laurent polynomial in E = e^{i w / D}; the analytic speed is the exact
polynomial square root of gamma' . gamma' (an error is raised when that is
not a perfect square).  The integral is evaluated by adaptive Gauss-Legendre
panels along the straight segment from w0, which is legitimate since the
integrand is entire.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import LaurentPoly
from .errors import DomainError, QuadratureError, StructureError
from .weierstrass import WeierstrassData, form_residues

# ---------------------------------------------------------------------------
# analytic planar curves as finite trigonometric sums
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrigTerm:
    """amplitude * cos(frequency * t + phase), frequency an exact rational."""

    amplitude: float
    frequency: Fraction
    phase: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "frequency", Fraction(self.frequency))


def _eval_terms(terms, t):
    t = np.asarray(t)
    out = np.zeros_like(np.asarray(t, dtype=complex if np.iscomplexobj(t) else float))
    for term in terms:
        out = out + term.amplitude * np.cos(float(term.frequency) * t + term.phase)
    return out


def _diff_terms(terms):
    # d/dt a cos(f t + p) = a f cos(f t + p + pi/2)
    return tuple(
        TrigTerm(term.amplitude * float(term.frequency), term.frequency,
                 term.phase + math.pi / 2)
        for term in terms
    )


@dataclass(frozen=True)
class AnalyticPlanarCurve:
    """A planar curve whose coordinates are finite trig sums over a domain.

    Rational frequencies keep the analytic continuation a Laurent polynomial
    in e^{i t / D}; integer frequencies give a 2 pi-periodic closed curve.
    """

    x_terms: tuple
    y_terms: tuple
    domain: tuple = (0.0, 2 * math.pi)

    def __post_init__(self):
        object.__setattr__(self, "x_terms", tuple(self.x_terms))
        object.__setattr__(self, "y_terms", tuple(self.y_terms))

    @property
    def period(self) -> float:
        return self.domain[1] - self.domain[0]

    def point(self, t):
        """Curve point; complex t evaluates the analytic extension."""
        return np.stack([_eval_terms(self.x_terms, t),
                         _eval_terms(self.y_terms, t)], axis=-1)

    def point3(self, t):
        p = self.point(t)
        return np.concatenate([p, np.zeros(p.shape[:-1] + (1,))], axis=-1)

    def velocity(self, t):
        return np.stack(
            [_eval_terms(_diff_terms(self.x_terms), t),
             _eval_terms(_diff_terms(self.y_terms), t)], axis=-1)

    def speed(self, t):
        return np.linalg.norm(self.velocity(t), axis=-1)

    def normal(self, t):
        """Unit planar normal, the tangent rotated by -90 degrees."""
        v = self.velocity(t)
        n = np.stack([v[..., 1], -v[..., 0]], axis=-1)
        return n / np.linalg.norm(n, axis=-1, keepdims=True)

    def common_denominator(self) -> int:
        d = 1
        for term in self.x_terms + self.y_terms:
            d = d * term.frequency.denominator // math.gcd(
                d, term.frequency.denominator
            )
        return d


def equator_curve(m) -> AnalyticPlanarCurve:
    """Unit-circle image of the even-type surface with exponent m: the
    standard hypocycloid in the theta parametrization."""
    q = Fraction(m)
    mf, m2 = float(q), float(q + 2)
    x = (TrigTerm(1 / mf, q, math.pi / 2), TrigTerm(1 / m2, q + 2, -math.pi / 2))
    y = (TrigTerm(1 / mf, q, math.pi), TrigTerm(1 / m2, q + 2, math.pi))
    span = 2 * math.pi * q.denominator
    return AnalyticPlanarCurve(x, y, (0.0, span))


def astroid_curve() -> AnalyticPlanarCurve:
    """The four-cusp hypocycloid bounding the conjugate classical surface."""
    return equator_curve(1)


def circle_curve(radius: float = 1.0) -> AnalyticPlanarCurve:
    return AnalyticPlanarCurve(
        (TrigTerm(radius, Fraction(1), 0.0),),
        (TrigTerm(radius, Fraction(1), -math.pi / 2),),
    )


def hypocycloid_curve(h) -> AnalyticPlanarCurve:
    """Rolling-circle parametrization of a Hypocycloid as a trig sum."""
    ratio = h.ratio  # R/r in lowest terms
    k = ratio - 1  # (R - r)/r
    d = h.R_outer - h.r_inner
    x = (TrigTerm(d, Fraction(1), math.pi / 2), TrigTerm(h.r_inner, k, -math.pi / 2))
    y = (TrigTerm(d, Fraction(1), math.pi), TrigTerm(h.r_inner, k, math.pi))
    return AnalyticPlanarCurve(x, y, (0.0, 2 * math.pi * k.denominator))


# ---------------------------------------------------------------------------
# Björling construction
# ---------------------------------------------------------------------------


def _terms_to_laurent(terms, denom: int) -> LaurentPoly:
    """a cos(f t + p) -> (a/2) e^{ip} E^{fD} + (a/2) e^{-ip} E^{-fD}."""
    acc: dict[int, complex] = {}
    for term in terms:
        k = term.frequency * denom
        assert k.denominator == 1
        k = int(k)
        half = 0.5 * term.amplitude * cmath.exp(1j * term.phase)
        acc[k] = acc.get(k, 0.0) + half
        acc[-k] = acc.get(-k, 0.0) + half.conjugate()
    return LaurentPoly.from_dict(acc)


def _laurent_diff(poly: LaurentPoly, denom: int) -> LaurentPoly:
    exps = np.arange(poly.lowest, poly.highest + 1)
    return LaurentPoly(poly.lowest, poly.coeffs * (1j * exps / denom))


def _laurent_sqrt(q: LaurentPoly) -> LaurentPoly:
    """Exact square root of a perfect-square Laurent polynomial."""
    lo, coeffs = q.lowest, q.coeffs
    n = len(coeffs)
    if q.is_zero or lo % 2 != 0 or (n - 1) % 2 != 0:
        raise StructureError("speed^2 is not a perfect square Laurent polynomial")
    half = (n - 1) // 2
    s = np.zeros(half + 1, dtype=complex)
    s[0] = np.sqrt(coeffs[0])
    for i in range(1, half + 1):
        conv = np.dot(s[1:i], s[i - 1 : 0 : -1]) if i >= 2 else 0.0
        s[i] = (coeffs[i] - conv) / (2 * s[0])
    root = LaurentPoly(lo // 2, s)
    check = root * root - q
    tol = 1e-10 * float(np.abs(coeffs).max())
    if not check.is_zero and float(np.abs(check.coeffs).max()) > tol:
        raise StructureError(
            "speed^2 is not a perfect square: the unit normal has no "
            "single-valued analytic extension"
        )
    return root


def _gauss_nodes(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


class BjorlingPatch:
    """Minimal surface through a planar curve with its planar unit normal.

    Evaluate with ``at(u, v)`` in curve coordinates w = u + i v, or via the
    (r, theta) interface with r = e^{-v}, theta = u (the conformal chart in
    which the curve sits on the unit circle).
    """

    def __init__(self, curve: AnalyticPlanarCurve, w0: float = None,
                 quad_order: int = 24, normal_sign: int = 1, tol: float = 1e-10):
        if normal_sign not in (1, -1):
            raise DomainError("normal_sign must be +1 or -1")
        self.curve = curve
        self.quad_order = int(quad_order)
        self.tol = float(tol)
        self.normal_sign = normal_sign
        denom = curve.common_denominator()
        self.denom = denom
        self._x = _terms_to_laurent(curve.x_terms, denom)
        self._y = _terms_to_laurent(curve.y_terms, denom)
        dx = _laurent_diff(self._x, denom)
        dy = _laurent_diff(self._y, denom)
        speed_sq = dx * dx + dy * dy
        self._speed = _laurent_sqrt(speed_sq)
        if w0 is None:
            w0 = self._default_base()
        self.w0 = float(w0)
        s0 = self._speed.evaluate(self._arg(self.w0))
        ref = float(curve.speed(self.w0))
        top = self._max_speed()
        if ref <= 1e-8 * top:
            raise DomainError(f"base parameter {w0!r} is at or near a cusp")
        if abs(s0 - ref) > abs(s0 + ref):
            self._speed = self._speed.scale(-1.0)
        self._nodes = _gauss_nodes(self.quad_order)
        self._nodes2 = _gauss_nodes(2 * self.quad_order)

    def _max_speed(self) -> float:
        ts = np.linspace(self.curve.domain[0], self.curve.domain[1], 512)
        return float(self.curve.speed(ts).max())

    def _default_base(self) -> float:
        # first parameter with at least half the top speed: a point on the
        # first regular arc, anchoring the normal orientation canonically
        ts = np.linspace(self.curve.domain[0], self.curve.domain[1], 1025)
        sp = self.curve.speed(ts)
        return float(ts[np.argmax(sp >= 0.5 * sp.max())])

    def _arg(self, w):
        return np.exp(1j * np.asarray(w, dtype=complex) / self.denom)

    def _panel(self, a: complex, b: complex, nodes) -> complex:
        x, wts = nodes
        mid, half = (a + b) / 2.0, (b - a) / 2.0
        vals = self._speed.evaluate(self._arg(mid + half * x))
        return half * np.dot(wts, vals)

    def _integrate(self, a: complex, b: complex, depth: int = 0) -> complex:
        coarse = self._panel(a, b, self._nodes)
        fine = self._panel(a, b, self._nodes2)
        if abs(fine - coarse) < self.tol:
            return fine
        if depth >= 14:
            raise QuadratureError(
                f"quadrature stalled on panel [{a}, {b}]: "
                f"orders differ by {abs(fine - coarse):.3e}"
            )
        mid = (a + b) / 2.0
        return self._integrate(a, mid, depth + 1) + self._integrate(mid, b, depth + 1)

    def at(self, u, v=0.0):
        """Surface point at w = u + i v."""
        w = complex(u) + 1j * complex(v) if np.isscalar(u) else None
        if w is None:
            u = np.asarray(u, dtype=float)
            v = np.broadcast_to(np.asarray(v, dtype=float), u.shape)
            pts = np.empty(u.shape + (3,))
            for idx in np.ndindex(u.shape):
                pts[idx] = self.at(float(u[idx]), float(v[idx]))
            return pts
        e = self._arg(w)
        integral = self._integrate(complex(self.w0), w)
        return np.array(
            [
                float(np.real(self._x.evaluate(e))),
                float(np.real(self._y.evaluate(e))),
                self.normal_sign * float(np.imag(integral)),
            ]
        )

    def quadrature_value(self, w, order: int) -> complex:
        """Single-panel quadrature of the speed integral at a given order
        (no subdivision); exposed for convergence self-checks."""
        return self._panel(complex(self.w0), complex(w), _gauss_nodes(order))

    def surface_map(self):
        from .surfaces import SurfaceMap

        def evaluator(r, theta):
            r = np.asarray(r, dtype=float)
            theta = np.asarray(theta, dtype=float)
            if np.any(r <= 0):
                raise DomainError("radius must be positive")
            return self.at(theta, -np.log(r))

        return SurfaceMap("bjorling", evaluator, normal=None, gauss_chart=False)


def bjorling_solve(curve: AnalyticPlanarCurve, w0: float = None,
                   quad_order: int = 24, normal_sign: int = 1,
                   tol: float = 1e-10) -> BjorlingPatch:
    """Solve the Björling problem for a planar trig-sum curve with its
    planar unit normal field."""
    return BjorlingPatch(curve, w0, quad_order, normal_sign, tol)


# ---------------------------------------------------------------------------
# rigid motions and isometries
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RigidMotion:
    """Orthogonal matrix (det +-1) plus translation."""

    matrix: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.matrix, dtype=float)
        t = np.asarray(self.translation, dtype=float)
        if np.abs(q.T @ q - np.eye(3)).max() >= 1e-12:
            raise DomainError("matrix is not orthogonal")
        q.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "matrix", q)
        object.__setattr__(self, "translation", t)

    def apply(self, points):
        return np.asarray(points) @ self.matrix.T + self.translation

    @classmethod
    def identity(cls):
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def rotation_z(cls, angle: float, flip_z: bool = False):
        c, s = math.cos(angle), math.sin(angle)
        q = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, -1.0 if flip_z else 1.0]])
        return cls(q, np.zeros(3))

    @classmethod
    def reflection(cls, normal) -> "RigidMotion":
        n = np.asarray(normal, dtype=float)
        n = n / np.linalg.norm(n)
        return cls(np.eye(3) - 2.0 * np.outer(n, n), np.zeros(3))


def fit_rigid_motion(source, target) -> RigidMotion:
    """Least-squares orthogonal Procrustes fit target ~ Q source + t.

    No determinant constraint: improper motions (reflections) are admitted,
    which the isometry groups here require.
    """
    a = np.asarray(source, dtype=float)
    b = np.asarray(target, dtype=float)
    ca, cb = a.mean(axis=0), b.mean(axis=0)
    h = (b - cb).T @ (a - ca)
    u, _, vt = np.linalg.svd(h)
    q = u @ vt
    return RigidMotion(q, cb - q @ ca)


@dataclass(frozen=True)
class ParameterMap:
    """Conformal move of the punctured plane generated by the primitives
    theta -> theta + alpha, theta -> -theta, r -> 1/r; the shift is kept as
    an exact fraction of pi so group closure is decidable exactly."""

    negate: bool = False
    shift_pi: Fraction = Fraction(0)
    invert: bool = False

    def __post_init__(self):
        object.__setattr__(self, "shift_pi", Fraction(self.shift_pi) % 2)

    def apply(self, r, theta):
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        if self.negate:
            theta = -theta
        theta = theta + math.pi * float(self.shift_pi)
        if self.invert:
            r = 1.0 / r
        return r, theta

    def compose(self, other: "ParameterMap") -> "ParameterMap":
        """self after other."""
        shift = (-other.shift_pi if self.negate else other.shift_pi) + self.shift_pi
        return ParameterMap(
            self.negate ^ other.negate, shift, self.invert ^ other.invert
        )

    def describe(self) -> str:
        t = "-theta" if self.negate else "theta"
        if self.shift_pi:
            t += f" + {self.shift_pi}*pi"
        r = "1/r" if self.invert else "r"
        return f"(r, theta) -> ({r}, {t})"


@dataclass(frozen=True)
class IsometryCertificate:
    """A verified pair (parameter map, rigid motion) with its residual.

    ``pmap`` is None when the map was supplied as an ad-hoc callable."""

    pmap: ParameterMap
    motion: RigidMotion
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual < self.tolerance


def _sample_points(samples: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    r = np.exp(rng.uniform(-0.8, 0.8, samples))
    theta = rng.uniform(0.0, 2 * math.pi, samples)
    return r, theta


def verify_isometry(surface, pmap, motion: RigidMotion = None,
                    samples: int = 240, seed: int = 0,
                    rel_tol: float = 1e-9) -> IsometryCertificate:
    """Check that the parameter map induces a rigid motion on the surface.

    ``surface`` is any (r, theta) -> R^3 evaluator; ``motion=None`` fits the
    best orthogonal motion by Procrustes before computing the residual
    max |X(sigma(p)) - (Q X(p) + t)|, passed against rel_tol times the
    sample diameter.
    """
    evaluator = surface.evaluator if hasattr(surface, "evaluator") else surface
    r, theta = _sample_points(samples, seed)
    source = evaluator(r, theta)
    if isinstance(pmap, ParameterMap):
        r2, t2 = pmap.apply(r, theta)
    else:
        r2, t2 = pmap(r, theta)
    target = evaluator(r2, t2)
    if motion is None:
        motion = fit_rigid_motion(source, target)
    residual = float(np.abs(target - motion.apply(source)).max())
    diameter = float(
        np.linalg.norm(source.max(axis=0) - source.min(axis=0))
    )
    if not isinstance(pmap, ParameterMap):
        pmap = None  # ad-hoc callable map; no exact representation
    return IsometryCertificate(pmap, motion, residual, rel_tol * max(diameter, 1e-30))


def _close_group(generators: Sequence[ParameterMap], cap: int):
    group = {ParameterMap()}
    frontier = list(group)
    while frontier:
        fresh = []
        for g in frontier:
            for h in generators:
                for prod in (h.compose(g), g.compose(h)):
                    if prod not in group:
                        if len(group) >= cap:
                            raise StructureError(
                                f"isometry generators do not close within {cap} elements"
                            )
                        group.add(prod)
                        fresh.append(prod)
        frontier = fresh
    return sorted(group, key=lambda p: (p.invert, p.negate, p.shift_pi))


def isometry_generators(m: int):
    """Generating parameter maps of the symmetric surface's isometry group.

    Odd m: reflection about the imaginary axis and the rotation by
    pi + pi/(m+1) (a roto-reflection downstairs); the group is dihedral of
    order 4m+4.  Even m: the same reflection, the rotation by 2 pi/(m+1) and
    the antipodal rotation by pi (a mirror downstairs); the group is
    D_{m+1} x Z_2, again of order 4m+4.
    """
    if m % 2 == 1:
        return (
            ParameterMap(negate=True, shift_pi=Fraction(1)),
            ParameterMap(shift_pi=1 + Fraction(1, m + 1)),
        )
    return (
        ParameterMap(negate=True, shift_pi=Fraction(1)),
        ParameterMap(shift_pi=Fraction(2, m + 1)),
        ParameterMap(shift_pi=Fraction(1)),
    )


def enumerate_isometries(m: int, samples: int = 240, seed: int = 0):
    """Close the generator set and certify every element on the closed-form
    surface; returns 4m+4 certificates for the symmetric example."""
    if m < 1:
        raise DomainError("m must be a positive integer")
    from .surfaces import surface_hm

    order = 4 * m + 4
    group = _close_group(isometry_generators(m), order)
    if len(group) != order:
        raise StructureError(
            f"expected {order} isometries, generators closed at {len(group)}"
        )
    surf = surface_hm(m)
    return [
        verify_isometry(surf, pmap, motion=None, samples=samples, seed=seed)
        for pmap in group
    ]


# ---------------------------------------------------------------------------
# flux and cusps
# ---------------------------------------------------------------------------


def flux_exactness(data: WeierstrassData):
    """Magnitudes of the three form residues; all below ~1e-12 means the
    Weierstrass form is exact (vanishing flux around the puncture)."""
    return tuple(float(x) for x in np.abs(form_residues(data)))


def _golden_minimize(fun, a, b, tol=1e-12, max_iter=200):
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - phi * (b - a), a + phi * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(max_iter):
        if abs(b - a) < tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = fun(d)
    t = (a + b) / 2.0
    return t, fun(t)


def cusp_count(curve, n_samples: int = 4096, rel_threshold: float = 1e-8,
               merge_dt: float = 1e-3) -> int:
    """Count the cusps of a closed curve as distinct zero-speed image points.

    ``curve`` is an AnalyticPlanarCurve or a callable t -> point evaluated
    over one parameter period (default 2 pi for callables).  Local speed
    minima on a dense sample (>= 2^10 points) are refined by golden section;
    refined speeds below rel_threshold times the maximum speed mark cusps.
    Marks closer than merge_dt in parameter are merged, and parameters whose
    image points coincide count once (closed curves may traverse their image
    several times).
    """
    if isinstance(curve, AnalyticPlanarCurve):
        t0, t1 = curve.domain
        point = curve.point

        def speed(t):
            return float(curve.speed(t))

    else:
        t0, t1 = 0.0, 2 * math.pi
        point = curve
        # step small enough that the cubic term at a cusp (~|gamma'''| h^2)
        # stays below the detection threshold, large enough to beat roundoff
        h = (t1 - t0) / n_samples / 64.0

        def speed(t):
            return float(np.linalg.norm(np.asarray(point(t + h)) -
                                        np.asarray(point(t - h))) / (2 * h))

    n_samples = max(n_samples, 1024)
    ts = np.linspace(t0, t1, n_samples, endpoint=False)
    speeds = np.array([speed(t) for t in ts])
    top = float(speeds.max())
    if top == 0.0:
        raise DomainError("curve is degenerate (zero speed everywhere)")
    local_min = (speeds <= np.roll(speeds, 1)) & (speeds <= np.roll(speeds, -1))
    dt = (t1 - t0) / n_samples

    marks = []
    period = t1 - t0
    for idx in np.nonzero(local_min)[0]:
        t_ref, s_ref = _golden_minimize(speed, ts[idx] - dt, ts[idx] + dt)
        if s_ref < rel_threshold * top:
            marks.append(t0 + (t_ref - t0) % period)
    marks.sort()
    merged = []
    for t in marks:
        if merged and (t - merged[-1]) < merge_dt:
            continue
        merged.append(t)
    if len(merged) > 1 and (merged[0] + period - merged[-1]) < merge_dt:
        merged.pop()

    images = [np.asarray(point(t), dtype=float) for t in merged]
    if not images:
        return 0
    scale = max(1.0, max(float(np.abs(p).max()) for p in images))
    distinct: list[np.ndarray] = []
    for img in images:
        if all(np.abs(img - other).max() > 1e-6 * scale for other in distinct):
            distinct.append(img)
    return len(distinct)
