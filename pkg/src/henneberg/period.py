"""Solving and verifying the period problem.

The residue conditions for complexity m read off three coefficients of the
branch polynomial:

    horizontal:  conj(c A_m) + c A_{m+2} = 0        (complex)
    vertical:    Im(c A_{m+1}) = 0                  (real)
    one-sided:   conj(c)/c + prod a_j/conj(a_j) = 0

For m = 1 the system collapses to three scalar relations in
(r1, r2, theta2, beta); for m = 2 it reduces, after fixing a_1 real
positive, to the pair of functions (horizontal_residual_m2,
vertical_residual_m2) of (r1, r2, r3, theta2, theta3) plus a phase
condition fixing beta.
"""

from __future__ import annotations

import cmath
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import (
    BranchConfiguration,
    invert_radial_gap,
    radial_gap,
)
from .errors import ConvergenceError, DomainError, StructureError
from .weierstrass import WeierstrassData, one_sided_residual

#: i^k for exact quarter-turn phases
_I_POW = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)

#: lower edge of the domain of the family square root (reported constant only)
F_DOMAIN_EDGE = 0.5 * math.atan2(math.sqrt(32.0 * math.sqrt(10.0) + 95.0), 9.0)

_SQRT2 = math.sqrt(2.0)


def _thread_count() -> int:
    env = os.environ.get("HF_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(8, os.cpu_count() or 1)


@dataclass(frozen=True)
class PeriodResiduals:
    """The three residuals whose simultaneous vanishing defines a solution
    of the period problem with the data's complexity."""

    horizontal: complex
    vertical: float
    onesided: float

    def __post_init__(self):
        object.__setattr__(self, "horizontal", complex(self.horizontal))
        object.__setattr__(self, "vertical", float(self.vertical))
        object.__setattr__(self, "onesided", float(self.onesided))

    def max_abs(self) -> float:
        return max(abs(self.horizontal), abs(self.vertical), abs(self.onesided))

    def passes(self, tol: float = 1e-10) -> bool:
        return self.max_abs() < tol


def period_residuals(data: WeierstrassData) -> PeriodResiduals:
    m = data.m
    c = data.c
    a_m = data.coefficient(m)
    a_m1 = data.coefficient(m + 1)
    a_m2 = data.coefficient(m + 2)
    return PeriodResiduals(
        horizontal=np.conj(c * a_m) + c * a_m2,
        vertical=(c * a_m1).imag,
        onesided=one_sided_residual(data),
    )


# ---------------------------------------------------------------------------
# complexity m = 1
# ---------------------------------------------------------------------------


def m1_residual(r1, r2, theta2, beta):
    """Squared magnitude of the complexity-1 period system.

    Vanishes exactly when the list (e^{i beta}, r1, r2 e^{i theta2}) solves
    the one-sided period problem.  Accepts scalars or broadcasting arrays.
    """
    g1 = radial_gap(np.asarray(r1, dtype=float))
    g2 = radial_gap(np.asarray(r2, dtype=float))
    t2 = np.asarray(theta2, dtype=float)
    b = np.asarray(beta, dtype=float)
    horizontal = -2j * (g1 * np.exp(-1j * t2) + g2) * np.sin(b + t2)
    vertical = -(2.0 * np.cos(t2) - g1 * g2) * np.exp(1j * (b + t2))
    phase = np.exp(2j * (b + t2)) + 1.0
    return np.abs(horizontal) ** 2 + np.imag(vertical) ** 2 + np.abs(phase) ** 2


def _m1_vector(x):
    """Real residual vector whose squared norm is m1_residual."""
    r1, r2, t2, b = x
    if r1 <= 0 or r2 <= 0:
        return None
    g1, g2 = radial_gap(r1), radial_gap(r2)
    horizontal = -2j * (g1 * cmath.exp(-1j * t2) + g2) * math.sin(b + t2)
    vertical = -(2.0 * math.cos(t2) - g1 * g2) * cmath.exp(1j * (b + t2))
    phase = cmath.exp(2j * (b + t2)) + 1.0
    return np.array(
        [horizontal.real, horizontal.imag, vertical.imag, phase.real, phase.imag]
    )


def _gauss_newton(vector, x0, steps=50, tol=1e-14, fd_step=1e-7, r_bounds=None):
    """Damped Gauss-Newton on a residual vector with FD Jacobian.

    ``r_bounds`` keeps the first two (radial) coordinates inside the searched
    region; steps leaving it are halved away, so a restricted search cannot
    report minimizers outside its own grid.
    """

    def admissible(xc):
        if xc[0] <= 0 or xc[1] <= 0:
            return False
        if r_bounds is not None:
            lo, hi = r_bounds
            return lo <= xc[0] <= hi and lo <= xc[1] <= hi
        return True

    x = np.asarray(x0, dtype=float).copy()
    v = vector(x)
    if v is None:
        return x, math.inf
    norm = float(v @ v)
    for _ in range(steps):
        if norm < tol * tol:
            break
        jac = np.empty((len(v), len(x)))
        for j in range(len(x)):
            e = np.zeros_like(x)
            e[j] = fd_step
            vp, vm = vector(x + e), vector(x - e)
            if vp is None or vm is None:
                return x, math.sqrt(norm)
            jac[:, j] = (vp - vm) / (2 * fd_step)
        step, *_ = np.linalg.lstsq(jac, -v, rcond=None)
        lam = 1.0
        for _ in range(20):
            xn = x + lam * step
            if admissible(xn):
                vn = vector(xn)
                nn = float(vn @ vn)
                if nn < norm:
                    x, v, norm = xn, vn, nn
                    break
            lam *= 0.5
        else:
            break
    return x, math.sqrt(norm)


@dataclass(frozen=True)
class SearchHit:
    """A refined local minimizer of the complexity-1 residual."""

    r1: float
    r2: float
    theta2: float
    beta: float
    residual: float

    @property
    def params(self):
        return (self.r1, self.r2, self.theta2, self.beta)

    def is_henneberg(self, tol: float = 1e-6) -> bool:
        t2 = self.theta2 % (2 * math.pi)
        near = min(abs(t2 - math.pi / 2), abs(t2 - 3 * math.pi / 2))
        return bool(abs(self.r1 - 1) < tol and abs(self.r2 - 1) < tol and near < tol)


def _angular_dist(a, b):
    d = abs(a - b) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


def brute_search_m1(
    span: float = 4.0,
    n_radial: int = 33,
    n_angular: int = 48,
    refine_steps: int = 50,
    residual_tol: float = 1e-8,
    cluster_tol: float = 1e-4,
    refine_threshold: float = 1.0,
):
    """Grid search + damped refinement for complexity-1 period solutions.

    Moduli run log-spaced over [1/span, span] (or an explicit (lo, hi)
    pair); angles over [0, 2 pi).
    Grid-local minimizers below ``refine_threshold`` are refined (the
    residual is locally quadratic around its zeros, so at this resolution
    every zero pulls a grid point well below that bound; plateaus of large
    constant residual are skipped).  Refinement stays inside the radial
    search box.  Hits below ``residual_tol`` are merged when closer than
    ``cluster_tol`` in parameter space and returned sorted by parameters.
    """
    if isinstance(span, tuple):
        r_lo, r_hi = span
    else:
        r_lo, r_hi = 1.0 / span, span
    rs = np.exp(np.linspace(math.log(r_lo), math.log(r_hi), n_radial))
    angles = np.linspace(0.0, 2 * math.pi, n_angular, endpoint=False)

    res = np.empty((n_radial, n_radial, n_angular, n_angular))
    workers = _thread_count()

    def fill(i):
        res[i] = m1_residual(
            rs[i], rs[:, None, None], angles[None, :, None], angles[None, None, :]
        )

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, range(n_radial)))
    else:
        for i in range(n_radial):
            fill(i)

    # grid-local minima: <= both neighbors on every axis (radial edges padded)
    is_min = np.ones_like(res, dtype=bool)
    big = np.inf
    for axis in (0, 1):
        padded = np.concatenate(
            [np.full_like(np.take(res, [0], axis=axis), big), res,
             np.full_like(np.take(res, [0], axis=axis), big)], axis=axis)
        fwd = np.take(padded, range(2, padded.shape[axis]), axis=axis)
        bwd = np.take(padded, range(0, padded.shape[axis] - 2), axis=axis)
        is_min &= (res <= fwd) & (res <= bwd)
    for axis in (2, 3):
        is_min &= (res <= np.roll(res, 1, axis=axis)) & (
            res <= np.roll(res, -1, axis=axis)
        )

    bounds = (0.9 * r_lo, 1.1 * r_hi)
    hits = []
    for i, j, k, l in zip(*np.nonzero(is_min & (res < refine_threshold))):
        x0 = np.array([rs[i], rs[j], angles[k], angles[l]])
        x, norm = _gauss_newton(_m1_vector, x0, steps=refine_steps, r_bounds=bounds)
        value = norm * norm
        if value < residual_tol:
            hits.append(
                SearchHit(
                    float(x[0]),
                    float(x[1]),
                    float(x[2] % (2 * math.pi)),
                    float(x[3] % (2 * math.pi)),
                    float(value),
                )
            )

    merged: list[SearchHit] = []
    for hit in sorted(hits, key=lambda h: h.residual):
        for kept in merged:
            if (
                abs(hit.r1 - kept.r1) + abs(hit.r2 - kept.r2)
                + _angular_dist(hit.theta2, kept.theta2)
                + _angular_dist(hit.beta, kept.beta)
            ) < cluster_tol:
                break
        else:
            merged.append(hit)
    return sorted(merged, key=lambda h: h.params)


# ---------------------------------------------------------------------------
# complexity m = 2
# ---------------------------------------------------------------------------


def _snap_phase(beta: float) -> complex:
    """e^{i beta}, snapped to the exact value at quarter turns."""
    k = round(2 * beta / math.pi)
    if abs(beta - k * math.pi / 2) < 1e-14:
        return _I_POW[k % 4]
    return cmath.exp(1j * beta)


@dataclass(frozen=True)
class ModuliPoint:
    """Coordinates (r1, r2, r3, theta2, theta3, beta) with a_1 = r1 real
    positive; c = e^{i beta}."""

    r1: float
    r2: float
    r3: float
    theta2: float
    theta3: float
    beta: float

    def __post_init__(self):
        if min(self.r1, self.r2, self.r3) <= 0:
            raise DomainError("moduli must be positive")

    def weierstrass(self) -> WeierstrassData:
        c = _snap_phase(self.beta)
        config = BranchConfiguration(
            (self.r1, self.r2, self.r3), (0.0, self.theta2, self.theta3)
        )
        return WeierstrassData(c, config)

    @property
    def triple(self):
        return (self.r3, self.theta2, self.theta3)


def h2_point() -> ModuliPoint:
    """The most symmetric complexity-2 list in moduli coordinates."""
    return ModuliPoint(1.0, 1.0, 1.0, math.pi / 3, 2 * math.pi / 3, math.pi / 2)


def horizontal_residual_m2(p: ModuliPoint) -> complex:
    """Reduced horizontal-period condition for complexity 2 (complex).

    Proportional to conj(c A_2) + c A_4 once the phase condition fixing
    beta holds; vanishing is the horizontal half of the period problem.
    """
    g1, g2, g3 = radial_gap(p.r1), radial_gap(p.r2), radial_gap(p.r3)
    e2, e3 = cmath.exp(1j * p.theta2), cmath.exp(1j * p.theta3)
    return (
        1.0
        + e2 * e2
        + e3 * e3
        - g1 * (g2 * e2 + g3 * e3)
        - g2 * g3 * e2 * e3
    )


def horizontal_residual_m2_alt(p: ModuliPoint) -> complex:
    """Algebraically equivalent form of the horizontal condition (obtained
    through e^{2 i t} = 2 cos t e^{i t} - 1); used as a cross-check."""
    g1, g2, g3 = radial_gap(p.r1), radial_gap(p.r2), radial_gap(p.r3)
    e2, e3 = cmath.exp(1j * p.theta2), cmath.exp(1j * p.theta3)
    return (
        e3 * e3
        + (2.0 * math.cos(p.theta2) - g1 * g2) * e2
        - g3 * (g1 + g2 * e2) * e3
    )


def vertical_residual_m2(p: ModuliPoint) -> float:
    """Reduced vertical-period condition for complexity 2 (real).

    Im(c A_3) = 0 holds, given the phase condition, iff this vanishes.
    """
    g1, g2, g3 = radial_gap(p.r1), radial_gap(p.r2), radial_gap(p.r3)
    return (
        g2 * math.cos(p.theta3)
        + g3 * math.cos(p.theta2)
        + g1 * math.cos(p.theta2 - p.theta3)
        - 0.5 * g1 * g2 * g3
    )


def beta_from_angles(theta2: float, theta3: float) -> float:
    """beta solving e^{2i(beta + theta2 + theta3)} = -1, reduced to [0, pi)."""
    return (math.pi / 2 - theta2 - theta3) % math.pi


def _system_vector(r1, r2, x):
    p = ModuliPoint(r1, r2, x[0], x[1], x[2], math.pi / 2)
    fv = horizontal_residual_m2(p)
    return np.array([fv.real, fv.imag, vertical_residual_m2(p)])


def period_jacobian_m2(p: ModuliPoint) -> np.ndarray:
    """Analytic Jacobian of (Re F, Im F, G) with respect to (r3, theta2,
    theta3), where F and G are the reduced horizontal/vertical conditions."""
    g1, g2, g3 = radial_gap(p.r1), radial_gap(p.r2), radial_gap(p.r3)
    gp3 = 1.0 + 1.0 / (p.r3 * p.r3)
    e2, e3 = cmath.exp(1j * p.theta2), cmath.exp(1j * p.theta3)
    df_dr3 = gp3 * (-g1 * e3 - g2 * e2 * e3)
    df_dt2 = 2j * e2 * e2 - 1j * g1 * g2 * e2 - 1j * g2 * g3 * e2 * e3
    df_dt3 = 2j * e3 * e3 - 1j * g1 * g3 * e3 - 1j * g2 * g3 * e2 * e3
    dg_dr3 = gp3 * (math.cos(p.theta2) - 0.5 * g1 * g2)
    dg_dt2 = -g3 * math.sin(p.theta2) - g1 * math.sin(p.theta2 - p.theta3)
    dg_dt3 = -g2 * math.sin(p.theta3) + g1 * math.sin(p.theta2 - p.theta3)
    return np.array(
        [
            [df_dr3.real, df_dt2.real, df_dt3.real],
            [df_dr3.imag, df_dt2.imag, df_dt3.imag],
            [dg_dr3, dg_dt2, dg_dt3],
        ]
    )


def period_jacobian_m2_fd(p: ModuliPoint, step: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian, for cross-checking the analytic one."""
    x0 = np.array(p.triple)
    jac = np.empty((3, 3))
    for j in range(3):
        e = np.zeros(3)
        e[j] = step
        jac[:, j] = (
            _system_vector(p.r1, p.r2, x0 + e) - _system_vector(p.r1, p.r2, x0 - e)
        ) / (2 * step)
    return jac


def _system_norm(v) -> float:
    """max(|F|, |G|) with F the complex horizontal condition."""
    return max(math.hypot(v[0], v[1]), abs(v[2]))


def _newton_m2(r1, r2, x0, tol=1e-12, max_iter=50):
    """Damped Newton on (r3, theta2, theta3) with the analytic Jacobian."""
    x = np.asarray(x0, dtype=float).copy()
    v = _system_vector(r1, r2, x)
    norm = _system_norm(v)
    for _ in range(max_iter):
        if norm < tol:
            beta = beta_from_angles(x[1], x[2])
            return ModuliPoint(r1, r2, x[0], x[1], x[2], beta)
        p = ModuliPoint(r1, r2, x[0], x[1], x[2], math.pi / 2)
        jac = period_jacobian_m2(p)
        try:
            step = np.linalg.solve(jac, -v)
        except np.linalg.LinAlgError:
            raise ConvergenceError("singular Jacobian during Newton", norm)
        lam = 1.0
        for _ in range(20):
            xn = x + lam * step
            if xn[0] > 0:
                vn = _system_vector(r1, r2, xn)
                nn = _system_norm(vn)
                if nn < norm:
                    x, v, norm = xn, vn, nn
                    break
            lam *= 0.5
        else:
            raise ConvergenceError("Newton step stalled", norm)
    raise ConvergenceError(f"Newton did not converge; last residual {norm:.3e}", norm)


def continue_from(p0: ModuliPoint, r1: float, r2: float, tol: float = 1e-12,
                  max_iter: int = 50, _depth: int = 0) -> ModuliPoint:
    """Continue the solved point p0 to prescribed (r1, r2).

    Newton iterates on (r3, theta2, theta3) with (r1, r2) held fixed; if the
    direct jump diverges the path from (p0.r1, p0.r2) is bisected.  beta is
    recovered from the phase condition.  The solution branch is only locally
    guaranteed: paths that run into a fold (vanishing Jacobian determinant)
    end in ConvergenceError, carrying the last residual.
    """
    if min(r1, r2) <= 0:
        raise DomainError("target moduli must be positive")
    det = float(np.linalg.det(period_jacobian_m2(p0)))
    if abs(det) <= 1e-6:
        raise StructureError(f"Jacobian at start point is singular (det={det:.3e})")
    try:
        return _newton_m2(r1, r2, np.array(p0.triple), tol=tol, max_iter=max_iter)
    except ConvergenceError:
        if _depth >= 12:
            raise
    mid = ModuliPoint(
        0.5 * (p0.r1 + r1), 0.5 * (p0.r2 + r2), p0.r3, p0.theta2, p0.theta3, p0.beta
    )
    half = continue_from(p0, mid.r1, mid.r2, tol=tol, max_iter=max_iter,
                         _depth=_depth + 1)
    return continue_from(half, r1, r2, tol=tol, max_iter=max_iter, _depth=_depth + 1)


# ---------------------------------------------------------------------------
# the explicit family and the symmetric examples
# ---------------------------------------------------------------------------


def family_sqrt_arg(theta2: float) -> float:
    """sqrt(1 - 8 cos(2 t) - 8 cos(4 t)), the square root entering the
    family formulas; defined where the radicand is nonnegative."""
    radicand = 1.0 - 8.0 * math.cos(2 * theta2) - 8.0 * math.cos(4 * theta2)
    if radicand < 0:
        if radicand > -1e-9:
            radicand = 0.0
        else:
            raise DomainError(f"square root undefined at theta2={theta2!r}")
    return math.sqrt(radicand)


def _in_family_domain(theta2: float) -> bool:
    eps = 1e-12
    return (math.pi / 4 < theta2 <= math.pi / 3 + eps) or (
        2 * math.pi / 3 - eps <= theta2 < 3 * math.pi / 4
    )


@dataclass(frozen=True)
class FamilyPoint:
    """A point of the explicit one-parameter family of complexity-2
    solutions, parametrized by theta2 with theta3 = -theta2 and beta = pi/2."""

    theta2: float
    r1: float
    r2: float
    sign: int = 1

    def moduli_point(self) -> ModuliPoint:
        return ModuliPoint(
            self.r1, self.r2, self.r2, self.theta2, -self.theta2, math.pi / 2
        )

    def weierstrass(self) -> WeierstrassData:
        config = BranchConfiguration(
            (self.r1, self.r2, self.r2), (0.0, self.theta2, -self.theta2)
        )
        return WeierstrassData(1.0j, config)


def family_theta2(theta2: float, sign: int = 1) -> FamilyPoint:
    """Solve the complexity-2 family at angle theta2.

    Valid for theta2 in (pi/4, pi/3] U [2 pi/3, 3 pi/4); sign=-1 selects the
    mirror pair, replacing (r1, r2) by (1/r1, 1/r2).  The construction is
    verified against the reduced period conditions before returning.
    """
    theta2 = float(theta2)
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    if not _in_family_domain(theta2):
        raise DomainError(
            f"theta2={theta2!r} outside (pi/4, pi/3] U [2pi/3, 3pi/4)"
        )
    f = family_sqrt_arg(theta2)
    excess = f - 3.0
    if excess < 0:
        if excess < -1e-9:
            raise DomainError(f"family undefined at theta2={theta2!r}")
        excess = 0.0
    root = math.sqrt(excess)
    c2 = math.cos(2 * theta2)
    gap1 = root * (f + 3.0 + 4.0 * c2) / (8.0 * _SQRT2 * math.cos(theta2) * c2)
    gap2 = -root / _SQRT2
    if sign == -1:
        gap1, gap2 = -gap1, -gap2
    point = FamilyPoint(theta2, invert_radial_gap(gap1), invert_radial_gap(gap2), sign)
    mp = point.moduli_point()
    err = abs(horizontal_residual_m2(mp)) + abs(vertical_residual_m2(mp))
    if err >= 1e-9:
        raise StructureError(
            f"family point residual {err:.3e} at theta2={theta2!r}"
        )
    return point


def symmetric_example(m: int) -> WeierstrassData:
    """The most symmetric solution at complexity m: branch values at the
    (2m+2)-roots-of-unity representatives and c = i^{m-1}.

    The configuration carries exact pi-fraction angles, so the period
    residuals vanish exactly (coefficient cancellation, not tolerance).
    """
    if m < 1 or int(m) != m:
        raise DomainError("complexity must be a positive integer")
    m = int(m)
    c = _I_POW[(m - 1) % 4]
    config = BranchConfiguration.from_pi_fractions(
        [(1.0, Fraction(j, m + 1)) for j in range(m + 1)]
    )
    return WeierstrassData(c, config)
