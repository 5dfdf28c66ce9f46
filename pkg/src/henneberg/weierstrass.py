"""The surface recipe: Weierstrass data, metric, one-sidedness, integration.

Data is the pair (g, omega) with the Gauss map fixed to g(z) = z and
omega = f dz,  f(z) = c z^{-m-3} P(z),  P the branch polynomial.  The
immersion is X = Re of the termwise antiderivative of the three forms

    phi_1 = (1 - z^2) f / 2,   phi_2 = i (1 + z^2) f / 2,   phi_3 = z f,

where a z^{-1} coefficient contributes Re(coeff) * ln|z| (it must be real,
otherwise the immersion is not single-valued and construction fails).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .algebra import BranchConfiguration, LaurentPoly, expand_product, residue_at_zero
from .errors import DomainError, PeriodError

#: imaginary parts of form residues below this are projected to real
RESIDUE_IM_TOL = 1e-10


@dataclass(frozen=True)
class WeierstrassData:
    """A surface recipe (c, a_1..a_{m+1}) with |c| = 1 and g(z) = z implicit.

    The input c is normalized to the unit circle; the applied scale is kept
    in ``c_scale`` (it only rescales the surface by a homothety).
    """

    c: complex
    config: BranchConfiguration
    c_scale: float = 1.0

    def __post_init__(self):
        c = complex(self.c)
        if c == 0 or not (math.isfinite(c.real) and math.isfinite(c.imag)):
            raise DomainError("c must be a finite nonzero complex number")
        scale = abs(c)
        if abs(scale - 1.0) > 1e-12:
            c = c / scale
        else:
            scale = 1.0
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "c_scale", float(scale))

    @property
    def m(self) -> int:
        return self.config.m

    @cached_property
    def branch_poly(self) -> LaurentPoly:
        return expand_product(self.config)

    @cached_property
    def f(self) -> LaurentPoly:
        return self.branch_poly.shift(-self.m - 3).scale(self.c)

    def coefficient(self, h: int) -> complex:
        """A_h of the branch polynomial."""
        return self.branch_poly.coefficient(h)

    def with_phase(self, phase: complex) -> "WeierstrassData":
        return WeierstrassData(self.c * phase, self.config)


def phi_forms(data: WeierstrassData):
    """The coefficient polynomials of the three Weierstrass forms."""
    f = data.f
    f2 = f.shift(2)
    phi1 = f.scale(0.5) - f2.scale(0.5)
    phi2 = f.scale(0.5j) + f2.scale(0.5j)
    phi3 = f.shift(1)
    return phi1, phi2, phi3


def form_residues(data: WeierstrassData) -> np.ndarray:
    """Residues at the origin of (phi_1, phi_2, phi_3)."""
    return np.array([residue_at_zero(p) for p in phi_forms(data)])


def metric_density(data: WeierstrassData, z):
    """Conformal factor lambda with ds = lambda |dz|:  (1+|z|^2)|f(z)|/2."""
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise DomainError("metric density undefined at z=0")
    return (1.0 + np.abs(z) ** 2) * np.abs(data.f.evaluate(z)) / 2.0


def one_sided_residual(data: WeierstrassData) -> float:
    """|conj(c)/c + prod_j a_j/conj(a_j)|; zero means the data is compatible
    with the antipodal involution z -> -1/conj(z)."""
    c = data.c
    return abs(np.conj(c) / c + data.config.unit_product())


@dataclass(frozen=True)
class IntegratedForms:
    """Termwise antiderivatives of the forms plus their logarithmic parts."""

    polys: tuple
    log_coeffs: np.ndarray

    def evaluate(self, z):
        """Real immersion value at z (raw, integration constant zero)."""
        z = np.asarray(z, dtype=complex)
        if np.any(z == 0):
            raise DomainError("immersion undefined at z=0")
        parts = [np.real(p.evaluate(z)) for p in self.polys]
        logs = np.log(np.abs(z))
        out = np.stack(
            [parts[j] + self.log_coeffs[j] * logs for j in range(3)], axis=-1
        )
        return out


def integrate_forms(data: WeierstrassData) -> IntegratedForms:
    """Antidifferentiate the three forms termwise.

    Exponent k != -1 maps to z^{k+1}/(k+1); the z^{-1} coefficient must be
    real (up to RESIDUE_IM_TOL) and becomes the ln|z| coefficient.  Data
    whose periods do not close is rejected here with the offending residual.
    """
    polys = []
    logs = np.zeros(3)
    for j, phi in enumerate(phi_forms(data)):
        res = phi.coefficient(-1)
        if abs(res.imag) >= RESIDUE_IM_TOL:
            raise PeriodError(
                f"form {j + 1} has non-real residue {res:.3e}; "
                "the period problem is not solved"
            )
        logs[j] = res.real
        exps = np.arange(phi.lowest, phi.highest + 1)
        keep = exps != -1
        lo = phi.lowest + 1
        arr = np.zeros(phi.highest + 2 - lo, dtype=complex)
        arr[exps[keep] + 1 - lo] = phi.coeffs[keep] / (exps[keep] + 1)
        polys.append(LaurentPoly(lo, arr))
    return IntegratedForms(tuple(polys), logs)


def default_base(m: int) -> complex:
    """Base point e^{i pi / (2(m+1))} used to pin X(base) = 0."""
    return cmath.exp(1j * math.pi / (2 * (m + 1)))


class Immersion:
    """Evaluatable immersion X(z) - X(base); base=None keeps the raw
    antiderivative (integration constant zero)."""

    def __init__(self, data: WeierstrassData, base=...):
        self.data = data
        self.forms = integrate_forms(data)
        if base is ...:
            base = default_base(data.m)
        self.base = base
        if base is None:
            self.offset = np.zeros(3)
        else:
            base = complex(base)
            if base == 0:
                raise DomainError("base point must be nonzero")
            self.offset = self.forms.evaluate(base)

    def __call__(self, z):
        return self.forms.evaluate(z) - self.offset


def immersion(data: WeierstrassData, z, base=...):
    """One-shot evaluation of X(z) - X(base)."""
    return Immersion(data, base)(z)


def unit_normal(z):
    """Unit normal from the Gauss map g(z) = z (stereographic formula)."""
    z = np.asarray(z, dtype=complex)
    d = 1.0 + np.abs(z) ** 2
    return np.stack(
        [2 * z.real / d, 2 * z.imag / d, (np.abs(z) ** 2 - 1.0) / d], axis=-1
    )


@dataclass(frozen=True)
class StabilityReport:
    """Structural stability check for g(z) = z data.

    The extended unoriented Gauss map of g(z)=z is the identity on the
    projective plane, hence a diffeomorphism, which makes the one-sided
    quotient stable; the report also records the branch-point images and
    that they form at least two distinct points.
    """

    one_sided_residual: float
    gauss_map_is_diffeomorphism: bool
    stable: bool
    branch_points: tuple
    branch_images: np.ndarray
    distinct_image_count: int

    @property
    def images_ok(self) -> bool:
        return self.distinct_image_count >= 2


def stability_report(data: WeierstrassData, base=None, dedup_tol=1e-8) -> StabilityReport:
    """Run the structural stability criteria on period-solved data.

    Branch images are reported in the raw antiderivative frame (integration
    constant zero), the frame the closed-form parametrizations use.
    """
    osr = one_sided_residual(data)
    imm = Immersion(data, base)  # raises PeriodError on unsolved data
    points = tuple(data.config.branch_values())
    images = imm(np.array(points))
    scale = max(1.0, float(np.abs(images).max()))
    distinct: list[np.ndarray] = []
    for img in images:
        if all(np.abs(img - other).max() > dedup_tol * scale for other in distinct):
            distinct.append(img)
    ok = osr < 1e-8
    return StabilityReport(
        one_sided_residual=osr,
        gauss_map_is_diffeomorphism=True,
        stable=ok,
        branch_points=points,
        branch_images=images,
        distinct_image_count=len(distinct),
    )
