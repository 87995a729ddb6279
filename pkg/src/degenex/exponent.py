"""Single-letter error exponents from planar measures.

An achievable success exponent has the shape

    2 * sup_z [ log2 ||A(z)|| + e * (int log|t| dsigma - int log|z-t| dsigma) ]

for a probability measure sigma on the plane. This module evaluates that
objective analytically for mixtures of circles (uniform or Fourier-densified)
and atoms, detects central symmetry, and provides the closed-form symmetric
exponent, the circle-average bound, the Fourier-density certificate and a
capacity-style lower bound.

All public values are bits per copy. Internals mix natural logs (series) and
base-2; conversions happen at the boundaries.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from ._search import golden_min
from .core import product_norm, product_norms
from .errors import AtomSingularity, Infeasible, NotSymmetric

__all__ = [
    "UniformCircle",
    "FourierCircle",
    "Atom",
    "PlanarMeasure",
    "uniform_circle",
    "atom_measure",
    "counting_measure",
    "uniform_disk",
    "rotated",
    "ExponentResult",
    "is_centrally_symmetric",
    "circle_log_integral",
    "measure_objective",
    "norm_min_lower_bound",
    "symmetric_exponent",
    "circle_average_bound",
    "fourier_circle_exponent",
    "log_kernel_fourier_coefficient",
    "capacity_lower_bound",
    "reevaluate",
]

_LN2 = math.log(2.0)
# floor for norms before taking logs; circle averages are stable under this
# regularization and it keeps results finite at isolated zeros of the map
_NORM_FLOOR = 1e-12

_ANGLES_512 = 2.0 * np.pi * np.arange(512) / 512.0


@dataclass(frozen=True)
class UniformCircle:
    radius: float

    def __post_init__(self):
        if not (self.radius > 0):
            raise ValueError("circle radius must be positive")


@dataclass(frozen=True)
class FourierCircle:
    """Circle of given radius with density (1/2pi)(1 + sum_m rho_m e^{im phi} + c.c.).

    rho_hat stores the coefficients for m = 1..M; negative m are conjugates.
    Nonnegativity of the density is enforced through the sufficient condition
    2 sum |rho_hat| <= 1.
    """

    radius: float
    rho_hat: tuple

    def __post_init__(self):
        if not (self.radius > 0):
            raise ValueError("circle radius must be positive")
        rh = tuple(complex(c) for c in self.rho_hat)
        object.__setattr__(self, "rho_hat", rh)
        if 2.0 * sum(abs(c) for c in rh) > 1.0 + 1e-9:
            raise ValueError("Fourier density may go negative: 2*sum|rho_hat| > 1")


@dataclass(frozen=True)
class Atom:
    point: complex

    def __post_init__(self):
        object.__setattr__(self, "point", complex(self.point))


@dataclass(frozen=True)
class PlanarMeasure:
    """Probability measure: weighted mixture of circles and atoms."""

    components: tuple = field(default_factory=tuple)

    def __post_init__(self):
        comps = tuple((c, float(w)) for (c, w) in self.components)
        if not comps:
            raise ValueError("empty measure")
        if any(w < -1e-15 for _, w in comps):
            raise ValueError("negative component weight")
        total = sum(w for _, w in comps)
        if abs(total - 1.0) > 1e-9:
            raise ValueError("weights sum to %.12g, expected 1" % total)
        object.__setattr__(self, "components", comps)

    @property
    def atoms(self) -> list:
        return [c.point for c, _ in self.components if isinstance(c, Atom)]


def uniform_circle(radius: float) -> PlanarMeasure:
    return PlanarMeasure(((UniformCircle(radius), 1.0),))


def atom_measure(point: complex) -> PlanarMeasure:
    return PlanarMeasure(((Atom(point), 1.0),))


def counting_measure(points) -> PlanarMeasure:
    pts = [complex(p) for p in points]
    w = 1.0 / len(pts)
    return PlanarMeasure(tuple((Atom(p), w) for p in pts))


def uniform_disk(radius: float, n_circles: int = 128) -> PlanarMeasure:
    """Area measure on a disk as a radial mixture of circles (weights ~ r)."""
    r = (np.arange(n_circles) + 0.5) / n_circles * radius
    w = r / r.sum()
    return PlanarMeasure(tuple((UniformCircle(float(ri)), float(wi)) for ri, wi in zip(r, w)))


def rotated(sigma: PlanarMeasure, alpha: float) -> PlanarMeasure:
    """The pushforward of sigma under z -> z * e^{i alpha}."""
    rot = cmath.exp(1j * alpha)
    out = []
    for comp, w in sigma.components:
        if isinstance(comp, UniformCircle):
            out.append((comp, w))
        elif isinstance(comp, Atom):
            out.append((Atom(comp.point * rot), w))
        else:
            rh = tuple(c * cmath.exp(-1j * (m + 1) * alpha) for m, c in enumerate(comp.rho_hat))
            out.append((FourierCircle(comp.radius, rh), w))
    return PlanarMeasure(tuple(out))


@dataclass(frozen=True)
class ExponentResult:
    value: float  # bits per copy
    method: str  # norm_min | symmetric | circle_average | fourier_circle
    certificate: dict

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError("non-finite exponent")


def _log2_pnorm_many(deg, zs: np.ndarray) -> np.ndarray:
    return np.log2(np.maximum(product_norms(deg, zs), _NORM_FLOOR))


def is_centrally_symmetric(deg, tol: float = 1e-6) -> bool:
    """True when the product norm is (numerically) a function of |z| alone.

    Probes 32 log-spaced radii in [2^-4, 2^4], 64 angles each; on every
    circle the relative spread (max-min)/max must stay below tol.
    """
    radii = np.exp2(np.linspace(-4.0, 4.0, 32))
    ang = np.exp(2j * np.pi * np.arange(64) / 64)
    grid = radii[:, None] * ang[None, :]
    vals = product_norms(deg, grid.ravel()).reshape(32, 64)
    hi = vals.max(axis=1)
    lo = vals.min(axis=1)
    spread = (hi - lo) / np.maximum(hi, _NORM_FLOOR)
    return bool(np.all(spread < tol))


def circle_log_integral(radius: float, z: complex) -> float:
    """(1/2pi) int log2|z - radius*e^{i phi}| d phi = log2 max(|z|, radius).

    The mean-value identity for log|.|: exact, no quadrature.
    """
    if not (radius > 0):
        raise ValueError("radius must be positive")
    return math.log2(max(abs(complex(z)), radius))


def _component_log_t(comp) -> float:
    """int log2|t| d(component), in bits."""
    if isinstance(comp, (UniformCircle, FourierCircle)):
        return math.log2(comp.radius)
    a = abs(comp.point)
    if a == 0.0:
        raise AtomSingularity("atom at the origin: int log|t| diverges")
    return math.log2(a)


def _component_log_dist(comp, z: complex) -> float:
    """int log2|z - t| d(component), in bits, analytic per component kind."""
    if isinstance(comp, UniformCircle):
        return circle_log_integral(comp.radius, z)
    if isinstance(comp, Atom):
        d = abs(z - comp.point)
        if d == 0.0:
            raise AtomSingularity("evaluation point coincides with an atom")
        return math.log2(d)
    # Fourier circle: ln max(|z|, R) - sum_m (ratio^m / m) Re(rho_m e^{im arg z})
    R = comp.radius
    az = abs(z)
    base = math.log(max(az, R))
    if az == 0.0:
        return base / _LN2
    ratio = min(az, R) / max(az, R)
    phase = cmath.exp(1j * cmath.phase(z))
    acc = 0.0
    p = 1.0 + 0.0j
    for m, rho in enumerate(comp.rho_hat, start=1):
        p *= phase
        acc += (ratio ** m / m) * (rho * p).real
    return (base - acc) / _LN2


def measure_objective(deg, sigma: PlanarMeasure, z: complex, error_degree: int | None = None) -> float:
    """log2||A(z)|| + e * (int log2|t| dsigma - int log2|z-t| dsigma), bits.

    Twice the sup of this over z is an achievable success exponent. Circle
    components are integrated analytically (mean-value identity plus the
    Fourier series of the log kernel); atoms directly.
    """
    z = complex(z)
    e = deg.error_degree if error_degree is None else int(error_degree)
    log_t = 0.0
    log_d = 0.0
    for comp, w in sigma.components:
        log_t += w * _component_log_t(comp)
        log_d += w * _component_log_dist(comp, z)
    lp = math.log2(max(product_norm(deg, z), _NORM_FLOOR))
    return lp + e * (log_t - log_d)


def norm_min_lower_bound(deg) -> ExponentResult:
    """2 log2 of the global minimum of the product norm.

    Any achievable exponent is at least this (take the optimal measure's sup
    and drop the nonnegative potential part). Located by a 64x64 log-polar
    grid over radii [2^-8, 2^8] plus a Nelder-Mead polish in (log2 r, phi).
    """
    radii = np.exp2(np.linspace(-8.0, 8.0, 64))
    ang = 2.0 * np.pi * np.arange(64) / 64
    grid = radii[:, None] * np.exp(1j * ang)[None, :]
    vals = product_norms(deg, grid.ravel())
    i = int(np.argmin(vals))

    def f(x):
        return float(np.maximum(product_norms(deg, np.array([2.0 ** x[0] * cmath.exp(1j * x[1])])),
                                _NORM_FLOOR)[0])

    x0 = np.array([math.log2(radii[i // 64]), ang[i % 64]])
    res = optimize.minimize(f, x0, method="Nelder-Mead",
                            options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 400})
    best = min(float(vals[i]), float(res.fun))
    xa, xp = (res.x if res.fun <= vals[i] else x0)
    zmin = 2.0 ** xa * cmath.exp(1j * xp)
    value = 2.0 * math.log2(max(best, _NORM_FLOOR))
    return ExponentResult(value, "norm_min", {"argmin": [zmin.real, zmin.imag]})


def symmetric_exponent(deg, bracket=(-8.0, 8.0)) -> ExponentResult:
    """Closed-form exponent 2 log2 min_r ||A(r)|| for centrally symmetric maps.

    The uniform circle at the optimal radius certifies achievability and the
    norm minimum matches the lower bound, so the value is exact (up to the
    1-D golden-section tolerance). bracket bounds log2(radius).
    """
    if not is_centrally_symmetric(deg, 1e-6):
        raise NotSymmetric("product norm varies with arg z")

    def f(x: float) -> float:
        return math.log2(max(product_norm(deg, 2.0 ** x), _NORM_FLOOR))

    x, y = golden_min(f, bracket[0], bracket[1], xtol=1e-12)
    return ExponentResult(2.0 * y, "symmetric",
                          {"radius": 2.0 ** x, "measure": "uniform_circle"})


def circle_average_bound(deg, bracket=(-8.0, 8.0)) -> ExponentResult:
    """2 inf_R of the circle average of log2||A||, 512-point trapezoid.

    The average over a circle of a log-subharmonic function is convex in
    log R (three-circles), so a golden-section over log2 R finds the inf.
    Periodic trapezoid quadrature is spectrally accurate here.
    """
    ang = np.exp(1j * _ANGLES_512)

    def f(x: float) -> float:
        return float(np.mean(_log2_pnorm_many(deg, 2.0 ** x * ang)))

    x, y = golden_min(f, bracket[0], bracket[1], xtol=1e-12)
    return ExponentResult(2.0 * y, "circle_average", {"radius": 2.0 ** x})


def fourier_circle_exponent(deg, R: float, M: int = 64) -> ExponentResult:
    """Achievable exponent from a Fourier-densified circle of radius R.

    Expands -ln||A|| on the circle in a Fourier series A_hat_m (512-point
    FFT), sets rho_hat_m = 2 m A_hat_m / e_eff, and pads the error degree to
    the least e_eff >= e keeping the density nonnegative
    (2 sum_{m != 0} |rho_hat_m| <= 1; padding with zero-coefficient higher
    powers is always allowed). The resulting measure cancels the angular
    variation of the norm, so the sup of the objective over the circle drops
    to the circle average. Raises Infeasible when e_eff would exceed 1e4.
    """
    if not (R > 0):
        raise ValueError("radius must be positive")
    if M < 1 or M > 255:
        raise ValueError("truncation must be in 1..255")
    f = -_LN2 * _log2_pnorm_many(deg, R * np.exp(1j * _ANGLES_512))  # -ln ||A||
    coeffs = np.fft.fft(f) / f.size
    a_hat = coeffs[1:M + 1]
    need = 4.0 * float(np.sum(np.arange(1, M + 1) * np.abs(a_hat)))
    e_eff = max(int(deg.error_degree), int(math.ceil(need)))
    if e_eff > 10 ** 4:
        raise Infeasible("density feasibility needs error degree %d > 1e4" % e_eff)
    rho = tuple(2.0 * m * a_hat[m - 1] / e_eff for m in range(1, M + 1))
    sigma = PlanarMeasure(((FourierCircle(R, rho), 1.0),))
    zs = R * np.exp(2j * np.pi * np.arange(1024) / 1024)
    sup = max(measure_objective(deg, sigma, z, error_degree=e_eff) for z in zs)
    cert = {
        "radius": float(R),
        "e_eff": e_eff,
        "fourier_coefficients": [[c.real, c.imag] for c in rho],
    }
    return ExponentResult(2.0 * sup, "fourier_circle", cert)


def log_kernel_fourier_coefficient(m: int) -> float:
    """m-th Fourier coefficient of -ln|1 - e^{i phi}|, adaptively integrated.

    The exact value is 1/(2|m|); computed here independently by scipy quad
    (the integrand has a log endpoint singularity, so fixed grids stall at
    ~1e-3 accuracy) and used as a self-test of the series machinery.
    """
    m = int(m)
    if m == 0:
        raise ValueError("the mean is 0 by the mean-value identity; m must be nonzero")

    def f(phi: float) -> float:
        return -math.log(2.0 * math.sin(phi / 2.0)) * math.cos(m * phi)

    val, _err = integrate.quad(f, 0.0, math.pi, limit=400)
    return val / math.pi


def capacity_lower_bound(deg, sigma: PlanarMeasure) -> float:
    """Weighted-capacity energy 2e * iint log2(1/(w(z) w(t) |z-t|)) dsigma^2.

    With w(z) = (||A(z)||^{1/e} |z|)^{-1/2} this expands to
    2e [ (1/e) int log2||A|| dsigma + int log2|t| dsigma - iint log2|z-t| ].
    The double log-distance integral is evaluated analytically per component
    pair (concentric circles reduce to log2 max(R1, R2) plus Fourier cross
    terms); the norm integral uses 512-point densified circle quadrature.
    Being a mean rather than a sup, the value lower-bounds
    2 sup_z measure_objective for the same sigma.
    """
    if sigma.atoms:
        raise AtomSingularity("capacity energy needs an atom-free measure")
    e = float(deg.error_degree)

    # int log2||A|| dsigma and int log2|t| dsigma
    P = 0.0
    T = 0.0
    for comp, w in sigma.components:
        T += w * _component_log_t(comp)
        lp = _log2_pnorm_many(deg, comp.radius * np.exp(1j * _ANGLES_512))
        if isinstance(comp, FourierCircle):
            dens = np.ones_like(_ANGLES_512)
            for m, rho in enumerate(comp.rho_hat, start=1):
                dens += 2.0 * (rho * np.exp(1j * m * _ANGLES_512)).real
            P += w * float(np.mean(lp * dens))
        else:
            P += w * float(np.mean(lp))

    # iint log2|z-t| dsigma(z) dsigma(t), componentwise analytic
    def cross(c1, c2) -> float:
        r1, r2 = c1.radius, c2.radius
        val = math.log(max(r1, r2))
        rh1 = c1.rho_hat if isinstance(c1, FourierCircle) else ()
        rh2 = c2.rho_hat if isinstance(c2, FourierCircle) else ()
        if rh1 and rh2:
            ratio = min(r1, r2) / max(r1, r2)
            for m in range(1, min(len(rh1), len(rh2)) + 1):
                val -= (ratio ** m / m) * (rh1[m - 1].conjugate() * rh2[m - 1]).real
        return val / _LN2

    L = 0.0
    for c1, w1 in sigma.components:
        for c2, w2 in sigma.components:
            L += w1 * w2 * cross(c1, c2)

    return 2.0 * e * (P / e + T - L)


def reevaluate(deg, result: ExponentResult) -> float:
    """Recompute a result's value from its certificate alone."""
    cert = result.certificate
    if result.method == "norm_min":
        z = complex(cert["argmin"][0], cert["argmin"][1])
        return 2.0 * math.log2(max(product_norm(deg, z), _NORM_FLOOR))
    if result.method == "symmetric":
        return 2.0 * math.log2(max(product_norm(deg, cert["radius"]), _NORM_FLOOR))
    if result.method == "circle_average":
        zs = cert["radius"] * np.exp(1j * _ANGLES_512)
        return 2.0 * float(np.mean(_log2_pnorm_many(deg, zs)))
    if result.method == "fourier_circle":
        rho = tuple(complex(a, b) for a, b in cert["fourier_coefficients"])
        sigma = PlanarMeasure(((FourierCircle(cert["radius"], rho), 1.0),))
        zs = cert["radius"] * np.exp(2j * np.pi * np.arange(1024) / 1024)
        return 2.0 * max(measure_objective(deg, sigma, z, error_degree=cert["e_eff"])
                         for z in zs)
    raise ValueError("unknown method %r" % result.method)
