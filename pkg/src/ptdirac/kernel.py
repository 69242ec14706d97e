"""Separable PT-symmetric kernel K(x, y) = g(x) e^{iax} h(y) e^{iby}.

The form factors ``g`` and ``h`` are real and even.  Two families are
supported:

``Yamaguchi(c)``
    ``exp(-c|x|)`` with Fourier transform ``2c / (c^2 + q^2)``; all kernel
    integrals are available in closed form and may be continued to complex
    momentum.
``GenericEven(f, decay_bound)``
    any even profile bounded by ``scale * exp(-decay_bound |x|)``; transforms
    and kernel integrals are computed by adaptive quadrature.

The four fundamental integrals are

    N1(+-) = int dx h(x) e^{ibx} int_{x'<x} dx' g(x') e^{iax'} e^{+-ik(x-x')}
    N2(+-) = int dx h(x) e^{ibx} int_{x'>x} dx' g(x') e^{iax'} e^{-+ik(x-x')}

with ``S = N1 + N2`` and ``D = N1 - N2`` on each branch.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Literal, Union

import numpy as np
from scipy import integrate

from .errors import DomainError, PoleProximityError, QuadratureError
from .kinematics import Kinematics

Branch = Literal["plus", "minus"]

TRUNCATION_ENVELOPE = 1e-14
QUAD_RTOL = 1e-10
QUAD_ATOL = 1e-13
POLE_EPS = 1e-10

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)


def _sign(branch: Branch) -> int:
    if branch == "plus":
        return 1
    if branch == "minus":
        return -1
    raise ValueError(f"branch must be 'plus' or 'minus', got {branch!r}")


@dataclass(frozen=True)
class Yamaguchi:
    """Form factor ``exp(-decay * |x|)``."""

    decay: float

    def __post_init__(self):
        if not (self.decay > 0 and math.isfinite(self.decay)):
            raise DomainError(f"Yamaguchi decay must be positive, got {self.decay!r}")

    def __call__(self, x):
        return np.exp(-self.decay * np.abs(x))

    @property
    def decay_bound(self) -> float:
        return self.decay

    @property
    def scale(self) -> float:
        return 1.0


@dataclass(frozen=True, eq=False)
class GenericEven:
    """Real even form factor evaluated by a user callable.

    ``evaluator`` must satisfy ``f(x) == f(-x)`` and
    ``|f(x)| <= scale * exp(-decay_bound * |x|)`` for ``|x| >= cutoff``.
    Both are spot-checked on a sample grid at construction.
    """

    evaluator: Callable[[float], float]
    decay_bound: float
    scale: float = 1.0
    cutoff: float = 0.0

    def __post_init__(self):
        if not (self.decay_bound > 0 and math.isfinite(self.decay_bound)):
            raise DomainError(f"decay_bound must be positive, got {self.decay_bound!r}")
        if not self.scale > 0:
            raise DomainError(f"scale must be positive, got {self.scale!r}")
        xs = np.linspace(0.0, truncation_length(self), 97)[1:]
        plus = np.array([float(self.evaluator(x)) for x in xs])
        minus = np.array([float(self.evaluator(-x)) for x in xs])
        if np.any(np.abs(plus - minus) > 1e-12 * np.maximum(1.0, np.abs(plus))):
            raise DomainError("form factor is not even on the sample grid")
        tail = xs >= self.cutoff
        bound = self.scale * np.exp(-self.decay_bound * xs[tail])
        if np.any(np.abs(plus[tail]) > bound * (1 + 1e-9) + 1e-300):
            raise DomainError("form factor exceeds its stated exponential envelope")

    def __call__(self, x):
        if np.ndim(x) == 0:
            return float(self.evaluator(float(x)))
        x = np.asarray(x, dtype=float)
        try:
            out = np.asarray(self.evaluator(x), dtype=float)
            if out.shape == x.shape:
                return out
        except (TypeError, ValueError):
            pass
        return np.array([float(self.evaluator(t)) for t in x.ravel()]).reshape(x.shape)


FormFactor = Union[Yamaguchi, GenericEven]


def truncation_length(f: FormFactor, growth: float = 0.0,
                      envelope: float = TRUNCATION_ENVELOPE) -> float:
    """Half-width beyond which ``f`` (times ``e^{growth |x|}``) is below ``envelope``."""
    rate = f.decay_bound - growth
    if rate <= 0:
        raise DomainError(
            f"integrand grows like exp({growth:g}|x|) faster than the form factor decays")
    return math.log(f.scale / envelope) / rate


@dataclass(frozen=True)
class Geometry:
    """Kernel shape without couplings: phases ``a``, ``b`` and form factors."""

    a: float
    b: float
    g: FormFactor
    h: FormFactor

    @property
    def is_yamaguchi(self) -> bool:
        return isinstance(self.g, Yamaguchi) and isinstance(self.h, Yamaguchi)

    def flipped(self) -> "Geometry":
        """Same geometry with ``(a, b) -> (-a, -b)``, i.e. its parity image."""
        return Geometry(-self.a, -self.b, self.g, self.h)


@dataclass(frozen=True)
class PotentialSpec:
    """Couplings plus kernel geometry.

    ``cs`` multiplies ``beta`` (scalar potential), ``cv`` the identity
    (time component of the vector potential).
    """

    cs: float
    cv: float
    a: float
    b: float
    g: FormFactor
    h: FormFactor

    def __post_init__(self):
        for name in ("cs", "cv", "a", "b"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")

    @property
    def geometry(self) -> Geometry:
        return Geometry(self.a, self.b, self.g, self.h)

    @property
    def is_yamaguchi(self) -> bool:
        return self.geometry.is_yamaguchi

    @property
    def is_hermitian(self) -> bool:
        """``g == h`` and ``a == -b``: the kernel is then Hermitian."""
        return self.g == self.h and self.a == -self.b

    def flipped(self) -> "PotentialSpec":
        return PotentialSpec(self.cs, self.cv, -self.a, -self.b, self.g, self.h)

    @classmethod
    def from_geometry(cls, geom: Geometry, cs: float, cv: float) -> "PotentialSpec":
        return cls(cs, cv, geom.a, geom.b, geom.g, geom.h)


def yamaguchi_spec(cs: float, cv: float, a: float, b: float,
                   c: float = 1.0, d: float = 1.0) -> PotentialSpec:
    """Potential with form factors ``exp(-c|x|)`` and ``exp(-d|y|)``."""
    return PotentialSpec(cs, cv, a, b, Yamaguchi(c), Yamaguchi(d))


# ---------------------------------------------------------------------------
# Fourier transforms
# ---------------------------------------------------------------------------

def _yamaguchi_ft(c: float, q):
    den = c * c + np.asarray(q) ** 2
    if np.iscomplexobj(den) and np.any(np.abs(den) < POLE_EPS):
        raise PoleProximityError(
            f"Yamaguchi transform 2c/(c^2+q^2) evaluated near its pole q = +-i*{c:g}")
    return 2.0 * c / den


def fourier_transform(f: FormFactor, q):
    """``int f(x) e^{-iqx} dx`` (real and even for even ``f``).

    Yamaguchi transforms accept complex ``q`` (analytic continuation) and
    arrays.  Generic factors are integrated as ``2 int_0^L f(x) cos(qx) dx``
    and require real scalar ``q``.
    """
    if isinstance(f, Yamaguchi):
        out = _yamaguchi_ft(f.decay, q)
        return out if np.ndim(out) else out[()]
    q = complex(q)
    if q.imag != 0:
        raise DomainError("generic form factors only support real Fourier arguments")
    length = truncation_length(f)
    with warnings.catch_warnings():
        # non-convergence is reported below through the error estimate
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(f, 0.0, length, weight="cos", wvar=q.real, limit=400,
                                  epsabs=QUAD_ATOL, epsrel=QUAD_RTOL)
    if err > max(QUAD_RTOL * abs(val), QUAD_ATOL):
        raise QuadratureError(f"Fourier transform did not converge (err={err:.3g})")
    return 2.0 * val


# ---------------------------------------------------------------------------
# Kernel integrals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KernelIntegrals:
    """The four fundamental integrals at one momentum, plus S/D combinations."""

    n1_plus: complex
    n2_plus: complex
    n1_minus: complex
    n2_minus: complex

    @property
    def s_plus(self) -> complex:
        return self.n1_plus + self.n2_plus

    @property
    def d_plus(self) -> complex:
        return self.n1_plus - self.n2_plus

    @property
    def s_minus(self) -> complex:
        return self.n1_minus + self.n2_minus

    @property
    def d_minus(self) -> complex:
        return self.n1_minus - self.n2_minus

    def s(self, branch: Branch) -> complex:
        return self.s_plus if _sign(branch) > 0 else self.s_minus

    def d(self, branch: Branch) -> complex:
        return self.d_plus if _sign(branch) > 0 else self.d_minus


def _yamaguchi_n(a, b, c, d, k, s):
    """Closed-form (N1, N2) on branch ``s = +-1``; vectorized over ``k``."""
    k = np.asarray(k)
    den = (a + b) ** 2 + (c + d) ** 2
    q1 = a - s * k
    q2 = a + s * k
    g1 = _yamaguchi_ft(c, q1)
    g2 = _yamaguchi_ft(c, q2)
    h1 = _yamaguchi_ft(d, b + s * k)
    h2 = _yamaguchi_ft(d, b - s * k)
    n1 = (-1j / c) * g1 * ((a + b) * c + (c + d) * q1) / den \
        + 0.5 * g1 * h1 * (1 + 1j * (b + s * k) / d)
    n2 = (1j / c) * g2 * ((a + b) * c + (c + d) * q2) / den \
        + 0.5 * g2 * h2 * (1 - 1j * (b - s * k) / d)
    return n1, n2


_GL_ORDER = 20
_GL_T, _GL_W = np.polynomial.legendre.leggauss(_GL_ORDER)
_GL_T = 0.5 * (_GL_T + 1.0)
_GL_W = 0.5 * _GL_W


def _panel_sum(geom: Geometry, k: complex, s: int, length: float, panels: int):
    """Composite Gauss-Legendre estimate of (N1, N2) with ``panels`` per half-axis.

    Panel edges include x = 0 (kink of the form factors).  The Heaviside
    constraint is honoured exactly: the diagonal panel contributes a
    triangle mapped onto Gauss nodes, and the strictly lower (upper) panels
    are accumulated by a recursion anchored at panel edges.
    """
    edges = np.linspace(-length, length, 2 * panels + 1)
    lo, width = edges[:-1], np.diff(edges)
    x = lo[:, None] + width[:, None] * _GL_T[None, :]
    w = width[:, None] * _GL_W[None, :]
    hx = geom.h(x) * np.exp(1j * geom.b * x)
    gx = geom.g(x) * np.exp(1j * geom.a * x)

    # triangle pieces: x' in [lo, x] (tri1) and [x, hi] (tri2) within a panel
    span1 = x - lo[:, None]
    xp1 = lo[:, None, None] + span1[:, :, None] * _GL_T[None, None, :]
    span2 = (lo + width)[:, None] - x
    xp2 = x[:, :, None] + span2[:, :, None] * _GL_T[None, None, :]
    g1 = geom.g(xp1) * np.exp(1j * geom.a * xp1)
    g2 = geom.g(xp2) * np.exp(1j * geom.a * xp2)
    u1 = x[:, :, None] - xp1
    u2 = x[:, :, None] - xp2
    tri1 = np.sum(g1 * np.exp(s * 1j * k * u1) * _GL_W, axis=2) * span1
    tri2 = np.sum(g2 * np.exp(-s * 1j * k * u2) * _GL_W, axis=2) * span2

    npan = lo.size
    # acc1[p] = int_{-L}^{lo_p} G(x') e^{isk(lo_p - x')} dx'
    acc1 = np.zeros(npan, dtype=complex)
    for p in range(1, npan):
        prev = lo[p - 1]
        acc1[p] = acc1[p - 1] * np.exp(s * 1j * k * (lo[p] - prev)) + np.sum(
            w[p - 1] * gx[p - 1] * np.exp(s * 1j * k * (lo[p] - x[p - 1])))
    # acc2[p] = int_{hi_p}^{L} G(x') e^{-isk(hi_p - x')} dx'
    hi = lo + width
    acc2 = np.zeros(npan, dtype=complex)
    for p in range(npan - 2, -1, -1):
        nxt = hi[p + 1]
        acc2[p] = acc2[p + 1] * np.exp(-s * 1j * k * (hi[p] - nxt)) + np.sum(
            w[p + 1] * gx[p + 1] * np.exp(-s * 1j * k * (hi[p] - x[p + 1])))

    inner1 = acc1[:, None] * np.exp(s * 1j * k * (x - lo[:, None])) + tri1
    inner2 = acc2[:, None] * np.exp(-s * 1j * k * (x - hi[:, None])) + tri2
    return complex(np.sum(w * hx * inner1)), complex(np.sum(w * hx * inner2))


def _quadrature_n(geom: Geometry, k: complex, s: int,
                  rtol: float = QUAD_RTOL, atol: float = QUAD_ATOL, max_panels: int = 2048):
    """(N1, N2) by composite quadrature, doubling panels until converged."""
    # the minus-type exponentials e^{-+ik(x-x')} grow when Im k > 0 on branch s = -1
    growth = abs(k.imag) if s < 0 else 0.0
    length = max(truncation_length(geom.g, growth), truncation_length(geom.h, growth))
    panels = 8
    prev = _panel_sum(geom, k, s, length, panels)
    while panels < max_panels:
        panels *= 2
        cur = _panel_sum(geom, k, s, length, panels)
        if all(abs(c - p) <= max(rtol * abs(c), atol) for c, p in zip(cur, prev)):
            return cur
        prev = cur
    raise QuadratureError(
        f"kernel quadrature not converged with {max_panels} panels per half-axis")


def n_integrals(geom, k: complex, branch: Branch = "plus") -> tuple[complex, complex]:
    """(N1, N2) on one branch at momentum ``k`` with ``Im k >= 0``.

    ``geom`` may be a ``Geometry`` or a ``PotentialSpec``.
    """
    s = _sign(branch)
    k = complex(k)
    if k.imag < 0:
        raise DomainError(f"momentum must satisfy Im k >= 0, got {k!r}")
    if isinstance(geom, PotentialSpec):
        geom = geom.geometry
    if geom.is_yamaguchi:
        n1, n2 = _yamaguchi_n(geom.a, geom.b, geom.g.decay, geom.h.decay, k, s)
        return complex(n1), complex(n2)
    return _quadrature_n(geom, k, s)


def kernel_integrals(geom, k: complex) -> KernelIntegrals:
    """All four N integrals at momentum ``k``."""
    n1p, n2p = n_integrals(geom, k, "plus")
    n1m, n2m = n_integrals(geom, k, "minus")
    return KernelIntegrals(n1p, n2p, n1m, n2m)


def yamaguchi_n1_plus_bound(geom: Geometry, kbar):
    """N1(+) at ``k = i*kbar`` for an array of ``kbar`` (Yamaguchi only)."""
    n1, _ = _yamaguchi_n(geom.a, geom.b, geom.g.decay, geom.h.decay, 1j * np.asarray(kbar), 1)
    return n1


# ---------------------------------------------------------------------------
# Free Green function
# ---------------------------------------------------------------------------

def green_function(kin: Kinematics, dx: float, branch: Branch = "plus") -> np.ndarray:
    """Free Dirac Green function G+-(dx) as a 2x2 matrix (Dirac representation).

    ``G+-(dx) = +-(i/2k) e^{+-ik|dx|} (+-k sigma_x sgn(dx) + m sigma_z + E)``
    with ``sgn(0) = +1``.
    """
    if kin.is_bound:
        raise DomainError("green_function requires scattering kinematics")
    s = _sign(branch)
    k = kin.k.real
    sgn = 1.0 if dx >= 0 else -1.0
    mat = s * k * sgn * SIGMA_X + kin.mass * SIGMA_Z + kin.energy * IDENTITY
    return s * 1j / (2 * k) * np.exp(s * 1j * k * abs(dx)) * mat
