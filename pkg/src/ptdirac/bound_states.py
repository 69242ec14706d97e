"""Real bound states on -m < E < m.

At ``k = i*kbar`` the plus-branch integrals satisfy ``N2 = conj(N1)``, so
``det M+`` is real and reduces to

    1 + 2 (cv E + cs m) / kbar * Re N1 - (cv^2 - cs^2) |N1|^2,

whose sign changes bracket the bound energies.  The same relation is a
quadratic in ``cv`` at fixed ``cs``, which gives the strength needed to bind
at a prescribed energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .errors import (ComplexDeterminantError, DegenerateError, DomainError,
                     PoleProximityError, QuadratureError)
from .kernel import (QUAD_ATOL, QUAD_RTOL, Geometry, KernelIntegrals, PotentialSpec, Yamaguchi,
                     _yamaguchi_n, n_integrals, truncation_length)
from .kinematics import make_bound_kinematics
from .scattering import m_matrix

EDGE_INSET = 1e-6
IMAG_TOL = 1e-9
DEGENERATE_EPS = 1e-13
POLE_REL_EPS = 1e-8
PT_SAMPLES = np.linspace(-10.0, 10.0, 41)


@dataclass(frozen=True)
class BoundState:
    """A root of ``det M+`` with diagnostics.

    ``i_plus_ratio`` is ``I+^2 / I+^1`` for the null vector of ``M+``
    (``inf`` when the first component vanishes).
    """

    energy: float
    kbar: float
    det_residual: float
    pt_residual: float
    i_plus_ratio: float


@dataclass(frozen=True)
class StrengthRoots:
    """Both solutions of ``det M+ = 0`` for one coupling, the other held fixed.

    ``plus >= minus`` when the roots are real; otherwise they form a
    complex-conjugate pair and ``is_real`` is False.
    """

    plus: complex
    minus: complex
    is_real: bool

    def real_roots(self) -> tuple[float, ...]:
        if not self.is_real:
            return ()
        return (self.plus.real, self.minus.real)


def _kbar(E, m):
    return np.sqrt((m - E) * (m + E))


def _plus_integrals(geom: Geometry, kbar: np.ndarray):
    """(N1+, N2+) at ``k = i*kbar``, vectorized for Yamaguchi form factors."""
    if geom.is_yamaguchi:
        return _yamaguchi_n(geom.a, geom.b, geom.g.decay, geom.h.decay, 1j * kbar, 1)
    pairs = [n_integrals(geom, 1j * kb, "plus") for kb in kbar.ravel()]
    n1 = np.array([p[0] for p in pairs]).reshape(kbar.shape)
    n2 = np.array([p[1] for p in pairs]).reshape(kbar.shape)
    return n1, n2


def detm_bound(spec: PotentialSpec, E, m: float = 1.0):
    """``det M+`` on the bound branch as a real number (or array over ``E``).

    Raises ``ComplexDeterminantError`` when the full determinant, evaluated
    from both ``N1+`` and ``N2+``, has an imaginary part above 1e-9.
    """
    E_arr = np.asarray(E, dtype=float)
    if np.any(~np.isfinite(E_arr)) or np.any(np.abs(E_arr) >= m):
        raise DomainError(f"bound branch requires |E| < m = {m!r}")
    kbar = _kbar(E_arr, m)
    n1, n2 = _plus_integrals(spec.geometry, kbar)
    w = spec.cv * E_arr + spec.cs * m
    uv = spec.cv ** 2 - spec.cs ** 2
    S, D = n1 + n2, n1 - n2
    full = 1 + S * w / kbar + uv / 4 * (D * D - S * S)
    worst = float(np.max(np.abs(np.imag(full))))
    if worst > IMAG_TOL:
        raise ComplexDeterminantError(f"|Im det M+| = {worst:.3g} on the bound branch")
    value = 1 + 2 * w / kbar * n1.real - uv * np.abs(n1) ** 2
    return float(value) if np.ndim(value) == 0 else value


def _null_vector(mat: np.ndarray) -> np.ndarray:
    """Real null vector of a real singular 2x2 matrix, sign fixed by the first entry."""
    rows = mat.real
    row = rows[int(np.argmax(np.linalg.norm(rows, axis=1)))]
    if not np.any(row):
        raise DegenerateError("M+ vanishes identically; the null space is two-dimensional")
    vec = np.array([-row[1], row[0]])
    vec /= np.linalg.norm(vec)
    lead = vec[0] if vec[0] != 0 else vec[1]
    return vec if lead > 0 else -vec


def i_plus_vector(spec: PotentialSpec, E: float, m: float = 1.0) -> np.ndarray:
    """``I+`` spanning the null space of ``M+`` at a bound energy (unit norm, real)."""
    kin = make_bound_kinematics(E, m)
    mm = m_matrix(spec, kin, "plus", kernel_integrals_plus(spec, kin.k))
    return _null_vector(mm.entries)


def kernel_integrals_plus(spec, k) -> KernelIntegrals:
    """Plus-branch integrals only; the minus branch need not converge for bound ``k``."""
    n1, n2 = n_integrals(spec, k, "plus")
    return KernelIntegrals(n1, n2, np.nan, np.nan)


# ---------------------------------------------------------------------------
# Spatial integrals and the wavefunction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpatialIntegrals:
    """The running integrals of ``g(x') e^{iax'} e^{-+kbar x'}`` entering the bound state.

        I1(x) = int_{-inf}^{x} g(x') e^{iax'} e^{+kbar x'} dx'
        I2(x) = int_{x}^{+inf} g(x') e^{iax'} e^{-kbar x'} dx'

    ``scaled_i1 = e^{-kbar x} I1`` and ``scaled_i2 = e^{kbar x} I2`` are the
    bounded combinations that actually appear in the wavefunction.
    """

    a: float
    kbar: float
    g: object

    def __post_init__(self):
        if isinstance(self.g, Yamaguchi):
            c = self.g.decay
            if abs(complex(self.kbar - c, self.a)) < POLE_REL_EPS * c:
                raise PoleProximityError(
                    f"kbar = {self.kbar!r} is within {POLE_REL_EPS:g} c of the pole at c, a = 0")

    def scaled_i1(self, x):
        x = np.asarray(x, dtype=float)
        if isinstance(self.g, Yamaguchi):
            return self._yamaguchi_scaled_i1(x)
        return self._quad_scaled(x, -1)

    def scaled_i2(self, x):
        x = np.asarray(x, dtype=float)
        if isinstance(self.g, Yamaguchi):
            return self._yamaguchi_scaled_i2(x)
        return self._quad_scaled(x, 1)

    def i1(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp(self.kbar * x) * self.scaled_i1(x)

    def i2(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp(-self.kbar * x) * self.scaled_i2(x)

    def _yamaguchi_scaled_i1(self, x):
        c, a, kb = self.g.decay, self.a, self.kbar
        neg, pos = np.minimum(x, 0.0), np.maximum(x, 0.0)
        left = np.exp((c + 1j * a) * neg) / (c + kb + 1j * a)
        right = (np.exp(-kb * pos) / (c + kb + 1j * a)
                 + (np.exp((-c + 1j * a) * pos) - np.exp(-kb * pos)) / (kb - c + 1j * a))
        return np.where(x < 0, left, right)

    def _yamaguchi_scaled_i2(self, x):
        c, a, kb = self.g.decay, self.a, self.kbar
        neg, pos = np.minimum(x, 0.0), np.maximum(x, 0.0)
        left = ((np.exp(kb * neg) - np.exp((c + 1j * a) * neg)) / (c - kb + 1j * a)
                + np.exp(kb * neg) / (c + kb - 1j * a))
        right = np.exp((-c + 1j * a) * pos) / (c + kb - 1j * a)
        return np.where(x < 0, left, right)

    def _quad_scaled(self, x, direction):
        # direction -1: int_0^inf g(x - t) e^{ia(x - t)} e^{-kbar t} dt  (= e^{-kbar x} I1)
        # direction +1: int_0^inf g(x + t) e^{ia(x + t)} e^{-kbar t} dt  (= e^{kbar x} I2)
        length = truncation_length(self.g, 0.0)
        out = np.empty(x.shape, dtype=complex)
        for idx, xv in np.ndenumerate(x):
            kink = -direction * xv  # where x + direction*t crosses zero
            span = max(kink, 0.0) + length
            pts = [kink] if 0 < kink < span else None

            def f(t, xv=xv):
                y = xv + direction * t
                return self.g(y) * np.exp(1j * self.a * y - self.kbar * t)

            val, err = integrate.quad(f, 0.0, span, points=pts, complex_func=True,
                                      epsrel=QUAD_RTOL, epsabs=QUAD_ATOL, limit=400)
            if not abs(err) <= max(1e3 * QUAD_RTOL * abs(val), 1e3 * QUAD_ATOL):
                raise QuadratureError(f"spatial integral not converged at x = {xv!r}")
            out[idx] = val
        return out


class BoundWavefunction:
    """Normalized bound-state spinor ``Psi(x)`` for one state.

    ``I+`` is taken real with a positive leading component, so the overall
    normalization constant is real and ``Psi(x) = conj(Psi(-x))``.
    """

    def __init__(self, state: BoundState, spec: PotentialSpec, m: float = 1.0):
        if spec.cs == 0 and spec.cv == 0:
            raise DomainError("no bound state without coupling")
        E, kb = state.energy, state.kbar
        self.state = state
        self.integrals = SpatialIntegrals(spec.a, kb, spec.g)
        i_plus = i_plus_vector(spec, E, m)
        weighted = np.array([spec.cv + spec.cs, spec.cv - spec.cs]) * i_plus
        left = np.array([[E + m, 1j * kb], [1j * kb, E - m]])
        right = np.array([[E + m, -1j * kb], [-1j * kb, E - m]])
        self._v1 = -(left @ weighted) / (2 * kb)
        self._v2 = -(right @ weighted) / (2 * kb)
        self.i_plus = i_plus
        decay = min(kb, spec.g.decay_bound)
        self.half_width = 40.0 / decay
        self._scale = 1.0
        self._scale = 1.0 / math.sqrt(self.norm_squared())

    def __call__(self, x):
        """Spinor values with shape ``x.shape + (2,)``."""
        x = np.asarray(x, dtype=float)
        s1 = self.integrals.scaled_i1(x)[..., None]
        s2 = self.integrals.scaled_i2(x)[..., None]
        return self._scale * (s1 * self._v1 + s2 * self._v2)

    def density(self, x):
        psi = self(x)
        return np.sum(np.abs(psi) ** 2, axis=-1)

    def norm_squared(self) -> float:
        """``int |Psi|^2`` over ``[-L, L]`` with ``L = 40 / min(kbar, c)``."""
        L = self.half_width
        total = 0.0
        for lo, hi in ((-L, 0.0), (0.0, L)):
            val, err = integrate.quad(lambda t: float(self.density(t)), lo, hi,
                                      epsabs=0.0, epsrel=1e-12, limit=500)
            if err > 1e-9 * abs(val):
                raise QuadratureError(f"normalization integral not converged (err={err:.3g})")
            total += val
        return total

    def pt_residual(self, x=PT_SAMPLES) -> float:
        x = np.asarray(x, dtype=float)
        return float(np.max(np.abs(self(x) - np.conj(self(-x)))))


def bound_wavefunction(state: BoundState, spec: PotentialSpec, x, m: float = 1.0):
    """Normalized ``Psi(x)``; see ``BoundWavefunction`` for repeated evaluation."""
    return BoundWavefunction(state, spec, m)(x)


# ---------------------------------------------------------------------------
# Root search
# ---------------------------------------------------------------------------

def _make_state(spec: PotentialSpec, E: float, m: float) -> BoundState:
    kb = float(_kbar(E, m))
    kin = make_bound_kinematics(E, m)
    det = m_matrix(spec, kin, "plus", kernel_integrals_plus(spec, kin.k)).det
    vec = i_plus_vector(spec, E, m)
    ratio = vec[1] / vec[0] if vec[0] != 0 else math.inf
    state = BoundState(E, kb, abs(det), math.nan, float(ratio))
    try:
        pt = BoundWavefunction(state, spec, m).pt_residual()
    except (PoleProximityError, QuadratureError, DegenerateError):
        pt = math.nan
    return BoundState(E, kb, abs(det), pt, float(ratio))


def find_bound_states(spec: PotentialSpec, grid_points: int = 2048, tol: float = 1e-12,
                      edge_inset: float = EDGE_INSET, m: float = 1.0) -> list[BoundState]:
    """Scan ``det M+`` over ``(-m + d, m - d)``, ``d = edge_inset * m``, and refine roots.

    Each sign change between neighbouring grid points is refined with
    Brent's method to ``|dE| < tol``.  Output is sorted by energy.
    """
    if grid_points < 16:
        raise DomainError(f"grid_points must be >= 16, got {grid_points!r}")
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    if not 0 < edge_inset < 1:
        raise DomainError(f"edge_inset must lie in (0, 1), got {edge_inset!r}")
    delta = edge_inset * m
    grid = np.linspace(-m + delta, m - delta, grid_points)
    values = detm_bound(spec, grid, m)
    states = []
    for i in np.flatnonzero(np.sign(values[:-1]) * np.sign(values[1:]) <= 0):
        lo, hi = grid[i], grid[i + 1]
        if values[i] == 0:
            root = lo
        elif values[i + 1] == 0:
            continue  # picked up as the left end of the next cell
        else:
            root = optimize.brentq(lambda e: detm_bound(spec, e, m), lo, hi, xtol=tol)
        states.append(_make_state(spec, float(root), m))
    return states


def _bound_n1(geometry, E: float, m: float):
    if isinstance(geometry, PotentialSpec):
        geometry = geometry.geometry
    kin = make_bound_kinematics(E, m)
    n1, _ = n_integrals(geometry, kin.k, "plus")
    if abs(n1) < DEGENERATE_EPS:
        raise DegenerateError(f"|N1+| = {abs(n1):.3g} at E = {E!r}")
    return n1, kin.kbar


def _quadratic_roots(A: float, p: float, C: float) -> StrengthRoots:
    """Roots of ``A x^2 + 2 p x + C = 0`` with ``A > 0``, cancellation-free."""
    disc = p * p - A * C
    if disc < 0:
        root = math.sqrt(-disc)
        return StrengthRoots(complex(-p, root) / A, complex(-p, -root) / A, False)
    q = -(p + math.copysign(math.sqrt(disc), p))
    if q == 0:
        return StrengthRoots(0j, 0j, True)
    r1, r2 = q / A, C / q
    return StrengthRoots(complex(max(r1, r2)), complex(min(r1, r2)), True)


def solve_vector_strength(geometry: Geometry, E: float, m: float = 1.0,
                          cs: float = 0.0) -> StrengthRoots:
    """Vector couplings ``cv`` making ``E`` a bound energy at fixed ``cs``.

    The discriminant equals ``(cs |N|^2 + Re N / kbar)^2 + (Im N)^2``, so
    both roots are real; with ``cs = 0`` their product ``-1/|N|^2`` makes one
    of them positive.  Raises ``DegenerateError`` when ``|N1+| < 1e-13``.
    """
    n1, kbar = _bound_n1(geometry, E, m)
    A = abs(n1) ** 2
    re = n1.real / kbar
    # A cv^2 - 2 E re cv - (1 + 2 cs m re + cs^2 A) = 0
    return _quadratic_roots(A, -E * re, -(1 + 2 * cs * m * re + cs * cs * A))


def solve_scalar_strength(geometry: Geometry, E: float, m: float = 1.0,
                          cv: float = 0.0) -> StrengthRoots:
    """Scalar couplings ``cs`` making ``E`` a bound energy at fixed ``cv``.

    Unlike the vector case the roots may form a complex-conjugate pair, in
    which case no PT-symmetric (real) coupling binds at ``E``.
    """
    n1, kbar = _bound_n1(geometry, E, m)
    A = abs(n1) ** 2
    re = n1.real / kbar
    # A cs^2 + 2 m re cs + (1 + 2 cv E re - cv^2 A) = 0
    return _quadratic_roots(A, m * re, 1 + 2 * cv * E * re - cv * cv * A)
