"""Non-relativistic limits of the decoupled cases ``cv = +-cs``.

For ``cv = cs = c`` (spin symmetry) the upper component obeys a
Schrodinger equation with constant strength ``s = 2c``; for
``cv = -cs = c'`` (pseudospin symmetry) the lower component obeys one with
energy-dependent strength ``s(k) = c' k^2 / (2 m^2)``.  In both cases the
amplitudes depend on the strength only through ``omega = s m / k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

from .kernel import Geometry, PotentialSpec, fourier_transform, kernel_integrals
from .scattering import ScatteringResult, _assemble

Case = Literal["spin", "pseudospin"]


@dataclass(frozen=True)
class NRCase:
    """Decoupling case and its coupling strength (``c`` or ``c'``)."""

    case: Case
    strength: float

    def __post_init__(self):
        if self.case not in ("spin", "pseudospin"):
            raise ValueError(f"case must be 'spin' or 'pseudospin', got {self.case!r}")

    def effective_strength(self, k: float, m: float = 1.0) -> float:
        if self.case == "spin":
            return 2.0 * self.strength
        return self.strength * k * k / (2.0 * m * m)

    def omega(self, k: float, m: float = 1.0) -> float:
        """``2cm/k`` (spin) or ``c'k/(2m)`` (pseudospin)."""
        return self.effective_strength(k, m) * m / k

    def couplings(self) -> tuple[float, float]:
        """Relativistic ``(cs, cv)`` realising this case."""
        if self.case == "spin":
            return self.strength, self.strength
        return -self.strength, self.strength

    def relativistic_spec(self, geom: Geometry) -> PotentialSpec:
        cs, cv = self.couplings()
        return PotentialSpec.from_geometry(geom, cs, cv)


def nr_amplitudes(geom: Geometry, k: float, omega: float, reflection_sign: float):
    """Amplitudes of the non-local Schrodinger problem at prefactor ``omega``.

    ``reflection_sign`` is ``-1`` for the spin case and ``+1`` for pseudospin.
    """
    if isinstance(geom, PotentialSpec):
        geom = geom.geometry
    ints = kernel_integrals(geom, k)
    a, b = geom.a, geom.b
    g_kma = fourier_transform(geom.g, k - a)
    g_kpa = fourier_transform(geom.g, k + a)
    h_kpb = fourier_transform(geom.h, k + b)
    h_kmb = fourier_transform(geom.h, k - b)
    den_p = 1 + 1j * omega * ints.s_plus
    den_m = 1 + 1j * omega * (-ints.s_minus + g_kma * h_kpb + g_kpa * h_kmb)
    t_lr = 1 - 1j * omega * g_kma * h_kpb / den_p
    r_lr = reflection_sign * 1j * omega * g_kpa * h_kpb / den_p
    t_rl = 1 - 1j * omega * g_kpa * h_kmb / den_m
    r_rl = reflection_sign * 1j * omega * g_kma * h_kmb / den_m
    return t_lr, r_lr, t_rl, r_rl, den_p, den_m


def nr_scatter(case: NRCase, geom: Geometry, k: float, m: float = 1.0) -> ScatteringResult:
    """Non-relativistic transmission/reflection at momentum ``k > 0``.

    ``det_m_plus``/``det_m_minus`` hold the two Schrodinger denominators.
    """
    if not k > 0:
        raise ValueError(f"k must be positive, got {k!r}")
    sign = -1.0 if case.case == "spin" else 1.0
    return _assemble(*nr_amplitudes(geom, k, case.omega(k, m), sign))
