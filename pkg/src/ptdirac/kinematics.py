"""Energy/momentum relations for the free Dirac particle in 1+1 dimensions.

Units are hbar = c = 1.  Every quantity is measured in units of the mass
scale ``m``; the defaults assume ``m = 1``.

Two regimes are supported:

* scattering, ``|E| > m``: real momentum ``k = +sqrt(E^2 - m^2)``;
* bound, ``|E| < m``: imaginary momentum ``k = i*kbar`` with
  ``kbar = +sqrt(m^2 - E^2)``.

In both regimes the lower/upper spinor ratio of the free wave is
``lam = k / (E + m)``, which is negative for ``E < -m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, ThresholdError

THRESHOLD_EPS = 1e-9


@dataclass(frozen=True)
class Kinematics:
    """Energy, mass, momentum and spinor ratio at one energy.

    Attributes
    ----------
    energy : float
        Total energy E.
    mass : float
        Particle mass m > 0.
    k : complex
        Momentum; real positive for scattering, ``1j * kbar`` for bound states.
    lam : complex
        Spinor ratio ``k / (E + m)``.
    kbar : float or None
        ``sqrt(m^2 - E^2)`` in the bound regime, ``None`` otherwise.
    """

    energy: float
    mass: float
    k: complex
    lam: complex
    kbar: float | None = None

    @property
    def is_bound(self) -> bool:
        return self.kbar is not None


def _check_mass(m: float) -> None:
    if not (m > 0 and math.isfinite(m)):
        raise DomainError(f"mass must be positive and finite, got {m!r}")


def make_scattering_kinematics(E: float, m: float = 1.0,
                               threshold_eps: float = THRESHOLD_EPS) -> Kinematics:
    """Kinematics for a scattering energy ``|E| > m``.

    Raises ``ThresholdError`` when ``|E^2 - m^2| < threshold_eps * m^2``,
    since the transmission and reflection amplitudes carry explicit
    ``1/k`` factors.
    """
    _check_mass(m)
    E = float(E)
    if not math.isfinite(E) or abs(E) <= m:
        raise DomainError(f"scattering requires |E| > m, got E={E!r}, m={m!r}")
    k2 = (E - m) * (E + m)
    if k2 < threshold_eps * m * m:
        raise ThresholdError(
            f"E={E!r} lies within the threshold band |E^2 - m^2| < {threshold_eps:g} m^2")
    k = math.sqrt(k2)
    return Kinematics(energy=E, mass=m, k=complex(k), lam=complex(k / (E + m)))


def make_bound_kinematics(E: float, m: float = 1.0) -> Kinematics:
    """Kinematics on the bound-state branch ``-m < E < m``."""
    _check_mass(m)
    E = float(E)
    if not math.isfinite(E) or abs(E) >= m:
        raise DomainError(f"bound states require |E| < m, got E={E!r}, m={m!r}")
    # (m - E)(m + E) keeps relative accuracy as E -> +-m
    kbar = math.sqrt((m - E) * (m + E))
    return Kinematics(energy=E, mass=m, k=1j * kbar, lam=1j * kbar / (E + m), kbar=kbar)


def make_kinematics(E: float, m: float = 1.0) -> Kinematics:
    """Dispatch to the scattering or bound constructor by energy."""
    if abs(E) < m:
        return make_bound_kinematics(E, m)
    return make_scattering_kinematics(E, m)
