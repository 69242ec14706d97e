"""Transmission, reflection and the S-matrix for the separable Dirac problem.

Progressive (left-to-right) amplitudes follow from ``M+ = 1 + N+ (cs*beta + cv)``;
the regressive (right-to-left) amplitudes are obtained twice, from the
closed ``det M+``-denominator form and from the underlying linear system in
the free-wave amplitudes, so that the two can be cross-checked.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, SingularDenominatorError
from .kernel import (SIGMA_X, SIGMA_Z, IDENTITY, Branch, KernelIntegrals, PotentialSpec,
                     _sign, fourier_transform, kernel_integrals)
from .kinematics import Kinematics

SINGULAR_EPS = 1e-13


@dataclass(frozen=True)
class MMatrix:
    """``M = 1 + N (cs*sigma_z + cv)`` on one branch, with its determinant."""

    entries: np.ndarray
    det: complex
    branch: Branch


@dataclass(frozen=True)
class PTDiagnostics:
    """Residuals of the three S-matrix relations implied by PT symmetry."""

    det_s_modulus_minus_one: float
    t_modulus_gap: float
    reflection_phase_residual: float

    def max_abs(self) -> float:
        return max(abs(self.det_s_modulus_minus_one), abs(self.t_modulus_gap),
                   abs(self.reflection_phase_residual))


@dataclass(frozen=True)
class ScatteringResult:
    t_lr: complex
    r_lr: complex
    t_rl: complex
    r_rl: complex
    det_m_plus: complex
    det_m_minus: complex
    s_matrix: np.ndarray = field(repr=False)
    diagnostics: PTDiagnostics


@dataclass(frozen=True)
class RegressiveSystem:
    """Regressive amplitudes from the linear system, with its determinant ``d_S``."""

    t_rl: complex
    r_rl: complex
    d_frak_s: complex


def coupling_matrix(spec: PotentialSpec) -> np.ndarray:
    """``cs * sigma_z + cv``."""
    return spec.cs * SIGMA_Z + spec.cv * IDENTITY


def _det_closed(ints: KernelIntegrals, spec: PotentialSpec, kin: Kinematics, s: int) -> complex:
    S, D = ints.s("plus" if s > 0 else "minus"), ints.d("plus" if s > 0 else "minus")
    w = spec.cv * kin.energy + spec.cs * kin.mass
    uv = spec.cv ** 2 - spec.cs ** 2
    return 1 + s * 1j * S / kin.k * w + uv / 4 * (D * D - S * S)


def _m_entries(ints: KernelIntegrals, spec: PotentialSpec, kin: Kinematics, s: int) -> np.ndarray:
    branch = "plus" if s > 0 else "minus"
    S, D = ints.s(branch), ints.d(branch)
    lam = kin.lam
    u = spec.cv + spec.cs
    v = spec.cv - spec.cs
    return np.array([[1 + s * 0.5j * S / lam * u, 0.5j * D * v],
                     [0.5j * D * u, 1 + s * 0.5j * lam * S * v]], dtype=complex)


def n_matrix(ints: KernelIntegrals, kin: Kinematics, branch: Branch) -> np.ndarray:
    """``N = (i/2k) [D k sigma_x +- S (m sigma_z + E)]`` as an explicit 2x2 matrix."""
    s = _sign(branch)
    k = kin.k
    return 1j / (2 * k) * (ints.d(branch) * k * SIGMA_X
                           + s * ints.s(branch) * (kin.mass * SIGMA_Z + kin.energy * IDENTITY))


def m_matrix(spec: PotentialSpec, kin: Kinematics, branch: Branch = "plus",
             ints: KernelIntegrals | None = None) -> MMatrix:
    """Assemble ``M+-`` and its determinant from the kernel integrals."""
    s = _sign(branch)
    if ints is None:
        ints = kernel_integrals(spec, kin.k)
    return MMatrix(_m_entries(ints, spec, kin, s), _det_closed(ints, spec, kin, s), branch)


def _transforms(spec: PotentialSpec, k):
    a, b = spec.a, spec.b
    ft_g = lambda q: fourier_transform(spec.g, q)
    ft_h = lambda q: fourier_transform(spec.h, q)
    return ft_g(a - k), ft_g(a + k), ft_h(k + b), ft_h(k - b)


def _transmission_parts(spec, kin, ints):
    if ints is None:
        ints = kernel_integrals(spec, kin.k)
    k = kin.k
    g_amk, _, h_kpb, _ = _transforms(spec, k)
    w = spec.cv * kin.energy + spec.cs * kin.mass
    uv = spec.cv ** 2 - spec.cs ** 2
    det_p = _det_closed(ints, spec, kin, 1)
    shift = 0.5j * g_amk * h_kpb * (2 / k * w + 1j * uv * (ints.s_plus - ints.d_plus))
    return det_p, shift


def transmission_lr(spec: PotentialSpec, kin: Kinematics,
                    ints: KernelIntegrals | None = None) -> complex:
    """``T_{L->R}``; also valid on the bound branch ``k = i*kbar``."""
    det_p, shift = _transmission_parts(spec, kin, ints)
    return 1 - shift / det_p


def inverse_transmission_lr(spec: PotentialSpec, kin: Kinematics,
                            ints: KernelIntegrals | None = None) -> complex:
    """``1 / T_{L->R}``, finite (and zero) at the poles of ``T``."""
    det_p, shift = _transmission_parts(spec, kin, ints)
    return det_p / (det_p - shift)


def _pt_residuals(t_lr, r_lr, t_rl, r_rl) -> PTDiagnostics:
    det_s = t_lr * t_rl - r_lr * r_rl
    return PTDiagnostics(
        det_s_modulus_minus_one=abs(det_s) - 1.0,
        t_modulus_gap=abs(t_lr) - abs(t_rl),
        reflection_phase_residual=float((r_lr * np.conj(r_rl)).imag),
    )


def pt_diagnostics(result: ScatteringResult) -> PTDiagnostics:
    """``|det S| - 1``, ``|T_LR| - |T_RL|`` and ``Im(R_LR conj(R_RL))``."""
    return _pt_residuals(result.t_lr, result.r_lr, result.t_rl, result.r_rl)


def _assemble(t_lr, r_lr, t_rl, r_rl, det_p, det_m) -> ScatteringResult:
    smat = np.array([[t_lr, r_rl], [r_lr, t_rl]], dtype=complex)
    return ScatteringResult(complex(t_lr), complex(r_lr), complex(t_rl), complex(r_rl),
                            complex(det_p), complex(det_m), smat,
                            _pt_residuals(t_lr, r_lr, t_rl, r_rl))


def scatter(spec: PotentialSpec, kin: Kinematics,
            ints: KernelIntegrals | None = None) -> ScatteringResult:
    """All four amplitudes, the S-matrix and its PT diagnostics at one energy."""
    if kin.is_bound:
        raise DomainError("scatter requires scattering kinematics (|E| > m)")
    if ints is None:
        ints = kernel_integrals(spec, kin.k)
    k, E, m = kin.k, kin.energy, kin.mass
    g_amk, g_apk, h_kpb, h_kmb = _transforms(spec, k)
    w = spec.cv * E + spec.cs * m
    w_refl = spec.cv * m + spec.cs * E
    uv = spec.cv ** 2 - spec.cs ** 2
    det_p = _det_closed(ints, spec, kin, 1)
    det_m = _det_closed(ints, spec, kin, -1)
    if abs(det_p) < SINGULAR_EPS:
        raise SingularDenominatorError(f"|det M+| = {abs(det_p):.3g} at E = {E!r}")

    t_lr = 1 - 0.5j * g_amk * h_kpb * (2 / k * w + 1j * uv * (ints.s_plus - ints.d_plus)) / det_p
    r_lr = -1j / k * g_apk * h_kpb * w_refl / det_p
    t_rl = (det_m + g_amk * h_kpb * (1j * w / k + uv * ints.n1_minus)) / det_p
    r_rl = -1j / k * g_amk * h_kmb * w_refl / det_p
    return _assemble(t_lr, r_lr, t_rl, r_rl, det_p, det_m)


def regressive_linear_system(spec: PotentialSpec, kin: Kinematics,
                             ints: KernelIntegrals | None = None) -> RegressiveSystem:
    """Regressive amplitudes by solving the two boundary conditions directly.

    The unknowns are the sum and difference combinations of the free-wave
    amplitudes weighted by ``h~(k+-b)``; the system determinant is returned
    as ``d_frak_s``.
    """
    if ints is None:
        ints = kernel_integrals(spec, kin.k)
    k, lam = kin.k, kin.lam
    g_amk, g_apk, h_kpb, h_kmb = _transforms(spec, k)
    u = spec.cv + spec.cs
    v = spec.cv - spec.cs
    uv = u * v
    det_m = _det_closed(ints, spec, kin, -1)
    sp = ints.s_minus + ints.d_minus
    sm = ints.s_minus - ints.d_minus
    p_plus_s = u / lam - 0.5j * uv * sp
    p_plus_d = lam * v - 0.5j * uv * sp
    p_minus_s = u / lam - 0.5j * uv * sm
    p_minus_d = -(lam * v - 0.5j * uv * sm)

    d_frak_s = (2 * det_m ** 2
                + 1j * g_amk * h_kpb * det_m * (p_plus_d + p_plus_s)
                - 1j * g_apk * h_kmb * det_m * (p_minus_d - p_minus_s)
                + g_apk * g_amk * h_kpb * h_kmb * (p_plus_s * p_minus_d - p_minus_s * p_plus_d))
    t_rl = det_m * (2 * det_m + 1j * g_amk * h_kpb * (p_plus_d + p_plus_s)) / d_frak_s
    r_rl = 1j * g_amk * h_kmb * det_m * (p_plus_d - p_plus_s) / d_frak_s
    return RegressiveSystem(t_rl, r_rl, d_frak_s)


def determinant_identity_residual(spec: PotentialSpec, kin: Kinematics,
                                  ints: KernelIntegrals | None = None) -> float:
    """``|d_S - 2 det M+ det M-| / |d_S|``."""
    if ints is None:
        ints = kernel_integrals(spec, kin.k)
    sysm = regressive_linear_system(spec, kin, ints)
    det_p = _det_closed(ints, spec, kin, 1)
    det_m = _det_closed(ints, spec, kin, -1)
    return abs(sysm.d_frak_s - 2 * det_p * det_m) / abs(sysm.d_frak_s)


def dual_path_residual(spec: PotentialSpec, kin: Kinematics) -> float:
    """Relative disagreement of the two regressive formulations."""
    ints = kernel_integrals(spec, kin.k)
    res = scatter(spec, kin, ints)
    alt = regressive_linear_system(spec, kin, ints)
    return max(abs(res.t_rl - alt.t_rl) / max(abs(res.t_rl), abs(alt.t_rl)),
               abs(res.r_rl - alt.r_rl) / max(abs(res.r_rl), abs(alt.r_rl), 1e-300))


def parity_flip_check(spec: PotentialSpec, kin: Kinematics) -> float:
    """Max residual of ``T_LR(-a,-b) = T_RL(a,b)`` and ``R_LR(-a,-b) = R_RL(a,b)``."""
    direct = scatter(spec, kin)
    flipped = scatter(spec.flipped(), kin)
    return max(abs(flipped.t_lr - direct.t_rl), abs(flipped.r_lr - direct.r_rl))


def unitarity_residual(result: ScatteringResult) -> float:
    """``max |S S^dagger - 1|``; vanishes only for Hermitian kernels."""
    smat = result.s_matrix
    return float(np.max(np.abs(smat @ smat.conj().T - np.eye(2))))
