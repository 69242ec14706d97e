import numpy as np
import pytest

from oracle import n_integral_oracle, scattering_by_ode
from ptdirac import DomainError, SingularDenominatorError
from ptdirac import scattering as sc
from ptdirac.kernel import KernelIntegrals, kernel_integrals, yamaguchi_spec
from ptdirac.kinematics import make_bound_kinematics, make_scattering_kinematics

SPIN_5 = yamaguchi_spec(5, 5, 2, 1)
PSEUDOSPIN_5 = yamaguchi_spec(-5, 5, 2, 1)
SPIN_2 = yamaguchi_spec(2, 2, -2, 1)


def kin(E):
    return make_scattering_kinematics(E)


@pytest.mark.parametrize("spec, E", [(SPIN_5, 2.0), (PSEUDOSPIN_5, -3.0),
                                     (yamaguchi_spec(1.3, -0.4, -1, 2, 0.7, 1.5), 1.4)])
def test_amplitudes_match_direct_integration(spec, E):
    res = sc.scatter(spec, kin(E))
    ref = scattering_by_ode(spec, E)
    got = (res.t_lr, res.r_lr, res.t_rl, res.r_rl)
    for x, y in zip(got, ref):
        assert abs(x - y) < 1e-7 * max(1.0, abs(y))


def test_free_particle():
    res = sc.scatter(yamaguchi_spec(0, 0, 2, 1), kin(2.5))
    assert res.t_lr == 1 and res.t_rl == 1 and res.r_lr == 0 and res.r_rl == 0
    assert np.array_equal(res.s_matrix, np.eye(2))
    assert res.diagnostics.max_abs() == 0


def test_zero_coupling_m_matrix_is_identity():
    for branch in ("plus", "minus"):
        mm = sc.m_matrix(yamaguchi_spec(0, 0, 1, 1), kin(1.7), branch)
        assert np.array_equal(mm.entries, np.eye(2)) and mm.det == 1


@pytest.mark.parametrize("E", [2.0, -1.3, 4.5])
@pytest.mark.parametrize("branch", ["plus", "minus"])
def test_m_matrix_is_one_plus_n_times_coupling(E, branch):
    spec = yamaguchi_spec(1.7, -2.2, 0.4, 1.1, 0.8, 1.3)
    k = kin(E)
    ints = kernel_integrals(spec, k.k)
    mm = sc.m_matrix(spec, k, branch, ints)
    explicit = np.eye(2) + sc.n_matrix(ints, k, branch) @ sc.coupling_matrix(spec)
    assert np.allclose(mm.entries, explicit, rtol=1e-13, atol=1e-14)
    assert abs(mm.det - np.linalg.det(mm.entries)) < 1e-12 * abs(mm.det)


def test_determinant_with_oracle_integrals():
    k = kin(2.0)
    vals = [n_integral_oracle(SPIN_5, k.k, w) for w in ("n1+", "n2+", "n1-", "n2-")]
    oracle_det = sc.m_matrix(SPIN_5, k, "plus", KernelIntegrals(*vals)).det
    assert abs(sc.m_matrix(SPIN_5, k, "plus").det - oracle_det) < 1e-8


@pytest.mark.parametrize("E", [1.5, -2.2])
def test_branch_determinants_conjugate_under_parity(E):
    spec = yamaguchi_spec(-0.9, 3.1, 1.4, -0.3, 1.2, 0.6)
    minus_flipped = sc.m_matrix(spec.flipped(), kin(E), "minus").det
    assert abs(minus_flipped - np.conj(sc.m_matrix(spec, kin(E), "plus").det)) < 1e-13


def test_s_matrix_layout():
    res = sc.scatter(PSEUDOSPIN_5, kin(2.0))
    assert res.s_matrix[0, 0] == res.t_lr and res.s_matrix[1, 1] == res.t_rl
    assert res.s_matrix[0, 1] == res.r_rl and res.s_matrix[1, 0] == res.r_lr


def test_reference_values_spin_symmetric():
    res = sc.scatter(SPIN_5, kin(2.0))
    assert res.t_lr == pytest.approx(-0.15487927620595 + 0.56675438184917j, abs=1e-12)
    assert res.t_rl == pytest.approx(0.54305926277412 + 0.22424262899491j, abs=1e-12)
    assert res.r_rl == pytest.approx(-6.36436345227399 + 3.12329690953235j, abs=1e-11)
    assert sc.dual_path_residual(PSEUDOSPIN_5, kin(2.0)) < 1e-10


def test_pt_diagnostics_recomputes_result():
    res = sc.scatter(SPIN_2, kin(3.0))
    assert sc.pt_diagnostics(res) == res.diagnostics
    assert res.diagnostics.max_abs() < 1e-10


@pytest.mark.parametrize("spec, E", [(yamaguchi_spec(3, -1, 0, 0, 0.7, 1.9), 2.0),
                                     (SPIN_5, 2.0), (SPIN_2, -3.0)])
def test_parity_flip(spec, E):
    assert sc.parity_flip_check(spec, kin(E)) < 1e-10


def test_parity_flip_is_trivial_without_phases():
    spec = yamaguchi_spec(3, -1, 0, 0, 0.7, 1.9)
    res = sc.scatter(spec, kin(2.0))
    assert abs(res.t_lr - res.t_rl) < 1e-12


def test_pt_symmetric_kernel_is_not_unitary():
    assert sc.unitarity_residual(sc.scatter(SPIN_5, kin(2.0))) > 1e-2


def test_hermitian_case_is_unitary():
    spec = yamaguchi_spec(0.5, 1.0, 1.0, -1.0)
    assert spec.is_hermitian
    assert sc.unitarity_residual(sc.scatter(spec, kin(2.0))) < 1e-10


def test_large_phase_transparency():
    spec = yamaguchi_spec(5, 5, 1e3, 1e3)
    for E in np.concatenate([np.linspace(-5, -1.01, 25), np.linspace(1.01, 5, 25)]):
        res = sc.scatter(spec, kin(E))
        assert abs(abs(res.t_lr) - 1) < 1e-3 and abs(abs(res.t_rl) - 1) < 1e-3
        assert abs(res.r_lr) < 1e-3 and abs(res.r_rl) < 1e-3


def test_scatter_requires_scattering_kinematics():
    with pytest.raises(DomainError):
        sc.scatter(PSEUDOSPIN_5, make_bound_kinematics(0.3))


def test_singular_denominator_flagged(monkeypatch):
    monkeypatch.setattr(sc, "_det_closed", lambda *args: 1e-15)
    with pytest.raises(SingularDenominatorError):
        sc.scatter(PSEUDOSPIN_5, kin(2.0))


def test_regressive_system_determinant_identity():
    k = kin(-2.4)
    system = sc.regressive_linear_system(SPIN_2, k)
    det_p = sc.m_matrix(SPIN_2, k, "plus").det
    det_m = sc.m_matrix(SPIN_2, k, "minus").det
    assert abs(system.d_frak_s - 2 * det_p * det_m) < 1e-10 * abs(system.d_frak_s)


def test_transmission_pole_at_bound_energy():
    from ptdirac.bound_states import find_bound_states, kernel_integrals_plus
    (state,) = find_bound_states(PSEUDOSPIN_5)
    bk = make_bound_kinematics(state.energy)
    ints = kernel_integrals_plus(PSEUDOSPIN_5, bk.k)
    assert abs(sc.inverse_transmission_lr(PSEUDOSPIN_5, bk, ints)) < 1e-6
    off = make_bound_kinematics(state.energy + 0.1)
    off_ints = kernel_integrals_plus(PSEUDOSPIN_5, off.k)
    assert abs(sc.inverse_transmission_lr(PSEUDOSPIN_5, off, off_ints)) > 1e-3
    ks = make_scattering_kinematics(2.0)
    expected = 1 / sc.transmission_lr(PSEUDOSPIN_5, ks)
    assert sc.inverse_transmission_lr(PSEUDOSPIN_5, ks) == pytest.approx(expected)
