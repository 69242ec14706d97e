"""1+1 Dirac scattering and bound states for separable PT-symmetric kernels."""

from .bound_states import (BoundState, BoundWavefunction, SpatialIntegrals, StrengthRoots,
                           bound_wavefunction, detm_bound, find_bound_states,
                           solve_scalar_strength, solve_vector_strength)
from .errors import (ComplexDeterminantError, DegenerateError, DomainError, PoleProximityError,
                     PTDiracError, QuadratureError, SingularDenominatorError, ThresholdError)
from .kernel import (GenericEven, Geometry, KernelIntegrals, PotentialSpec, Yamaguchi,
                     fourier_transform, green_function, kernel_integrals, n_integrals,
                     yamaguchi_spec)
from .kinematics import (Kinematics, make_bound_kinematics, make_kinematics,
                         make_scattering_kinematics)
from .nonrel import NRCase, nr_scatter
from .scattering import (MMatrix, PTDiagnostics, ScatteringResult, m_matrix, pt_diagnostics,
                         regressive_linear_system, scatter, transmission_lr)

__all__ = [name for name in dir() if not name.startswith("_")]
