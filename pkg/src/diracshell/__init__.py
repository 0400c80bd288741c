"""diracshell: spectral toolkit for 3-D Dirac operators with delta-shell
interactions on compact and conic-at-infinity surfaces.

Subpackages: ``clifford`` (exact matrix algebra), ``shell_symbol``
(ellipticity matrices and checks), ``surfaces`` (interaction-surface
models), ``transmission1d`` (reduced 1-D eigenproblems), ``fd_oracle``
(independent finite-difference oracle), ``limitops`` (limit operators and
essential spectra), ``cli`` (batch front-end).
"""

from .clifford import alpha_dot, dirac_alpha, pauli
from .shell_symbol import (
    Frame,
    InteractionMatrix,
    LSReport,
    STANDARD_FRAME,
    closed_form_diag_det,
    diag_abs_det,
    electrostatic_lorentz_margin,
    h_basis,
    hermitian_check,
    lambda_pm,
    ls_check_local,
    ls_check_param,
    ls_check_uniform,
    ls_matrix,
    transmission_pair,
)
from .spectra import SpectrumSet, free_spectrum, spectrum_union
from .surfaces import Cone, ParametricGrid, Plane, Sphere
from .transmission1d import (
    GapEigenvalue,
    ReducedSymbol1D,
    dispersion_curve,
    dispersion_det,
    essential_rays,
    gap_eigenvalues,
    reduced_symbol,
)
from .fd_oracle import FDGrid, gap_eigenvalues_fd
from .limitops import (
    ConstantPotential,
    CouplingField,
    DirectionalSOPotential,
    EssentialSpectrumResult,
    LimitOperatorDescriptor,
    PotentialModel,
    RadialSOPotential,
    enumerate_limits,
    essential_spectrum,
    partial_limits,
)

__version__ = "0.1.0"
