"""Desk-scale workbench for kinetic diffusion with p-growth."""

from .exponents import (
    ExponentTable,
    ProblemParams,
    Reason,
    TransferTable,
    as_fraction,
    compute_exponents,
    compute_transfer,
    degiorgi_exponents,
    p_admissible_window,
)
from .fields import Field, besov_seminorm, diff_x, grad_v, intrinsic_rescale, lp_norm, truncate
from .geometry import Cylinder, CutoffSet, PhasePoint, build_cutoffs, cylinder_contains, dilate, group_compose, group_inverse
from .mollify import KernelFamily, MollifierSpec, SourceDecomposition, apply_TJ_kernel, apply_TK_mspace, kernel_lp_norm, representation_residual, standard_mollifier, young_check
from .solver import Nonlinearity, SolverConfig, residual, solve, step, transport_decomposition
from .trajectories import TrajectoryParams, check_M1, check_M2_M3_M4, eval_trajectory
from .verify import (
    degiorgi_run,
    energy_experiment,
    fast_convergence_lemma,
    gn_experiment,
    localized_gain_experiment,
    subsolution_gain_experiment,
    transfer_experiment,
)

__version__ = "0.1.0"
