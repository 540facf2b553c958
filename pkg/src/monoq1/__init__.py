"""Monotone Q1 finite elements with mixed trapezoid/midpoint quadrature for 2D anisotropic diffusion."""

__version__ = "0.1.0"

from .analysis import (ConvergenceTable, MeshConditionReport, convergence_study,
                       mesh_condition_check, nodal_errors, recommend_aspect_ratio)
from .assembly import AssembledSystem, apply_dirichlet, assemble, export_matrix
from .mesh import Mesh, element_geometry, general_mesh, load_mesh, save_mesh, uniform_mesh
from .monotone import MmatrixReport, check_m_matrix, dmp_test, inverse_nonnegative_oracle
from .problem import (ProblemSpec, builtin_problem, constant_coefficient,
                      effective_coefficient, sample_center)
from .quadparams import QuadParams, admissible, select_lambda
from .reference import local_stiffness, mixed_rule_1d, tensor_rule
from .solve import SolveResult, cg_solve, dense_solve, solve_system

__all__ = [
    "AssembledSystem", "ConvergenceTable", "MeshConditionReport", "Mesh", "MmatrixReport",
    "ProblemSpec", "QuadParams", "SolveResult", "admissible", "apply_dirichlet", "assemble",
    "builtin_problem", "cg_solve", "check_m_matrix", "constant_coefficient", "convergence_study",
    "dense_solve", "dmp_test", "effective_coefficient", "element_geometry", "export_matrix",
    "general_mesh", "inverse_nonnegative_oracle", "load_mesh", "local_stiffness",
    "mesh_condition_check", "mixed_rule_1d", "nodal_errors", "recommend_aspect_ratio",
    "sample_center", "save_mesh", "select_lambda", "solve_system", "tensor_rule", "uniform_mesh",
]
