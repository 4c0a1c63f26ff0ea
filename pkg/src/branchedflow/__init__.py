"""Branched transport with group-valued chains: masses, calibrations, trees and graph solvers."""

from .calibration import (CalibrationReport, Certificate, ConstantForm, certify, check_calibration,
                          comass, comass_estimate)
from .chains import (PolyChain, Segment, ZeroChain, boundary, canonicalize, coordinate_projection,
                     gs_energy, mass, pushforward)
from .convert import RescaleContext, collapse, collapse_rescaled, lift, lift_rescaled
from .decompose import PathDecomposition, decompose, strip_cycles
from .norms import AlphaParam, alpha_norm, dual_norm
from .oracle import (LimitsExceeded, OracleInstance, oracle_min, perturbed_competitor, random_competitor,
                     random_instance)
from .solver import FlowProblem, FlowSolution, SolverParams, dual_certificate, solve
from .tree import TreeSpec, build_tree, lift_tree, tree_calibration, tree_energy, tree_mass

__all__ = [
    "AlphaParam", "alpha_norm", "dual_norm",
    "Segment", "ZeroChain", "PolyChain", "boundary", "canonicalize", "coordinate_projection",
    "gs_energy", "mass", "pushforward",
    "PathDecomposition", "decompose", "strip_cycles",
    "RescaleContext", "lift", "collapse", "lift_rescaled", "collapse_rescaled",
    "ConstantForm", "CalibrationReport", "Certificate", "comass", "comass_estimate",
    "check_calibration", "certify",
    "TreeSpec", "build_tree", "lift_tree", "tree_calibration", "tree_energy", "tree_mass",
    "FlowProblem", "FlowSolution", "SolverParams", "solve", "dual_certificate",
    "OracleInstance", "LimitsExceeded", "oracle_min", "random_competitor", "perturbed_competitor", "random_instance",
]
