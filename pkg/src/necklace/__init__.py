"""Floquet spectra, bound states and Klein-Gordon breathers on the periodic necklace graph."""
from .errors import BracketError, ConfigurationError, ConvergenceError, NecklaceError, SimulationError
from .floquet import classify, floquet_exponent, monodromy, monodromy_by_integration, trace_formula, trace_of_lambda
from .geometry import DEFAULT_DX, Geometry, GraphProfile, Layout, kirchhoff_residual
from .homoclinic import BoundState, find_bound_state, reversibility_residual, shoot
from .kernels import BACKEND
from .modes import ModeStack, convolve3, residual, slaving_report, solve_bvp
from .simulate import BreatherDiagnostics, SimState, run_breather, step, synthesize_initial
from .spectrum import rationality_check, scan_bands, validate_frequency

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BoundState",
    "BracketError",
    "BreatherDiagnostics",
    "ConfigurationError",
    "ConvergenceError",
    "DEFAULT_DX",
    "Geometry",
    "GraphProfile",
    "Layout",
    "ModeStack",
    "NecklaceError",
    "SimState",
    "SimulationError",
    "classify",
    "convolve3",
    "find_bound_state",
    "floquet_exponent",
    "kirchhoff_residual",
    "monodromy",
    "monodromy_by_integration",
    "rationality_check",
    "residual",
    "reversibility_residual",
    "run_breather",
    "scan_bands",
    "shoot",
    "slaving_report",
    "solve_bvp",
    "step",
    "synthesize_initial",
    "trace_formula",
    "trace_of_lambda",
    "validate_frequency",
]
