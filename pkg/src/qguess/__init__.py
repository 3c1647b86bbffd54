"""Guesswork and state discrimination for finite quantum ensembles."""

from .bounds import bound_suite, entropy_pack, holevo_chi, subentropy
from .criteria import check_no_measurement, equal_probability_pairs
from .ensembles import Ensemble, Povm, channel, posterior, random_ensemble, random_povm
from .errors import DegenerateOutcomeError, QGuessError, RecoveryError, SolverError, ValidationError
from .guesswork import (conditional_error, conditional_guesswork, error_probability, guesswork,
                        optimal_strategy)
from .linalg import eig, is_psd, loewner_leq
from .sdp import certify, helstrom_error, recover_povm, solve_med, solve_mgd
from .search import search_general, search_qubit
from .symmetric import (GeoUniformSpec, UnitaryGroup, check_symmetric_optimality, generate_ensemble,
                        generate_povm, minimize_rank_one, rotation_y)

__all__ = [
    "DegenerateOutcomeError", "Ensemble", "GeoUniformSpec", "Povm", "QGuessError", "RecoveryError",
    "SolverError", "UnitaryGroup", "ValidationError", "bound_suite", "certify", "channel",
    "check_no_measurement", "check_symmetric_optimality", "conditional_error",
    "conditional_guesswork", "eig", "entropy_pack", "equal_probability_pairs", "error_probability",
    "generate_ensemble", "generate_povm", "guesswork", "helstrom_error", "holevo_chi", "is_psd",
    "loewner_leq", "minimize_rank_one", "optimal_strategy", "posterior", "random_ensemble",
    "random_povm", "recover_povm", "rotation_y", "search_general", "search_qubit", "solve_med",
    "solve_mgd", "subentropy",
]

__version__ = "0.1.0"
