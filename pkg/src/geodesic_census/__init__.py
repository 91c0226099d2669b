"""Closed-geodesic censuses on hyperbolic surfaces.

Enumerates directed conjugacy classes of surface and free groups, attaches
geodesic lengths through Fuchsian matrix representations, estimates the
thermodynamic constants h, A, sigma^2, D, A_tilde from pressure functions
(exact transfer-matrix spectra or census orbit sums), and checks counting
and limit-theorem statistics against those constants by direct counting.
"""

from .census import (Census, GeodesicRecord, build_census,
                     build_census_from_system, certify_cutoff,
                     dedupe_classes, load_census, save_census)
from .hyperbolic import (FuchsianRep, MoebiusMatrix, octagon_representation,
                         schottky_representation, translation_length,
                         verify_representation, evaluate_word)
from .thermo import (MarkovChainSystem, PressureEvaluator, ThermoConstants,
                     equilibrium_mean_roof, eta_partial, periodic_point_sum,
                     solve_entropy, solve_sigma, thermo_constants)
from .words import (ConjugacyClass, CyclicWord, IDENTITY, Letter,
                    SurfacePresentation, Word, canonical_form, cyclic_reduce,
                    dehn_reduce_cyclic, dehn_reduce_word, enumerate_classes,
                    free_reduce, is_primitive)

__version__ = "0.1.0"

__all__ = [
    "Census", "GeodesicRecord", "build_census", "build_census_from_system",
    "certify_cutoff", "dedupe_classes", "load_census", "save_census",
    "FuchsianRep", "MoebiusMatrix", "octagon_representation",
    "schottky_representation", "translation_length", "verify_representation",
    "evaluate_word",
    "MarkovChainSystem", "PressureEvaluator", "ThermoConstants",
    "equilibrium_mean_roof", "eta_partial", "periodic_point_sum",
    "solve_entropy", "solve_sigma", "thermo_constants",
    "ConjugacyClass", "CyclicWord", "IDENTITY", "Letter",
    "SurfacePresentation", "Word", "canonical_form", "cyclic_reduce",
    "dehn_reduce_cyclic", "dehn_reduce_word", "enumerate_classes",
    "free_reduce", "is_primitive",
    "__version__",
]
