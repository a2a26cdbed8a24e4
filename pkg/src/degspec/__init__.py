"""Exact intersection models, degree growth of rational maps and spectral-gap checks."""
from .errors import (CapabilityError, DegspecError, DimensionError, IngestionError, ModelDataError,
                     ModelSpecError, NonDominantError, NotAmpleError, ParameterError)
from .exact import (QMatrix, QPolynomial, SpectrumEntry, charpoly, compound_matrix, eigen_spectrum,
                    spectral_radius)
from .intersection import (CycleClass, VarietyModel, blowdown_pushforward, blowup_pullback,
                           cone_contains, cup, degree, degree0, exceptional_class, fiber_class,
                           hodge_signature, load_model, model_from_dict, model_to_dict, norm1,
                           psef_difference)
from .models import builtin_catalog, make_model
from .maps import (MatrixAction, MonomialMap, PolyMap, compose_polymap, load_matrix_action,
                   map_from_dict, map_to_dict, monomial_action_p1k, monomial_degree_pk,
                   polymap_degree)
from .dynamics import (DegreeSequence, FeketeEstimate, conjugation_invariance_check,
                       degree_inequalities, degree_sequence, fekete_estimate, stability_check)
from .theorems import (cone_preservation_check, r1_squared_vs_r2, spectral_gap_for_map,
                       spectral_gap_report, threefold_duality_check)

__all__ = [
    "CapabilityError",
    "DegspecError",
    "DimensionError",
    "IngestionError",
    "ModelDataError",
    "ModelSpecError",
    "NonDominantError",
    "NotAmpleError",
    "ParameterError",
    "QMatrix",
    "QPolynomial",
    "SpectrumEntry",
    "charpoly",
    "compound_matrix",
    "eigen_spectrum",
    "spectral_radius",
    "CycleClass",
    "VarietyModel",
    "blowdown_pushforward",
    "blowup_pullback",
    "cone_contains",
    "cup",
    "degree",
    "degree0",
    "exceptional_class",
    "fiber_class",
    "hodge_signature",
    "load_model",
    "model_from_dict",
    "model_to_dict",
    "norm1",
    "psef_difference",
    "builtin_catalog",
    "make_model",
    "MatrixAction",
    "MonomialMap",
    "PolyMap",
    "compose_polymap",
    "load_matrix_action",
    "map_from_dict",
    "map_to_dict",
    "monomial_action_p1k",
    "monomial_degree_pk",
    "polymap_degree",
    "DegreeSequence",
    "FeketeEstimate",
    "conjugation_invariance_check",
    "degree_inequalities",
    "degree_sequence",
    "fekete_estimate",
    "stability_check",
    "cone_preservation_check",
    "r1_squared_vs_r2",
    "spectral_gap_for_map",
    "spectral_gap_report",
    "threefold_duality_check",
]

__version__ = "0.1.0"
