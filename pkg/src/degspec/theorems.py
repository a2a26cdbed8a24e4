"""Verdicts on the spectral-gap theorems for concrete actions.

The theorems are conditionals, so a check never "tests the theorem" in
isolation. It classifies an input as

* PASS: hypotheses hold (or are asserted) and the conclusion holds;
* CONCLUSION_VIOLATED: hypotheses asserted but the conclusion fails,
  i.e. the asserted data are mutually inconsistent;
* NOT_APPLICABLE: the gap hypothesis r1^2 > r2 fails;
* INDETERMINATE: a modulus sits inside the tolerance band of the
  threshold, so the comparison cannot be decided numerically.

Simplicity is decided exactly (square-free multiplicities); only modulus
comparisons use a tolerance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping

from .errors import CapabilityError, DimensionError, ParameterError
from .exact import (DEFAULT_TOL, QMatrix, SpectrumEntry, compound_matrix, eigen_spectrum,
                    spectral_radius, tagged_decimal)
from .intersection import CycleClass, cone_contains
from .maps import MatrixAction, MonomialMap

PASS = "PASS"
CONCLUSION_VIOLATED = "CONCLUSION_VIOLATED"
NOT_APPLICABLE = "NOT_APPLICABLE"
INDETERMINATE = "INDETERMINATE"

DEFAULT_BAND = 1e-6


def _near(x: float, t: float, band: float) -> bool:
    return abs(x - t) <= band * max(abs(x), abs(t))




@dataclass(frozen=True)
class SpectralReport:
    r1: float
    spectrum: tuple[SpectrumEntry, ...]
    r2: float
    sqrt_r2: float
    hypothesis_status: Mapping[str, str]
    verdict: str
    details: str
    tol: float = DEFAULT_TOL
    band: float = DEFAULT_BAND

    def to_dict(self) -> dict:
        return {
            "r1": tagged_decimal(self.r1, self.tol),
            "spectrum": [{"modulus": tagged_decimal(e.modulus, self.tol), "multiplicity": e.multiplicity}
                         for e in self.spectrum],
            "r2": tagged_decimal(self.r2, self.tol),
            "verdict": self.verdict,
            "hypotheses": dict(self.hypothesis_status),
            "details": self.details,
            "band": f"{self.band:g}",
        }


def spectral_gap_report(m1: QMatrix, r2: float | None = None, m2: QMatrix | None = None,
                        tol: float = DEFAULT_TOL, band: float = DEFAULT_BAND,
                        hypotheses: Mapping[str, str] | None = None) -> SpectralReport:
    """Check "r1 is simple and the only eigenvalue of modulus > sqrt(r2)" for M1.

    Give either ``r2`` (e.g. a known second dynamical degree) or ``m2``,
    the matrix on N^2 whose spectral radius is used.
    """
    if not m1.is_square:
        raise DimensionError("M1 must be square")
    if (r2 is None) == (m2 is None):
        raise ParameterError("give exactly one of r2 and M2")
    if m2 is not None:
        if not m2.is_square:
            raise DimensionError("M2 must be square")
        r2 = spectral_radius(m2, tol)
    r2 = float(r2)
    if r2 < 0 or math.isnan(r2):
        raise ParameterError(f"r2 must be nonnegative, got {r2}")
    if not band > 0:
        raise ParameterError(f"band must be positive, got {band}")
    spectrum = tuple(eigen_spectrum(m1, tol))
    r1 = spectrum[0].modulus
    sqrt_r2 = math.sqrt(r2)
    status = dict(hypotheses or {"1_stable": "unchecked"})

    if r1 * r1 <= r2 * (1 + band):
        status["gap"] = "failed"
        verdict, details = NOT_APPLICABLE, f"r1^2 = {r1 * r1:.12g} <= r2 = {r2:.12g}"
    else:
        status["gap"] = "verified"
        near = [e for e in spectrum if _near(e.modulus, sqrt_r2, band)]
        above = [e for e in spectrum if e.modulus > sqrt_r2 and e not in near]
        count = sum(e.multiplicity for e in above)
        dominant = spectrum[0]
        if near:
            verdict = INDETERMINATE
            details = (f"{len(near)} eigenvalue modulus/moduli within the band of "
                       f"sqrt(r2) = {sqrt_r2:.12g}")
        elif count == 1:
            verdict = PASS
            details = (f"r1 = {r1:.12g} is simple and the only modulus above "
                       f"sqrt(r2) = {sqrt_r2:.12g}")
            if dominant.approx_value.real < 0:
                details += "; note: the dominant eigenvalue is negative"
        else:
            verdict = CONCLUSION_VIOLATED
            details = (f"{count} eigenvalues (with multiplicity) of modulus above "
                       f"sqrt(r2) = {sqrt_r2:.12g}; dominant multiplicity {dominant.multiplicity}")
    return SpectralReport(r1, spectrum, r2, sqrt_r2, status, verdict, details, tol, band)


@dataclass(frozen=True)
class ConeCheck:
    p: int
    verified: bool
    witness: CycleClass | None = None
    image: CycleClass | None = None

    def to_dict(self) -> dict:
        out = {"p": self.p, "status": "verified" if self.verified else "failed"}
        if self.witness is not None:
            out["witness"] = repr(self.witness)
            out["image"] = repr(self.image)
        return out


def cone_preservation_check(action: MatrixAction, p: int) -> ConeCheck:
    """Does M_p map every listed effective generator back into the cone?"""
    model = action.model
    m = action.action(p)
    for g in model.generators(p):
        image = CycleClass(model, p, m.apply(g))
        if not cone_contains(model, p, image):
            return ConeCheck(p, False, CycleClass(model, p, g), image)
    return ConeCheck(p, True)


@dataclass(frozen=True)
class GapInequalityReport:
    r1: float
    r2: float
    cone_ok: bool
    holds: bool
    verdict: str
    tol: float

    def to_dict(self) -> dict:
        return {"r1": tagged_decimal(self.r1, DEFAULT_TOL), "r2": tagged_decimal(self.r2, DEFAULT_TOL),
                "r1_squared": tagged_decimal(self.r1 ** 2, DEFAULT_TOL),
                "cone_ok": self.cone_ok, "holds": self.holds, "verdict": self.verdict,
                "slack": f"{self.tol:g}"}


def r1_squared_vs_r2(m1: QMatrix, m2: QMatrix, cone_ok: bool, tol: float = DEFAULT_BAND,
                     model=None) -> GapInequalityReport:
    """r1^2 >= r2 whenever f^* preserves the effective cone of N^2."""
    if not (m1.is_square and m2.is_square):
        raise DimensionError("M1 and M2 must be square")
    if model is not None and (m1.rows != model.ranks[1] or m2.rows != model.ranks[2]):
        raise DimensionError(f"matrices do not match the ranks of {model.name}")
    r1 = spectral_radius(m1, min(tol, DEFAULT_TOL))
    r2 = spectral_radius(m2, min(tol, DEFAULT_TOL))
    holds = r1 * r1 >= r2 - tol
    if not cone_ok:
        verdict = NOT_APPLICABLE
    else:
        verdict = PASS if holds else CONCLUSION_VIOLATED
    return GapInequalityReport(r1, r2, bool(cone_ok), holds, verdict, tol)


@dataclass(frozen=True)
class DualityReport:
    lambda1: float
    lambda2: float
    lambda1_inverse: float
    lambda2_inverse: float
    duality_error: float
    duality_holds: bool
    f_has_gap: bool
    inverse_has_gap: bool
    dichotomy_holds: bool
    tol: float = DEFAULT_TOL
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def holds(self) -> bool:
        return self.duality_holds and self.dichotomy_holds

    def to_dict(self) -> dict:
        t = self.tol
        return {"lambda1": tagged_decimal(self.lambda1, t), "lambda2": tagged_decimal(self.lambda2, t),
                "lambda1_inverse": tagged_decimal(self.lambda1_inverse, t),
                "lambda2_inverse": tagged_decimal(self.lambda2_inverse, t),
                "duality_error": tagged_decimal(self.duality_error, t), "duality_holds": self.duality_holds,
                "f_has_gap": self.f_has_gap, "inverse_has_gap": self.inverse_has_gap,
                "dichotomy_holds": self.dichotomy_holds, "notes": list(self.notes)}


def threefold_duality_check(A, tol: float = DEFAULT_TOL, rtol: float = 1e-5,
                            band: float = DEFAULT_BAND) -> DualityReport:
    """lambda_1(f^-1) = lambda_2(f) for a birational monomial map of a threefold.

    Dynamical degrees of the monomial map of A are the spectral radii of the
    compounds of A; the inverse map has exponent matrix A^-1.
    """
    f = A if isinstance(A, MonomialMap) else MonomialMap(A)
    if f.k != 3:
        raise ParameterError("duality check is for 3x3 exponent matrices")
    if abs(f.det) != 1:
        raise ParameterError(f"|det A| = {abs(f.det)} != 1: the map is not birational")
    a = f.matrix()
    a_inv = a.inverse()
    l1 = spectral_radius(a, tol)
    l2 = spectral_radius(compound_matrix(a, 2), tol)
    l1_inv = spectral_radius(a_inv, tol)
    l2_inv = spectral_radius(compound_matrix(a_inv, 2), tol)
    err = max(abs(l1_inv - l2) / max(l1_inv, l2), abs(l2_inv - l1) / max(l2_inv, l1))
    f_gap = l1 * l1 > l2 + band
    inv_gap = l1_inv * l1_inv > l2_inv + band
    notes = []
    if l1 > 1 + band:
        dichotomy = f_gap or inv_gap
    else:
        dichotomy = True
        notes.append("lambda1 <= 1: dichotomy is vacuous")
    return DualityReport(l1, l2, l1_inv, l2_inv, err, err <= rtol, f_gap, inv_gap, dichotomy,
                         tol, tuple(notes))


# -- map-level drivers -----------------------------------------------------


def _stability_status(source, n_max: int) -> tuple[str, str]:
    from .dynamics import stability_check

    if isinstance(source, MatrixAction):
        return ("asserted", "") if source.asserted_1_stable else ("unasserted", "")
    if isinstance(source, MonomialMap) and source.space == "pk":
        from .maps import monomial_degree_pk
        d = monomial_degree_pk(source.A)
        a = source.matrix()
        for n in range(2, n_max + 1):
            if monomial_degree_pk(a ** n) != d ** n:
                return "failed", f"deg(f^{n}) != deg(f)^{n}"
        return f"verified up to n={n_max}", ""
    res = stability_check(source, 1, n_max)
    if res.stable:
        return f"verified up to n={n_max}", ""
    return "failed", f"first failure at n={res.first_failure}"


def _first_action(source) -> QMatrix:
    from .maps import PolyMap, monomial_action_p1k, monomial_degree_pk

    if isinstance(source, MonomialMap):
        if source.space == "pk":
            return QMatrix([[monomial_degree_pk(source.A)]])
        return monomial_action_p1k(source.A, 1)
    if isinstance(source, PolyMap):
        return QMatrix([[source.degree]])
    if isinstance(source, MatrixAction):
        return source.action(1)
    raise CapabilityError(f"unsupported source {type(source).__name__}")


def _lambda2(source, tol: float) -> float:
    from .maps import PolyMap

    if isinstance(source, MonomialMap):
        return spectral_radius(compound_matrix(source.matrix(), 2), tol)
    if isinstance(source, MatrixAction) and 2 in source.matrices:
        return spectral_radius(source.action(2), tol)
    if isinstance(source, PolyMap):
        raise CapabilityError("r2 is not computable for a polynomial map; pass it explicitly")
    raise CapabilityError("r2 needs an N^2 matrix or an explicit value")


def spectral_gap_for_map(source, r2: float | None = None, n_max: int = 20,
                         tol: float = DEFAULT_TOL, band: float = DEFAULT_BAND) -> SpectralReport:
    """Spectral-gap verdict for a map, with its stability hypothesis checked.

    r2 defaults to the second dynamical degree: the compound spectral radius
    for monomial maps, the N^2 spectral radius for a matrix action. A
    failed or unasserted stability hypothesis makes the verdict
    NOT_APPLICABLE.
    """
    if r2 is None:
        r2 = _lambda2(source, tol)
    stable, why = _stability_status(source, n_max)
    report = spectral_gap_report(_first_action(source), r2=r2, tol=tol, band=band,
                                 hypotheses={"1_stable": stable})
    if stable in ("failed", "unasserted") and report.verdict != NOT_APPLICABLE:
        details = f"1-stability {stable}{': ' + why if why else ''}; spectral data: {report.verdict}"
        report = replace(report, verdict=NOT_APPLICABLE, details=details)
    return report


def _as_action(source) -> MatrixAction:
    from .maps import monomial_action_p1k
    from .models import product_of_lines

    if isinstance(source, MatrixAction):
        return source
    if isinstance(source, MonomialMap) and source.space == "p1k":
        k = source.k
        ps = (0, 1) + ((2,) if k == 2 else ())
        return MatrixAction(product_of_lines(k), {p: monomial_action_p1k(source.A, p) for p in ps})
    raise CapabilityError("needs a matrix action or a monomial map on (P^1)^k")


def cone_checks_for_map(source, ps=None) -> list[ConeCheck]:
    action = _as_action(source)
    ps = sorted(action.matrices) if ps is None else ps
    return [cone_preservation_check(action, p) for p in ps]


def r1_squared_for_map(source, tol: float = DEFAULT_BAND) -> GapInequalityReport:
    """r1^2 >= r2 with the N^2 cone hypothesis checked against the model's generators."""
    action = _as_action(source)
    if 2 not in action.matrices:
        raise CapabilityError("needs the action on N^2")
    if action.model.cone_generators.get(2):
        cone_ok = cone_preservation_check(action, 2).verified
    else:
        cone_ok = bool(action.asserted_cone_preserving.get(2, False))
    return r1_squared_vs_r2(action.action(1), action.action(2), cone_ok, tol, action.model)
