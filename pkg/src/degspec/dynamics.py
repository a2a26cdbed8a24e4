"""Degree sequences, growth-rate estimates, stability detection and degree inequalities."""
from __future__ import annotations

import csv
import io
import math
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .errors import CapabilityError, NonDominantError, ParameterError
from .exact import QMatrix, compound_matrix, fraction_str, spectral_radius
from .intersection import CycleClass, cone_contains, cup, degree0
from .maps import (MatrixAction, MonomialMap, PolyMap, compose_polymap, monomial_action_p1k,
                   monomial_degree_pk, monomial_iterate_action, polymap_iterates)
from .models import product_of_lines

DEFAULT_NMAX_MATRIX = 20
DEFAULT_NMAX_POLY = 8


@dataclass(frozen=True)
class DegreeSequence:
    """values[n-1] = deg_p(f^n) for n = 1..n_max."""
    p: int
    source: str
    values: tuple[Fraction, ...]
    assumption_dependent: bool = False

    @property
    def n_max(self) -> int:
        return len(self.values)

    def __getitem__(self, n: int) -> Fraction:
        """1-based access: seq[n] is the value at the n-th iterate."""
        if not 1 <= n <= len(self.values):
            raise IndexError(n)
        return self.values[n - 1]


@dataclass(frozen=True)
class FeketeEstimate:
    upper_inf: float
    upper_inf_at: int
    last_root: float
    window_slope: float
    violations: tuple[tuple[int, int], ...]


def describe(source) -> str:
    if isinstance(source, MonomialMap):
        return f"monomial[{source.space}]{[list(r) for r in source.A]}"
    if isinstance(source, PolyMap):
        return repr(source)
    if isinstance(source, MatrixAction):
        return f"matrix_action[{source.model.name}]"
    return type(source).__name__


def default_nmax(source) -> int:
    return DEFAULT_NMAX_POLY if isinstance(source, PolyMap) else DEFAULT_NMAX_MATRIX


def _log(x: Fraction) -> float:
    return math.log(x.numerator) - math.log(x.denominator)


def _pullback_degree(model, action_p: QMatrix, p: int) -> Fraction:
    """deg0(M_p(w^p) . w^(k-p)) for the model's ample class w."""
    wp = model.ample_power(p)
    pulled = CycleClass(model, p, action_p.apply(wp.coords))
    return degree0(cup(pulled, model.ample_power(model.dim - p)))


def degree_sequence(source, p: int = 1, n_max: int | None = None) -> DegreeSequence:
    n_max = default_nmax(source) if n_max is None else n_max
    if n_max < 1:
        raise ParameterError(f"n_max must be >= 1, got {n_max}")
    assumption = False
    if isinstance(source, MonomialMap):
        k = source.k
        if source.space == "pk":
            if p == 1:
                values = [Fraction(monomial_degree_pk(source.matrix() ** n)) for n in range(1, n_max + 1)]
            elif p == k:
                values = [Fraction(abs(source.det) ** n) for n in range(1, n_max + 1)]
            else:
                raise CapabilityError(f"monomial maps on P^k support p in {{1, k}}, got {p}")
        else:
            if p not in (1, k):
                raise CapabilityError(f"monomial maps on (P^1)^k support p in {{1, k}}, got {p}")
            model = product_of_lines(k)
            values = [_pullback_degree(model, monomial_iterate_action(source.A, n, p), p)
                      for n in range(1, n_max + 1)]
    elif isinstance(source, PolyMap):
        if p != 1:
            raise CapabilityError("polynomial maps support p = 1 only")
        values = [Fraction(f.degree) for f in polymap_iterates(source, n_max)]
    elif isinstance(source, MatrixAction):
        m = source.action(p)
        assumption = True
        values = []
        power = QMatrix.identity(m.rows)
        for _ in range(n_max):
            power = m @ power
            values.append(_pullback_degree(source.model, power, p))
    else:
        raise CapabilityError(f"unsupported source {type(source).__name__}")
    if any(v <= 0 for v in values):
        raise NonDominantError("a degree in the sequence is not positive")
    return DegreeSequence(p, describe(source), tuple(values), assumption)


def submultiplicativity_violations(values: Sequence[Fraction]) -> tuple[tuple[int, int], ...]:
    n_max = len(values)
    return tuple((m, n) for m in range(1, n_max + 1) for n in range(m, n_max + 1 - m)
                 if values[m + n - 1] > values[m - 1] * values[n - 1])


def fekete_estimate(seq: DegreeSequence | Sequence) -> FeketeEstimate:
    values = tuple(seq.values if isinstance(seq, DegreeSequence) else seq)
    n_max = len(values)
    if n_max < 2:
        raise ParameterError("a growth estimate needs at least two terms")
    logs = [_log(Fraction(v)) for v in values]
    roots = [logs[n - 1] / n for n in range(1, n_max + 1)]
    best = min(range(n_max), key=lambda i: (roots[i], i))
    width = max(2, math.ceil(n_max / 2))
    xs = list(range(n_max - width + 1, n_max + 1))
    slope = statistics.linear_regression(xs, logs[-width:]).slope
    return FeketeEstimate(
        upper_inf=math.exp(roots[best]),
        upper_inf_at=best + 1,
        last_root=math.exp(roots[-1]),
        window_slope=math.exp(slope),
        violations=submultiplicativity_violations([Fraction(v) for v in values]),
    )


@dataclass(frozen=True)
class StabilityResult:
    p: int
    stable: bool
    checked_up_to: int
    first_failure: int | None = None


def _iterate_pairs(source, p: int, oracle) -> tuple[QMatrix, Callable[[int], QMatrix]]:
    if isinstance(source, MonomialMap):
        if source.space != "p1k":
            raise CapabilityError("stability of monomial maps is checked on (P^1)^k")
        return monomial_action_p1k(source.A, p), lambda n: monomial_iterate_action(source.A, n, p)
    if isinstance(source, PolyMap):
        if p != 1:
            raise CapabilityError("polynomial maps support p = 1 only")
        iterates = [source]

        def action(n: int) -> QMatrix:
            while len(iterates) < n:
                iterates.append(compose_polymap(source, iterates[-1]))
            return QMatrix([[iterates[n - 1].degree]])

        return QMatrix([[source.degree]]), action
    if isinstance(source, MatrixAction):
        base = source.action(p)
        if isinstance(oracle, PolyMap):
            if not source.model.name.startswith("P(") or p != 1 or oracle.k != source.model.dim:
                raise CapabilityError("a polynomial-map oracle only supplies N^1 of projective space")
            _, action = _iterate_pairs(oracle, 1, None)
            return base, action
        if oracle is None:
            raise CapabilityError("a matrix action needs an oracle for the iterate actions")
        if callable(oracle):
            return base, oracle
        seq = list(oracle)
        return base, lambda n: seq[n - 1]
    raise CapabilityError(f"unsupported source {type(source).__name__}")


def stability_check(source, p: int = 1, n_max: int = DEFAULT_NMAX_MATRIX, oracle=None) -> StabilityResult:
    """Smallest n with (f^n)^* != (f^*)^n on N^p, compared exactly.

    ``oracle`` supplies the true iterate actions for a MatrixAction: a
    PolyMap on the same projective space, a callable n -> QMatrix, or a
    sequence whose (n-1)-th item is the action of f^n.
    """
    if n_max < 1:
        raise ParameterError(f"n_max must be >= 1, got {n_max}")
    base, iterate = _iterate_pairs(source, p, oracle)
    power = QMatrix.identity(base.rows)
    for n in range(1, n_max + 1):
        power = power @ base
        if iterate(n) != power:
            return StabilityResult(p, False, n - 1, n)
    return StabilityResult(p, True, n_max)


@dataclass(frozen=True)
class InequalityRow:
    p: int
    lambda_1: float
    lambda_p: float
    lambda_p1: float
    method: str
    holds: bool


@dataclass(frozen=True)
class ClassInequality:
    n: int
    difference: tuple[Fraction, ...]
    effective: bool


@dataclass(frozen=True)
class InequalityReport:
    rows: tuple[InequalityRow, ...]
    class_checks: tuple[ClassInequality, ...] = ()
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def holds(self) -> bool:
        return all(r.holds for r in self.rows if r.method != "estimate") and all(
            c.effective for c in self.class_checks)


def monomial_dynamical_degrees(source: MonomialMap, tol: float = 1e-9) -> list[float]:
    """[lambda_0, ..., lambda_k] of a monomial map: spectral radii of the compounds of A."""
    a = source.matrix()
    return [1.0] + [spectral_radius(compound_matrix(a, p), tol) for p in range(1, source.k + 1)]


def degree_inequalities(source, n_max: int | None = None, tol: float = 1e-6,
                        estimate_rtol: float = 0.02) -> InequalityReport:
    """lambda_1 * lambda_p >= lambda_{p+1}, plus the class inequality where cones allow.

    Oracle rows (exact spectral data) gate the verdict; rows built from
    finite-n growth estimates are reported with a relative slack of
    ``estimate_rtol`` and do not gate it.
    """
    n_max = default_nmax(source) if n_max is None else n_max
    rows: list[InequalityRow] = []
    classes: list[ClassInequality] = []
    notes: list[str] = []
    if isinstance(source, MonomialMap):
        k = source.k
        lam = monomial_dynamical_degrees(source)
        for p in range(1, k):
            rows.append(InequalityRow(p, lam[1], lam[p], lam[p + 1], "oracle",
                                      lam[1] * lam[p] >= lam[p + 1] - tol))
        if source.space == "p1k" and k == 2:
            l1 = fekete_estimate(degree_sequence(source, 1, n_max)).window_slope
            l2 = fekete_estimate(degree_sequence(source, 2, n_max)).window_slope
            rows.append(InequalityRow(1, l1, l1, l2, "estimate",
                                      l1 * l1 >= l2 * (1 - estimate_rtol)))
            model = product_of_lines(2)
            for n in range(1, n_max + 1):
                m1 = monomial_iterate_action(source.A, n, 1)
                m2 = monomial_iterate_action(source.A, n, 2)
                classes.append(_class_check(model, m1, m2, 1, n))
        else:
            notes.append("class inequality needs the N^p actions; only available on (P^1)^2")
    elif isinstance(source, MatrixAction):
        ps = sorted(p for p in source.matrices if p >= 1)
        est = {p: fekete_estimate(degree_sequence(source, p, n_max)).window_slope for p in ps}
        for p in ps:
            if 1 in est and p + 1 in est:
                rows.append(InequalityRow(p, est[1], est[p], est[p + 1], "estimate",
                                          est[1] * est[p] >= est[p + 1] * (1 - estimate_rtol)))
                if p + 1 in source.model.cone_generators:
                    classes.append(_class_check(source.model, source.action(1),
                                                source.action(p + 1), p, 1, source.action(p)))
        notes.append("matrix-action sequences assume the declared stability")
    else:
        raise CapabilityError(f"degree inequalities need a monomial map or a matrix action, "
                              f"got {type(source).__name__}")
    return InequalityReport(tuple(rows), tuple(classes), tuple(notes))


def _class_check(model, m1: QMatrix, m_next: QMatrix, p: int, n: int,
                 m_p: QMatrix | None = None) -> ClassInequality:
    """f^*(w^p) . f^*(w) - f^*(w^(p+1)) in the effective cone of N^(p+1)."""
    w = model.ample_class()
    f_w = CycleClass(model, 1, m1.apply(w.coords))
    if p == 1:
        f_wp = f_w
    else:
        f_wp = CycleClass(model, p, m_p.apply(model.ample_power(p).coords))
    f_next = CycleClass(model, p + 1, m_next.apply(model.ample_power(p + 1).coords))
    diff = cup(f_wp, f_w) - f_next
    return ClassInequality(n, diff.coords, cone_contains(model, p + 1, diff))


@dataclass(frozen=True)
class ConjugationReport:
    conjugate: PolyMap
    sequence: DegreeSequence
    conjugate_sequence: DegreeSequence
    slope: float
    conjugate_slope: float
    relative_difference: float
    passed: bool


def conjugation_invariance_check(f: PolyMap, g: PolyMap, n_max: int = DEFAULT_NMAX_POLY,
                                 rtol: float = 0.02) -> ConjugationReport:
    """Compare growth of f and g o f o g^-1 for an invertible linear g."""
    if g.k != f.k:
        raise ParameterError("conjugating map lives on a different space")
    if g.degree != 1:
        raise ParameterError("conjugating map must be linear")
    g_inv = g.linear_inverse()
    h = compose_polymap(g, compose_polymap(f, g_inv))
    s_f = degree_sequence(f, 1, n_max)
    s_h = degree_sequence(h, 1, n_max)
    a = fekete_estimate(s_f).window_slope
    b = fekete_estimate(s_h).window_slope
    rel = abs(a - b) / max(a, b)
    return ConjugationReport(h, s_f, s_h, a, b, rel, rel <= rtol)


def sequence_to_csv(seq: DegreeSequence) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "value", "root"])
    for n, v in enumerate(seq.values, start=1):
        writer.writerow([n, fraction_str(v), f"{math.exp(_log(v) / n):.12g}"])
    return buf.getvalue()
