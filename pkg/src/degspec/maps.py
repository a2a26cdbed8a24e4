"""Rational self-map descriptors: monomial maps, polynomial maps on P^k, matrix actions."""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from sympy.polys.domains import ZZ
from sympy.polys.rings import PolyElement, ring

from .errors import (CapabilityError, DimensionError, IngestionError, NonDominantError,
                     ParameterError)
from .exact import QMatrix, as_fraction
from .intersection import VarietyModel, model_from_dict

# -- monomial maps ----------------------------------------------------------


@dataclass(frozen=True)
class MonomialMap:
    """Torus map x_i -> prod_j x_j^A[i][j], viewed on (P^1)^k ("p1k") or P^k ("pk")."""
    A: tuple[tuple[int, ...], ...]
    space: str = "p1k"

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in r) for r in self.A)
        object.__setattr__(self, "A", rows)
        if not rows or any(len(r) != len(rows) for r in rows):
            raise DimensionError("exponent matrix must be square and non-empty")
        if self.space not in ("p1k", "pk"):
            raise ParameterError(f"unknown space {self.space!r}; use 'p1k' or 'pk'")
        if _int_det(rows) == 0:
            raise NonDominantError("exponent matrix is singular: the monomial map is not dominant")

    @property
    def k(self) -> int:
        return len(self.A)

    @property
    def det(self) -> int:
        return _int_det(self.A)

    def matrix(self) -> QMatrix:
        return QMatrix(self.A)

    def power(self, n: int) -> "MonomialMap":
        return MonomialMap(_int_matrix(self.matrix() ** n), self.space)

    def inverse(self) -> "MonomialMap":
        if abs(self.det) != 1:
            raise ParameterError("only unimodular monomial maps have monomial inverses")
        return MonomialMap(_int_matrix(self.matrix().inverse()), self.space)


def _int_det(rows) -> int:
    d = QMatrix(rows).det()
    return int(d)


def _int_matrix(m: QMatrix) -> tuple[tuple[int, ...], ...]:
    if any(v.denominator != 1 for v in m.entries):
        raise ParameterError("matrix is not integral")
    return tuple(tuple(int(v) for v in m.row(i)) for i in range(m.rows))


def _exponents(A) -> tuple[tuple[int, ...], ...]:
    if isinstance(A, MonomialMap):
        return A.A
    if isinstance(A, QMatrix):
        return _int_matrix(A)
    return MonomialMap(A).A


def monomial_action_p1k(A, p: int) -> QMatrix:
    """Matrix of f^* on N^p((P^1)^k) for p in {0, 1, k}, acting on coordinate columns.

    For p = 1 the column of h_i is (|A_i1|, ..., |A_ik|): the i-th factor of
    f is x^{A_i}, whose degree in the j-th variable is |A_ij|.
    """
    rows = _exponents(A)
    k = len(rows)
    det = _int_det(rows)
    if det == 0:
        raise NonDominantError("exponent matrix is singular")
    if p == 0:
        return QMatrix.identity(1)
    if p == k:
        return QMatrix([[abs(det)]])
    if p == 1:
        return QMatrix(rows).abs().transpose()
    raise CapabilityError(f"pullback on N^{p} of (P^1)^{k} needs mixed volumes; only p in {{1, k}}")


def monomial_iterate_action(A, n: int, p: int) -> QMatrix:
    """Action of the n-th iterate, read off from the exponent matrix A^n."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    rows = _exponents(A)
    return monomial_action_p1k(QMatrix(rows) ** n, p)


def monomial_degree_pk(A) -> int:
    """Algebraic degree of the monomial map on P^k after homogenisation."""
    rows = _exponents(A)
    k = len(rows)
    if _int_det(rows) == 0:
        raise NonDominantError("exponent matrix is singular")
    # component 0 is x_0^0; component i is x_0^{-sum A_i} * x^{A_i}
    vectors = [(0,) * (k + 1)] + [(-sum(r),) + tuple(r) for r in rows]
    shift = [max(0, -min(v[j] for v in vectors)) for j in range(k + 1)]
    shifted = [[v[j] + shift[j] for j in range(k + 1)] for v in vectors]
    common = [min(v[j] for v in shifted) for j in range(k + 1)]
    degrees = {sum(v[j] - common[j] for j in range(k + 1)) for v in shifted}
    assert len(degrees) == 1, degrees
    return degrees.pop()


# -- polynomial maps on P^k --------------------------------------------------


@functools.lru_cache(maxsize=None)
def _ring(nvars: int):
    names = ",".join(f"x{i}" for i in range(nvars))
    R, *gens = ring(names, ZZ)
    return R, tuple(gens)


def _tdeg(p: PolyElement) -> int:
    return max((sum(m) for m in p.itermonoms()), default=0)


def _monomial_content(polys: Sequence[PolyElement], nvars: int) -> tuple[int, ...]:
    exps = [m for p in polys for m in p.itermonoms()]
    return tuple(min(e[i] for e in exps) for i in range(nvars))


class PolyMap:
    """Rational self-map of P^k given by k+1 homogeneous integer polynomials.

    Instances are always reduced: the components share no non-constant
    common factor, their integer content is 1 and the first coefficient
    (in the ring's term order) of the first component is positive.
    """

    __slots__ = ("k", "_polys")

    def __init__(self, components: Sequence, nvars: int | None = None):
        if not components:
            raise DimensionError("a polynomial map needs components")
        nvars = len(components) if nvars is None else nvars
        if nvars != len(components):
            raise DimensionError(f"{len(components)} components for {nvars} variables")
        R, _ = _ring(nvars)
        polys = []
        for comp in components:
            if isinstance(comp, PolyElement):
                polys.append(R(comp))
                continue
            terms = comp.items() if isinstance(comp, Mapping) else comp
            d = {}
            for exps, coef in terms:
                exps = tuple(int(e) for e in exps)
                if len(exps) != nvars or min(exps) < 0:
                    raise DimensionError(f"bad exponent tuple {exps}")
                c = as_fraction(coef)
                if c.denominator != 1:
                    raise ParameterError("polynomial coefficients must be integers")
                d[exps] = d.get(exps, 0) + int(c)
            polys.append(R({e: c for e, c in d.items() if c}))
        self.k = nvars - 1
        self._polys = _reduce(polys, nvars)

    @classmethod
    def _wrap(cls, polys: tuple, nvars: int) -> "PolyMap":
        obj = cls.__new__(cls)
        obj.k = nvars - 1
        obj._polys = polys
        return obj

    @property
    def nvars(self) -> int:
        return self.k + 1

    @property
    def polys(self) -> tuple[PolyElement, ...]:
        return self._polys

    @property
    def components(self) -> tuple[dict, ...]:
        return tuple(dict(p.items()) for p in self._polys)

    @property
    def degree(self) -> int:
        return _tdeg(self._polys[0])

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyMap):
            return NotImplemented
        return self.k == other.k and self._polys == other._polys

    def __hash__(self) -> int:
        return hash(tuple(frozenset(p.items()) for p in self._polys))

    def __repr__(self) -> str:
        return f"PolyMap({', '.join(str(p.as_expr()) for p in self._polys)})"

    def __matmul__(self, other: "PolyMap") -> "PolyMap":
        return compose_polymap(self, other)

    @classmethod
    def identity(cls, k: int) -> "PolyMap":
        _, gens = _ring(k + 1)
        return cls(list(gens))

    @classmethod
    def linear(cls, matrix) -> "PolyMap":
        m = matrix if isinstance(matrix, QMatrix) else QMatrix(matrix)
        if not m.is_square:
            raise DimensionError("linear map needs a square matrix")
        n = m.rows
        comps = []
        for i in range(n):
            comps.append({tuple(int(t == j) for t in range(n)): m[i, j] for j in range(n) if m[i, j]})
        return cls(comps)

    @classmethod
    def cremona(cls) -> "PolyMap":
        """Standard quadratic involution (yz : xz : xy) of the plane."""
        return cls([{(0, 1, 1): 1}, {(1, 0, 1): 1}, {(1, 1, 0): 1}])

    def linear_matrix(self) -> QMatrix:
        if self.degree != 1:
            raise ParameterError("map is not linear")
        n = self.nvars
        unit = [tuple(int(t == j) for t in range(n)) for j in range(n)]
        return QMatrix([[int(p.get(e, 0)) for e in unit] for p in self._polys])

    def linear_inverse(self) -> "PolyMap":
        """Inverse of an invertible linear map (adjugate, so coefficients stay integral)."""
        m = self.linear_matrix()
        det = m.det()
        if det == 0:
            raise ParameterError("linear map is not invertible")
        return PolyMap.linear(m.inverse().scale(det))


def _normalise_content(polys: list[PolyElement]) -> list[PolyElement]:
    g = 0
    for p in polys:
        for c in p.itercoeffs():
            g = math.gcd(g, int(c))
    if g > 1:
        polys = [p.quo_ground(g) for p in polys]
    lead = polys[0].LC
    if lead < 0:
        polys = [-p for p in polys]
    return polys


def _reduce(polys: list[PolyElement], nvars: int) -> tuple[PolyElement, ...]:
    if any(not p for p in polys):
        raise NonDominantError("a component vanishes identically: the map is not dominant")
    degs = set()
    for p in polys:
        ds = {sum(m) for m in p.itermonoms()}
        if len(ds) != 1:
            raise ParameterError("components must be homogeneous")
        degs |= ds
    if len(degs) != 1:
        raise ParameterError(f"components have different degrees {sorted(degs)}")
    R, _ = _ring(nvars)
    content = _monomial_content(polys, nvars)
    if any(content):
        polys = [R({tuple(a - b for a, b in zip(m, content)): c for m, c in p.items()}) for p in polys]
    g = polys[0]
    for p in polys[1:]:
        if _tdeg(g) == 0:
            break
        g = g.gcd(p)
    if _tdeg(g) > 0:
        quotients = [p.exquo(g) for p in polys]
        # divide-back check: never let a wrong gcd corrupt a degree
        if any(q * g != p for q, p in zip(quotients, polys)):
            raise ArithmeticError("polynomial gcd failed the divide-back check")
        polys = quotients
    return tuple(_normalise_content(list(polys)))


def compose_polymap(f: PolyMap, g: PolyMap) -> PolyMap:
    """f o g, reduced by monomial content and then by the full polynomial gcd."""
    if f.k != g.k:
        raise DimensionError(f"cannot compose maps of P^{f.k} and P^{g.k}")
    _, gens = _ring(f.nvars)
    subs = list(zip(gens, g.polys))
    raw = [p.compose(subs) for p in f.polys]
    return PolyMap._wrap(_reduce(raw, f.nvars), f.nvars)


def polymap_degree(f: PolyMap) -> int:
    return f.degree


def polymap_iterates(f: PolyMap, n_max: int) -> list[PolyMap]:
    """[f, f^2, ..., f^n_max] by repeated composition f^n = f o f^(n-1)."""
    out = [f]
    for _ in range(n_max - 1):
        out.append(compose_polymap(f, out[-1]))
    return out


# -- matrix actions --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MatrixAction:
    """User-asserted matrices M_p of f^* on N^p of a model."""
    model: VarietyModel
    matrices: Mapping[int, QMatrix]
    asserted_1_stable: bool = False
    asserted_cone_preserving: Mapping[int, bool] = field(default_factory=dict)

    def __post_init__(self):
        for p, m in self.matrices.items():
            if not 0 <= p <= self.model.dim:
                raise DimensionError(f"codimension {p} outside [0, {self.model.dim}]")
            r = self.model.ranks[p]
            if m.shape != (r, r):
                raise DimensionError(f"M_{p} has shape {m.shape}, N^{p}({self.model.name}) has rank {r}")

    def action(self, p: int) -> QMatrix:
        if p not in self.matrices:
            raise CapabilityError(f"no matrix declared for codimension {p}")
        return self.matrices[p]


def load_matrix_action(model: VarietyModel, doc) -> MatrixAction:
    """Validate a matrix-action document against a model.

    Does not check the stability or cone assertions; the dynamics and
    theorem-check modules test those.
    """
    if isinstance(doc, str):
        import json
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise IngestionError(f"line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, Mapping) or "M" not in doc:
        raise IngestionError("matrix action needs an 'M' object")
    try:
        matrices = {int(p): QMatrix(rows) for p, rows in doc["M"].items()}
        cone = {int(p): bool(v) for p, v in doc.get("asserted_cone_preserving", {}).items()}
        stable = bool(doc.get("asserted_1_stable", False))
    except (TypeError, ValueError, ZeroDivisionError, AttributeError) as exc:
        if isinstance(exc, DimensionError):
            raise
        raise IngestionError(f"malformed matrix action: {exc!r}") from exc
    return MatrixAction(model, matrices, stable, cone)


def map_from_dict(doc: Mapping):
    """Build a map descriptor from its JSON document."""
    if not isinstance(doc, Mapping):
        raise IngestionError("map document must be an object")
    kind = doc.get("type")
    try:
        if kind == "monomial":
            return MonomialMap(doc["A"], doc.get("space", "p1k"))
        if kind == "polynomial":
            comps = [[(t["exps"], t["coef"]) for t in comp] for comp in doc["components"]]
            return PolyMap(comps, int(doc.get("vars", len(comps))))
        if kind == "matrix_action":
            return load_matrix_action(model_from_dict(doc["model"]), doc)
    except (KeyError, TypeError) as exc:
        raise IngestionError(f"malformed {kind} map: {exc!r}") from exc
    raise IngestionError(f"unknown map type {kind!r}")


def map_to_dict(f) -> dict:
    from .intersection import model_to_dict
    from .exact import fraction_str

    if isinstance(f, MonomialMap):
        return {"type": "monomial", "A": [list(r) for r in f.A], "space": f.space}
    if isinstance(f, PolyMap):
        return {"type": "polynomial", "vars": f.nvars,
                "components": [[{"exps": list(e), "coef": int(c)} for e, c in sorted(p.items())]
                               for p in f.polys]}
    if isinstance(f, MatrixAction):
        return {"type": "matrix_action", "model": model_to_dict(f.model),
                "M": {str(p): [[fraction_str(v) for v in r] for r in m.tolist()]
                      for p, m in sorted(f.matrices.items())},
                "asserted_1_stable": f.asserted_1_stable,
                "asserted_cone_preserving": {str(p): v for p, v in f.asserted_cone_preserving.items()}}
    raise TypeError(type(f).__name__)
