"""Finite-rank models of numerical cycle groups N^p(X).

A :class:`VarietyModel` carries, for one smooth projective variety, the
ranks of N^0..N^k, the multiplication table of the intersection product
on basis elements, the degree functional on N^k, an ample class, lists of
effective-cone generators, and optionally the push/pull data of a single
blowdown.  All arithmetic is exact.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import (CapabilityError, DimensionError, IngestionError, ModelDataError,
                     NotAmpleError)
from .exact import QMatrix, as_fraction, fraction_str
from .lp import OPTIMAL, UNBOUNDED, conic_combination, solve_lp

Coords = tuple[Fraction, ...]


def _coords(values: Sequence) -> Coords:
    return tuple(as_fraction(v) for v in values)


@dataclass(frozen=True, eq=False)
class Blowdown:
    """Single blowdown Z -> X, with Z the model carrying this record.

    ``push[p]`` maps N^p(Z) -> N^p(X) and ``pull[p]`` maps N^p(X) -> N^p(Z),
    both acting on coordinate columns.  ``fiber`` is the class of a general
    fiber of E -> W in N^{k-1}(Z); it is None when the center has
    codimension >= 3 (then the fibers are not curves).
    """
    target: "VarietyModel"
    push: Mapping[int, QMatrix]
    pull: Mapping[int, QMatrix]
    exceptional: Coords
    fiber: Coords | None
    center_codim: int
    center: Coords


@dataclass(frozen=True, eq=False)
class VarietyModel:
    name: str
    dim: int
    ranks: tuple[int, ...]
    basis_labels: tuple[tuple[str, ...], ...]
    # mult[(p, q)][i][j] = coordinates of b^p_i . b^q_j in N^{p+q}, for p, q >= 1
    mult: Mapping[tuple[int, int], tuple[tuple[Coords, ...], ...]]
    degree_functional: Coords
    ample: Coords
    cone_generators: Mapping[int, tuple[Coords, ...]] = field(default_factory=dict)
    blowdown: Blowdown | None = None

    def __repr__(self) -> str:
        return f"VarietyModel({self.name!r}, dim={self.dim}, ranks={list(self.ranks)})"

    # -- constructing classes ------------------------------------------------
    def cls(self, p: int, coords: Sequence) -> "CycleClass":
        return CycleClass(self, p, _coords(coords))

    def zero(self, p: int) -> "CycleClass":
        return CycleClass(self, p, (Fraction(0),) * self.ranks[p])

    def unit(self) -> "CycleClass":
        return CycleClass(self, 0, (Fraction(1),))

    def basis(self, p: int, i: int) -> "CycleClass":
        return CycleClass(self, p, tuple(Fraction(int(j == i)) for j in range(self.ranks[p])))

    def __getitem__(self, label: str) -> "CycleClass":
        for p, labels in enumerate(self.basis_labels):
            if label in labels:
                return self.basis(p, labels.index(label))
        raise KeyError(label)

    def ample_class(self) -> "CycleClass":
        return CycleClass(self, 1, self.ample)

    def ample_power(self, p: int) -> "CycleClass":
        out = self.unit()
        w = self.ample_class()
        for _ in range(p):
            out = cup(out, w)
        return out

    def generators(self, p: int) -> tuple[Coords, ...]:
        gens = self.cone_generators.get(p)
        if not gens:
            raise CapabilityError(f"model {self.name} lists no cone generators in codimension {p}")
        return gens

    def check_invariants(self) -> list[str]:
        """Return human-readable descriptions of every violated model invariant."""
        return _check_invariants(self)


@dataclass(frozen=True, eq=False)
class CycleClass:
    model: VarietyModel
    codim: int
    coords: Coords

    def __post_init__(self):
        k = self.model.dim
        if not 0 <= self.codim <= k:
            raise DimensionError(f"codimension {self.codim} outside [0, {k}]")
        if len(self.coords) != self.model.ranks[self.codim]:
            raise DimensionError(
                f"{len(self.coords)} coordinates for N^{self.codim} of rank {self.model.ranks[self.codim]}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, CycleClass):
            return NotImplemented
        return (self.model is other.model and self.codim == other.codim
                and self.coords == other.coords)

    def __hash__(self) -> int:
        return hash((id(self.model), self.codim, self.coords))

    def _check(self, other: "CycleClass") -> None:
        if self.model is not other.model:
            raise DimensionError("classes live on different models")
        if self.codim != other.codim:
            raise DimensionError(f"codimension mismatch {self.codim} vs {other.codim}")

    def __add__(self, other: "CycleClass") -> "CycleClass":
        self._check(other)
        return CycleClass(self.model, self.codim, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "CycleClass") -> "CycleClass":
        self._check(other)
        return CycleClass(self.model, self.codim, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "CycleClass":
        return CycleClass(self.model, self.codim, tuple(-a for a in self.coords))

    def __mul__(self, other):
        if isinstance(other, CycleClass):
            return cup(self, other)
        s = as_fraction(other)
        return CycleClass(self.model, self.codim, tuple(s * a for a in self.coords))

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, n: int) -> "CycleClass":
        out = self.model.unit()
        for _ in range(n):
            out = cup(out, self)
        return out

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __repr__(self) -> str:
        labels = self.model.basis_labels[self.codim]
        terms = [f"{c}*{lab}" for c, lab in zip(self.coords, labels) if c]
        return f"<{' + '.join(terms) or '0'} in N^{self.codim}({self.model.name})>"


def cup(u: CycleClass, v: CycleClass) -> CycleClass:
    """Intersection product, extended bilinearly from the basis table."""
    if u.model is not v.model:
        raise DimensionError("classes live on different models")
    model = u.model
    p, q = u.codim, v.codim
    if p + q > model.dim:
        raise DimensionError(f"codimension {p}+{q} exceeds dimension {model.dim}")
    if p == 0:
        return v * u.coords[0]
    if q == 0:
        return u * v.coords[0]
    table = model.mult[(p, q)]
    out = [Fraction(0)] * model.ranks[p + q]
    for i, a in enumerate(u.coords):
        if not a:
            continue
        row = table[i]
        for j, b in enumerate(v.coords):
            if not b:
                continue
            ab = a * b
            for t, c in enumerate(row[j]):
                if c:
                    out[t] += ab * c
    return CycleClass(model, p + q, tuple(out))


def degree0(u: CycleClass) -> Fraction:
    """Degree of a top-codimension class."""
    if u.codim != u.model.dim:
        raise DimensionError(f"degree0 needs codimension {u.model.dim}, got {u.codim}")
    return sum((a * b for a, b in zip(u.coords, u.model.degree_functional)), Fraction(0))


def degree(u: CycleClass) -> Fraction:
    """deg(u) = deg0(u . ample^(k-p))."""
    m = u.model
    return degree0(cup(u, m.ample_power(m.dim - u.codim)))


def _blowdown(model: VarietyModel) -> Blowdown:
    if model.blowdown is None:
        raise CapabilityError(f"model {model.name} carries no blowdown data")
    return model.blowdown


def blowdown_pushforward(u: CycleClass) -> CycleClass:
    bd = _blowdown(u.model)
    return CycleClass(bd.target, u.codim, bd.push[u.codim].apply(u.coords))


def blowup_pullback(v: CycleClass, source: VarietyModel) -> CycleClass:
    """Pull a class on the blowdown target of ``source`` back to ``source``."""
    bd = _blowdown(source)
    if v.model is not bd.target:
        raise DimensionError(f"class lives on {v.model.name}, not on {bd.target.name}")
    return CycleClass(source, v.codim, bd.pull[v.codim].apply(v.coords))


def exceptional_class(model: VarietyModel) -> CycleClass:
    return CycleClass(model, 1, _blowdown(model).exceptional)


def fiber_class(model: VarietyModel) -> CycleClass:
    bd = _blowdown(model)
    if bd.fiber is None:
        raise CapabilityError(f"blowup center of {model.name} has codimension >= 3: no curve fibers")
    return CycleClass(model, model.dim - 1, bd.fiber)


def center_class(model: VarietyModel) -> CycleClass:
    bd = _blowdown(model)
    return CycleClass(bd.target, bd.center_codim, bd.center)


def symmetric_signature(gram: Sequence[Sequence]) -> tuple[int, int, int]:
    """(n_plus, n_minus, n_zero) of a rational symmetric matrix, by congruence."""
    g = [[as_fraction(x) for x in row] for row in gram]
    n = len(g)
    if any(len(r) != n for r in g):
        raise DimensionError("Gram matrix must be square")
    if any(g[i][j] != g[j][i] for i in range(n) for j in range(n)):
        raise DimensionError("Gram matrix must be symmetric")
    pos = neg = 0
    while g:
        n = len(g)
        i = next((i for i in range(n) if g[i][i]), None)
        if i is None:
            pair = next(((i, j) for i in range(n) for j in range(n) if g[i][j]), None)
            if pair is None:
                break
            i, j = pair
            # e_i <- e_i + e_j makes the (i, i) entry 2 g_ij != 0
            for t in range(n):
                g[i][t] += g[j][t]
            for t in range(n):
                g[t][i] += g[t][j]
        d = g[i][i]
        if d > 0:
            pos += 1
        else:
            neg += 1
        rest = [t for t in range(n) if t != i]
        g = [[g[a][b] - g[a][i] * g[i][b] / d for b in rest] for a in rest]
    zero = len(gram) - pos - neg
    return pos, neg, zero


def hodge_form(model: VarietyModel, w: CycleClass) -> list[list[Fraction]]:
    k = model.dim
    if k < 2:
        raise DimensionError("the Hodge form needs dimension >= 2")
    wk = w ** (k - 2)
    basis = [model.basis(1, i) for i in range(model.ranks[1])]
    return [[degree0(cup(cup(a, b), wk)) for b in basis] for a in basis]


def hodge_signature(model: VarietyModel, w: CycleClass | None = None) -> tuple[int, int, int]:
    """Signature of (u, v) -> deg(u . v . w^(k-2)) on N^1."""
    w = model.ample_class() if w is None else w
    if w.model is not model or w.codim != 1:
        raise DimensionError("w must be a divisor class on the model")
    if degree0(w ** model.dim) <= 0:
        raise NotAmpleError(f"deg(w^{model.dim}) <= 0")
    return symmetric_signature(hodge_form(model, w))


def _as_class(model: VarietyModel, p: int, u) -> CycleClass:
    if isinstance(u, CycleClass):
        if u.model is not model or u.codim != p:
            raise DimensionError("class does not live in the requested N^p")
        return u
    return model.cls(p, u)


def cone_contains(model: VarietyModel, p: int, u) -> bool:
    """Exact test whether u is a nonnegative combination of the listed generators."""
    u = _as_class(model, p, u)
    return conic_combination(model.generators(p), u.coords) is not None


def cone_decomposition(model: VarietyModel, p: int, u) -> tuple[Fraction, ...] | None:
    u = _as_class(model, p, u)
    return conic_combination(model.generators(p), u.coords)


def norm1(model: VarietyModel, p: int, u) -> Fraction:
    """min deg(v1) + deg(v2) over u = v1 - v2 with v1, v2 in the generated cone."""
    u = _as_class(model, p, u)
    gens = model.generators(p)
    degs = [degree(model.cls(p, g)) for g in gens]
    a_eq = [[g[i] for g in gens] + [-g[i] for g in gens] for i in range(model.ranks[p])]
    res = solve_lp(degs + degs, a_eq, u.coords)
    if res.status == UNBOUNDED:
        raise ModelDataError(f"a cone generator of {model.name} has negative degree")
    if res.status != OPTIMAL:
        raise ModelDataError(f"cone generators of N^{p}({model.name}) do not span")
    return res.value


def psef_difference(model: VarietyModel, alpha: CycleClass) -> tuple[CycleClass, bool]:
    """push(a).push(a) - push(a.a) on the blowdown target, and whether it is effective.

    The difference is checked exactly against (a.F)^2 W (codimension-2
    center) or 0 (center of codimension >= 3).
    """
    bd = _blowdown(model)
    alpha = _as_class(model, 1, alpha)
    pa = blowdown_pushforward(alpha)
    diff = cup(pa, pa) - blowdown_pushforward(cup(alpha, alpha))
    if bd.center_codim == 2:
        af = degree0(cup(alpha, fiber_class(model)))
        expected = center_class(model) * (af * af)
    else:
        expected = bd.target.zero(2)
    if diff != expected:
        raise ModelDataError(f"blowdown data of {model.name} violates the pull-push identity")
    return diff, cone_contains(bd.target, 2, diff)


# -- invariants -----------------------------------------------------------

def _check_invariants(m: VarietyModel) -> list[str]:
    bad: list[str] = []
    k = m.dim
    if len(m.ranks) != k + 1 or m.ranks[0] != 1 or m.ranks[k] != 1:
        return [f"ranks {m.ranks} must have length k+1 and r_0 = r_k = 1"]
    basis = [[m.basis(p, i) for i in range(m.ranks[p])] for p in range(k + 1)]
    for p in range(1, k + 1):
        for q in range(1, k + 1 - p):
            for a in basis[p]:
                for b in basis[q]:
                    if cup(a, b) != cup(b, a):
                        bad.append(f"cup not commutative on {a} , {b}")
    for p, q, r in itertools.product(range(1, k + 1), repeat=3):
        if p + q + r > k:
            continue
        for a in basis[p]:
            for b in basis[q]:
                for c in basis[r]:
                    if cup(cup(a, b), c) != cup(a, cup(b, c)):
                        bad.append(f"cup not associative on {a}, {b}, {c}")
    if degree0(m.ample_class() ** k) <= 0:
        bad.append("ample class has deg(w^k) <= 0")
    bd = m.blowdown
    if bd is not None:
        t = bd.target
        if t.dim != k:
            bad.append("blowdown target has a different dimension")
        for p in range(k + 1):
            P, U = bd.push[p], bd.pull[p]
            if P.shape != (t.ranks[p], m.ranks[p]) or U.shape != (m.ranks[p], t.ranks[p]):
                bad.append(f"push/pull shapes wrong in codimension {p}")
                continue
            if P @ U != QMatrix.identity(t.ranks[p]):
                bad.append(f"push o pull is not the identity on N^{p}({t.name})")
        if bad:
            return bad
        for p in range(k + 1):
            for u in basis[p]:
                for j in range(t.ranks[k - p]):
                    v = t.basis(k - p, j)
                    if degree0(cup(blowdown_pushforward(u), v)) != degree0(cup(u, blowup_pullback(v, m))):
                        bad.append(f"projection formula fails for {u}, {v}")
    return bad


# -- JSON interchange -----------------------------------------------------

def _q(x: Fraction) -> str:
    return fraction_str(x)


def _matrix_doc(mat: QMatrix) -> list[list[str]]:
    return [[_q(v) for v in row] for row in mat.tolist()]


def model_to_dict(m: VarietyModel) -> dict:
    doc = {
        "name": m.name,
        "dim": m.dim,
        "ranks": list(m.ranks),
        "basis_labels": [list(lab) for lab in m.basis_labels],
        "mult": [
            {"p": p, "q": q, "table": [[[_q(c) for c in cell] for cell in row] for row in table]}
            for (p, q), table in sorted(m.mult.items())
        ],
        "degree": [_q(c) for c in m.degree_functional],
        "ample": [_q(c) for c in m.ample],
        "cones": {str(p): [[_q(c) for c in g] for g in gens]
                  for p, gens in sorted(m.cone_generators.items())},
    }
    bd = m.blowdown
    if bd is not None:
        doc["blowdown"] = {
            "target": model_to_dict(bd.target),
            "push": {str(p): _matrix_doc(v) for p, v in sorted(bd.push.items())},
            "pull": {str(p): _matrix_doc(v) for p, v in sorted(bd.pull.items())},
            "exceptional": [_q(c) for c in bd.exceptional],
            "fiber": None if bd.fiber is None else [_q(c) for c in bd.fiber],
            "center": {"codim": bd.center_codim, "coords": [_q(c) for c in bd.center]},
        }
    return doc


def model_from_dict(doc) -> VarietyModel:
    """Build and validate a model from its JSON document (or a built-in name)."""
    from .models import make_model

    if isinstance(doc, str):
        return make_model(doc)
    try:
        k = int(doc["dim"])
        ranks = tuple(int(r) for r in doc["ranks"])
        labels = tuple(tuple(str(s) for s in lab) for lab in doc.get(
            "basis_labels", [[f"b{p}_{i}" for i in range(r)] for p, r in enumerate(ranks)]))
        mult = {}
        for entry in doc["mult"]:
            p, q = int(entry["p"]), int(entry["q"])
            mult[(p, q)] = tuple(tuple(_coords(cell) for cell in row) for row in entry["table"])
        # fill missing (q, p) tables by symmetry
        for (p, q), table in list(mult.items()):
            if (q, p) not in mult:
                mult[(q, p)] = tuple(tuple(table[i][j] for i in range(len(table)))
                                     for j in range(len(table[0]) if table else 0))
        cones = {int(p): tuple(_coords(g) for g in gens) for p, gens in doc.get("cones", {}).items()}
        blowdown = None
        if doc.get("blowdown"):
            b = doc["blowdown"]
            target = model_from_dict(b["target"])
            blowdown = Blowdown(
                target=target,
                push={int(p): QMatrix(v) for p, v in b["push"].items()},
                pull={int(p): QMatrix(v) for p, v in b["pull"].items()},
                exceptional=_coords(b["exceptional"]),
                fiber=None if b.get("fiber") is None else _coords(b["fiber"]),
                center_codim=int(b["center"]["codim"]),
                center=_coords(b["center"]["coords"]),
            )
        model = VarietyModel(
            name=str(doc.get("name", "user")), dim=k, ranks=ranks, basis_labels=labels,
            mult=mult, degree_functional=_coords(doc["degree"]), ample=_coords(doc["ample"]),
            cone_generators=cones, blowdown=blowdown)
    except (KeyError, TypeError, ValueError, IndexError, ZeroDivisionError) as exc:
        raise IngestionError(f"malformed model document: {exc!r}") from exc
    _validate_shapes(model)
    bad = model.check_invariants()
    if bad:
        raise ModelDataError(f"model {model.name} violates invariants: {bad[0]}")
    return model


def _validate_shapes(m: VarietyModel) -> None:
    k = m.dim
    try:
        if len(m.basis_labels) != k + 1 or any(len(l) != r for l, r in zip(m.basis_labels, m.ranks)):
            raise IngestionError("basis_labels do not match ranks")
        for p in range(1, k + 1):
            for q in range(1, k + 1 - p):
                table = m.mult[(p, q)]
                if len(table) != m.ranks[p] or any(len(row) != m.ranks[q] for row in table):
                    raise IngestionError(f"mult table ({p},{q}) has the wrong shape")
                if any(len(cell) != m.ranks[p + q] for row in table for cell in row):
                    raise IngestionError(f"mult table ({p},{q}) has cells of the wrong length")
    except KeyError as exc:
        raise IngestionError(f"missing mult table {exc}") from exc
    if len(m.degree_functional) != m.ranks[k] or len(m.ample) != m.ranks[1]:
        raise IngestionError("degree functional or ample class has the wrong length")
    for p, gens in m.cone_generators.items():
        if not 0 <= p <= k or any(len(g) != m.ranks[p] for g in gens):
            raise IngestionError(f"cone generators for codimension {p} have the wrong length")


def load_model(path) -> VarietyModel:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise IngestionError(f"{path}:{exc.lineno}: {exc.msg}") from exc
    return model_from_dict(doc)
