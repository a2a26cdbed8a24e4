"""Built-in variety models.

Intersection numbers are the standard ones; effective-cone generators are
model data (the usual extremal curves and divisors), not computed.

Names accepted by :func:`make_model`::

    P(k)          projective k-space, 1 <= k <= 4
    P1xP1xK(k)    (P^1)^k, 1 <= k <= 4
    BlP2(r)       plane blown up at r general points, 1 <= r <= 3
    BlP3pt        3-space blown up at a point
    BlP3line      3-space blown up along a line
"""
from __future__ import annotations

import functools
import itertools
import re
from fractions import Fraction
from typing import Callable, Sequence

from .errors import ModelDataError, ModelSpecError
from .exact import QMatrix
from .intersection import Blowdown, VarietyModel

BUILTIN_NAMES = ("P(k)", "P1xP1xK(k)", "BlP2(r)", "BlP3pt", "BlP3line")


def _vec(n: int, **entries) -> tuple:
    v = [Fraction(0)] * n
    for i, c in entries.items():
        v[int(i[1:])] = Fraction(c)
    return tuple(v)


def _tables(ranks: Sequence[int], product: Callable[[int, int, int, int], Sequence]) -> dict:
    """Build mult tables from product(p, i, q, j) -> coords in N^{p+q}."""
    k = len(ranks) - 1
    mult = {}
    for p in range(1, k + 1):
        for q in range(1, k + 1 - p):
            mult[(p, q)] = tuple(
                tuple(tuple(Fraction(c) for c in product(p, i, q, j)) for j in range(ranks[q]))
                for i in range(ranks[p]))
    return mult


def _unit_gens(ranks: Sequence[int]) -> dict:
    """Nonnegative-orthant cones: every basis vector is a generator."""
    return {p: tuple(tuple(Fraction(int(i == j)) for j in range(r)) for i in range(r))
            for p, r in enumerate(ranks)}


def _finish(model: VarietyModel) -> VarietyModel:
    bad = model.check_invariants()
    if bad:
        raise ModelDataError(f"built-in model {model.name} is inconsistent: {bad[0]}")
    return model


@functools.lru_cache(maxsize=None)
def projective_space(k: int) -> VarietyModel:
    if not 1 <= k <= 4:
        raise ModelSpecError(f"P(k) needs 1 <= k <= 4, got {k}")
    ranks = (1,) * (k + 1)
    labels = tuple(("1",) if p == 0 else (f"h^{p}" if p > 1 else "h",) for p in range(k + 1))
    return _finish(VarietyModel(
        name=f"P({k})", dim=k, ranks=ranks, basis_labels=labels,
        mult=_tables(ranks, lambda p, i, q, j: (1,)),
        degree_functional=(Fraction(1),), ample=(Fraction(1),),
        cone_generators=_unit_gens(ranks)))


@functools.lru_cache(maxsize=None)
def product_of_lines(k: int) -> VarietyModel:
    if not 1 <= k <= 4:
        raise ModelSpecError(f"P1xP1xK(k) needs 1 <= k <= 4, got {k}")
    subsets = [list(itertools.combinations(range(k), p)) for p in range(k + 1)]
    ranks = tuple(len(s) for s in subsets)
    labels = tuple(tuple("".join(f"h{i + 1}" for i in s) or "1" for s in subs) for subs in subsets)

    def product(p, i, q, j):
        a, b = set(subsets[p][i]), set(subsets[q][j])
        out = [0] * ranks[p + q]
        if not a & b:
            out[subsets[p + q].index(tuple(sorted(a | b)))] = 1
        return out

    return _finish(VarietyModel(
        name=f"P1xP1xK({k})", dim=k, ranks=ranks, basis_labels=labels,
        mult=_tables(ranks, product),
        degree_functional=(Fraction(1),), ample=(Fraction(1),) * k,
        cone_generators=_unit_gens(ranks)))


@functools.lru_cache(maxsize=None)
def blown_up_plane(r: int) -> VarietyModel:
    """P^2 blown up at r general points; blows down the last point only."""
    if not 1 <= r <= 3:
        raise ModelSpecError(f"BlP2(r) needs 1 <= r <= 3, got {r}")
    n1 = r + 1
    ranks = (1, n1, 1)
    labels = (("1",), ("H",) + tuple(f"E{i}" for i in range(1, r + 1)), ("pt",))

    def product(p, i, q, j):
        if i != j:
            return (0,)
        return (1,) if i == 0 else (-1,)

    # (-1)-curves of the del Pezzo surface: E_i and the lines H - E_i - E_j
    if r == 1:
        curves = [_vec(n1, c1=1), _vec(n1, c0=1, c1=-1)]
    else:
        curves = [_vec(n1, **{f"c{i}": 1}) for i in range(1, r + 1)]
        curves += [_vec(n1, c0=1, **{f"c{i}": -1, f"c{j}": -1})
                   for i, j in itertools.combinations(range(1, r + 1), 2)]
    cones = {0: ((Fraction(1),),), 1: tuple(curves), 2: ((Fraction(1),),)}
    target = projective_space(2) if r == 1 else blown_up_plane(r - 1)
    # N^1(target) has basis H, E_1..E_{r-1}: push drops E_r, pull includes
    push1 = QMatrix([[int(i == j) for j in range(n1)] for i in range(n1 - 1)])
    one = QMatrix.identity(1)
    blowdown = Blowdown(
        target=target,
        push={0: one, 1: push1, 2: one},
        pull={0: one, 1: push1.transpose(), 2: one},
        exceptional=_vec(n1, **{f"c{r}": 1}),
        fiber=_vec(n1, **{f"c{r}": 1}),
        center_codim=2,
        center=(Fraction(1),),
    )
    return _finish(VarietyModel(
        name=f"BlP2({r})", dim=2, ranks=ranks, basis_labels=labels,
        mult=_tables(ranks, product), degree_functional=(Fraction(1),),
        ample=(Fraction(3),) + (Fraction(-1),) * r,
        cone_generators=cones, blowdown=blowdown))


def _threefold_products(hh, he, ee, h_n2, e_n2):
    """Products on a threefold with N^1 = (H, E) and a rank-2 N^2.

    hh, he, ee: coords in N^2; h_n2, e_n2: degrees of H, E against the N^2 basis.
    """
    n11 = {(0, 0): hh, (0, 1): he, (1, 0): he, (1, 1): ee}
    n12 = {0: h_n2, 1: e_n2}

    def product(p, i, q, j):
        if p == 1 and q == 1:
            return n11[(i, j)]
        if p == 1 and q == 2:
            return (n12[i][j],)
        if p == 2 and q == 1:
            return (n12[j][i],)
        raise AssertionError((p, q))

    return product


@functools.lru_cache(maxsize=None)
def blown_up_space_at_point() -> VarietyModel:
    # N^2 basis: H^2 (pulled-back line), l (line inside E = P^2)
    ranks = (1, 2, 2, 1)
    labels = (("1",), ("H", "E"), ("H^2", "l"), ("pt",))
    product = _threefold_products(hh=(1, 0), he=(0, 0), ee=(0, -1),
                                  h_n2=(1, 0), e_n2=(0, -1))
    cones = {0: ((Fraction(1),),),
             1: (_vec(2, c1=1), _vec(2, c0=1, c1=-1)),
             2: (_vec(2, c1=1), _vec(2, c0=1, c1=-1)),
             3: ((Fraction(1),),)}
    drop = QMatrix([[1, 0]])
    one = QMatrix.identity(1)
    blowdown = Blowdown(
        target=projective_space(3),
        push={0: one, 1: drop, 2: drop, 3: one},
        pull={0: one, 1: drop.transpose(), 2: drop.transpose(), 3: one},
        exceptional=_vec(2, c1=1), fiber=None,
        center_codim=3, center=(Fraction(1),))
    return _finish(VarietyModel(
        name="BlP3pt", dim=3, ranks=ranks, basis_labels=labels,
        mult=_tables(ranks, product), degree_functional=(Fraction(1),),
        ample=(Fraction(2), Fraction(-1)), cone_generators=cones, blowdown=blowdown))


@functools.lru_cache(maxsize=None)
def blown_up_space_along_line() -> VarietyModel:
    # N^2 basis: H^2 (pulled-back line), F (fiber of E over a point of the center)
    ranks = (1, 2, 2, 1)
    labels = (("1",), ("H", "E"), ("H^2", "F"), ("pt",))
    product = _threefold_products(hh=(1, 0), he=(0, 1), ee=(-1, 2),
                                  h_n2=(1, 0), e_n2=(0, -1))
    cones = {0: ((Fraction(1),),),
             1: (_vec(2, c1=1), _vec(2, c0=1, c1=-1)),
             2: (_vec(2, c1=1), _vec(2, c0=1, c1=-1)),
             3: ((Fraction(1),),)}
    drop = QMatrix([[1, 0]])
    one = QMatrix.identity(1)
    blowdown = Blowdown(
        target=projective_space(3),
        push={0: one, 1: drop, 2: drop, 3: one},
        pull={0: one, 1: drop.transpose(), 2: drop.transpose(), 3: one},
        exceptional=_vec(2, c1=1), fiber=_vec(2, c1=1),
        center_codim=2, center=(Fraction(1),))
    return _finish(VarietyModel(
        name="BlP3line", dim=3, ranks=ranks, basis_labels=labels,
        mult=_tables(ranks, product), degree_functional=(Fraction(1),),
        ample=(Fraction(2), Fraction(-1)), cone_generators=cones, blowdown=blowdown))


_PATTERN = re.compile(r"^\s*(P|P1xP1xK|BlP2|BlP3pt|BlP3line)\s*(?:\(\s*(-?\d+)\s*\))?\s*$")


def make_model(spec: str) -> VarietyModel:
    """Instantiate a built-in model from its name, e.g. ``"BlP2(3)"``."""
    m = _PATTERN.match(spec) if isinstance(spec, str) else None
    if not m:
        raise ModelSpecError(f"unknown model {spec!r}; built-ins are {', '.join(BUILTIN_NAMES)}")
    name, arg = m.group(1), m.group(2)
    if name in ("BlP3pt", "BlP3line"):
        if arg is not None:
            raise ModelSpecError(f"{name} takes no parameter")
        return blown_up_space_at_point() if name == "BlP3pt" else blown_up_space_along_line()
    if arg is None:
        raise ModelSpecError(f"{name} needs a parameter")
    n = int(arg)
    return {"P": projective_space, "P1xP1xK": product_of_lines, "BlP2": blown_up_plane}[name](n)


def builtin_catalog() -> list[str]:
    names = [f"P({k})" for k in range(1, 5)]
    names += [f"P1xP1xK({k})" for k in range(1, 5)]
    names += [f"BlP2({r})" for r in range(1, 4)]
    return names + ["BlP3pt", "BlP3line"]
