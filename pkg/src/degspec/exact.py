"""Exact rational matrices and polynomials, plus spectral primitives.

Everything here is exact over the rationals except the root moduli
reported by :func:`eigen_spectrum`, which are approximations carrying an
explicit a-posteriori error bound.  Multiplicities are always exact.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import mpmath

from .errors import DimensionError, ParameterError

DEFAULT_TOL = 1e-9


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions and "num/den" strings to a Fraction.

    Floats are refused: nothing in this package is allowed to round.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot use {type(x).__name__} as an exact rational")


def fraction_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def tagged_decimal(x: float, tol) -> dict:
    """12-significant-digit decimal carrying the tolerance it was computed to."""
    return {"dec": f"{x:.12g}", "tol": tol if isinstance(tol, str) else f"{tol:g}"}


class QMatrix:
    """Immutable dense matrix over the rationals (row-major storage)."""

    __slots__ = ("rows", "cols", "entries", "_hash")

    def __init__(self, data: Sequence[Sequence], cols: int | None = None):
        rows = [tuple(as_fraction(v) for v in r) for r in data]
        if rows:
            ncols = len(rows[0])
            if any(len(r) != ncols for r in rows):
                raise DimensionError("ragged rows")
        else:
            ncols = cols or 0
        self.rows = len(rows)
        self.cols = ncols
        self.entries = tuple(v for r in rows for v in r)
        self._hash = None

    @classmethod
    def _raw(cls, rows: int, cols: int, entries: tuple) -> "QMatrix":
        m = cls.__new__(cls)
        m.rows, m.cols, m.entries, m._hash = rows, cols, entries, None
        return m

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        one, zero = Fraction(1), Fraction(0)
        return cls._raw(n, n, tuple(one if i == j else zero
                                    for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "QMatrix":
        cols = rows if cols is None else cols
        return cls._raw(rows, cols, (Fraction(0),) * (rows * cols))

    @classmethod
    def diagonal(cls, values: Iterable) -> "QMatrix":
        vals = [as_fraction(v) for v in values]
        n = len(vals)
        return cls([[vals[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence]) -> "QMatrix":
        if not columns:
            raise DimensionError("no columns")
        return cls(list(zip(*columns)))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(ij)
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple:
        return self.entries[j::self.cols] if self.cols else ()

    def tolist(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "QMatrix":
        return QMatrix._raw(self.cols, self.rows,
                            tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)))

    T = property(transpose)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self.entries))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(str(v) for v in self.row(i)) + "]"
                         for i in range(self.rows))
        return f"QMatrix([{body}])"

    def _same_shape(self, other: "QMatrix") -> None:
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "QMatrix") -> "QMatrix":
        self._same_shape(other)
        return QMatrix._raw(self.rows, self.cols,
                            tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        self._same_shape(other)
        return QMatrix._raw(self.rows, self.cols,
                            tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "QMatrix":
        return QMatrix._raw(self.rows, self.cols, tuple(-a for a in self.entries))

    def scale(self, s) -> "QMatrix":
        s = as_fraction(s)
        return QMatrix._raw(self.rows, self.cols, tuple(s * a for a in self.entries))

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        if not isinstance(other, QMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        ocols = [other.col(j) for j in range(other.cols)]
        out = []
        for i in range(self.rows):
            r = self.row(i)
            for c in ocols:
                out.append(sum((a * b for a, b in zip(r, c) if a and b), Fraction(0)))
        return QMatrix._raw(self.rows, other.cols, tuple(out))

    def apply(self, vector: Sequence) -> tuple:
        """Matrix times column vector."""
        v = [as_fraction(x) for x in vector]
        if len(v) != self.cols:
            raise DimensionError(f"vector of length {len(v)} for {self.shape} matrix")
        return tuple(sum((a * b for a, b in zip(self.row(i), v) if a and b), Fraction(0))
                     for i in range(self.rows))

    def __pow__(self, n: int) -> "QMatrix":
        if not self.is_square:
            raise DimensionError("power of a non-square matrix")
        if n < 0:
            return self.inverse() ** (-n)
        result, base = QMatrix.identity(self.rows), self
        while n:
            if n & 1:
                result = result @ base
            n >>= 1
            if n:
                base = base @ base
        return result

    def abs(self) -> "QMatrix":
        return QMatrix._raw(self.rows, self.cols, tuple(abs(a) for a in self.entries))

    def trace(self) -> Fraction:
        if not self.is_square:
            raise DimensionError("trace of a non-square matrix")
        return sum((self[i, i] for i in range(self.rows)), Fraction(0))

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "QMatrix":
        return QMatrix._raw(len(rows), len(cols),
                            tuple(self[i, j] for i in rows for j in cols))

    def det(self) -> Fraction:
        if not self.is_square:
            raise DimensionError("determinant of a non-square matrix")
        n = self.rows
        a = self.tolist()
        det = Fraction(1)
        for c in range(n):
            piv = next((r for r in range(c, n) if a[r][c]), None)
            if piv is None:
                return Fraction(0)
            if piv != c:
                a[c], a[piv] = a[piv], a[c]
                det = -det
            p = a[c][c]
            det *= p
            for r in range(c + 1, n):
                f = a[r][c]
                if f:
                    f /= p
                    a[r] = [x - f * y for x, y in zip(a[r], a[c])]
        return det

    def inverse(self) -> "QMatrix":
        if not self.is_square:
            raise DimensionError("inverse of a non-square matrix")
        n = self.rows
        a = [r + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(self.tolist())]
        for c in range(n):
            piv = next((r for r in range(c, n) if a[r][c]), None)
            if piv is None:
                raise ParameterError("matrix is singular")
            a[c], a[piv] = a[piv], a[c]
            p = a[c][c]
            a[c] = [x / p for x in a[c]]
            for r in range(n):
                f = a[r][c]
                if r != c and f:
                    a[r] = [x - f * y for x, y in zip(a[r], a[c])]
        return QMatrix([r[n:] for r in a])

    def is_zero(self) -> bool:
        return not any(self.entries)


class QPolynomial:
    """Univariate polynomial over the rationals; ``coeffs[i]`` multiplies t**i."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        c = [as_fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def monomial(cls, degree: int, coef=1) -> "QPolynomial":
        return cls([0] * degree + [coef])

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if isinstance(other, QPolynomial):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"QPolynomial({[str(c) for c in self.coeffs]})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
            if mono and abs(c) == 1:
                s = mono
            else:
                s = f"{abs(c)}{'*' if mono else ''}{mono}"
            terms.append(("-" if c < 0 else "+", s))
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, s in terms[1:]:
            out += f" {sign} {s}"
        return out

    def __add__(self, other: "QPolynomial") -> "QPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return QPolynomial(x + y for x, y in zip(a, b))

    def __neg__(self) -> "QPolynomial":
        return QPolynomial(-c for c in self.coeffs)

    def __sub__(self, other: "QPolynomial") -> "QPolynomial":
        return self + (-other)

    def __mul__(self, other) -> "QPolynomial":
        if not isinstance(other, QPolynomial):
            return QPolynomial(c * as_fraction(other) for c in self.coeffs)
        if self.is_zero() or other.is_zero():
            return QPolynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return QPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "QPolynomial":
        result = QPolynomial([1])
        for _ in range(n):
            result = result * self
        return result

    def __divmod__(self, other: "QPolynomial") -> tuple["QPolynomial", "QPolynomial"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs) + 1
        if dq <= 0:
            return QPolynomial(), self
        quot = [Fraction(0)] * dq
        lc = other.lc
        for k in range(dq - 1, -1, -1):
            c = rem[k + other.degree] / lc
            quot[k] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= c * b
        return QPolynomial(quot), QPolynomial(rem[:other.degree])

    def __floordiv__(self, other: "QPolynomial") -> "QPolynomial":
        return divmod(self, other)[0]

    def __mod__(self, other: "QPolynomial") -> "QPolynomial":
        return divmod(self, other)[1]

    def monic(self) -> "QPolynomial":
        if self.is_zero():
            return self
        lc = self.lc
        return QPolynomial(c / lc for c in self.coeffs)

    def derivative(self) -> "QPolynomial":
        return QPolynomial(i * c for i, c in enumerate(self.coeffs) if i)

    def __call__(self, x) -> Fraction:
        x = as_fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_mp(self, z):
        """Horner evaluation of the polynomial and its derivative at an mpmath number."""
        p = mpmath.mpf(0)
        dp = mpmath.mpf(0)
        for c in reversed(self.coeffs):
            dp = dp * z + p
            p = p * z + mpmath.mpf(c.numerator) / c.denominator
        return p, dp

    def eval_matrix(self, m: QMatrix) -> QMatrix:
        if not m.is_square:
            raise DimensionError("matrix substitution needs a square matrix")
        acc = QMatrix.zeros(m.rows)
        eye = QMatrix.identity(m.rows)
        for c in reversed(self.coeffs):
            acc = acc @ m + eye.scale(c)
        return acc

    def gcd(self, other: "QPolynomial") -> "QPolynomial":
        """Monic gcd (Euclid over the rationals); gcd(0, 0) = 0."""
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def squarefree_decomposition(self) -> list[tuple["QPolynomial", int]]:
        """Yun's algorithm: monic square-free factors paired with their multiplicity.

        Factors of degree 0 are dropped, so the degrees weighted by
        multiplicity add up to ``self.degree``.
        """
        if self.degree < 1:
            return []
        f = self.monic()
        df = f.derivative()
        a = f.gcd(df)
        b = f // a
        c = df // a
        d = c - b.derivative()
        out = []
        i = 1
        while b.degree > 0:
            a = b.gcd(d)
            b = b // a
            c = d // a if not d.is_zero() else d
            d = c - b.derivative()
            if a.degree > 0:
                out.append((a, i))
            i += 1
        return out

    def sturm_real_root_count(self) -> int:
        """Number of distinct real roots (Sturm sequence, exact)."""
        if self.degree < 1:
            return 0
        seq = [self, self.derivative()]
        while not seq[-1].is_zero():
            r = -(seq[-2] % seq[-1])
            if r.is_zero():
                break
            seq.append(r)

        def changes(signs: list[int]) -> int:
            s = [x for x in signs if x]
            return sum(1 for u, v in zip(s, s[1:]) if u != v)

        def sign_at_inf(p: QPolynomial, neg: bool) -> int:
            s = 1 if p.lc > 0 else -1
            return -s if (neg and p.degree % 2) else s

        return (changes([sign_at_inf(p, True) for p in seq])
                - changes([sign_at_inf(p, False) for p in seq]))


def charpoly(m: QMatrix) -> QPolynomial:
    """Monic characteristic polynomial det(tI - M), exact.

    Uses the Faddeev-LeVerrier trace recurrence.
    """
    if not m.is_square:
        raise DimensionError(f"charpoly of a non-square {m.shape} matrix")
    n = m.rows
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    aux = QMatrix.zeros(n)
    eye = QMatrix.identity(n)
    for k in range(1, n + 1):
        aux = m @ aux + eye.scale(coeffs[n - k + 1])
        coeffs[n - k] = -(m @ aux).trace() / k
    return QPolynomial(coeffs)


@dataclass(frozen=True)
class SpectrumEntry:
    modulus: float
    multiplicity: int
    is_real: bool
    approx_value: complex
    modulus_error_bound: float


def _mp_fraction(c: Fraction):
    return mpmath.mpf(c.numerator) / c.denominator


def _roots_of_squarefree(p: QPolynomial, tol: float) -> list[tuple[object, float]]:
    """Roots of a square-free rational polynomial with per-root error bounds.

    The bound is the classical inclusion radius deg * |p(z)/p'(z)|: the
    closed disc of that radius around z contains a root of p.
    """
    n = p.degree
    if n == 1:
        c0, c1 = p.coeffs
        return [(mpmath.mpf((-c0 / c1).numerator) / (-c0 / c1).denominator, 0.0)]
    dps = 30
    while True:
        with mpmath.workdps(dps):
            coeffs = [_mp_fraction(c) for c in reversed(p.coeffs)]
            try:
                roots = mpmath.polyroots(coeffs, maxsteps=50 + 10 * n,
                                         extraprec=2 * dps, cleanup=True)
            except mpmath.libmp.libhyper.NoConvergence:
                roots = None
            if roots is not None:
                out = []
                worst = 0.0
                for z in roots:
                    val, der = p.eval_mp(mpmath.mpc(z))
                    if der == 0:
                        worst = float("inf")
                        break
                    bound = float(n * abs(val) / abs(der))
                    worst = max(worst, bound)
                    out.append((mpmath.mpc(z), bound))
                if worst <= tol / 4 or dps >= 960:
                    return out
        dps *= 2


def eigen_spectrum(m: QMatrix, tol: float = DEFAULT_TOL) -> list[SpectrumEntry]:
    """Eigenvalue moduli with exact multiplicities, sorted by modulus descending.

    One entry per distinct eigenvalue; a complex-conjugate pair gives two
    entries of equal modulus.
    """
    if not tol > 0:
        raise ParameterError(f"tol must be positive, got {tol}")
    p = charpoly(m)
    entries: list[SpectrumEntry] = []
    for factor, mult in p.squarefree_decomposition():
        roots = _roots_of_squarefree(factor, tol)
        n_real = factor.sturm_real_root_count()
        roots.sort(key=lambda zb: abs(zb[0].imag))
        real_part, complex_part = roots[:n_real], roots[n_real:]
        for z, bound in real_part:
            x = float(z.real)
            entries.append(SpectrumEntry(abs(x), mult, True, complex(x, 0.0), bound))
        upper = sorted((zb for zb in complex_part if zb[0].imag > 0),
                       key=lambda zb: (float(zb[0].real), float(zb[0].imag)))
        lower = [zb for zb in complex_part if zb[0].imag <= 0]
        if len(upper) != len(lower):
            raise ArithmeticError("non-real roots of a real polynomial did not pair up")
        # p is real, so the conjugate disc contains the conjugate root
        for z, bound in upper:
            w = complex(float(z.real), float(z.imag))
            mod = float(abs(z))
            entries.append(SpectrumEntry(mod, mult, False, w, bound))
            entries.append(SpectrumEntry(mod, mult, False, w.conjugate(), bound))
    entries.sort(key=lambda e: (-e.modulus, -e.approx_value.real, -e.approx_value.imag))
    return entries


def spectral_radius(m: QMatrix, tol: float = DEFAULT_TOL) -> float:
    spec = eigen_spectrum(m, tol)
    return spec[0].modulus if spec else 0.0


def compound_matrix(m: QMatrix, p: int) -> QMatrix:
    """p-th compound: p x p minors indexed by sorted index subsets in lex order."""
    if not m.is_square:
        raise DimensionError("compound of a non-square matrix")
    k = m.rows
    if not 1 <= p <= k:
        raise ParameterError(f"p must lie in [1, {k}], got {p}")
    subsets = list(itertools.combinations(range(k), p))
    return QMatrix([[m.submatrix(r, c).det() for c in subsets] for r in subsets])
