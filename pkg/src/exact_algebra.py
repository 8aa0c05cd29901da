"""
Exact Algebra Module
Complex-rational scalars and polynomial calculus in the monomial and falling-factorial bases
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import sympy
from sympy.polys.domains import QQ, QQ_I
from sympy.polys.matrices import DomainMatrix

Rational = Fraction
ScalarLike = Union[int, Fraction, str, Mapping, "ComplexRational"]

_ZERO = Fraction(0)


@dataclass(frozen=True, slots=True, eq=False)
class ComplexRational:
    """
    Exact complex number re + i·im with Fraction parts

    Fraction keeps every part in lowest terms with a positive denominator, so
    two equal values always carry identical fields and hash alike.
    """
    re: Fraction = _ZERO
    im: Fraction = _ZERO

    def __post_init__(self):
        if not isinstance(self.re, Fraction):
            object.__setattr__(self, "re", Fraction(self.re))
        if not isinstance(self.im, Fraction):
            object.__setattr__(self, "im", Fraction(self.im))

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    @classmethod
    def coerce(cls, value: ScalarLike) -> "ComplexRational":
        """
        Accepts ints, Fractions, "a/b" strings and {"re": .., "im": ..} mappings

        Floats are refused: an exact layer must not inherit binary rounding.
        """
        if isinstance(value, ComplexRational):
            return value
        if isinstance(value, bool):
            raise TypeError("booleans are not coefficients")
        if isinstance(value, (int, Fraction)):
            return cls(Fraction(value))
        if isinstance(value, str):
            return cls(Fraction(value.strip()))
        if isinstance(value, Mapping):
            unknown = set(value) - {"re", "im"}
            if unknown:
                raise ValueError(f"unexpected keys {sorted(unknown)}")
            re = cls.coerce(value.get("re", 0))
            im = cls.coerce(value.get("im", 0))
            if not (re.is_real and im.is_real):
                raise ValueError("re and im must be real rationals")
            return cls(re.re, im.re)
        raise TypeError(f"cannot use {type(value).__name__} as an exact coefficient")

    # ------------------------------------------------------------------
    # Predicates and views
    # ------------------------------------------------------------------

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def abs2(self) -> Fraction:
        """|x|², always rational"""
        return self.re * self.re + self.im * self.im

    def conjugate(self) -> "ComplexRational":
        return ComplexRational(self.re, -self.im)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    # ------------------------------------------------------------------
    # Arithmetic
    # ------------------------------------------------------------------

    def __add__(self, other):
        o = _as_exact(other)
        if o is None:
            return NotImplemented
        return ComplexRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _as_exact(other)
        if o is None:
            return NotImplemented
        return ComplexRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _as_exact(other)
        if o is None:
            return NotImplemented
        return ComplexRational(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = _as_exact(other)
        if o is None:
            return NotImplemented
        if self.im == 0 and o.im == 0:
            return ComplexRational(self.re * o.re)
        return ComplexRational(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _as_exact(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("division by exact zero")
        if o.im == 0:
            return ComplexRational(self.re / o.re, self.im / o.re)
        n2 = o.abs2()
        num = self * o.conjugate()
        return ComplexRational(num.re / n2, num.im / n2)

    def __rtruediv__(self, other):
        o = _as_exact(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return ComplexRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return ONE / (self ** -k)
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        o = _as_exact(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash(self.re) if self.im == 0 else hash((self.re, self.im))

    # ------------------------------------------------------------------
    # Rendering
    # ------------------------------------------------------------------

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"

    def __repr__(self) -> str:
        return f"ComplexRational({self})"

    def to_json(self):
        """"a/b" for reals, {"re": "a/b", "im": "c/d"} otherwise"""
        if self.im == 0:
            return str(self.re)
        return {"re": str(self.re), "im": str(self.im)}


def _as_exact(value) -> Optional[ComplexRational]:
    if isinstance(value, ComplexRational):
        return value
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return ComplexRational(Fraction(value))
    return None


ZERO = ComplexRational()
ONE = ComplexRational(Fraction(1))


# =============================================================================
# POLYNOMIALS
# =============================================================================

def _normalize(coeffs: Iterable[ScalarLike]) -> Tuple[ComplexRational, ...]:
    values = [ComplexRational.coerce(c) for c in coeffs]
    while values and values[-1].is_zero():
        values.pop()
    return tuple(values)


@dataclass(frozen=True)
class _CoefficientVector:
    coeffs: Tuple[ComplexRational, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _normalize(self.coeffs))

    def degree(self) -> Optional[int]:
        """None for the zero polynomial"""
        return len(self.coeffs) - 1 if self.coeffs else None

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> ComplexRational:
        return self.coeffs[-1] if self.coeffs else ZERO

    def __getitem__(self, k: int) -> ComplexRational:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else ZERO

    def __len__(self) -> int:
        return len(self.coeffs)

    def _combine(self, other, sign: int):
        size = max(len(self.coeffs), len(other.coeffs))
        if sign > 0:
            return type(self)(tuple(self[k] + other[k] for k in range(size)))
        return type(self)(tuple(self[k] - other[k] for k in range(size)))

    def __add__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self._combine(other, 1)

    def __sub__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self._combine(other, -1)

    def __neg__(self):
        return type(self)(tuple(-c for c in self.coeffs))

    def scale(self, c: ScalarLike):
        c = ComplexRational.coerce(c)
        return type(self)(tuple(c * x for x in self.coeffs))

    def to_json(self) -> list:
        return [c.to_json() for c in self.coeffs]


class Poly(_CoefficientVector):
    """Polynomial in the monomial basis, coeffs[k] multiplies z^k"""

    @classmethod
    def of(cls, *coeffs: ScalarLike) -> "Poly":
        """Ascending powers: Poly.of(6, 4) is 4z + 6"""
        return cls(tuple(coeffs))

    @classmethod
    def monomial(cls, k: int, c: ScalarLike = 1) -> "Poly":
        return cls((0,) * k + (c,))

    def __mul__(self, other):
        if isinstance(other, Poly):
            if self.is_zero() or other.is_zero():
                return Poly()
            out = [ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                if a.is_zero():
                    continue
                for j, b in enumerate(other.coeffs):
                    out[i + j] = out[i + j] + a * b
            return Poly(tuple(out))
        if _as_exact(other) is not None:
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def __call__(self, z: ScalarLike) -> ComplexRational:
        return eval_poly(self, ComplexRational.coerce(z))

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c.is_zero():
                continue
            text = f"({c})" if not c.is_real else str(c)
            if k == 0:
                parts.append(text)
            else:
                power = "z" if k == 1 else f"z^{k}"
                parts.append(power if c == 1 else f"{text}*{power}")
        return " + ".join(parts)


class FallingPoly(_CoefficientVector):
    """Polynomial in the falling-factorial basis, coeffs[k] multiplies z^(k) = z(z-1)...(z-k+1)"""

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c.is_zero():
                continue
            parts.append(str(c) if k == 0 else f"{c}*z^({k})")
        return " + ".join(parts)


# =============================================================================
# STIRLING NUMBERS
# =============================================================================

@lru_cache(maxsize=None)
def _stirling_second_row(n: int) -> Tuple[int, ...]:
    if n == 0:
        return (1,)
    prev = _stirling_second_row(n - 1) + (0,)
    return tuple((k * prev[k] if k < len(prev) else 0) + (prev[k - 1] if k >= 1 else 0)
                 for k in range(n + 1))


@lru_cache(maxsize=None)
def _stirling_first_row(n: int) -> Tuple[int, ...]:
    if n == 0:
        return (1,)
    prev = _stirling_first_row(n - 1) + (0,)
    # s(n, k) = s(n-1, k-1) - (n-1) s(n-1, k)
    return tuple((prev[k - 1] if k >= 1 else 0) - (n - 1) * prev[k] for k in range(n + 1))


def stirling_second(n: int, k: int) -> int:
    """S(n, k): z^n = sum_k S(n, k) z^(k)"""
    if n < 0 or k < 0 or k > n:
        return 0
    return _stirling_second_row(n)[k]


def stirling_first(n: int, k: int) -> int:
    """Signed s(n, k): z^(n) = sum_k s(n, k) z^k"""
    if n < 0 or k < 0 or k > n:
        return 0
    return _stirling_first_row(n)[k]


# =============================================================================
# BASIS CONVERSION AND CALCULUS
# =============================================================================

def monomial_to_falling(p: Poly) -> FallingPoly:
    if p.is_zero():
        return FallingPoly()
    d = p.degree()
    out = [ZERO] * (d + 1)
    for i, a in enumerate(p.coeffs):
        if a.is_zero():
            continue
        row = _stirling_second_row(i)
        for k in range(1 if i > 0 else 0, i + 1):
            if row[k]:
                out[k] = out[k] + a * row[k]
    return FallingPoly(tuple(out))


def falling_to_monomial(f: FallingPoly) -> Poly:
    if f.is_zero():
        return Poly()
    d = f.degree()
    out = [ZERO] * (d + 1)
    for k, h in enumerate(f.coeffs):
        if h.is_zero():
            continue
        row = _stirling_first_row(k)
        for i in range(k + 1):
            if row[i]:
                out[i] = out[i] + h * row[i]
    return Poly(tuple(out))


def falling_delta(f: FallingPoly, k: int = 1) -> FallingPoly:
    """Δ^k in the falling basis: z^(n) -> n^(k) z^(n-k)"""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return f
    return FallingPoly(tuple(
        f.coeffs[n] * falling_factorial(n, k) for n in range(k, len(f.coeffs))
    ))


def delta(p: Poly, k: int = 1) -> Poly:
    """Δ^k p for Δp(z) = p(z+1) - p(z)"""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0 or p.is_zero():
        return p
    if k > p.degree():
        return Poly()
    return falling_to_monomial(falling_delta(monomial_to_falling(p), k))


def shift(p: Poly, c: ScalarLike) -> Poly:
    """p(z + c)"""
    c = ComplexRational.coerce(c)
    if c.is_zero() or p.is_zero():
        return p
    step = Poly((c, ONE))
    result = Poly()
    for a in reversed(p.coeffs):
        result = result * step + Poly((a,))
    return result


def eval_poly(p: Poly, z: ScalarLike) -> ComplexRational:
    z = ComplexRational.coerce(z)
    acc = ZERO
    for a in reversed(p.coeffs):
        acc = acc * z + a
    return acc


def falling_factorial(x: int, k: int) -> int:
    """Integer x^(k) = x(x-1)...(x-k+1)"""
    out = 1
    for t in range(k):
        out *= x - t
    return out


@lru_cache(maxsize=None)
def falling_factorial_poly(k: int) -> Poly:
    """Monomial expansion of z^(k)"""
    return Poly(tuple(stirling_first(k, i) for i in range(k + 1)))


def inverse_factorial(k: int) -> Fraction:
    return Fraction(1, factorial(k))


# =============================================================================
# EXACT LINEAR ALGEBRA
# =============================================================================

def to_sympy(x: ComplexRational) -> sympy.Expr:
    re = sympy.Rational(x.re.numerator, x.re.denominator)
    if x.im == 0:
        return re
    return re + sympy.I * sympy.Rational(x.im.numerator, x.im.denominator)


def from_sympy(expr) -> ComplexRational:
    re, im = sympy.sympify(expr).as_real_imag()
    return ComplexRational(Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q)))


def domain_matrix(rows: Sequence[Sequence[ScalarLike]], ncols: int) -> DomainMatrix:
    """Rows as a DomainMatrix over QQ, or over the Gaussian rationals when any entry is complex"""
    entries = [[ComplexRational.coerce(x) for x in row] + [ZERO] * (ncols - len(row)) for row in rows]
    field = QQ if all(x.is_real for row in entries for x in row) else QQ_I
    elements = [[field.from_sympy(to_sympy(x)) for x in row] for row in entries]
    return DomainMatrix(elements, (len(entries), ncols), field)


def _rows_of(dm: DomainMatrix, count: int) -> List[List[ComplexRational]]:
    return [[from_sympy(x) for x in row] for row in dm.to_Matrix().tolist()[:count]]


def rref(rows: Sequence[Sequence[ScalarLike]], ncols: int) -> Tuple[List[List[ComplexRational]], List[int]]:
    """
    Reduced row echelon form over the complex rationals

    Returns the nonzero reduced rows and their pivot columns.
    """
    if not rows:
        return [], []
    reduced, pivots = domain_matrix(rows, ncols).rref()
    return _rows_of(reduced, len(pivots)), list(pivots)


def nullspace(rows: Sequence[Sequence[ScalarLike]], ncols: int) -> Tuple[List[List[ComplexRational]], List[int], List[int]]:
    """
    Exact nullspace basis of the matrix given by rows

    Returns (basis, pivot columns, free columns); basis[t] has a 1 at free
    column t and zeros at the other free columns.
    """
    if not rows:
        identity = [[ONE if c == f else ZERO for c in range(ncols)] for f in range(ncols)]
        return identity, [], list(range(ncols))

    dm = domain_matrix(rows, ncols)
    _, pivots = dm.rref()
    free = [c for c in range(ncols) if c not in set(pivots)]
    if not free:
        return [], list(pivots), []

    kernel = dm.nullspace()
    basis = []
    for vec in _rows_of(kernel, kernel.shape[0]):
        f = next(c for c in free if not vec[c].is_zero())
        basis.append([x / vec[f] for x in vec])
    basis.sort(key=lambda v: next(c for c in free if not v[c].is_zero()))
    return basis, list(pivots), free
