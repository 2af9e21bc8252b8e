"""Exact arithmetic in GF(p^k) with a polynomial basis."""

from __future__ import annotations

from functools import cached_property
from itertools import product
from typing import Iterator, Sequence

import numpy as np

SUPPORTED_PRIMES = (2, 3, 5, 7)
MAX_DEGREE = 8


class FieldError(ValueError):
    pass


def _trim(c: Sequence[int]) -> tuple[int, ...]:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def poly_divmod(a: Sequence[int], b: Sequence[int], p: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Divide polynomials over GF(p); coefficient lists are lowest degree first."""
    a = list(_trim(a))
    b = _trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    lead_inv = pow(b[-1], p - 2, p)
    q = [0] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        f = a[-1] * lead_inv % p
        q[shift] = f
        for i, bc in enumerate(b):
            a[shift + i] = (a[shift + i] - f * bc) % p
        a = list(_trim(a))
    return _trim(q), tuple(a)


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """True iff the monic `modulus` has no monic factor of degree <= deg/2."""
    m = _trim(modulus)
    k = len(m) - 1
    if k < 1:
        return False
    for d in range(1, k // 2 + 1):
        for low in product(range(p), repeat=d):
            if poly_divmod(m, low + (1,), p)[1] == ():
                return False
    return True


def default_modulus(p: int, k: int) -> tuple[int, ...]:
    """The monic irreducible of degree k whose low coefficients, read base p, are smallest."""
    for code in range(p**k):
        low = tuple((code // p**i) % p for i in range(k))
        cand = low + (1,)
        if is_irreducible(cand, p):
            return cand
    raise FieldError(f"no irreducible polynomial of degree {k} over GF({p})")  # pragma: no cover


class FiniteField:
    """GF(p^k) realised as GF(p)[x]/(modulus).

    Elements are coefficient vectors ``(c_0, ..., c_{k-1})`` and are also
    addressable by the integer code ``sum c_i p^i``.
    """

    def __init__(self, p: int, k: int = 1, modulus: Sequence[int] | None = None):
        if p not in SUPPORTED_PRIMES:
            raise FieldError(f"characteristic {p} not supported (use one of {SUPPORTED_PRIMES})")
        if not 1 <= k <= MAX_DEGREE:
            raise FieldError(f"degree {k} outside 1..{MAX_DEGREE}")
        if modulus is None:
            modulus = default_modulus(p, k)
        modulus = tuple(int(c) % p for c in modulus)
        if len(_trim(modulus)) != k + 1 or modulus[-1] != 1:
            raise FieldError(f"modulus must be monic of degree {k}")
        if not is_irreducible(modulus, p):
            raise FieldError(f"modulus {poly_str(modulus)} is reducible over GF({p})")
        self.p = p
        self.k = k
        self.modulus = modulus

    @property
    def order(self) -> int:
        return self.p**self.k

    @property
    def characteristic(self) -> int:
        return self.p

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FiniteField)
            and (self.p, self.k, self.modulus) == (other.p, other.k, other.modulus)
        )

    def __hash__(self) -> int:
        return hash((self.p, self.k, self.modulus))

    def __repr__(self) -> str:
        if self.k == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.k}, {poly_str(self.modulus)})"

    def __len__(self) -> int:
        return self.order

    @property
    def name(self) -> str:
        return str(self.p) if self.k == 1 else f"{self.p}^{self.k}"

    def __call__(self, value) -> FieldElem:
        if isinstance(value, FieldElem):
            self._check(value)
            return value
        if isinstance(value, (int, np.integer)):
            return FieldElem(self, (int(value) % self.p,) + (0,) * (self.k - 1))
        return FieldElem(self, self.reduce(value))

    def _check(self, a: FieldElem) -> None:
        if a.field is not self and a.field != self:
            raise TypeError(f"element of {a.field!r} used with {self!r}")

    def reduce(self, coeffs: Sequence[int]) -> tuple[int, ...]:
        r = poly_divmod([int(c) % self.p for c in coeffs], self.modulus, self.p)[1]
        return r + (0,) * (self.k - len(r))

    @property
    def zero(self) -> FieldElem:
        return self(0)

    @property
    def one(self) -> FieldElem:
        return self(1)

    def basis(self) -> list[FieldElem]:
        """Prime-subfield basis 1, x, ..., x^(k-1)."""
        return [FieldElem(self, tuple(int(i == j) for j in range(self.k))) for i in range(self.k)]

    def from_int(self, code: int) -> FieldElem:
        if not 0 <= code < self.order:
            raise FieldError(f"code {code} outside 0..{self.order - 1}")
        return FieldElem(self, tuple((code // self.p**i) % self.p for i in range(self.k)))

    def elements(self) -> Iterator[FieldElem]:
        for code in range(self.order):
            yield self.from_int(code)

    def nonzero(self) -> Iterator[FieldElem]:
        for code in range(1, self.order):
            yield self.from_int(code)

    @cached_property
    def mul_tensor(self) -> np.ndarray:
        """T[i, j] = coefficient vector of x^(i+j) reduced; shape (k, k, k)."""
        t = np.zeros((self.k, self.k, self.k), dtype=np.int64)
        for i in range(self.k):
            for j in range(self.k):
                mono = [0] * (i + j) + [1]
                t[i, j] = self.reduce(mono)
        t.setflags(write=False)
        return t


def make_field(p: int, k: int = 1, modulus: Sequence[int] | None = None) -> FiniteField:
    return FiniteField(p, k, modulus)


def parse_field(text: str) -> FiniteField:
    """Parse ``"p"`` or ``"p^k"``. A bare prime power such as ``"4"`` is rejected."""
    text = text.strip()
    try:
        if "^" in text:
            p_s, k_s = text.split("^", 1)
            p, k = int(p_s), int(k_s)
        else:
            p, k = int(text), 1
    except ValueError:
        raise FieldError(f"bad field syntax {text!r}; expected p or p^k") from None
    if p not in SUPPORTED_PRIMES:
        raise FieldError(f"bad field {text!r}: {p} is not a supported prime; write p^k for GF(p^k)")
    return FiniteField(p, k)


def poly_str(c: Sequence[int], var: str = "x") -> str:
    terms = []
    for i in reversed(range(len(c))):
        if not c[i]:
            continue
        mono = "1" if i == 0 else var if i == 1 else f"{var}^{i}"
        if c[i] == 1:
            terms.append(mono)
        elif i == 0:
            terms.append(str(c[i]))
        else:
            terms.append(f"{c[i]}*{mono}")
    return "+".join(terms) if terms else "0"


class FieldElem:
    __slots__ = ("field", "coeffs")

    def __init__(self, field: FiniteField, coeffs: tuple[int, ...]):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coeffs", tuple(coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("FieldElem is immutable")

    def _coerce(self, other) -> FieldElem | None:
        if isinstance(other, FieldElem):
            self.field._check(other)
            return other
        if isinstance(other, (int, np.integer)):
            return self.field(int(other))
        return None

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, np.integer)):
            other = self.field(int(other))
        if not isinstance(other, FieldElem):
            return NotImplemented
        return self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.field, self.coeffs))

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def __int__(self) -> int:
        return sum(c * self.field.p**i for i, c in enumerate(self.coeffs))

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p = self.field.p
        return FieldElem(self.field, tuple((a + b) % p for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self) -> FieldElem:
        p = self.field.p
        return FieldElem(self.field, tuple(-a % p for a in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p = self.field.p
        prod = [0] * (2 * self.field.k - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    prod[i + j] += a * b
        return FieldElem(self.field, self.field.reduce([c % p for c in prod]))

    __rmul__ = __mul__

    def inverse(self) -> FieldElem:
        if not self:
            raise ZeroDivisionError("inverse of zero in " + repr(self.field))
        return self ** (self.field.order - 2)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, e: int) -> FieldElem:
        if e < 0:
            return self.inverse() ** (-e)
        result = self.field.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __repr__(self) -> str:
        return f"{self.field!r}({self})"

    def __str__(self) -> str:
        return poly_str(self.coeffs)
