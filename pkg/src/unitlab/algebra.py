"""The group algebra FG with dense exact coefficient arrays.

An element is an integer array of shape ``(|G|, k)``: row g holds the
coefficient of g as a vector over GF(p) in the basis 1, x, ..., x^(k-1).
Batched routines act on stacks of shape ``(..., |G|, k)``.
"""

from __future__ import annotations

import re
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from .field import FieldElem, FiniteField, poly_str
from .groups import Group, GroupError, Subgroup, quotient_group


class AlgebraError(ValueError):
    pass


class NotAUnit(AlgebraError):
    pass


class GroupAlgebra:
    def __init__(self, field: FiniteField, group: Group):
        if field.p != group.p and group.order > 1:
            raise AlgebraError(f"characteristic {field.p} differs from the prime {group.p} of the group")
        self.field = field
        self.group = group
        self.p = field.p
        self.k = field.k
        self.n = group.order
        t, inv = group.table, group.inv
        # rdiv[h, g] = h g^-1 and ldiv[g, h] = g^-1 h
        self.rdiv = t[:, inv]
        self.ldiv = t[inv, :]
        self.T = field.mul_tensor

    def __repr__(self) -> str:
        return f"{self.field!r}[{self.group.name}]"

    @property
    def dim(self) -> int:
        return self.n

    # -- raw batched arithmetic -------------------------------------------

    def mul_arrays(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        """(XY)_h = sum_g X_{h g^-1} Y_g, for stacks of equal leading shape."""
        X = np.asarray(X, dtype=np.int64)
        Y = np.asarray(Y, dtype=np.int64)
        Xs = np.take(X, self.rdiv, axis=-2)  # (..., h, g, i)
        if self.k == 1:
            out = np.einsum("...hg,...g->...h", Xs[..., 0], Y[..., 0])[..., None]
        else:
            out = np.einsum("...hgi,...gj,ijc->...hc", Xs, Y, self.T, optimize=True)
        return out % self.p

    def right_matrix(self, y: np.ndarray) -> np.ndarray:
        """R with vec(x) @ R == vec(x y)."""
        Yg = np.asarray(y, dtype=np.int64)[self.ldiv]  # [g, h, j]
        R = np.einsum("ghj,ijc->gihc", Yg, self.T)
        return R.reshape(self.n * self.k, self.n * self.k)

    def left_matrix(self, x: np.ndarray) -> np.ndarray:
        """L with vec(y) @ L == vec(x y)."""
        Xh = np.asarray(x, dtype=np.int64)[self.rdiv]  # [h, g, i]
        L = np.einsum("hgi,ijc->gjhc", Xh, self.T)
        return L.reshape(self.n * self.k, self.n * self.k)

    def power_arrays(self, X: np.ndarray, e: int) -> np.ndarray:
        X = np.asarray(X, dtype=np.int64)
        result = np.broadcast_to(self.one.c, X.shape).astype(np.int64)
        while e:
            if e & 1:
                result = self.mul_arrays(result, X)
            e >>= 1
            if e:
                X = self.mul_arrays(X, X)
        return result

    def augmentation_arrays(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(X, dtype=np.int64).sum(axis=-2) % self.p

    # -- element constructors ---------------------------------------------

    def _wrap(self, arr: np.ndarray) -> AlgElem:
        return AlgElem(self, arr)

    @cached_property
    def zero(self) -> AlgElem:
        return self._wrap(np.zeros((self.n, self.k), dtype=np.int64))

    @cached_property
    def one(self) -> AlgElem:
        return self.basis(0)

    def basis(self, g: int) -> AlgElem:
        c = np.zeros((self.n, self.k), dtype=np.int64)
        c[g, 0] = 1
        return self._wrap(c)

    def scalar(self, a: FieldElem | int) -> AlgElem:
        return self.one.scale(a)

    def element(self, coeffs: Mapping[int, FieldElem | int]) -> AlgElem:
        c = np.zeros((self.n, self.k), dtype=np.int64)
        for g, a in coeffs.items():
            c[g] = (c[g] + np.array(self.field(a).coeffs)) % self.p
        return self._wrap(c)

    def from_array(self, arr) -> AlgElem:
        arr = np.asarray(arr, dtype=np.int64)
        if arr.shape == (self.n,) and self.k == 1:
            arr = arr[:, None]
        if arr.shape != (self.n, self.k):
            raise AlgebraError(f"coefficient array of shape {arr.shape}, expected {(self.n, self.k)}")
        return self._wrap(arr % self.p)

    def from_codes(self, codes: Iterable[int]) -> AlgElem:
        """From integer field codes (one per group element), as stored in certificates."""
        return self.element({g: self.field.from_int(int(c)) for g, c in enumerate(codes) if c})

    def hat(self, S: Iterable[int] | Subgroup) -> AlgElem:
        """Sum of the group elements in S."""
        c = np.zeros((self.n, self.k), dtype=np.int64)
        for g in set(S):
            c[g, 0] = 1
        return self._wrap(c)

    def parse(self, text: str) -> AlgElem:
        return parse_element(self, text)

    def random_units(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """Uniform random normalized units as a stack of shape (count, n, k)."""
        X = rng.integers(0, self.p, size=(count, self.n, self.k), dtype=np.int64)
        X[:, 0, :] = 0
        X[:, 0, :] = -X.sum(axis=1)
        X[:, 0, 0] += 1
        return X % self.p

    # -- quotients ----------------------------------------------------------

    def pushforward(self, x: AlgElem, proj: np.ndarray, target: GroupAlgebra) -> AlgElem:
        """Image of x under F[G] -> F[G/H] induced by the projection array."""
        c = np.zeros((target.n, self.k), dtype=np.int64)
        np.add.at(c, proj, x.c)
        return target._wrap(c % self.p)


class AlgElem:
    """An immutable element of a group algebra."""

    __slots__ = ("alg", "c", "_key")

    def __init__(self, alg: GroupAlgebra, c: np.ndarray):
        c = np.ascontiguousarray(c, dtype=np.int64)
        c.setflags(write=False)
        self.alg = alg
        self.c = c
        self._key = None

    @property
    def key(self) -> bytes:
        if self._key is None:
            self._key = self.c.astype(np.uint8).tobytes()
        return self._key

    def _same(self, other: AlgElem) -> None:
        if not isinstance(other, AlgElem):
            raise TypeError(f"expected an algebra element, got {type(other).__name__}")
        if other.alg is not self.alg:
            raise AlgebraError("elements of different group algebras")

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = self.alg.scalar(other)
        if not isinstance(other, AlgElem):
            return NotImplemented
        return other.alg is self.alg and np.array_equal(self.c, other.c)

    def __hash__(self) -> int:
        return hash(self.key)

    def __bool__(self) -> bool:
        return bool(self.c.any())

    def __add__(self, other) -> AlgElem:
        if isinstance(other, (int, FieldElem)):
            other = self.alg.scalar(other)
        self._same(other)
        return AlgElem(self.alg, (self.c + other.c) % self.alg.p)

    __radd__ = __add__

    def __neg__(self) -> AlgElem:
        return AlgElem(self.alg, -self.c % self.alg.p)

    def __sub__(self, other) -> AlgElem:
        if isinstance(other, (int, FieldElem)):
            other = self.alg.scalar(other)
        return self + (-other)

    def __rsub__(self, other) -> AlgElem:
        return (-self) + other

    def scale(self, a: FieldElem | int) -> AlgElem:
        a = self.alg.field(a)
        vec = np.array(a.coeffs, dtype=np.int64)
        out = np.einsum("gi,j,ijc->gc", self.c, vec, self.alg.T) % self.alg.p
        return AlgElem(self.alg, out)

    def __mul__(self, other) -> AlgElem:
        if isinstance(other, (int, FieldElem)):
            return self.scale(other)
        self._same(other)
        return AlgElem(self.alg, self.alg.mul_arrays(self.c, other.c))

    def __rmul__(self, other) -> AlgElem:
        if isinstance(other, (int, FieldElem)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, e: int) -> AlgElem:
        if e < 0:
            return self.inverse() ** (-e)
        return AlgElem(self.alg, self.alg.power_arrays(self.c, e))

    def coeff(self, g: int) -> FieldElem:
        return FieldElem(self.alg.field, tuple(int(v) for v in self.c[g]))

    def codes(self) -> list[int]:
        """Integer field code of every coefficient."""
        weights = self.alg.p ** np.arange(self.alg.k)
        return [int(v) for v in self.c @ weights]

    def augmentation(self) -> FieldElem:
        return FieldElem(self.alg.field, tuple(int(v) for v in self.alg.augmentation_arrays(self.c)))

    def support(self) -> list[int]:
        return [int(g) for g in np.flatnonzero(self.c.any(axis=1))]

    def is_normalized(self) -> bool:
        return self.augmentation() == 1

    def inverse(self) -> AlgElem:
        """Inverse through the nilpotent augmentation ideal.

        With u = a(1 - n), a = aug(u), the element n has augmentation 0 and so
        is nilpotent; u^-1 = a^-1 (1 + n + n^2 + ...).
        """
        a = self.augmentation()
        if not a:
            raise NotAUnit("augmentation is zero, element is not a unit")
        ainv = a.inverse()
        nil = self.alg.one - self.scale(ainv)
        total = self.alg.one
        term = self.alg.one
        for _ in range(self.alg.n):
            term = term * nil
            if not term:
                break
            total = total + term
        else:
            raise AlgebraError("augmentation ideal failed to be nilpotent")  # pragma: no cover
        return total.scale(ainv)

    def order(self) -> int:
        """Multiplicative order of a normalized unit (a power of p)."""
        if not self.is_normalized():
            raise NotAUnit("order is only defined here for normalized units")
        e, x = 1, self
        one = self.alg.one
        while x != one:
            x = x ** self.alg.p
            e *= self.alg.p
        return e

    def commutator(self, other: AlgElem) -> AlgElem:
        """(u, v) = u^-1 v^-1 u v."""
        self._same(other)
        return self.inverse() * other.inverse() * self * other

    def conjugate(self, by: AlgElem) -> AlgElem:
        """u^v = v^-1 u v."""
        self._same(by)
        return by.inverse() * self * by

    def render(self) -> str:
        return render_element(self)

    __str__ = render

    def __repr__(self) -> str:
        return f"AlgElem({self.render()})"


def unit_inverse(u: AlgElem) -> AlgElem:
    return u.inverse()


def unit_order(u: AlgElem) -> int:
    return u.order()


def unit_commutator(u: AlgElem, v: AlgElem) -> AlgElem:
    for w in (u, v):
        if not w.augmentation():
            raise NotAUnit("commutator of a non-unit")
    return u.commutator(v)


def conjugate(u: AlgElem, v: AlgElem) -> AlgElem:
    return u.conjugate(v)


def support(x: AlgElem) -> list[int]:
    return x.support()


def augmentation(x: AlgElem) -> FieldElem:
    return x.augmentation()


def ideal_coset_test(x: AlgElem, H: Subgroup) -> bool:
    """x lies in I(H), i.e. its coefficients sum to zero on every coset of the normal H."""
    G = x.alg.group
    if H.group is not G:
        raise AlgebraError("subgroup of a different group")
    if not H.is_normal():
        raise GroupError("subgroup is not normal")
    _, proj = quotient_group(G, H)
    sums = np.zeros((int(proj.max()) + 1, x.alg.k), dtype=np.int64)
    np.add.at(sums, proj, x.c)
    return not (sums % x.alg.p).any()


# -- text form ----------------------------------------------------------------


def _coef_str(a: FieldElem) -> str:
    if a.field.k == 1:
        return str(a.coeffs[0])
    s = poly_str(a.coeffs)
    return f"({s})" if "+" in s else s


def render_element(x: AlgElem) -> str:
    terms = []
    G = x.alg.group
    for g in x.support():
        a = x.coeff(g)
        label = G.label(g)
        if a == 1:
            terms.append(label)
        elif label == "1":
            terms.append(_coef_str(a))
        else:
            terms.append(f"{_coef_str(a)}*{label}")
    return " + ".join(terms) if terms else "0"


_MONO = re.compile(r"^(\d*)x(?:\^(\d+))?$")


def _split_top(text: str, sep: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def _parse_scalar(F: FiniteField, tok: str) -> FieldElem | None:
    if tok.isdigit():
        return F(int(tok))
    if tok.startswith("(") and tok.endswith(")"):
        total = F.zero
        for t in _split_top(tok[1:-1], "+"):
            s = _parse_scalar(F, t)
            if s is None:
                raise AlgebraError(f"bad field coefficient {tok!r}")
            total = total + s
        return total
    m = _MONO.match(tok)
    if m:
        if F.k == 1:
            raise AlgebraError(f"{tok!r}: the prime field has no generator x")
        c = int(m.group(1) or 1)
        return F([0] * int(m.group(2) or 1) + [c])
    return None


def parse_element(alg: GroupAlgebra, text: str) -> AlgElem:
    """Parse formal sums like ``1 + a + 2*a^2*b`` or ``(x+1)*b`` (GF(p^k))."""
    src = re.sub(r"(?<!\^)-", "+-", text.replace(" ", ""))
    total = alg.zero
    for term in _split_top(src, "+"):
        if term == "":
            continue
        neg = term.startswith("-")
        if neg:
            term = term[1:]
        coef = alg.field.one
        g = 0
        for factor in _split_top(term, "*"):
            s = _parse_scalar(alg.field, factor)
            if s is not None:
                coef = coef * s
            else:
                try:
                    g = alg.group.mul(g, alg.group.element(factor))
                except (GroupError, ValueError) as exc:
                    raise AlgebraError(f"cannot parse {factor!r} in {text!r}") from exc
        if neg:
            coef = -coef
        total = total + alg.basis(g).scale(coef)
    return total
