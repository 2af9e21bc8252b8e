"""Finite p-groups as Cayley tables.

Elements are the indices ``0..n-1`` with 0 the identity.  Every element keeps
a normal-form word in the group's named generators so reports can print
``a^3*b`` instead of a bare index.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import reduce
from math import gcd
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np

MAX_ORDER = 256
# 'x' is reserved for the field generator in element syntax.
LETTERS = "abcdefghijklmnopqrstuvwyz"

Word = tuple[tuple[int, int], ...]


class GroupError(ValueError):
    pass


def prime_of_power(n: int) -> int | None:
    """The prime p with n = p^t (t >= 1), or None."""
    if n < 2:
        return None
    p = next(d for d in range(2, n + 1) if n % d == 0)
    while n % p == 0:
        n //= p
    return p if n == 1 else None


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, int(n**0.5) + 1))


# ---------------------------------------------------------------------------
# construction trees


@dataclass(frozen=True)
class Cyclic:
    n: int

    def __post_init__(self):
        if prime_of_power(self.n) is None:
            raise GroupError(f"C{self.n}: {self.n} is not a prime power")

    @property
    def prime(self) -> int:
        return prime_of_power(self.n)

    @property
    def order(self) -> int:
        return self.n


@dataclass(frozen=True)
class Dihedral:
    n: int

    def __post_init__(self):
        if self.n < 8 or prime_of_power(self.n) != 2:
            raise GroupError(f"D{self.n}: order must be 2^t with t >= 3")

    prime = 2

    @property
    def order(self) -> int:
        return self.n


@dataclass(frozen=True)
class Quaternion:
    prime = 2
    order = 8


@dataclass(frozen=True)
class Heisenberg:
    p: int

    def __post_init__(self):
        if not _is_prime(self.p) or self.p == 2:
            raise GroupError(f"H{self.p}: need an odd prime")

    @property
    def prime(self) -> int:
        return self.p

    @property
    def order(self) -> int:
        return self.p**3


@dataclass(frozen=True)
class Modular:
    """M(p^(m+2)) = <a, b | a^(p^(m+1)) = b^p = 1, b^-1 a b = a^(1+p^m)>."""

    p: int
    m: int

    def __post_init__(self):
        if not _is_prime(self.p):
            raise GroupError(f"MOD{self.p},{self.m}: {self.p} is not prime")
        if self.m < 1:
            raise GroupError(f"MOD{self.p},{self.m}: need m >= 1")

    @property
    def prime(self) -> int:
        return self.p

    @property
    def order(self) -> int:
        return self.p ** (self.m + 2)


@dataclass(frozen=True)
class DirectProduct:
    left: "GroupSpec"
    right: "GroupSpec"

    def __post_init__(self):
        if self.left.prime != self.right.prime:
            raise GroupError("direct product of groups with different primes")

    @property
    def prime(self) -> int:
        return self.left.prime

    @property
    def order(self) -> int:
        return self.left.order * self.right.order


@dataclass(frozen=True)
class CentralProduct:
    left: "GroupSpec"
    right: "GroupSpec"

    def __post_init__(self):
        if self.left.prime != self.right.prime:
            raise GroupError("central product of groups with different primes")

    @property
    def prime(self) -> int:
        return self.left.prime

    @property
    def order(self) -> int:
        return self.left.order * self.right.order // self.prime


GroupSpec = Cyclic | Dihedral | Quaternion | Heisenberg | Modular | DirectProduct | CentralProduct


# ---------------------------------------------------------------------------
# the table group


class Group:
    def __init__(
        self,
        table: np.ndarray,
        words: Sequence[Word],
        gen_names: Sequence[str],
        p: int,
        name: str = "",
        check: bool = True,
    ):
        table = np.asarray(table, dtype=np.int64)
        n = table.shape[0]
        if table.shape != (n, n):
            raise GroupError("multiplication table must be square")
        if n > MAX_ORDER:
            raise GroupError(f"group order {n} exceeds cap {MAX_ORDER}")
        if n != 1 and prime_of_power(n) != p:
            raise GroupError(f"order {n} is not a power of {p}")
        table.setflags(write=False)
        self.table = table
        self.p = p
        self.words = tuple(tuple(w) for w in words)
        self.gen_names = tuple(gen_names)
        self.name = name
        inv = np.argmax(table == 0, axis=1)
        inv.setflags(write=False)
        self.inv = inv
        self._memo: dict = {}
        if check:
            self.check_axioms()
        self.generators = {}
        for i, w in enumerate(self.words):
            if len(w) == 1 and w[0][1] == 1:
                self.generators[self.gen_names[w[0][0]]] = i

    @property
    def order(self) -> int:
        return self.table.shape[0]

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        return f"<Group {self.name or '?'} of order {self.order}>"

    def elements(self) -> range:
        return range(self.order)

    def check_axioms(self, samples: int = 20000, seed: int = 0) -> None:
        t, n = self.table, self.order
        ar = np.arange(n)
        if not (np.array_equal(t[0], ar) and np.array_equal(t[:, 0], ar)):
            raise GroupError("index 0 is not a two-sided identity")
        for row in t:
            if len(set(row.tolist())) != n:
                raise GroupError("table row is not a permutation")
        if not (np.all(t[ar, self.inv] == 0) and np.all(t[self.inv, ar] == 0)):
            raise GroupError("inverse law fails")
        if n <= 64:
            lhs = t[t]  # lhs[a, b, c] = (ab)c
            rhs = t[ar[:, None, None], t[None, :, :]]
            if not np.array_equal(lhs, rhs):
                raise GroupError("multiplication is not associative")
        else:
            rng = np.random.default_rng(seed)
            a, b, c = rng.integers(0, n, size=(3, samples))
            if not np.array_equal(t[t[a, b], c], t[a, t[b, c]]):
                raise GroupError("multiplication is not associative (sampled)")

    def mul(self, *xs: int) -> int:
        return reduce(lambda a, b: int(self.table[a, b]), xs, 0)

    def power(self, g: int, e: int) -> int:
        if e < 0:
            g, e = int(self.inv[g]), -e
        r = 0
        while e:
            if e & 1:
                r = int(self.table[r, g])
            g = int(self.table[g, g])
            e >>= 1
        return r

    def commutator(self, a: int, b: int) -> int:
        """(a, b) = a^-1 b^-1 a b."""
        return self.mul(int(self.inv[a]), int(self.inv[b]), a, b)

    def conj(self, g: int, h: int) -> int:
        """g^h = h^-1 g h."""
        return self.mul(int(self.inv[h]), g, h)

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def label(self, g: int) -> str:
        return render_word(self.words[g], self.gen_names)

    def element(self, word: str) -> int:
        """Evaluate a word such as ``a^3*b`` (``1`` is the identity)."""
        word = word.replace(" ", "")
        if word in ("", "1"):
            return 0
        g = 0
        for part in word.split("*"):
            name, _, e = part.partition("^")
            if name not in self.generators:
                raise GroupError(f"unknown generator {name!r} in {word!r}")
            g = self.mul(g, self.power(self.generators[name], int(e) if e else 1))
        return g

    def memo(self, key, fn: Callable):
        if key not in self._memo:
            self._memo[key] = fn()
        return self._memo[key]


def render_word(word: Word, names: Sequence[str]) -> str:
    if not word:
        return "1"
    return "*".join(names[i] if e == 1 else f"{names[i]}^{e}" for i, e in word)


def _from_model(
    elements: list[Hashable],
    mul: Callable[[Hashable, Hashable], Hashable],
    words: list[Word],
    gen_names: Sequence[str],
    p: int,
    name: str,
) -> Group:
    index = {e: i for i, e in enumerate(elements)}
    n = len(elements)
    table = np.empty((n, n), dtype=np.int64)
    for i, x in enumerate(elements):
        for j, y in enumerate(elements):
            table[i, j] = index[mul(x, y)]
    return Group(table, words, gen_names, p, name)


def _word(*pairs: tuple[int, int]) -> Word:
    return tuple((g, e) for g, e in pairs if e)


def cyclic_group(n: int) -> Group:
    p = prime_of_power(n)
    return _from_model(
        list(range(n)), lambda x, y: (x + y) % n, [_word((0, i)) for i in range(n)], "a", p, f"C{n}"
    )


def dihedral_group(n: int) -> Group:
    """r^i s^j with a = r (order n/2), b = s; s r s = r^-1."""
    h = n // 2
    els = [(i, j) for j in range(2) for i in range(h)]

    def mul(x, y):
        return ((x[0] + (-1) ** x[1] * y[0]) % h, (x[1] + y[1]) % 2)

    return _from_model(els, mul, [_word((0, i), (1, j)) for i, j in els], "ab", 2, f"D{n}")


def quaternion_group() -> Group:
    """a^i b^j with a^4 = 1, b^2 = a^2, b^-1 a b = a^-1."""
    els = [(i, j) for j in range(2) for i in range(4)]

    def mul(x, y):
        i = x[0] + (-1) ** x[1] * y[0]
        j = x[1] + y[1]
        if j == 2:
            i, j = i + 2, 0
        return (i % 4, j)

    return _from_model(els, mul, [_word((0, i), (1, j)) for i, j in els], "ab", 2, "Q8")


def modular_group(p: int, m: int) -> Group:
    """a^i b^j in M(p^(m+2)); b^j a^k = a^(k s^j) b^j where s = (1+p^m)^-1."""
    na = p ** (m + 1)
    s = pow(1 + p**m, -1, na)
    els = [(i, j) for j in range(p) for i in range(na)]

    def mul(x, y):
        return ((x[0] + y[0] * pow(s, x[1], na)) % na, (x[1] + y[1]) % p)

    name = f"M{p ** (m + 2)}" if p == 2 else f"MOD{p},{m}"
    return _from_model(els, mul, [_word((0, i), (1, j)) for i, j in els], "ab", p, name)


def heisenberg_group(p: int) -> Group:
    """Unitriangular [[1,x,z],[0,1,y],[0,0,1]] over GF(p); a, b the off-diagonal units, c = z."""
    els = [(x, y, z) for z in range(p) for y in range(p) for x in range(p)]

    def mul(u, v):
        return ((u[0] + v[0]) % p, (u[1] + v[1]) % p, (u[2] + v[2] + u[0] * v[1]) % p)

    words = [_word((0, x), (1, y), (2, (z - x * y) % p)) for x, y, z in els]
    return _from_model(els, mul, words, "abc", p, f"H{p}")


def _fresh_names(count: int) -> tuple[str, ...]:
    if count > len(LETTERS):
        raise GroupError("too many generators to name")
    return tuple(LETTERS[:count])


def direct_product(A: Group, B: Group, name: str = "") -> Group:
    if A.p != B.p and A.order > 1 and B.order > 1:
        raise GroupError("direct product of groups with different primes")
    na, nb = A.order, B.order
    ia = np.repeat(np.arange(na), nb)
    ib = np.tile(np.arange(nb), na)
    table = A.table[ia[:, None], ia[None, :]] * nb + B.table[ib[:, None], ib[None, :]]
    shift = len(A.gen_names)
    words = [A.words[x] + tuple((g + shift, e) for g, e in B.words[y]) for x, y in zip(ia, ib)]
    names = _fresh_names(len(A.gen_names) + len(B.gen_names))
    return Group(table, words, names, A.p, name or f"{A.name} x {B.name}")


def _order_p_central(G: Group) -> int:
    Z = center(G)
    if not Z.is_cyclic():
        raise GroupError(f"center of {G.name} is not cyclic")
    if len(Z) == 1:
        raise GroupError(f"center of {G.name} is trivial")
    return next(z for z in Z if element_order(G, z) == G.p)


def central_product(A: Group, B: Group, name: str = "") -> Group:
    """A Y B: identify the unique order-p subgroups of the cyclic centres.

    At least one centre must have order p so the amalgamated subgroup is the
    whole centre of that factor.
    """
    if A.p != B.p:
        raise GroupError("central product of groups with different primes")
    p = A.p
    za, zb = _order_p_central(A), _order_p_central(B)
    if len(center(A)) != p and len(center(B)) != p:
        raise GroupError(f"neither centre of {A.name}, {B.name} has order {p}")
    if A.order * B.order // p > MAX_ORDER:
        raise GroupError(f"central product order exceeds cap {MAX_ORDER}")
    AB = direct_product(A, B)
    diag = AB.mul(za * B.order, int(B.inv[zb]))
    N = subgroup_closure(AB, [diag])
    Q, _ = quotient_group(AB, N, rep_key=lambda g: (g % B.order, g // B.order))
    Q.name = name or f"{A.name} Y {B.name}"
    return Q


def spec_text(spec: GroupSpec) -> str:
    """Canonical descriptor text; binary nodes associate to the left."""
    match spec:
        case Cyclic(n):
            return f"C{n}"
        case Dihedral(n):
            return f"D{n}"
        case Quaternion():
            return "Q8"
        case Heisenberg(p):
            return f"H{p}"
        case Modular(2, m):
            return f"M{2 ** (m + 2)}"
        case Modular(p, m):
            return f"MOD{p},{m}"
        case DirectProduct(l, r) | CentralProduct(l, r):
            op = "x" if isinstance(spec, DirectProduct) else "Y"
            right = spec_text(r)
            if isinstance(r, (DirectProduct, CentralProduct)):
                right = f"({right})"
            return f"{spec_text(l)} {op} {right}"
    raise GroupError(f"unknown group spec {spec!r}")


def construct_group(spec: GroupSpec) -> Group:
    if spec.order > MAX_ORDER:
        raise GroupError(f"group order {spec.order} exceeds cap {MAX_ORDER}")
    G = _construct(spec)
    G.name = spec_text(spec)
    return G


def _construct(spec: GroupSpec) -> Group:
    match spec:
        case Cyclic(n):
            return cyclic_group(n)
        case Dihedral(n):
            return dihedral_group(n)
        case Quaternion():
            return quaternion_group()
        case Heisenberg(p):
            return heisenberg_group(p)
        case Modular(p, m):
            return modular_group(p, m)
        case DirectProduct(l, r):
            return direct_product(construct_group(l), construct_group(r))
        case CentralProduct(l, r):
            return central_product(construct_group(l), construct_group(r))
    raise GroupError(f"unknown group spec {spec!r}")


# ---------------------------------------------------------------------------
# subgroups


@dataclass(frozen=True, eq=False)
class Subgroup:
    group: Group
    elements: tuple[int, ...]

    def __post_init__(self):
        if self.group.order % len(self.elements):
            raise GroupError("subgroup order does not divide group order")

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, g) -> bool:
        return g in self._set

    def __eq__(self, other) -> bool:
        return isinstance(other, Subgroup) and self.group is other.group and self.elements == other.elements

    def __hash__(self) -> int:
        return hash(self.elements)

    def __le__(self, other: Subgroup) -> bool:
        return self._set <= other._set

    @property
    def _set(self) -> frozenset[int]:
        s = self.__dict__.get("_s")
        if s is None:
            s = frozenset(self.elements)
            object.__setattr__(self, "_s", s)
        return s

    @property
    def order(self) -> int:
        return len(self.elements)

    def is_normal(self) -> bool:
        G = self.group
        return all(G.conj(h, g) in self for h in self.elements for g in G.elements())

    def is_cyclic(self) -> bool:
        return any(element_order(self.group, g) == len(self) for g in self.elements)

    def labels(self) -> list[str]:
        return [self.group.label(g) for g in self.elements]


def subgroup_closure(G: Group, gens: Iterable[int], normal: bool = False) -> Subgroup:
    """Smallest (normal, if asked) subgroup containing `gens`."""
    gens = sorted(set(int(g) for g in gens) - {0})
    if normal:
        gens = sorted({G.conj(g, h) for g in gens for h in G.elements()} - {0})
    seen = {0}
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = int(G.table[x, g])
            if y not in seen:
                seen.add(y)
                queue.append(y)
    H = Subgroup(G, tuple(sorted(seen)))
    if normal:
        # the conjugates of gens generate a normal subgroup already
        assert H.is_normal()
    return H


def whole(G: Group) -> Subgroup:
    return Subgroup(G, tuple(G.elements()))


def trivial(G: Group) -> Subgroup:
    return Subgroup(G, (0,))


def center(G: Group) -> Subgroup:
    def run():
        t = G.table
        return Subgroup(G, tuple(int(z) for z in range(G.order) if np.array_equal(t[z], t[:, z])))

    return G.memo("center", run)


def derived_subgroup(G: Group) -> Subgroup:
    def run():
        comms = {G.commutator(a, b) for a in G.elements() for b in G.elements()}
        return subgroup_closure(G, comms)

    return G.memo("derived", run)


def power_subgroup(G: Group, e: int) -> Subgroup:
    if e < 1:
        raise GroupError("exponent must be positive")
    return G.memo(("power", e), lambda: subgroup_closure(G, {G.power(g, e) for g in G.elements()}))


def omega(G: Group, k: int) -> Subgroup:
    if k < 1:
        raise GroupError("k must be positive")
    q = G.p**k
    return G.memo(("omega", k), lambda: subgroup_closure(G, [g for g in G.elements() if G.power(g, q) == 0]))


def frattini(G: Group) -> Subgroup:
    """G' G^p, which is the Frattini subgroup of a finite p-group."""
    return G.memo(
        "frattini",
        lambda: subgroup_closure(G, derived_subgroup(G).elements + power_subgroup(G, G.p).elements),
    )


def element_order(G: Group, g: int) -> int:
    e, x = 1, g
    while x != 0:
        x = int(G.table[x, g])
        e += 1
    return e


def exponent(G: Group | Subgroup) -> int:
    if isinstance(G, Subgroup):
        orders = [element_order(G.group, g) for g in G]
    else:
        orders = [element_order(G, g) for g in G.elements()]
    return reduce(lambda a, b: a * b // gcd(a, b), orders, 1)


def quotient_group(
    G: Group, N: Subgroup, rep_key: Callable[[int], object] | None = None
) -> tuple[Group, np.ndarray]:
    """G/N as a table group, with the projection G -> G/N as an index array.

    Each coset is labelled by its representative minimising `rep_key`
    (default: smallest index); cosets are ordered by that key.
    """
    if N.group is not G:
        raise GroupError("subgroup of a different group")
    if not N.is_normal():
        raise GroupError("subgroup is not normal")
    key = rep_key or (lambda g: g)
    coset_of = np.full(G.order, -1, dtype=np.int64)
    reps = []
    for g in sorted(G.elements(), key=key):
        if coset_of[g] >= 0:
            continue
        coset = G.table[g, list(N.elements)]
        coset_of[coset] = len(reps)
        reps.append(g)
    r = np.array(reps)
    table = coset_of[G.table[r[:, None], r[None, :]]]
    words = [G.words[g] for g in reps]
    Q = Group(table, words, G.gen_names, G.p, f"{G.name}/N")
    # projection is a homomorphism by construction; confirm on the full table
    if not np.array_equal(coset_of[G.table], table[coset_of[:, None], coset_of[None, :]]):
        raise GroupError("projection is not a homomorphism")  # pragma: no cover
    coset_of.setflags(write=False)
    return Q, coset_of


def is_powerful_table(G: Group) -> bool:
    e = 4 if G.p == 2 else G.p
    return derived_subgroup(G) <= power_subgroup(G, e)


def newman_class2_check(G: Group) -> bool:
    """Nonabelian, |G'| = p and cyclic centre."""
    if G.is_abelian():
        return False
    return len(derived_subgroup(G)) == G.p and center(G).is_cyclic()

