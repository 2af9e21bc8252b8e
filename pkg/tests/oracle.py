"""Slow reference implementations used as independent oracles.

Nothing here touches numpy tables or the fast algebra code: groups are built
from permutations or matrices, group rings are dicts keyed by group elements,
and closures are plain breadth-first searches over Python sets.
"""

from __future__ import annotations

from itertools import product


def perm_mul(x, y):
    # apply x then y
    return tuple(y[i] for i in x)


def closure(gens, mul, identity):
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = mul(g, s)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    return seen


def dihedral_perms(n):
    m = n // 2
    r = tuple((i + 1) % m for i in range(m))
    s = tuple((-i) % m for i in range(m))
    return closure([r, s], perm_mul, tuple(range(m)))


def quaternion_matrices():
    # Q8 as 2x2 matrices over GF(3)
    def mm(x, y):
        return tuple(
            tuple(sum(x[i][k] * y[k][j] for k in range(2)) % 3 for j in range(2)) for i in range(2)
        )

    i = ((0, 2), (1, 0))
    j = ((1, 1), (1, 2))
    one = ((1, 0), (0, 1))
    return closure([i, j], mm, one), mm


def unitriangular(p):
    def mm(x, y):
        a, b, c = x
        d, e, f = y
        return ((a + d) % p, (b + e + a * f) % p, (c + f) % p)

    elems = set(product(range(p), repeat=3))
    return elems, mm


def group_stats(elems, mul, identity):
    elems = list(elems)
    inv = {g: next(h for h in elems if mul(g, h) == identity) for g in elems}
    center = [g for g in elems if all(mul(g, h) == mul(h, g) for h in elems)]
    comms = {mul(mul(inv[a], inv[b]), mul(a, b)) for a in elems for b in elems}
    derived = closure(list(comms), mul, identity)

    def order(g):
        k, x = 1, g
        while x != identity:
            x, k = mul(x, g), k + 1
        return k

    orders = sorted(order(g) for g in elems)
    return {"order": len(elems), "center": len(center), "derived": len(derived), "orders": orders}


# ---------------------------------------------------------------------------
# group ring over GF(p) on top of an arbitrary multiplication function


class NaiveRing:
    def __init__(self, elems, mul, identity, p):
        self.elems = sorted(elems)
        self.mul = {(g, h): mul(g, h) for g in self.elems for h in self.elems}.__getitem__
        self.e = identity
        self.p = p

    def vec(self, d):
        return tuple(d.get(g, 0) % self.p for g in self.elems)

    def times(self, x, y):
        out = {}
        for g, a in zip(self.elems, x):
            if not a:
                continue
            for h, b in zip(self.elems, y):
                if b:
                    gh = self.mul((g, h))
                    out[gh] = (out.get(gh, 0) + a * b) % self.p
        return self.vec(out)

    def one(self):
        return self.vec({self.e: 1})

    def all_normalized(self):
        for c in product(range(self.p), repeat=len(self.elems)):
            if sum(c) % self.p == 1:
                yield c

    def inverse(self, u):
        # u has finite order in a finite group: walk powers until 1
        x = u
        prev = self.one()
        while x != self.one():
            prev, x = x, self.times(x, u)
        return prev


def naive_v(ring):
    return list(ring.all_normalized())


def naive_derived_and_power(ring, e):
    V = naive_v(ring)
    inv = {}
    for u in V:
        if u not in inv:
            w = ring.inverse(u)
            inv[u] = w
            inv[w] = u
    comms = set()
    for u in V:
        for v in V:
            comms.add(ring.times(ring.times(inv[u], inv[v]), ring.times(u, v)))
    powers = set()
    for u in V:
        x = u
        for _ in range(e - 1):
            x = ring.times(x, u)
        powers.add(x)
    D = closure(list(comms), ring.times, ring.one())
    P = closure(list(powers), ring.times, ring.one())
    return len(V), D, P
