"""Exact replays of the identities behind the non-powerfulness argument.

Every replay returns a report dict with one entry per identity:
``{"name", "step", "passed", "offending"}`` where ``offending`` renders the
difference of the two sides (or the unexpected element) on failure.
"""

from __future__ import annotations

import numpy as np

from .algebra import AlgElem, GroupAlgebra, ideal_coset_test
from .certify import (
    CertificateError,
    certify_not_powerful_even,
    check_fourth_power_samples,
)
from .field import FiniteField
from .groups import (
    CentralProduct,
    Cyclic,
    Dihedral,
    Group,
    GroupSpec,
    Modular,
    center,
    construct_group,
    derived_subgroup,
    element_order,
    exponent,
    frattini,
    modular_group,
    subgroup_closure,
)
from .units import DEFAULT_THRESHOLD, enumerate_v_arrays, generator_commutators, v_generating_set, v_size

SQUARES_EXHAUSTIVE_LIMIT = 2**16


class ReplayError(ValueError):
    pass


class _Report:
    def __init__(self, case: str, **meta):
        self.case = case
        self.meta = meta
        self.entries: list[dict] = []

    def check(self, name: str, step: str, passed: bool, offending: str | None = None) -> bool:
        entry = {"name": name, "step": step, "passed": bool(passed)}
        if not passed and offending is not None:
            entry["offending"] = offending
        self.entries.append(entry)
        return bool(passed)

    def equal(self, name: str, step: str, lhs: AlgElem, rhs: AlgElem) -> bool:
        ok = lhs == rhs
        return self.check(name, step, ok, None if ok else (lhs - rhs).render())

    def result(self, **extra) -> dict:
        return {
            "case": self.case,
            **self.meta,
            **extra,
            "identities": self.entries,
            "passed": all(e["passed"] for e in self.entries),
        }


# ---------------------------------------------------------------------------
# odd p


def odd_witness_pair(G: Group) -> tuple[int, int, int]:
    """First (b, a) in index order with b non-central of order p, c = (b, a) != 1
    central and <c> = G' of order p.  Returns (a, b, c)."""
    p = G.p
    Z = center(G)
    D = derived_subgroup(G)
    for b in G.elements():
        if b in Z or element_order(G, b) != p:
            continue
        for a in G.elements():
            c = G.commutator(b, a)
            if c != 0 and c in Z and len(D) == p and c in D:
                return a, b, c
    raise ReplayError(f"{G.name}: no non-central b of order {p} with central commutator")


def qualifying_pairs(G: Group) -> list[tuple[int, int, int]]:
    p = G.p
    Z = center(G)
    D = derived_subgroup(G)
    if len(D) != p:
        return []
    out = []
    for b in G.elements():
        if b in Z or element_order(G, b) != p:
            continue
        for a in G.elements():
            c = G.commutator(b, a)
            if c != 0 and c in Z:
                out.append((a, b, c))
    return out


def replay_odd(p: int, G: Group, F: FiniteField, pair: tuple[int, int, int] | None = None) -> dict:
    if p % 2 == 0 or G.p != p or F.p != p:
        raise ReplayError("odd replay needs an odd prime shared by the group and the field")
    a, b, c = pair or odd_witness_pair(G)
    A = GroupAlgebra(F, G)
    rep = _Report(f"odd:{p}:{G.name}", field=F.name, a=G.label(a), b=G.label(b), c=G.label(c))
    e = A.basis
    one = A.one
    B = subgroup_closure(G, [b])
    Bhat = A.hat(B)
    Dhat = A.hat(derived_subgroup(G))
    ai, bi = G.inv[a], G.inv[b]
    aB = e(a) * Bhat

    for i in range(p):
        rep.equal(f"a^-1 b^{i} a = c^{i} b^{i}", "conjugation", e(ai) * e(b) ** i * e(a), e(c) ** i * e(b) ** i)
        rep.equal(f"b^{i} hat(B) = hat(B)", "absorption", e(b) ** i * Bhat, Bhat)

    rep.equal("(a hat(B))^2 = a^2 hat(G') hat(B)", "square", aB * aB, e(a) ** 2 * Dhat * Bhat)
    rep.equal("hat(G')^2 = 0", "hat-square", Dhat * Dhat, A.zero)

    cube_chain = [
        aB**3,
        e(a) ** 2 * Dhat * Bhat * aB,
        e(a) ** 2 * Dhat * e(ai) * (aB * aB),
        e(a) ** 2 * Dhat * e(ai) * e(a) ** 2 * Dhat * Bhat,
        e(a) ** 3 * (Dhat * Dhat) * Bhat,
    ]
    for k, term in enumerate(cube_chain[1:], 1):
        rep.equal(f"cube chain line {k}", "cube", cube_chain[0], term)
    rep.equal("(a hat(B))^3 = 0", "cube", cube_chain[0], A.zero)

    x = one + aB
    rep.check("|1 + a hat(B)| = p", "order", x.order() == p, f"order {x.order()}")

    for i in range(p):
        lhs = e(b) ** i * e(a) * e(bi) ** i
        rep.equal(f"b^{i} a b^-{i} = c^{i} a", "shift", lhs, e(c) ** i * e(a))
        rep.equal(f"b^{i} a b^-{i} = a (a, b^-{i})", "shift", lhs, e(a) * e(G.commutator(a, G.power(b, -i))))

    y = e(b)
    lines = [((x * y) ** p)]
    prod = one
    for i in range(p):
        prod = prod * (one + e(G.mul(G.power(b, i), a, G.power(b, -i))) * Bhat)
    lines.append(prod * y**p)
    prod = one
    for i in range(p):
        prod = prod * (one + e(c) ** i * aB)
    lines.append(prod)
    half = (p - 1) // 2
    lines.append(one + Dhat * aB + (Dhat * aB * aB).scale(half))
    lines.append(one + Dhat * aB + (Dhat * Dhat * e(a) ** 2 * Bhat).scale(half))
    lines.append(one + Dhat * aB)
    for k in range(1, len(lines)):
        rep.equal(f"((1 + a hat(B)) b)^p, line {k}", "final", lines[k - 1], lines[k])
    rep.check("((1 + a hat(B)) b)^p != 1", "final", lines[-1] != one, lines[-1].render())

    orders = (x.order(), y.order(), (x * y).order())
    rep.check("orders (p, p, p^2)", "orders", orders == (p, p, p * p), str(orders))
    return rep.result(orders=list(orders), final=lines[-1].render())


# ---------------------------------------------------------------------------
# p = 2


def _central_in_algebra(A: GroupAlgebra, x: AlgElem) -> bool:
    L, R = A.left_matrix(x.c), A.right_matrix(x.c)
    rows = np.arange(A.n) * A.k  # vec(h) is the unit vector at (h, 0)
    return bool(np.array_equal(L[rows] % A.p, R[rows] % A.p))


def replay_even(
    G: Group,
    F: FiniteField,
    samples: int = 1000,
    seed: int = 0,
    threshold: int = DEFAULT_THRESHOLD,
) -> dict:
    if F.p != 2 or G.p != 2:
        raise ReplayError("even replay needs characteristic 2")
    D = derived_subgroup(G)
    if len(D) != 2:
        raise ReplayError(f"{G.name}: |G'| = {len(D)}, need 2")
    A = GroupAlgebra(F, G)
    rep = _Report(f"even:{G.name}", field=F.name, samples=samples, seed=seed)
    Dhat = A.hat(D)
    ideal_basis = [Dhat * A.basis(g) for g in G.elements()]

    bad = [G.label(g) for g, x in zip(G.elements(), ideal_basis) if not _central_in_algebra(A, x)]
    rep.check("hat(G') g central for all g", "ideal-central", not bad, ", ".join(bad))

    stack = np.array([x.c.reshape(-1) for x in ideal_basis])
    nonzero = []
    for g, x in zip(G.elements(), ideal_basis):
        if ((stack @ A.left_matrix(x.c)) % A.p).any():
            nonzero.append(G.label(g))
    rep.check("I(G')^2 = 0 on basis pairs", "ideal-square", not nonzero, ", ".join(nonzero))

    rng = np.random.default_rng(seed)
    sq_fail = [G.label(g) for g, x in zip(G.elements(), ideal_basis) if (A.one + x) ** 2 != A.one]
    coeffs = rng.integers(0, F.order, size=(samples, G.order))
    for row in coeffs:
        x = A.zero
        for g in np.flatnonzero(row):
            x = x + ideal_basis[g].scale(F.from_int(int(row[g])))
        if (A.one + x) ** 2 != A.one:
            sq_fail.append((A.one + x).render())
            break
    rep.check("(1 + x)^2 = 1 for x in I(G')", "ideal-involution", not sq_fail, "; ".join(sq_fail[:3]))

    gens, _ = v_generating_set(A, threshold)
    escaped = []
    for i, j, w in generator_commutators(gens):
        if not ideal_coset_test(w - A.one, D):
            escaped.append(f"({i},{j})")
    rep.check("generator commutators in 1 + I(G')", "derived-in-ideal", not escaped, ", ".join(escaped[:5]))

    exhaustive = v_size(A) <= min(threshold, SQUARES_EXHAUSTIVE_LIMIT)
    gen_mats = [(A.right_matrix(A.basis(s).c), A.left_matrix(A.basis(s).c)) for s in G.generators.values()]
    checked = 0
    squares_ok = True
    if exhaustive:
        batches = enumerate_v_arrays(A, threshold)
    else:
        batches = (A.random_units(min(200, samples - s), rng) for s in range(0, samples, 200))
    for U in batches:
        S = A.power_arrays(U, 2).reshape(len(U), -1)
        for R, L in gen_mats:
            if not np.array_equal((S @ R) % A.p, (S @ L) % A.p):
                squares_ok = False
        checked += len(U)
    rep.check("u^2 central", "squares-central", squares_ok, "a square fails to commute with a generator")

    bad4 = check_fourth_power_samples(A, samples, seed)
    rep.check("u^4 = sum alpha_g^4 g^4", "fourth-power", bad4 == 0, f"{bad4} failing samples")
    return rep.result(squares_checked=checked, squares_exhaustive=exhaustive)


# ---------------------------------------------------------------------------
# the modular family M(2^(m+2))


def printed_inverse(A: GroupAlgebra, m: int) -> AlgElem:
    """The displayed candidate inverse of 1 + a + b, with its repeated term kept as printed."""
    t = 2**m
    return A.parse(f"a^{t - 3} + a^-3 + a^-2 + a^-1 + a^{t - 2}*b + a^{t - 2}*b + a^-3*b")


def printed_commutator(A: GroupAlgebra, m: int) -> AlgElem:
    t = 2**m
    return A.parse(f"1 + a^{t - 2} + a^-2 + a^{t - 2}*b + a^{t - 1}*b + a^-2*b + a^-1*b")


def m_inverse_crosscheck(m: int) -> dict:
    if m < 1:
        raise ReplayError("m must be at least 1")
    G = modular_group(2, m)
    A = GroupAlgebra(FiniteField(2), G)
    rep = _Report(f"minv:{m}", group=G.name)
    u = A.parse("1 + a + b")
    a = A.parse("a")
    inv = u.inverse()
    rep.equal("(1+a+b) (1+a+b)^-1 = 1", "inverse", u * inv, A.one)
    rep.equal("(1+a+b)^-1 (1+a+b) = 1", "inverse", inv * u, A.one)
    comm = u.commutator(a)
    cyclic_a = set(subgroup_closure(G, [G.generators["a"]]))
    outside = [G.label(g) for g in comm.support() if g not in cyclic_a]
    if m >= 2:
        rep.check("support((1+a+b, a)) not inside <a>", "commutator", bool(outside), comm.render())
    p_inv = printed_inverse(A, m)
    p_comm = printed_commutator(A, m)
    return rep.result(
        inverse=inv.render(),
        commutator=comm.render(),
        support_outside_a=outside,
        printed_inverse=p_inv.render(),
        printed_inverse_matches=p_inv == inv,
        printed_inverse_times_u=(p_inv * u).render(),
        printed_commutator=p_comm.render(),
        printed_commutator_matches=p_comm == comm,
    )


# ---------------------------------------------------------------------------
# central products G0 Y D8 Y ... Y D8


def central_product_spec(base: GroupSpec, r: int) -> GroupSpec:
    spec = base
    for _ in range(r):
        spec = CentralProduct(spec, Dihedral(8))
    return spec


def central_product_structure(
    base: GroupSpec,
    r: int,
    samples: int = 1000,
    seed: int = 0,
    budget: int = 512,
) -> dict:
    match base:
        case Cyclic(n) if n >= 8 and n & (n - 1) == 0:
            if r < 1:
                raise ReplayError("a cyclic base needs r > 0")
        case Modular(2, m) if m > 1:
            pass
        case _:
            raise ReplayError(f"base must be C(2^t), t >= 3, or M(2^(m+2)), m > 1; got {base!r}")
    if r < 0:
        raise ReplayError("r must be non-negative")
    spec = central_product_spec(base, r)
    G = construct_group(spec)
    base_group = construct_group(base)
    rep = _Report(f"cp:{G.name}", group=G.name, order=G.order)
    Z = center(G)
    Phi = frattini(G)
    rep.check("|G'| = 2", "structure", len(derived_subgroup(G)) == 2, str(len(derived_subgroup(G))))
    rep.check("centre cyclic", "structure", Z.is_cyclic())
    rep.check("Frattini central", "structure", Phi <= Z)
    rep.check("Frattini cyclic", "structure", Phi.is_cyclic())
    rep.check("exponent > 4", "structure", exponent(G) > 4, str(exponent(G)))
    base_gens = [G.generators[nm] for nm in G.gen_names[: len(base_group.gen_names)]]
    image = subgroup_closure(G, base_gens)
    rep.check("image of base has the base order", "structure", len(image) == base_group.order)
    fourth = {G.power(g, 4) for g in G.elements()}
    stray = sorted(fourth - set(image))
    rep.check(
        "fourth powers lie in the base",
        "fourth-powers",
        not stray,
        ", ".join(G.label(g) for g in stray),
    )
    fourth_in_base = {G.power(g, 4) for g in image}
    rep.check("fourth powers of G are fourth powers of the base", "fourth-powers", fourth == fourth_in_base)
    A = GroupAlgebra(FiniteField(2), G)
    try:
        cert = certify_not_powerful_even(A, budget, samples, seed)
        ok = cert.verify()
        rep.check("span certificate found and verified", "certificate", ok)
        cert_dict = cert.to_dict()
    except CertificateError as exc:
        rep.check("span certificate found and verified", "certificate", False, str(exc))
        cert_dict = None
    return rep.result(certificate=cert_dict)


__all__ = [
    "replay_odd",
    "replay_even",
    "m_inverse_crosscheck",
    "central_product_structure",
    "central_product_spec",
    "odd_witness_pair",
    "qualifying_pairs",
]
