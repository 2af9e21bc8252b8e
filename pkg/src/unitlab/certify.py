"""Powerfulness verdicts for V(FG) and the certificates backing them."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, ClassVar

import numpy as np

from .algebra import AlgElem, GroupAlgebra
from .field import FiniteField
from .groups import Group, center, derived_subgroup, element_order, subgroup_closure
from .units import (
    DEFAULT_THRESHOLD,
    ThresholdExceeded,
    _Closure,
    _keys,
    enumerate_v_arrays,
    generator_commutators,
    v_derived,
    v_generating_set,
    v_power_subgroup,
    v_size,
)

DEFAULT_BUDGET = 512
DEFAULT_SAMPLES = 1000
DEFAULT_SEED = 0


class CertificateError(RuntimeError):
    """The certificate search does not apply to this input or found nothing."""


def power_exponent(p: int) -> int:
    return 4 if p == 2 else p


# ---------------------------------------------------------------------------
# helpers shared with the replays


def fourth_power_formula(alg: GroupAlgebra, X: np.ndarray) -> np.ndarray:
    """sum_g alpha_g^4 g^4 for each unit in the stack X."""
    F, G = alg.field, alg.group
    digit = alg.p ** np.arange(alg.k)
    table = np.array([(F.from_int(c) ** 4).coeffs for c in range(F.order)], dtype=np.int64)
    X = np.asarray(X, dtype=np.int64)
    frob = table[X @ digit]  # (B, n, k)
    fourth = np.array([G.power(g, 4) for g in G.elements()])
    out = np.zeros_like(frob)
    np.add.at(out, (slice(None), fourth), frob)
    return out % alg.p


def fourth_power_span(G: Group) -> list[int]:
    """The group elements g^4, which span the subspace containing every u^4."""
    return sorted({G.power(g, 4) for g in G.elements()})


def check_fourth_power_samples(alg: GroupAlgebra, count: int, seed: int, batch: int = 100) -> int:
    """Number of seeded random units with u^4 != sum alpha_g^4 g^4 (0 means all exact)."""
    rng = np.random.default_rng(seed)
    bad = 0
    for s in range(0, count, batch):
        U = alg.random_units(min(batch, count - s), rng)
        lhs = alg.power_arrays(U, 4)
        rhs = fourth_power_formula(alg, U)
        bad += int(np.any(lhs != rhs, axis=(1, 2)).sum())
    return bad


def _codes(x: AlgElem) -> list[int]:
    return x.codes()


# ---------------------------------------------------------------------------
# certificates


def field_record(F: FiniteField) -> dict:
    return {"p": F.p, "k": F.k, "modulus": list(F.modulus)}


def algebra_from_record(rec: dict) -> GroupAlgebra:
    from .descriptor import build

    f = rec["field"]
    return GroupAlgebra(FiniteField(f["p"], f["k"], f["modulus"]), build(rec["group"]))


@dataclass
class Certificate:
    alg: GroupAlgebra = field(repr=False)

    kind: ClassVar[str] = ""

    def _payload(self) -> dict:
        raise NotImplementedError

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "group": self.alg.group.name,
            "field": field_record(self.alg.field),
            **self._payload(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def checks(self) -> dict[str, bool]:
        raise NotImplementedError

    def verify(self) -> bool:
        return all(self.checks().values())


@dataclass
class DefinitionWitness(Certificate):
    """w = (u, v) lies in V' but not in V^e, with V^e enumerated from its generators."""

    w: AlgElem = None
    u: AlgElem = None
    v: AlgElem = None
    exponent: int = 4
    power_gens: list[AlgElem] = field(default_factory=list)
    power_size: int = 0
    threshold: int = DEFAULT_THRESHOLD
    kind: ClassVar[str] = "DefinitionWitness"

    def _payload(self) -> dict:
        return {
            "w": _codes(self.w),
            "u": _codes(self.u),
            "v": _codes(self.v),
            "w_text": self.w.render(),
            "exponent": self.exponent,
            "power_generators": [_codes(g) for g in self.power_gens],
            "power_size": self.power_size,
        }

    @classmethod
    def from_dict(cls, alg: GroupAlgebra, d: dict, threshold: int = DEFAULT_THRESHOLD) -> DefinitionWitness:
        return cls(
            alg,
            alg.from_codes(d["w"]),
            alg.from_codes(d["u"]),
            alg.from_codes(d["v"]),
            d["exponent"],
            [alg.from_codes(g) for g in d["power_generators"]],
            d["power_size"],
            threshold,
        )

    def checks(self) -> dict[str, bool]:
        alg, e = self.alg, self.exponent
        out = {
            "exponent_matches_prime": e == power_exponent(alg.p),
            "u_v_normalized": self.u.is_normalized() and self.v.is_normalized(),
            "w_is_commutator": self.w == self.u.commutator(self.v),
        }
        c = _Closure(alg, self.threshold, "power subgroup")
        for g in self.power_gens:
            c.add(g.c)
        out["power_size_matches"] = len(c) == self.power_size
        out["w_not_in_power_subgroup"] = self.w.c.reshape(-1) not in c
        # every e-th power is inside, and every listed generator is an e-th power
        powers: set[bytes] = set()
        all_in = True
        for X in enumerate_v_arrays(alg, self.threshold):
            P = alg.power_arrays(X, e)
            keys = _keys(P)
            powers.update(keys)
            all_in &= all(k in c.index for k in keys)
        out["all_powers_inside"] = bool(all_in)
        out["generators_are_powers"] = all(g.key in powers for g in self.power_gens)
        return out


@dataclass
class OmegaOddWitness(Certificate):
    """x, y of order p whose product has order at least p^2 (p odd)."""

    x: AlgElem = None
    y: AlgElem = None
    orders: tuple[int, int, int] = (0, 0, 0)
    kind: ClassVar[str] = "OmegaOddWitness"

    def _payload(self) -> dict:
        return {
            "x": _codes(self.x),
            "y": _codes(self.y),
            "x_text": self.x.render(),
            "y_text": self.y.render(),
            "orders": list(self.orders),
        }

    @classmethod
    def from_dict(cls, alg: GroupAlgebra, d: dict, **_) -> OmegaOddWitness:
        return cls(alg, alg.from_codes(d["x"]), alg.from_codes(d["y"]), tuple(d["orders"]))

    def checks(self) -> dict[str, bool]:
        p = self.alg.p
        one = self.alg.one
        x, y = self.x, self.y
        xy = x * y
        return {
            "odd_prime": p % 2 == 1,
            "normalized": x.is_normalized() and y.is_normalized(),
            "x_order_p": x != one and x**p == one,
            "y_order_p": y != one and y**p == one,
            "product_order_at_least_p2": xy**p != one,
            "orders_match": (x.order(), y.order(), xy.order()) == tuple(self.orders),
        }


@dataclass
class SpanWitness(Certificate):
    """A commutator with support outside span{g^4}, which contains V^4 when |G'| = 2."""

    w: AlgElem = None
    u: AlgElem = None
    v: AlgElem = None
    span_basis: list[int] = field(default_factory=list)
    outside: list[int] = field(default_factory=list)
    samples: int = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED
    candidates_tried: int = 0
    kind: ClassVar[str] = "SpanWitness"

    def _payload(self) -> dict:
        G = self.alg.group
        return {
            "w": _codes(self.w),
            "u": _codes(self.u),
            "v": _codes(self.v),
            "w_text": self.w.render(),
            "u_text": self.u.render(),
            "v_text": self.v.render(),
            "span_basis": list(self.span_basis),
            "span_labels": [G.label(g) for g in self.span_basis],
            "span_products": [[G.mul(a, b) for b in self.span_basis] for a in self.span_basis],
            "outside": list(self.outside),
            "outside_labels": [G.label(g) for g in self.outside],
            "samples": self.samples,
            "seed": self.seed,
            "candidates_tried": self.candidates_tried,
        }

    @classmethod
    def from_dict(cls, alg: GroupAlgebra, d: dict, **_) -> SpanWitness:
        return cls(
            alg,
            alg.from_codes(d["w"]),
            alg.from_codes(d["u"]),
            alg.from_codes(d["v"]),
            list(d["span_basis"]),
            list(d["outside"]),
            d["samples"],
            d["seed"],
            d.get("candidates_tried", 0),
        )

    def checks(self) -> dict[str, bool]:
        alg = self.alg
        G = alg.group
        basis = set(self.span_basis)
        return {
            "characteristic_2": alg.p == 2,
            "derived_order_2": len(derived_subgroup(G)) == 2,
            "span_is_fourth_powers": self.span_basis == fourth_power_span(G),
            "span_closed": all(G.mul(a, b) in basis for a in basis for b in basis),
            "u_v_normalized": self.u.is_normalized() and self.v.is_normalized(),
            "w_is_commutator": self.w == self.u.commutator(self.v),
            "w_outside_span": bool(self.outside)
            and set(self.outside) <= set(self.w.support())
            and not (set(self.outside) & basis),
            "fourth_power_identity": check_fourth_power_samples(alg, self.samples, self.seed) == 0,
        }


CERTIFICATE_TYPES = {c.kind: c for c in (DefinitionWitness, OmegaOddWitness, SpanWitness)}


def certificate_from_dict(d: dict, threshold: int = DEFAULT_THRESHOLD) -> Certificate:
    alg = algebra_from_record(d)
    cls = CERTIFICATE_TYPES[d["kind"]]
    return cls.from_dict(alg, d, threshold=threshold)


def reverify(record: dict | str, threshold: int = DEFAULT_THRESHOLD) -> bool:
    """Rebuild a certificate from its serialized form and re-run every check."""
    if isinstance(record, str):
        record = json.loads(record)
    return certificate_from_dict(record, threshold).verify()


# ---------------------------------------------------------------------------
# searches


def _nontrivial_commutator_pairs(G: Group, b: int):
    return [a for a in G.elements() if G.commutator(b, a) != 0]


def certify_not_powerful_odd(alg: GroupAlgebra) -> OmegaOddWitness:
    """Two elements of order p whose product has order p^2.

    Scans non-central b of order p and a with (b, a) != 1 in index order and
    takes x = 1 + a * hat(<b>).  For p odd, Omega_1 of a powerful p-group has
    exponent p, so such a pair rules out powerfulness.
    """
    G, p = alg.group, alg.p
    if p == 2:
        raise CertificateError("odd certificate needs an odd prime")
    if G.is_abelian():
        raise CertificateError(f"{G.name} is abelian")
    Z = center(G)
    one = alg.one
    for b in G.elements():
        if b in Z or element_order(G, b) != p:
            continue
        Bhat = alg.hat(subgroup_closure(G, [b]))
        y = alg.basis(b)
        for a in _nontrivial_commutator_pairs(G, b):
            x = one + alg.basis(a) * Bhat
            if x == one or x**p != one:
                continue
            xy = x * y
            if xy**p != one:
                return OmegaOddWitness(alg, x, y, (p, p, xy.order()))
    raise CertificateError(f"no non-central order-{p} element with a usable partner in {G.name}")


def certify_not_powerful_even(
    alg: GroupAlgebra,
    budget: int = DEFAULT_BUDGET,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
) -> SpanWitness:
    """A commutator ((1+g+h), g) with a coefficient outside span{g^4 : g in G}.

    Requires p = 2 and |G'| = 2.  Then u^4 = sum alpha_g^4 g^4 for every unit,
    the span is closed under multiplication, so V^4 sits inside it, and a
    commutator escaping the span is in V' but not in V^4.  Pairs with
    gh = hg are skipped without using budget since their commutator is 1.
    """
    G = alg.group
    if alg.p != 2:
        raise CertificateError("even certificate needs characteristic 2")
    if len(derived_subgroup(G)) != 2:
        raise CertificateError(f"|G'| = {len(derived_subgroup(G))}, need 2")
    basis = fourth_power_span(G)
    bset = set(basis)
    if not all(G.mul(a, b) in bset for a in basis for b in basis):
        raise CertificateError("span of fourth powers is not multiplicatively closed")
    if check_fourth_power_samples(alg, samples, seed):
        raise CertificateError("fourth-power identity failed on a sample")
    tried = 0
    for g in range(1, G.order):
        for h in range(1, G.order):
            if h == g or G.table[g, h] == G.table[h, g]:
                continue
            if tried >= budget:
                raise CertificateError(f"no witness within {budget} candidates")
            tried += 1
            u = alg.one + alg.basis(g) + alg.basis(h)
            v = alg.basis(g)
            w = u.commutator(v)
            outside = [s for s in w.support() if s not in bset]
            if outside:
                return SpanWitness(alg, w, u, v, basis, outside, samples, seed, tried)
    raise CertificateError("candidate pairs exhausted without a witness")


# ---------------------------------------------------------------------------
# verdicts


@dataclass
class PowerfulVerdict:
    status: str  # "Powerful" | "NotPowerful" | "Unknown"
    method: str
    certificate: Certificate | None = None
    reason: str = ""
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def powerful(self) -> bool | None:
        return {"Powerful": True, "NotPowerful": False}.get(self.status)

    def to_dict(self) -> dict:
        d = {"status": self.status, "method": self.method}
        if self.reason:
            d["reason"] = self.reason
        if self.details:
            d["details"] = self.details
        if self.certificate is not None:
            d["certificate"] = self.certificate.to_dict()
        return d


def _commutative(alg: GroupAlgebra) -> bool:
    gens = [alg.basis(g) for g in alg.group.generators.values()]
    return all(x * y == y * x for x in gens for y in gens)


def exhaustive_verdict(alg: GroupAlgebra, threshold: int = DEFAULT_THRESHOLD) -> PowerfulVerdict:
    """Decide V' <= V^e by explicit closures; V must be enumerable."""
    e = power_exponent(alg.p)
    gens, verified = v_generating_set(alg, threshold)
    if not verified:
        return PowerfulVerdict("Unknown", "exhaustive", reason="generating set not verified")
    P = v_power_subgroup(alg, e, threshold)
    details = {"v_size": v_size(alg), "power_subgroup_size": len(P)}
    # V^e is normal, so V' <= V^e iff every generator commutator lies in it
    for i, j, w in generator_commutators(gens):
        if w not in P:
            D = v_derived(alg, threshold)
            details["derived_size"] = len(D)
            cert = DefinitionWitness(alg, w, gens[i], gens[j], e, P.gens, len(P), threshold)
            return PowerfulVerdict("NotPowerful", "exhaustive", cert, details=details)
    D = v_derived(alg, threshold)
    details["derived_size"] = len(D)
    if not D <= P:  # pragma: no cover - excluded by normality of V^e
        raise AssertionError("derived subgroup escapes V^e although all generator commutators lie in it")
    return PowerfulVerdict("Powerful", "exhaustive", details=details)


def is_powerful_v(
    alg: GroupAlgebra,
    threshold: int = DEFAULT_THRESHOLD,
    budget: int = DEFAULT_BUDGET,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
) -> PowerfulVerdict:
    G = alg.group
    if G.is_abelian():
        if not _commutative(alg):  # pragma: no cover
            raise AssertionError("abelian group with noncommutative algebra")
        return PowerfulVerdict("Powerful", "abelian")
    if v_size(alg) <= threshold:
        try:
            return exhaustive_verdict(alg, threshold)
        except ThresholdExceeded as exc:
            return PowerfulVerdict("Unknown", "exhaustive", reason=str(exc))
    try:
        if alg.p != 2:
            return PowerfulVerdict("NotPowerful", "certificate", certify_not_powerful_odd(alg))
        if len(derived_subgroup(G)) == 2:
            return PowerfulVerdict(
                "NotPowerful", "certificate", certify_not_powerful_even(alg, budget, samples, seed)
            )
    except CertificateError as exc:
        return PowerfulVerdict("Unknown", "certificate", reason=str(exc))
    return PowerfulVerdict(
        "Unknown", "none", reason=f"|V| = {alg.field.order}^{alg.n - 1} above threshold and |G'| > 2"
    )
