"""The normalized unit group V(FG) handled as a black-box p-group."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator

import numpy as np

from .algebra import AlgElem, GroupAlgebra, NotAUnit
from .groups import Subgroup, quotient_group, subgroup_closure

DEFAULT_THRESHOLD = 2**20
CHUNK = 2048


class ThresholdExceeded(RuntimeError):
    def __init__(self, what: str, size: int, threshold: int):
        super().__init__(f"{what}: size {size} exceeds threshold {threshold}")
        self.size = size
        self.threshold = threshold


def v_size(alg: GroupAlgebra) -> int:
    """|V(FG)| = |F|^(|G|-1)."""
    return alg.field.order ** (alg.n - 1)


def _keys(rows: np.ndarray) -> list[bytes]:
    rows = np.ascontiguousarray(rows, dtype=np.uint8)
    rows = rows.reshape(rows.shape[0], -1)
    return rows.view(np.dtype((np.void, rows.shape[1]))).ravel().tolist()


# ---------------------------------------------------------------------------
# enumeration


def enumerate_v_arrays(
    alg: GroupAlgebra, threshold: int = DEFAULT_THRESHOLD, chunk: int = CHUNK
) -> Iterator[np.ndarray]:
    """All of V in stacks of shape (<= chunk, n, k).

    The coefficients on the non-identity basis elements run through every
    combination (first element varying fastest); the identity coefficient is
    then forced by augmentation 1.
    """
    size = v_size(alg)
    if size > threshold:
        raise ThresholdExceeded("V(FG) enumeration", size, threshold)
    q, p, n, k = alg.field.order, alg.p, alg.n, alg.k
    place = q ** np.arange(n - 1, dtype=np.int64)
    digit = p ** np.arange(k, dtype=np.int64)
    for start in range(0, size, chunk):
        idx = np.arange(start, min(start + chunk, size), dtype=np.int64)
        codes = (idx[:, None] // place[None, :]) % q  # (B, n-1)
        X = np.zeros((len(idx), n, k), dtype=np.int64)
        X[:, 1:, :] = (codes[:, :, None] // digit) % p
        X[:, 0, :] = -X[:, 1:, :].sum(axis=1)
        X[:, 0, 0] += 1
        yield X % p


def enumerate_v(alg: GroupAlgebra, threshold: int = DEFAULT_THRESHOLD) -> Iterator[AlgElem]:
    for X in enumerate_v_arrays(alg, threshold):
        for row in X:
            yield alg.from_array(row)


def inverse_arrays(alg: GroupAlgebra, X: np.ndarray) -> np.ndarray:
    """Batched inverse of normalized units via the nilpotent geometric series."""
    X = np.asarray(X, dtype=np.int64)
    if np.any(alg.augmentation_arrays(X) != np.eye(1, alg.k, dtype=np.int64)[0]):
        raise NotAUnit("batched inverse expects normalized units")
    one = np.broadcast_to(alg.one.c, X.shape)
    nil = (one - X) % alg.p
    total = one.copy()
    term = one.copy()
    for _ in range(alg.n):
        term = alg.mul_arrays(term, nil)
        if not term.any():
            return total
        total = (total + term) % alg.p
    raise AssertionError("augmentation ideal not nilpotent")  # pragma: no cover


def check_enumeration(alg: GroupAlgebra, threshold: int = DEFAULT_THRESHOLD) -> int:
    """Enumerate V, confirm every element is invertible and all are distinct; return the count."""
    count = 0
    seen: set[bytes] = set()
    for X in enumerate_v_arrays(alg, threshold):
        Y = inverse_arrays(alg, X)
        one = np.broadcast_to(alg.one.c, X.shape)
        if not (np.array_equal(alg.mul_arrays(X, Y), one) and np.array_equal(alg.mul_arrays(Y, X), one)):
            raise AssertionError("enumerated element without two-sided inverse")
        seen.update(_keys(X))
        count += len(X)
    if len(seen) != count:
        raise AssertionError("enumeration produced duplicates")
    return count


# ---------------------------------------------------------------------------
# black-box closure


class _Closure:
    """Incrementally grown subgroup of V, stored as flat coefficient rows."""

    def __init__(self, alg: GroupAlgebra, threshold: int, what: str = "closure"):
        self.alg = alg
        self.threshold = threshold
        self.what = what
        self.dim = alg.n * alg.k
        one = alg.one.c.reshape(1, -1).astype(np.uint8)
        self.blocks = [one]
        self.index = {_keys(one)[0]}
        self.gens: list[np.ndarray] = []
        self._mats: list[np.ndarray] = []

    def __len__(self) -> int:
        return len(self.index)

    def __contains__(self, x: np.ndarray) -> bool:
        return _keys(np.asarray(x).reshape(1, -1))[0] in self.index

    def rows(self) -> np.ndarray:
        if len(self.blocks) > 1:
            self.blocks = [np.concatenate(self.blocks)]
        return self.blocks[0]

    def _grow(self, frontier: np.ndarray, mats: list[np.ndarray]) -> list[np.ndarray]:
        new_blocks = []
        p = self.alg.p
        for R in mats:
            for s in range(0, len(frontier), 4 * CHUNK):
                prod = (frontier[s : s + 4 * CHUNK].astype(np.int64) @ R) % p
                prod = prod.astype(np.uint8)
                keys = _keys(prod)
                fresh = []
                for i, key in enumerate(keys):
                    if key not in self.index:
                        self.index.add(key)
                        fresh.append(i)
                if fresh:
                    new_blocks.append(prod[fresh])
                    if len(self.index) > self.threshold:
                        raise ThresholdExceeded(self.what, len(self.index), self.threshold)
        return new_blocks

    def add(self, x: np.ndarray) -> bool:
        """Adjoin generator x; returns False (and keeps the set) when x is already inside."""
        x = np.asarray(x, dtype=np.int64).reshape(self.alg.n, self.alg.k)
        if x.reshape(-1) in self:
            return False
        R = self.alg.right_matrix(x)
        self.gens.append(x)
        self._mats.append(R)
        # old elements only need the new generator; new ones need every generator
        frontier_blocks = self._grow(self.rows(), [R])
        while frontier_blocks:
            frontier = np.concatenate(frontier_blocks)
            self.blocks.append(frontier)
            frontier_blocks = self._grow(frontier, self._mats)
        return True


@dataclass
class VSubgroup:
    """A subgroup of V(FG) held as an explicit element set."""

    alg: GroupAlgebra
    rows: np.ndarray
    gens: list[AlgElem]
    keys: frozenset = field(repr=False)

    @classmethod
    def _from_closure(cls, c: _Closure) -> VSubgroup:
        rows = c.rows()
        return cls(c.alg, rows, [c.alg.from_array(g) for g in c.gens], frozenset(c.index))

    def __len__(self) -> int:
        return len(self.keys)

    def __contains__(self, u: AlgElem) -> bool:
        return u.key in self.keys

    def contains_rows(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X).reshape(len(X), -1)
        return np.array([k in self.keys for k in _keys(X)], dtype=bool)

    def __le__(self, other: VSubgroup) -> bool:
        return self.keys <= other.keys

    def elements(self) -> Iterator[AlgElem]:
        for r in self.rows:
            yield self.alg.from_array(r.reshape(self.alg.n, self.alg.k))

    def arrays(self) -> np.ndarray:
        return self.rows.reshape(-1, self.alg.n, self.alg.k).astype(np.int64)


# ---------------------------------------------------------------------------
# generating set


def _pivot_columns(M: np.ndarray, p: int) -> list[int]:
    """Columns of M (mod p) that are independent of the columns before them."""
    M = np.asarray(M, dtype=np.int64) % p
    rows, cols = M.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(M[r:, c])
        if not len(nz):
            continue
        piv = r + int(nz[0])
        if piv != r:
            M[[r, piv]] = M[[piv, r]]
        M[r] = M[r] * pow(int(M[r, c]), p - 2, p) % p
        col = M[:, c].copy()
        col[r] = 0
        nzr = np.flatnonzero(col)
        if len(nzr):
            M[nzr] = (M[nzr] - np.outer(col[nzr], M[r])) % p
        pivots.append(c)
        r += 1
    return pivots


def _augmentation_filtration(alg: GroupAlgebra) -> list[np.ndarray]:
    """GF(p)-bases of the powers of the augmentation ideal, as stacks (m_i, n, k).

    Level i+1 is spanned by b(s - 1) with b in level i and s a group generator.
    """
    G = alg.group
    gens = sorted(set(G.generators.values()))
    assert len(subgroup_closure(G, gens)) == G.order
    p = alg.p
    first = []
    for g in range(1, alg.n):
        for b in alg.field.basis():
            first.append((alg.basis(g) - alg.one).scale(b).c)
    levels = [np.array(first, dtype=np.int64).reshape(-1, alg.n, alg.k)] if first else []
    while levels and len(levels[-1]):
        prev = levels[-1]
        span = []
        for s in gens:
            # (b s)_h = b_{h s^-1}
            moved = prev[:, G.table[:, G.inv[s]], :]
            span.append((moved - prev) % p)
        span = np.concatenate(span)
        keep = _pivot_columns(span.reshape(len(span), -1).T, p)
        levels.append(span[keep])
    return [lv for lv in levels if len(lv)]


def v_generating_set(
    alg: GroupAlgebra, threshold: int = DEFAULT_THRESHOLD
) -> tuple[list[AlgElem], bool]:
    """Generators 1 + b, b running over a basis of the augmentation ideal adapted to its powers.

    Modulo 1 + D^(i+1), the group 1 + D^i is elementary abelian and isomorphic
    to D^i / D^(i+1), so picking b's that complete a basis of D^(i+1) to one
    of D^i at every level gives a generating set.  The first level consists
    of elements 1 + beta (g - 1).  When V is small enough the closure is also
    counted and the flag reports whether it equals |V|.
    """
    levels = _augmentation_filtration(alg)
    p = alg.p
    chosen: list[AlgElem] = []
    for i, lv in enumerate(levels):
        deeper = levels[i + 1] if i + 1 < len(levels) else np.zeros((0, alg.n, alg.k), dtype=np.int64)
        stack = np.concatenate([deeper, lv])
        piv = _pivot_columns(stack.reshape(len(stack), -1).T, p)
        for j in piv:
            if j >= len(deeper):
                chosen.append(alg.one + alg.from_array(stack[j]))
    assert len(chosen) == (alg.n - 1) * alg.k
    verified = False
    if v_size(alg) <= threshold:
        c = _Closure(alg, threshold, "generating-set closure")
        for g in chosen:
            c.add(g.c)
        verified = len(c) == v_size(alg)
    return chosen, verified


# ---------------------------------------------------------------------------
# subgroups of V


def v_subgroup(
    alg: GroupAlgebra,
    gens: Iterable[AlgElem],
    mode: str = "plain",
    threshold: int = DEFAULT_THRESHOLD,
    conj_by: list[AlgElem] | None = None,
) -> VSubgroup:
    """Closure of `gens` in V; ``mode="normal"`` also closes under conjugation by V."""
    gens = list(gens)
    for g in gens:
        if g.alg is not alg or g.augmentation() != 1:
            raise NotAUnit("subgroup generators must be normalized units of this algebra")
    c = _Closure(alg, threshold, f"{mode} closure")
    if mode == "plain":
        for g in gens:
            c.add(g.c)
    elif mode == "normal":
        if conj_by is None:
            conj_by, _ = v_generating_set(alg, threshold)
        pairs = [(v.inverse().c, v.c) for v in conj_by]
        queue = [g.c for g in gens]
        while queue:
            x = queue.pop(0)
            if c.add(x):
                for vi, v in pairs:
                    queue.append(alg.mul_arrays(alg.mul_arrays(vi, x), v))
    else:
        raise ValueError(f"unknown closure mode {mode!r}")
    return VSubgroup._from_closure(c)


def _verified_generators(alg: GroupAlgebra, threshold: int) -> list[AlgElem]:
    gens, verified = v_generating_set(alg, threshold)
    if not verified:
        raise ThresholdExceeded("generating-set verification", v_size(alg), threshold)
    return gens


def generator_commutators(gens: list[AlgElem]) -> list[tuple[int, int, AlgElem]]:
    """(i, j, (g_i, g_j)) for i < j, skipping trivial commutators."""
    invs = [g.inverse() for g in gens]
    out = []
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            w = invs[i] * invs[j] * gens[i] * gens[j]
            if w != 1:
                out.append((i, j, w))
    return out


def v_derived(alg: GroupAlgebra, threshold: int = DEFAULT_THRESHOLD) -> VSubgroup:
    """V' as the normal closure of the commutators of a verified generating set."""
    gens = _verified_generators(alg, threshold)
    comms = [w for _, _, w in generator_commutators(gens)]
    return v_subgroup(alg, comms, "normal", threshold, conj_by=gens)


def v_powers(alg: GroupAlgebra, e: int, threshold: int = DEFAULT_THRESHOLD) -> np.ndarray:
    """The distinct e-th powers u^e (u in V), as rows in order of first appearance."""
    seen: set[bytes] = set()
    out = []
    for X in enumerate_v_arrays(alg, threshold):
        P = alg.power_arrays(X, e).astype(np.uint8)
        for key, row in zip(_keys(P), P):
            if key not in seen:
                seen.add(key)
                out.append(row)
    return np.array(out)


def v_power_subgroup(alg: GroupAlgebra, e: int, threshold: int = DEFAULT_THRESHOLD) -> VSubgroup:
    """<u^e : u in V>; powers already inside the partial closure are not adjoined."""
    powers = v_powers(alg, e, threshold)
    c = _Closure(alg, threshold, f"power subgroup V^{e}")
    for row in powers:
        c.add(row)
    return VSubgroup._from_closure(c)


# ---------------------------------------------------------------------------
# the quotient map F[G] -> F[G/H]


def check_quotient_iso(alg: GroupAlgebra, H: Subgroup, threshold: int = DEFAULT_THRESHOLD) -> dict:
    """Check V(FG)/(1 + I(H)) = V(F[G/H]) on sizes and multiplicativity of the pushforward."""
    G = alg.group
    Q, proj = quotient_group(G, H)
    QA = GroupAlgebra(alg.field, Q)
    multiplicative = all(
        alg.pushforward(alg.basis(int(G.table[g, h])), proj, QA)
        == alg.pushforward(alg.basis(g), proj, QA) * alg.pushforward(alg.basis(h), proj, QA)
        for g in G.elements()
        for h in G.elements()
    )
    q = alg.field.order
    ideal_dim = G.order - Q.order
    # kernel of the pushforward as a GF(p)-linear map, by rank
    images = np.zeros((alg.n * alg.k, Q.order * alg.k), dtype=np.int64)
    for g in range(alg.n):
        for i in range(alg.k):
            images[g * alg.k + i, proj[g] * alg.k + i] = 1
    rank = len(_pivot_columns(images.T, alg.p))
    kernel_dim_p = alg.n * alg.k - rank
    report = {
        "group": G.name,
        "field": alg.field.name,
        "subgroup": H.labels(),
        "index": Q.order,
        "pushforward_multiplicative": bool(multiplicative),
        "kernel_dim": kernel_dim_p // alg.k,
        "expected_kernel_dim": ideal_dim,
        "kernel_size": q**ideal_dim,
        "v_size": v_size(alg),
        "quotient_v_size": v_size(QA),
    }
    if v_size(alg) <= threshold:
        # count elements of V mapping to 1 in V(F[G/H])
        one = QA.one.c
        count = 0
        for X in enumerate_v_arrays(alg, threshold):
            img = np.zeros((len(X), Q.order, alg.k), dtype=np.int64)
            np.add.at(img, (slice(None), proj), X)
            count += int(np.all((img % alg.p) == one, axis=(1, 2)).sum())
        report["kernel_count"] = count
    report["ok"] = bool(
        multiplicative
        and kernel_dim_p == ideal_dim * alg.k
        and report["v_size"] == report["kernel_size"] * report["quotient_v_size"]
        and report.get("kernel_count", report["kernel_size"]) == report["kernel_size"]
    )
    return report


@dataclass
class UnitGroupView:
    """V(FG) together with the enumeration threshold used for it."""

    alg: GroupAlgebra
    threshold: int = DEFAULT_THRESHOLD

    @property
    def order(self) -> int:
        return v_size(self.alg)

    @property
    def enumerable(self) -> bool:
        return self.order <= self.threshold

    @cached_property
    def generating_set(self) -> tuple[list[AlgElem], bool]:
        return v_generating_set(self.alg, self.threshold)

    def elements(self) -> Iterator[AlgElem]:
        return enumerate_v(self.alg, self.threshold)

    def derived(self) -> VSubgroup:
        return v_derived(self.alg, self.threshold)

    def power_subgroup(self, e: int) -> VSubgroup:
        return v_power_subgroup(self.alg, e, self.threshold)
