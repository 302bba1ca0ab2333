"""Finite groupoids, 2-cocycles and the twisted convolution *-algebra.

Arrows and units are integers ``0..n-1``.  With the counting Haar system the
twisted convolution, adjoint and left-regular representation are finite sums:

    (f g)(c)   = sum_{r(e) = r(c)} s(e, e^-1 c) f(e) g(e^-1 c)
    f*(c)      = conj(s(c, c^-1)) conj(f(c^-1))
    pi_x(f)[c, e] = f(c^-1 e) s(c, c^-1 e)        for c, e in r^-1(x)

Full and reduced C*-norms agree for finite groupoids, so only the reduced
norm (sup over units of the operator norm of ``pi_x``) is computed.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .spectra import CompactRealSet, from_points, hausdorff_distance

__all__ = [
    "FiniteGroupoid",
    "Cocycle2",
    "Module1Cocycle",
    "ArrowFunction",
    "GroupoidError",
    "crossed_product",
    "pair_groupoid",
    "set_groupoid",
    "disjoint_union",
    "trivial_cocycle",
    "bilinear_cocycle",
    "coboundary",
    "normalize",
    "validate_cocycle",
    "validate_module",
    "convolve",
    "star",
    "left_regular",
    "reduced_norm",
    "norm_inf1",
    "orbits",
    "invariant_subsets",
    "restrict",
    "spectrum_of_normal",
    "unit_indicator",
    "root_of_unity",
    "block_cocycle",
    "random_groupoid",
]

ATOL = 1e-12


class GroupoidError(ValueError):
    pass


def root_of_unity(k: int, n: int) -> complex:
    """``exp(2 pi i k / n)`` with exact values at quarter turns."""
    k %= n
    if (4 * k) % n == 0:
        return (1 + 0j, 1j, -1 + 0j, -1j)[4 * k // n]
    return complex(np.exp(2j * np.pi * k / n))


@dataclass(frozen=True, eq=False)
class FiniteGroupoid:
    """Structure maps as integer arrays; ``compose[a, b] = -1`` unless ``s(a) == r(b)``.

    The axioms (units, inverses, associativity) are checked exhaustively at
    construction.
    """

    n_units: int
    r: np.ndarray
    s: np.ndarray
    inv: np.ndarray
    compose: np.ndarray
    unit_arrow: np.ndarray
    labels: tuple = ()

    def __post_init__(self):
        for name in ("r", "s", "inv", "compose", "unit_arrow"):
            a = np.array(getattr(self, name), dtype=np.int64)
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        self._check_axioms()
        fibers = tuple(np.flatnonzero(self.r == x) for x in range(self.n_units))
        object.__setattr__(self, "_range_fibers", fibers)

    @property
    def n_arrows(self) -> int:
        return len(self.r)

    def range_fiber(self, x: int) -> np.ndarray:
        return self._range_fibers[x]

    def composable(self) -> np.ndarray:
        return np.argwhere(self.compose >= 0)

    def _check_axioms(self):
        n, U = self.n_arrows, self.n_units
        r, s, inv, C, e = self.r, self.s, self.inv, self.compose, self.unit_arrow
        if C.shape != (n, n) or inv.shape != (n,) or s.shape != (n,) or e.shape != (U,):
            raise GroupoidError("inconsistent table shapes")
        if np.any((r < 0) | (r >= U) | (s < 0) | (s >= U)):
            raise GroupoidError("range/source out of bounds")
        expect = s[:, None] == r[None, :]
        if np.any((C >= 0) != expect):
            raise GroupoidError("composition must be defined exactly on composable pairs")
        ia, ib = np.nonzero(expect)
        if np.any(r[C[ia, ib]] != r[ia]) or np.any(s[C[ia, ib]] != s[ib]):
            raise GroupoidError("composite has wrong range or source")
        if np.any(r[e] != np.arange(U)) or np.any(s[e] != np.arange(U)):
            raise GroupoidError("unit arrows must sit over their units")
        idx = np.arange(n)
        if np.any(C[e[r], idx] != idx) or np.any(C[idx, e[s]] != idx):
            raise GroupoidError("unit laws fail")
        if np.any(C[idx, inv] != e[r]) or np.any(C[inv, idx] != e[s]):
            raise GroupoidError("inverse laws fail")
        for a, b in zip(ia, ib):
            ab = C[a, b]
            cs = np.flatnonzero(r == s[b])
            if np.any(C[ab, cs] != C[a, C[b, cs]]):
                raise GroupoidError("composition is not associative")

    # -- reductions ----------------------------------------------------
    def reduction(self, units: Sequence[int]):
        """Subgroupoid of arrows with range and source in ``units``.

        Returns ``(groupoid, arrow_map)`` with ``arrow_map[i]`` the original id.
        """
        M = sorted(set(int(u) for u in units))
        if not M:
            raise GroupoidError("reduction to the empty set")
        uidx = {u: i for i, u in enumerate(M)}
        keep = np.flatnonzero(np.isin(self.r, M) & np.isin(self.s, M))
        aidx = {int(a): i for i, a in enumerate(keep)}
        m = len(keep)
        C = np.full((m, m), -1, dtype=np.int64)
        for i, a in enumerate(keep):
            for j, b in enumerate(keep):
                c = self.compose[a, b]
                if c >= 0:
                    C[i, j] = aidx[int(c)]
        sub = FiniteGroupoid(
            len(M),
            [uidx[int(x)] for x in self.r[keep]],
            [uidx[int(x)] for x in self.s[keep]],
            [aidx[int(self.inv[a])] for a in keep],
            C,
            [aidx[int(self.unit_arrow[u])] for u in M],
            tuple(self.labels[a] for a in keep) if self.labels else (),
        )
        return sub, keep

    # -- serialization -------------------------------------------------
    def to_record(self) -> dict:
        return {
            "schema": "hullspec.groupoid/1",
            "units": list(range(self.n_units)),
            "unit_arrows": self.unit_arrow.tolist(),
            "arrows": [[i, int(self.r[i]), int(self.s[i]), int(self.inv[i])] for i in range(self.n_arrows)],
            "compose": [[int(a), int(b), int(self.compose[a, b])] for a, b in self.composable()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_record())

    @classmethod
    def from_record(cls, rec) -> "FiniteGroupoid":
        arrows = sorted(rec["arrows"])
        n = len(arrows)
        C = np.full((n, n), -1, dtype=np.int64)
        for a, b, c in rec["compose"]:
            C[a, b] = c
        return cls(len(rec["units"]), [a[1] for a in arrows], [a[2] for a in arrows],
                   [a[3] for a in arrows], C, rec["unit_arrows"])

    @classmethod
    def from_json(cls, text: str) -> "FiniteGroupoid":
        return cls.from_record(json.loads(text))


# ---------------------------------------------------------------------------
# constructions

def _group_elements(orders):
    return list(itertools.product(*[range(q) for q in orders]))


def crossed_product(n_points: int, orders, generators) -> FiniteGroupoid:
    """``X x| G`` for ``G = Z_q1 x ... x Z_qr`` acting by commuting permutations.

    ``generators[i]`` is the permutation (a list, ``x -> generators[i][x]``)
    giving the action of the i-th unit vector; its order must divide ``q_i``.
    Arrow ``(x, g)`` goes from ``g^-1 x`` to ``x`` and
    ``(x, g) o (g^-1 x, h) = (x, g + h)``.  A bare int ``orders`` means one
    cyclic factor.
    """
    if np.isscalar(orders):
        orders, generators = (int(orders),), [generators]
    orders = tuple(int(q) for q in orders)
    perms = [np.asarray(p, dtype=np.int64) for p in generators]
    if len(perms) != len(orders):
        raise GroupoidError("one generator per cyclic factor")
    for p, q in zip(perms, orders):
        if sorted(p.tolist()) != list(range(n_points)):
            raise GroupoidError("action must be a bijection of the point set")
        if not np.array_equal(np.linalg.matrix_power(np.eye(n_points, dtype=np.int64)[p], q),
                              np.eye(n_points, dtype=np.int64)):
            raise GroupoidError("generator order must divide the group order")
    for p1, p2 in itertools.combinations(perms, 2):
        if not np.array_equal(p1[p2], p2[p1]):
            raise GroupoidError("generators must commute")

    G = _group_elements(orders)
    gidx = {g: i for i, g in enumerate(G)}

    def act(g, x):
        for p, gi in zip(perms, g):
            for _ in range(gi):
                x = int(p[x])
        return x

    def neg(g):
        return tuple((-gi) % q for gi, q in zip(g, orders))

    def add(g, h):
        return tuple((gi + hi) % q for gi, hi, q in zip(g, h, orders))

    arrows = [(x, g) for x in range(n_points) for g in G]
    aidx = {a: i for i, a in enumerate(arrows)}
    n = len(arrows)
    r = [x for x, _ in arrows]
    s = [act(neg(g), x) for x, g in arrows]
    inv = [aidx[(act(neg(g), x), neg(g))] for x, g in arrows]
    C = np.full((n, n), -1, dtype=np.int64)
    for i, (x, g) in enumerate(arrows):
        y = s[i]
        for h in G:
            C[i, aidx[(y, h)]] = aidx[(x, add(g, h))]
    zero = tuple(0 for _ in orders)
    units = [aidx[(x, zero)] for x in range(n_points)]
    return FiniteGroupoid(n_points, r, s, inv, C, units, tuple(arrows))


def pair_groupoid(n_points: int) -> FiniteGroupoid:
    """Arrows ``(x, y)`` from y to x with ``(x, y) o (y, z) = (x, z)``; ``id = x * n + y``."""
    n = n_points
    arrows = [(x, y) for x in range(n) for y in range(n)]
    C = np.full((n * n, n * n), -1, dtype=np.int64)
    for x, y in arrows:
        for z in range(n):
            C[x * n + y, y * n + z] = x * n + z
    return FiniteGroupoid(n, [x for x, _ in arrows], [y for _, y in arrows],
                          [y * n + x for x, y in arrows], C, [x * n + x for x in range(n)],
                          tuple(arrows))


def set_groupoid(n_points: int) -> FiniteGroupoid:
    """Only unit arrows."""
    return crossed_product(n_points, 1, list(range(n_points)))


def disjoint_union(*parts: FiniteGroupoid) -> FiniteGroupoid:
    r, s, inv, units, labels = [], [], [], [], []
    blocks = []
    ua = aa = 0
    for i, G in enumerate(parts):
        r += (G.r + ua).tolist()
        s += (G.s + ua).tolist()
        inv += (G.inv + aa).tolist()
        units += (G.unit_arrow + aa).tolist()
        labels += [(i, lab) for lab in (G.labels or range(G.n_arrows))]
        blocks.append((aa, G))
        ua += G.n_units
        aa += G.n_arrows
    C = np.full((aa, aa), -1, dtype=np.int64)
    for off, G in blocks:
        sub = G.compose
        m = G.n_arrows
        C[off:off + m, off:off + m] = np.where(sub >= 0, sub + off, -1)
    return FiniteGroupoid(ua, r, s, inv, C, units, tuple(labels))


# ---------------------------------------------------------------------------
# cocycles

@dataclass(frozen=True, eq=False)
class Cocycle2:
    """Unit-modulus function on composable pairs, stored as an n x n array (0 off pairs)."""

    groupoid: FiniteGroupoid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        G = self.groupoid
        mask = G.compose >= 0
        v[~mask] = 0
        if np.any(np.abs(np.abs(v[mask]) - 1) > ATOL):
            raise GroupoidError("cocycle values must have modulus 1")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __call__(self, a, b):
        return self.values[a, b]

    def __mul__(self, other: "Cocycle2") -> "Cocycle2":
        return Cocycle2(self.groupoid, self.values * other.values)

    @property
    def is_normalized(self) -> bool:
        e = self.groupoid.unit_arrow
        return bool(np.all(np.abs(self.values[e, e] - 1) <= ATOL))

    def restrict(self, arrow_map: np.ndarray, sub: FiniteGroupoid) -> "Cocycle2":
        return Cocycle2(sub, self.values[np.ix_(arrow_map, arrow_map)])

    def rows(self):
        """``(a, b, re, im)`` rows over composable pairs."""
        return [(int(a), int(b), float(self.values[a, b].real), float(self.values[a, b].imag))
                for a, b in self.groupoid.composable()]

    def to_json(self) -> str:
        return json.dumps({"schema": "hullspec.cocycle/1", "rows": self.rows()})

    @classmethod
    def from_json(cls, groupoid: FiniteGroupoid, text: str) -> "Cocycle2":
        v = np.zeros((groupoid.n_arrows,) * 2, dtype=complex)
        for a, b, re, im in json.loads(text)["rows"]:
            v[a, b] = complex(re, im)
        return cls(groupoid, v)


def trivial_cocycle(G: FiniteGroupoid) -> Cocycle2:
    return Cocycle2(G, np.where(G.compose >= 0, 1.0 + 0j, 0j))


def coboundary(G: FiniteGroupoid, tau) -> Cocycle2:
    """``s(a, b) = tau(a) tau(b) / tau(a o b)`` on composable pairs."""
    tau = np.asarray(tau, dtype=complex)
    if np.any(np.abs(np.abs(tau) - 1) > ATOL):
        raise GroupoidError("tau must have modulus 1")
    C = G.compose
    mask = C >= 0
    v = np.zeros(C.shape, dtype=complex)
    ia, ib = np.nonzero(mask)
    v[ia, ib] = tau[ia] * tau[ib] / tau[C[ia, ib]]
    return Cocycle2(G, v)


def normalize(sigma: Cocycle2) -> Cocycle2:
    """Multiply by the coboundary of ``tau(c) = s(e_x, e_x)^-1``, ``x = r(c)``."""
    G = sigma.groupoid
    e = G.unit_arrow
    diag = sigma.values[e, e]
    tau = 1.0 / diag[G.r]
    return sigma * coboundary(G, tau)


def bilinear_cocycle(G: FiniteGroupoid, orders, form, n_over: int | None = None) -> Cocycle2:
    """Cocycle ``exp(i B w(g, h))`` on a crossed product with an integer bilinear form ``w``.

    ``form(g, h)`` returns an integer; the phase is ``root_of_unity(form, n_over)``
    i.e. ``B = 2 pi / n_over``.  ``G.labels`` must be the ``(x, g)`` labels
    produced by :func:`crossed_product`.
    """
    v = np.zeros((G.n_arrows,) * 2, dtype=complex)
    for a, b in G.composable():
        (_, g), (_, h) = G.labels[a], G.labels[b]
        v[a, b] = root_of_unity(form(g, h), n_over)
    return Cocycle2(G, v)


@dataclass
class CocycleReport:
    violations: list = field(default_factory=list)
    max_deviation: float = 0.0
    triples: int = 0

    @property
    def ok(self):
        return not self.violations

    def __bool__(self):
        return self.ok


def composable_triples(G: FiniteGroupoid) -> np.ndarray:
    out = []
    for a, b in G.composable():
        for c in G.range_fiber(int(G.s[b])):
            out.append((a, b, c))
    return np.array(out, dtype=np.int64).reshape(-1, 3)


def validate_cocycle(sigma: Cocycle2, atol: float = ATOL) -> CocycleReport:
    """Check ``s(a, b c) s(b, c) = s(a, b) s(a b, c)`` on every composable triple.

    This is the two-sided identity written without division.  Violations are
    listed exhaustively; normalization (``s(e_x, e_x) = 1``) is checked too.
    """
    G, s = sigma.groupoid, sigma.values
    T = composable_triples(G)
    C = G.compose
    a, b, c = T.T
    lhs = s[a, C[b, c]] * s[b, c]
    rhs = s[a, b] * s[C[a, b], c]
    dev = np.abs(lhs - rhs)
    rep = CocycleReport(triples=len(T), max_deviation=float(dev.max()) if len(T) else 0.0)
    for i in np.flatnonzero(dev > atol):
        rep.violations.append(("identity", tuple(int(t) for t in T[i]), float(dev[i])))
    e = G.unit_arrow
    for x in range(G.n_units):
        d = abs(s[e[x], e[x]] - 1)
        if d > atol:
            rep.violations.append(("normalization", (int(e[x]),), float(d)))
    return rep


@dataclass(frozen=True, eq=False)
class Module1Cocycle:
    """Unit-modulus homomorphism ``d(a o b) = d(a) d(b)`` on arrows."""

    groupoid: FiniteGroupoid
    values: np.ndarray

    def __post_init__(self):
        rep = validate_module(self.groupoid, self.values)
        if rep:
            raise GroupoidError(f"not a 1-cocycle: worst deviation {max(d for _, d in rep):.3e}")


def validate_module(G: FiniteGroupoid, delta, atol: float = ATOL) -> list:
    delta = np.asarray(delta, dtype=complex)
    bad = []
    if np.any(np.abs(np.abs(delta) - 1) > atol):
        bad.append(("modulus", float(np.max(np.abs(np.abs(delta) - 1)))))
    ia, ib = np.nonzero(G.compose >= 0)
    dev = np.abs(delta[G.compose[ia, ib]] - delta[ia] * delta[ib])
    for i in np.flatnonzero(dev > atol):
        bad.append(((int(ia[i]), int(ib[i])), float(dev[i])))
    return bad


# ---------------------------------------------------------------------------
# the convolution algebra

@dataclass(frozen=True, eq=False)
class ArrowFunction:
    groupoid: FiniteGroupoid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=complex).reshape(-1)
        if v.shape != (self.groupoid.n_arrows,):
            raise GroupoidError("function must be defined on every arrow")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __add__(self, other):
        return ArrowFunction(self.groupoid, self.values + other.values)

    def __sub__(self, other):
        return ArrowFunction(self.groupoid, self.values - other.values)

    def __mul__(self, c):
        return ArrowFunction(self.groupoid, self.values * c)

    __rmul__ = __mul__


def unit_indicator(G: FiniteGroupoid) -> ArrowFunction:
    v = np.zeros(G.n_arrows, dtype=complex)
    v[G.unit_arrow] = 1
    return ArrowFunction(G, v)


def _conv_index(G: FiniteGroupoid):
    # (c, e, e^-1 c) for every c and every e in r^-1(r(c))
    cache = G.__dict__.get("_conv_idx")
    if cache is None:
        rows = [(c, e, G.compose[G.inv[e], c]) for c in range(G.n_arrows)
                for e in G.range_fiber(int(G.r[c]))]
        cache = np.array(rows, dtype=np.int64).reshape(-1, 3).T
        object.__setattr__(G, "_conv_idx", cache)
    return cache


def convolve(f: ArrowFunction, g: ArrowFunction, sigma: Cocycle2 | None = None) -> ArrowFunction:
    G = f.groupoid
    c, e, d = _conv_index(G)
    w = f.values[e] * g.values[d]
    if sigma is not None:
        w = w * sigma.values[e, d]
    out = np.zeros(G.n_arrows, dtype=complex)
    np.add.at(out, c, w)
    return ArrowFunction(G, out)


def star(f: ArrowFunction, sigma: Cocycle2 | None = None) -> ArrowFunction:
    G = f.groupoid
    idx = np.arange(G.n_arrows)
    v = np.conj(f.values[G.inv])
    if sigma is not None:
        v = v * np.conj(sigma.values[idx, G.inv])
    return ArrowFunction(G, v)


def left_regular(f: ArrowFunction, x: int, sigma: Cocycle2 | None = None) -> np.ndarray:
    """Matrix of ``pi_x(f)`` on the basis ``r^-1(x)`` (ascending arrow ids)."""
    G = f.groupoid
    if not 0 <= x < G.n_units:
        raise GroupoidError(f"unknown unit {x}")
    F = G.range_fiber(x)
    d = G.compose[G.inv[F][:, None], F[None, :]]
    M = f.values[d]
    if sigma is not None:
        M = M * sigma.values[F[:, None], d]
    return M


def reduced_norm(f: ArrowFunction, sigma: Cocycle2 | None = None) -> float:
    G = f.groupoid
    return max(float(np.linalg.norm(left_regular(f, x, sigma), 2)) for x in range(G.n_units))


def norm_inf1(f: ArrowFunction, sigma: Cocycle2 | None = None) -> float:
    """``max(|f|~, |f*|~)`` with ``|f|~ = max_x sum_{r(c) = x} |f(c)|``."""
    G = f.groupoid

    def tilde(h):
        return max(float(np.abs(h.values[G.range_fiber(x)]).sum()) for x in range(G.n_units))

    return max(tilde(f), tilde(star(f, sigma)))


# ---------------------------------------------------------------------------
# invariant sets and restriction

def orbits(G: FiniteGroupoid) -> list[frozenset]:
    parent = list(range(G.n_units))

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    for a in range(G.n_arrows):
        ru, su = find(int(G.r[a])), find(int(G.s[a]))
        if ru != su:
            parent[max(ru, su)] = min(ru, su)
    groups: dict = {}
    for u in range(G.n_units):
        groups.setdefault(find(u), set()).add(u)
    return sorted((frozenset(g) for g in groups.values()), key=min)


def invariant_subsets(G: FiniteGroupoid) -> list[tuple[frozenset, bool]]:
    """Every nonempty closed invariant set (a union of orbits) with a minimality flag."""
    orbs = orbits(G)
    out = []
    for k in range(1, len(orbs) + 1):
        for combo in itertools.combinations(orbs, k):
            out.append((frozenset().union(*combo), k == 1))
    return out


def is_invariant(G: FiniteGroupoid, M) -> bool:
    M = set(M)
    inside = np.isin(G.r, list(M))
    return bool(np.all(np.isin(G.s[inside], list(M))))


def restrict(f: ArrowFunction, M, sigma: Cocycle2 | None = None):
    """``f_M`` on the reduction to the invariant set ``M``.

    Returns ``(f_M, sigma_M)``; ``sigma_M`` is ``None`` when ``sigma`` is.
    """
    G = f.groupoid
    if not is_invariant(G, M):
        raise GroupoidError("restriction needs an invariant unit set")
    sub, amap = G.reduction(M)
    fm = ArrowFunction(sub, f.values[amap])
    return fm, (sigma.restrict(amap, sub) if sigma is not None else None)


def spectrum_of_normal(f: ArrowFunction, sigma: Cocycle2 | None = None, units="orbits",
                       atol: float = ATOL):
    """Spectrum of a normal element as the union of fibre spectra.

    ``units="orbits"`` uses one unit per orbit (enough by covariance);
    ``units="all"`` uses every unit.  Self-adjoint input returns a
    :class:`CompactRealSet`; otherwise a sorted array of complex eigenvalues.
    """
    G = f.groupoid
    fs = star(f, sigma)
    comm = convolve(fs, f, sigma) - convolve(f, fs, sigma)
    if reduced_norm(comm, sigma) >= atol * max(1.0, reduced_norm(f, sigma) ** 2):
        raise GroupoidError("element is not normal")
    xs = [min(o) for o in orbits(G)] if units == "orbits" else range(G.n_units)
    self_adjoint = np.max(np.abs(fs.values - f.values)) <= atol
    if self_adjoint:
        vals = np.concatenate([np.linalg.eigvalsh(left_regular(f, x, sigma)) for x in xs])
        return from_points(vals)
    vals = np.concatenate([np.linalg.eigvals(left_regular(f, x, sigma)) for x in xs])
    return np.array(sorted(vals, key=lambda z: (round(z.real, 12), round(z.imag, 12))))


# ---------------------------------------------------------------------------
# random instances

def block_cocycle(G: FiniteGroupoid, parts) -> Cocycle2:
    """Cocycle on ``disjoint_union(*components)`` from one cocycle per component."""
    v = np.zeros((G.n_arrows,) * 2, dtype=complex)
    off = 0
    for sigma in parts:
        m = sigma.groupoid.n_arrows
        v[off:off + m, off:off + m] = sigma.values
        off += m
    if off != G.n_arrows:
        raise GroupoidError("components do not cover the groupoid")
    return Cocycle2(G, v)


def _cycles_perm(rng, lengths):
    perm, start = [], 0
    for L in lengths:
        perm += [start + (i + 1) % L for i in range(L)]
        start += L
    return perm


def _random_component(rng, families):
    fam = families[rng.integers(len(families))]
    if fam == "pair":
        G = pair_groupoid(int(rng.integers(1, 4)))
        return G, trivial_cocycle(G)
    if fam == "set":
        G = set_groupoid(int(rng.integers(1, 4)))
        return G, trivial_cocycle(G)
    if fam == "cyclic":
        q = int(rng.integers(2, 5))
        divs = [d for d in range(1, q + 1) if q % d == 0]
        lengths = [int(rng.choice(divs)) for _ in range(int(rng.integers(1, 3)))]
        G = crossed_product(sum(lengths), q, _cycles_perm(rng, lengths))
        return G, trivial_cocycle(G)
    if fam == "cyclic2":
        q = int(rng.integers(2, 4))
        lengths = [int(rng.choice([1, q])) for _ in range(int(rng.integers(1, 3)))]
        g1 = np.array(_cycles_perm(rng, lengths))
        j = int(rng.integers(0, q))
        g2 = np.arange(len(g1))
        for _ in range(j):
            g2 = g1[g2]
        G = crossed_product(len(g1), (q, q), [g1.tolist(), g2.tolist()])
        A = rng.integers(0, q, size=(2, 2))
        sigma = bilinear_cocycle(G, (q, q), lambda g, h: int(np.asarray(g) @ A @ np.asarray(h)), q)
        return G, sigma
    raise ValueError(f"unknown groupoid family {fam!r}")


def random_groupoid(rng: np.random.Generator, max_parts: int = 3,
                    families=("pair", "set", "cyclic", "cyclic2"), twisted: bool = True):
    """Random disjoint union of pair, set, ``Z_q`` and ``Z_q^2`` crossed-product groupoids.

    With ``twisted`` the cocycle is a bilinear phase on the ``Z_q^2`` blocks
    times a normalized random coboundary; otherwise it is trivial.
    Returns ``(groupoid, cocycle)``.
    """
    comps = [_random_component(rng, list(families))
             for _ in range(int(rng.integers(1, max_parts + 1)))]
    G = disjoint_union(*[c[0] for c in comps])
    if not twisted:
        return G, trivial_cocycle(G)
    sigma = block_cocycle(G, [c[1] for c in comps])
    tau = np.exp(2j * np.pi * rng.random(G.n_arrows))
    return G, normalize(sigma * coboundary(G, tau))
