"""Covariant discrete Schrodinger operators with locally constant coefficients.

For a configuration ``x`` the operator acts on l^2(Z^d) by

    (H_x psi)(g) = sum_{h in K} t_h(x seen from g) psi(g + h) + v(x seen from g) psi(g)

where "x seen from g" is the local word of radius ``rho`` around site ``g``.
Finite-volume matrices use ``M[g, g + h] = t_h(word at g)`` and
``M[g, g] = v(word at g)``; hops that leave the box are dropped (open) or
wrapped (periodic).

Self-adjointness needs three table conditions, checked by :func:`validate`:
the potential is real, ``K = -K``, and
``t_{-h}(y) = conj(t_h(y'))`` where ``y'`` is ``y`` re-centred at coordinate
``-h``.  The last one is exactly the statement ``M[g + h, g] = conj(M[g, g + h])``.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .spectra import HermitianMatrix
from .symdyn import (Alphabet, Configuration, DEFAULT_ALPHABET, LatticeConfiguration,
                     PeriodicConfiguration, Subshift)

__all__ = [
    "OperatorSpec",
    "ValidationReport",
    "Violation",
    "validate",
    "local_words",
    "assemble_finite",
    "covariance_check",
    "laplacian",
    "fibonacci_model",
    "potential_model",
    "random_spec",
    "SPEC_FORMAT_HEADER",
]

SPEC_FORMAT_HEADER = "# hullspec operator-spec v1"


def _vec(k) -> tuple:
    return (int(k),) if np.isscalar(k) else tuple(int(c) for c in k)


@dataclass(frozen=True)
class OperatorSpec:
    """Hopping set, hopping tables and potential table of a covariant operator.

    ``hoppings`` maps each hop vector ``k`` to a table ``local word -> complex``;
    words missing from a table take ``hop_defaults[k]`` (0 unless given).
    The potential works the same way with ``potential_default``.  In two
    dimensions local words are row-major ``(2 rho + 1)**2`` patches.
    """

    hoppings: Mapping
    potential: Mapping = field(default_factory=dict)
    radius: int = 0
    dimension: int = 1
    alphabet: Alphabet = DEFAULT_ALPHABET
    hop_defaults: Mapping = field(default_factory=dict)
    potential_default: complex = 0.0

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise ValueError("dimension must be 1 or 2")
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")
        alph = self.alphabet if isinstance(self.alphabet, Alphabet) else Alphabet(self.alphabet)
        hops = {}
        for k, table in self.hoppings.items():
            kv = _vec(k)
            if len(kv) != self.dimension or not any(kv):
                raise ValueError(f"bad hop vector {k!r} for dimension {self.dimension}")
            hops[kv] = {w: complex(t) for w, t in dict(table).items()}
        defaults = {_vec(k): complex(t) for k, t in dict(self.hop_defaults).items()}
        unknown = set(defaults) - set(hops)
        if unknown:
            raise ValueError(f"defaults given for hops not in K: {sorted(unknown)}")
        object.__setattr__(self, "alphabet", alph)
        object.__setattr__(self, "hoppings", hops)
        object.__setattr__(self, "hop_defaults", defaults)
        object.__setattr__(self, "potential", dict(self.potential))
        wl = self.word_length
        for w in itertools.chain(self.potential, *hops.values()):
            if len(w) != wl:
                raise ValueError(f"local word {w!r} should have length {wl}")
            alph.check_word(w)

    @property
    def word_length(self) -> int:
        side = 2 * self.radius + 1
        return side if self.dimension == 1 else side * side

    @property
    def hops(self) -> list[tuple]:
        return sorted(self.hoppings)

    @property
    def max_hop(self) -> int:
        return max((max(abs(c) for c in k) for k in self.hoppings), default=0)

    def t(self, k, word: str) -> complex:
        k = _vec(k)
        return self.hoppings[k].get(word, self.hop_defaults.get(k, 0j))

    def v(self, word: str):
        return self.potential.get(word, self.potential_default)

    def hop_bound(self) -> float:
        """Sum over K of sup |t_k| plus sup |v| (a Schur bound on the norm)."""
        total = 0.0
        for k, table in self.hoppings.items():
            vals = list(table.values()) + [self.hop_defaults.get(k, 0j)]
            total += max(abs(t) for t in vals)
        vals = list(self.potential.values()) + [self.potential_default]
        return total + max(abs(v) for v in vals)

    def with_potential_shift(self, c: float) -> "OperatorSpec":
        return OperatorSpec(self.hoppings, {w: v + c for w, v in self.potential.items()},
                            self.radius, self.dimension, self.alphabet, self.hop_defaults,
                            self.potential_default + c)

    # -- text format ---------------------------------------------------
    def to_text(self) -> str:
        """Line-oriented document; ``*`` in the word column marks a default row."""
        lines = [SPEC_FORMAT_HEADER,
                 f"dimension {self.dimension}",
                 f"radius {self.radius}",
                 f"alphabet {self.alphabet.labels}"]
        for k in self.hops:
            ks = ",".join(map(str, k))
            if k in self.hop_defaults:
                t = self.hop_defaults[k]
                lines.append(f"hop {ks} * {t.real!r} {t.imag!r}")
            for w, t in sorted(self.hoppings[k].items()):
                lines.append(f"hop {ks} {w} {t.real!r} {t.imag!r}")
        pd = complex(self.potential_default)
        lines.append(f"potential * {pd.real!r} {pd.imag!r}")
        for w, v in sorted(self.potential.items()):
            v = complex(v)
            lines.append(f"potential {w} {v.real!r} {v.imag!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "OperatorSpec":
        rows = [ln.split() for ln in text.splitlines() if ln.strip()]
        if not text.startswith(SPEC_FORMAT_HEADER):
            raise ValueError("missing operator-spec header")
        meta, hops, defaults, pot, pdef = {}, {}, {}, {}, 0.0
        for row in rows[1:]:
            if row[0].startswith("#"):
                continue
            if row[0] in ("dimension", "radius", "alphabet"):
                meta[row[0]] = row[1]
            elif row[0] == "hop":
                k = tuple(int(c) for c in row[1].split(","))
                t = complex(float(row[3]), float(row[4]))
                hops.setdefault(k, {})
                if row[2] == "*":
                    defaults[k] = t
                else:
                    hops[k][row[2]] = t
            elif row[0] == "potential":
                v = complex(float(row[2]), float(row[3]))
                v = v.real if v.imag == 0 else v
                if row[1] == "*":
                    pdef = v
                else:
                    pot[row[1]] = v
            else:
                raise ValueError(f"unknown row type {row[0]!r}")
        return cls(hops, pot, int(meta["radius"]), int(meta["dimension"]),
                   Alphabet(meta["alphabet"]), defaults, pdef)


# ---------------------------------------------------------------------------
# validation

@dataclass(frozen=True)
class Violation:
    rule: str
    hop: tuple | None
    word: str | None
    detail: str = ""


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def raise_if_invalid(self):
        if self.violations:
            head = "; ".join(f"{v.rule} {v.hop} {v.word!r}" for v in self.violations[:5])
            raise ValueError(f"{len(self.violations)} self-adjointness violations: {head}")


def _patch_coords(spec: OperatorSpec) -> list[tuple]:
    r = spec.radius
    if spec.dimension == 1:
        return [(i,) for i in range(-r, r + 1)]
    return [(i, j) for j in range(-r, r + 1) for i in range(-r, r + 1)]


def _r3_assignments(spec: OperatorSpec, k: tuple, subshift: Subshift | None):
    """Yield (word at origin, word re-centred at -k) over every admissible joint pattern."""
    patch = _patch_coords(spec)
    shifted = [tuple(c - kc for c, kc in zip(p, k)) for p in patch]
    coords = sorted(set(patch) | set(shifted))
    pos = {c: i for i, c in enumerate(coords)}
    if spec.dimension == 1 and subshift is not None:
        # coords form a contiguous interval in 1D
        patterns = sorted(subshift.language(len(coords)))
    else:
        if len(spec.alphabet) ** len(coords) > 1 << 18:
            raise ValueError("R3 enumeration too large; pass a subshift to restrict it")
        patterns = ("".join(t) for t in itertools.product(spec.alphabet.labels, repeat=len(coords)))
    for pat in patterns:
        yield ("".join(pat[pos[c]] for c in patch), "".join(pat[pos[c]] for c in shifted))


def validate(spec: OperatorSpec, subshift: Subshift | None = None, atol: float = 0.0) -> ValidationReport:
    """Check the three self-adjointness rules over the whole table domain.

    With ``subshift`` (1D only) the hopping identity is checked on admissible
    words of that subshift instead of on every word over the alphabet.
    """
    report = ValidationReport()
    seen = set()
    for w, v in itertools.chain(spec.potential.items(), [("*", spec.potential_default)]):
        if complex(v).imag != 0:
            report.violations.append(Violation("R1", None, w, f"potential {v!r} not real"))
    for k in spec.hops:
        mk = tuple(-c for c in k)
        if mk not in spec.hoppings:
            report.violations.append(Violation("R2", k, None, f"{mk} missing from K"))
            continue
        for w, w_shift in _r3_assignments(spec, k, subshift):
            lhs, rhs = spec.t(mk, w), np.conj(spec.t(k, w_shift))
            if abs(lhs - rhs) > atol:
                v = Violation("R3", mk, w, f"t_{mk}={lhs} but conj(t_{k}(shifted))={rhs}")
                # one word can sit in several joint patterns; list it once
                if v not in seen:
                    seen.add(v)
                    report.violations.append(v)
    return report


# ---------------------------------------------------------------------------
# finite volumes

def local_words(spec: OperatorSpec, x: Configuration, n0: int, n1: int) -> list[str]:
    r = spec.radius
    w = x.window(n0 - r, n1 + r)
    L = 2 * r + 1
    return [w[i:i + L] for i in range(n1 - n0 + 1)]


def _box_1d(sites) -> tuple[int, int]:
    if np.isscalar(sites):
        return 0, int(sites) - 1
    n0, n1 = sites
    return int(n0), int(n1)


def assemble_finite(spec: OperatorSpec, x, sites, boundary: str = "open") -> HermitianMatrix:
    """Finite-volume restriction of ``H_x``.

    ``sites`` is ``N`` or ``(n0, n1)`` (inclusive) in 1D and ``(L1, L2)`` in
    2D, where site ``(n1, n2)`` has index ``n1 + L1 * n2``.
    """
    if boundary not in ("open", "periodic"):
        raise ValueError(f"unknown boundary {boundary!r}")
    if spec.dimension == 2:
        return HermitianMatrix(_assemble_2d(spec, x, sites, boundary))
    n0, n1 = _box_1d(sites)
    N = n1 - n0 + 1
    if N <= 0:
        raise ValueError("box has no sites")
    if boundary == "periodic":
        p = x.period
        if p is None or N % p:
            raise ValueError(f"periodic boundary needs a box length divisible by the period (got N={N}, period={p})")
    words = local_words(spec, x, n0, n1)
    M = np.zeros((N, N), dtype=complex)
    M[np.arange(N), np.arange(N)] = [spec.v(w) for w in words]
    for k in spec.hops:
        h = k[0]
        for i, w in enumerate(words):
            j = i + h
            if boundary == "open":
                if not 0 <= j < N:
                    continue
            else:
                j %= N
            M[i, j] += spec.t(k, w)
    return HermitianMatrix(M)


def _assemble_2d(spec, x, sites, boundary, phase=None):
    L1, L2 = (int(s) for s in sites)
    if L1 <= 0 or L2 <= 0:
        raise ValueError("box has no sites")
    if x is None:
        x = LatticeConfiguration(spec.alphabet.labels[0])
    if boundary == "periodic":
        per = x.periods
        if per is None or L1 % per[0] or L2 % per[1]:
            raise ValueError("periodic boundary needs box sides divisible by the periods")
    N = L1 * L2
    M = np.zeros((N, N), dtype=complex)
    for n2 in range(L2):
        for n1 in range(L1):
            g = n1 + L1 * n2
            w = x.patch(n1, n2, spec.radius)
            M[g, g] += spec.v(w)
            for k in spec.hops:
                m1, m2 = n1 + k[0], n2 + k[1]
                if boundary == "open":
                    if not (0 <= m1 < L1 and 0 <= m2 < L2):
                        continue
                else:
                    m1, m2 = m1 % L1, m2 % L2
                t = spec.t(k, w)
                if phase is not None:
                    t *= phase((n1 + k[0], n2 + k[1]), (n1, n2))
                M[g, m1 + L1 * m2] += t
    return M


def covariance_check(spec: OperatorSpec, x: Configuration, h: int, box, margin: int) -> float:
    """Largest entry gap between the translate of ``H_x`` and ``H_{hx}`` in the interior.

    ``hx`` is ``x`` moved by ``h`` (its symbol at ``n`` is ``x_{n-h}``), so
    ``H_{hx}[g, g'] = H_x[g - h, g' - h]`` away from the box edges.
    """
    if margin < spec.radius + spec.max_hop:
        raise ValueError("margin must be at least radius + max hop length")
    n0, n1 = _box_1d(box)
    lo, hi = n0 + margin, n1 - margin
    rows = [g for g in range(lo, hi + 1) if lo <= g - h <= hi]
    if not rows:
        raise ValueError("box too small for this margin and shift")
    A = assemble_finite(spec, x, (n0, n1)).data
    B = assemble_finite(spec, x.translate(-h), (n0, n1)).data
    dev = 0.0
    offsets = [0] + [k[0] for k in spec.hops]
    for g in rows:
        for d in offsets:
            gp = g + d
            dev = max(dev, abs(B[g - n0, gp - n0] - A[g - h - n0, gp - h - n0]))
    return float(dev)


# ---------------------------------------------------------------------------
# stock models

def laplacian(dimension: int = 1, hop: complex = 1.0, alphabet=DEFAULT_ALPHABET) -> OperatorSpec:
    """Nearest-neighbour hopping ``hop`` with zero potential."""
    if dimension == 1:
        K = [(1,), (-1,)]
    else:
        K = [(1, 0), (-1, 0), (0, 1), (0, -1)]
    hop = complex(hop)
    defaults = {k: (hop if sum(k) > 0 else hop.conjugate()) for k in K}
    return OperatorSpec({k: {} for k in K}, {}, 0, dimension, alphabet, defaults, 0.0)


def potential_model(values: Mapping[str, float], hop: float = 1.0, alphabet=DEFAULT_ALPHABET) -> OperatorSpec:
    """1D nearest-neighbour hopping plus a one-letter potential ``v(letter)``."""
    base = laplacian(1, hop, alphabet)
    return OperatorSpec(base.hoppings, {c: float(v) for c, v in values.items()}, 0, 1,
                        alphabet, base.hop_defaults, 0.0)


def fibonacci_model(coupling: float, alphabet=DEFAULT_ALPHABET) -> OperatorSpec:
    """``t = 1`` on both neighbours, ``v = coupling * [letter == 'a']``."""
    return potential_model({"a": coupling, "b": 0.0}, 1.0, alphabet)


def random_spec(rng: np.random.Generator, radius: int = 1, max_hop: int = 1,
                alphabet=DEFAULT_ALPHABET, scale: float = 1.0) -> OperatorSpec:
    """A random 1D spec satisfying R1-R3 on the full shift.

    For ``h > 0``, ``t_h`` only reads coordinates in ``[h - rho, rho]``, so its
    partner ``t_{-h}`` (fixed by R3) still fits in the radius-``rho`` window.
    """
    alphabet = alphabet if isinstance(alphabet, Alphabet) else Alphabet(alphabet)
    L = 2 * radius + 1
    words = ["".join(t) for t in itertools.product(alphabet.labels, repeat=L)]
    hoppings = {}
    for h in range(1, max_hop + 1):
        reads = [c for c in range(h - radius, radius + 1)]
        table = {}
        for key in itertools.product(alphabet.labels, repeat=len(reads)):
            table[key] = scale * complex(rng.normal(), rng.normal())
        plus, minus = {}, {}
        for w in words:
            # word index i <-> coordinate i - radius
            plus[w] = table[tuple(w[c + radius] for c in reads)]
            minus[w] = np.conj(table[tuple(w[c - h + radius] for c in reads)])
        hoppings[(h,)] = plus
        hoppings[(-h,)] = minus
    potential = {w: scale * float(rng.normal()) for w in words}
    return OperatorSpec(hoppings, potential, radius, 1, alphabet)
