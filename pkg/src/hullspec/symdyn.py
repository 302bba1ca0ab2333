"""Symbolic dynamics over Z: configurations, subshifts and their dictionaries.

Words are plain strings of single-character labels.  A subshift is described
by its *dictionary* ``language(n)``, the set of admissible words of length
``n``; every constructor here produces an exact dictionary, no sampling.

Two metrics realize the Hausdorff topology on closed shift-invariant sets:

* :func:`subshift_distance` -- the dictionary metric ``2**-n*`` where ``n*``
  is the first length at which the dictionaries differ;
* :func:`point_hausdorff_distance` -- the Hausdorff distance for the point
  metric ``d(x, y) = 2**-min{|k| : x_k != y_k}``.

Both return :class:`fractions.Fraction` values so dyadic comparisons are exact.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "Alphabet",
    "DEFAULT_ALPHABET",
    "CertificationError",
    "Configuration",
    "PeriodicConfiguration",
    "MechanicalConfiguration",
    "SubstitutionConfiguration",
    "SpliceConfiguration",
    "TranslatedConfiguration",
    "LatticeConfiguration",
    "Subshift",
    "mechanical_word",
    "substitution_iterate",
    "periodic_subshift",
    "sturmian_subshift",
    "fibonacci_subshift",
    "substitution_subshift",
    "splice_subshift",
    "full_shift",
    "language",
    "scan_language",
    "subshift_distance",
    "point_hausdorff_distance",
    "min_distance_to_periodic",
    "lyndon_words",
    "continued_fraction",
    "convergents",
    "convergent_approximants",
    "GOLDEN",
]

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
# mechanical symbol 1 -> "a", 0 -> "b": the golden-slope word is then the
# Fibonacci word, where "a" is the frequent letter
MECHANICAL_LABELS = "ba"


class CertificationError(ValueError):
    """A truncated computation cannot certify its answer."""


@dataclass(frozen=True)
class Alphabet:
    labels: str

    def __post_init__(self):
        if not self.labels:
            raise ValueError("alphabet must be nonempty")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError(f"duplicate labels in alphabet {self.labels!r}")
        object.__setattr__(self, "labels", "".join(sorted(self.labels)))

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, c):
        return c in self.labels

    def index(self, c: str) -> int:
        return self.labels.index(c)

    def check_word(self, word: str):
        bad = set(word) - set(self.labels)
        if bad:
            raise ValueError(f"letters {sorted(bad)} not in alphabet {self.labels!r}")


DEFAULT_ALPHABET = Alphabet("ab")


# ---------------------------------------------------------------------------
# words


def mechanical_word(alpha, theta, n0: int, n1: int) -> str:
    """Lower mechanical word ``s_n = floor((n+1)a + t) - floor(n a + t)``, ``n0 <= n <= n1``.

    ``alpha`` and ``theta`` may be floats or :class:`~fractions.Fraction`;
    fractions give exact floors.  An empty window returns ``""``.
    """
    if n1 < n0:
        return ""
    if isinstance(alpha, Fraction) and isinstance(theta, (Fraction, int)):
        fl = [math.floor(n * alpha + theta) for n in range(n0, n1 + 2)]
        return "".join("1" if b - a else "0" for a, b in zip(fl, fl[1:]))
    n = np.arange(n0, n1 + 2, dtype=float)
    fl = np.floor(n * float(alpha) + float(theta))
    return "".join(np.where(np.diff(fl) > 0, "1", "0"))


def substitution_iterate(rules: Mapping[str, str], seed: str, iterations: int) -> str:
    if iterations < 0:
        raise ValueError("iterations must be nonnegative")
    word = seed
    for _ in range(iterations):
        try:
            word = "".join(rules[c] for c in word)
        except KeyError as exc:
            raise KeyError(f"substitution rule missing for symbol {exc.args[0]!r}") from None
    return word


def lyndon_words(alphabet: str, max_len: int):
    """Lyndon words of length <= max_len in lexicographic order (Duval)."""
    k = len(alphabet)
    w = [-1]
    while w:
        w[-1] += 1
        yield "".join(alphabet[i] for i in w)
        m = len(w)
        while len(w) < max_len:
            w.append(w[len(w) - m])
        while w and w[-1] == k - 1:
            w.pop()


def _primitive_root(word: str) -> str:
    n = len(word)
    for d in range(1, n + 1):
        if n % d == 0 and word[:d] * (n // d) == word:
            return word[:d]
    return word


def _min_rotation(word: str) -> str:
    return min(word[i:] + word[:i] for i in range(len(word)))


# ---------------------------------------------------------------------------
# configurations

class Configuration:
    """A point of A^Z given by a rule for the symbol at each coordinate."""

    period: int | None = None

    def symbol(self, n: int) -> str:
        return self.window(n, n)

    def window(self, n0: int, n1: int) -> str:
        raise NotImplementedError

    def translate(self, g: int) -> "Configuration":
        """The configuration with coordinate ``g`` of ``self`` moved to the origin."""
        if g == 0:
            return self
        return TranslatedConfiguration(self, g)


@dataclass(frozen=True)
class PeriodicConfiguration(Configuration):
    """``x_n = word[(n + offset) mod len(word)]``; an explicit window with periodic extension."""

    word: str
    offset: int = 0

    def __post_init__(self):
        if not self.word:
            raise ValueError("periodic configuration needs a nonempty word")

    @property
    def period(self) -> int:
        return len(_primitive_root(self.word))

    def window(self, n0, n1):
        p = len(self.word)
        return "".join(self.word[(n + self.offset) % p] for n in range(n0, n1 + 1))

    def translate(self, g):
        return PeriodicConfiguration(self.word, (self.offset + g) % len(self.word))


@dataclass(frozen=True)
class MechanicalConfiguration(Configuration):
    alpha: object
    theta: object = 0
    labels: str = MECHANICAL_LABELS

    @property
    def period(self):
        if isinstance(self.alpha, Fraction):
            return self.alpha.denominator
        return None

    def window(self, n0, n1):
        bits = mechanical_word(self.alpha, self.theta, n0, n1)
        return bits.translate(str.maketrans("01", self.labels))


@dataclass(frozen=True)
class SubstitutionConfiguration(Configuration):
    """Two-sided fixed point of a substitution power, ``left_seed . seed``."""

    rules: tuple
    seed: str
    left_seed: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(sorted(dict(self.rules).items())))
        if self.left_seed is None:
            object.__setattr__(self, "left_seed", self.seed)
        self._power()

    def _power(self) -> int:
        rules = dict(self.rules)
        for m in range(1, 25):
            r = substitution_iterate(rules, self.seed, m)
            lft = substitution_iterate(rules, self.left_seed, m)
            if (r.startswith(self.seed) and lft.endswith(self.left_seed)
                    and len(r) > 1 and len(lft) > 1):
                return m
        raise ValueError("no substitution power fixes the seeds")

    def _grow(self, seed, length, right):
        rules, m = dict(self.rules), self._power()
        w = seed
        while len(w) < length:
            w = substitution_iterate(rules, w, m)
        return w[:length] if right else w[-length:]

    def window(self, n0, n1):
        if n1 < n0:
            return ""
        out = []
        if n0 < 0:
            left = self._grow(self.left_seed, -n0, right=False)
            out.append(left[: min(n1, -1) - n0 + 1])
        if n1 >= 0:
            right = self._grow(self.seed, n1 + 1, right=True)
            out.append(right[max(n0, 0):])
        return "".join(out)


@dataclass(frozen=True)
class SpliceConfiguration(Configuration):
    """``a^inf . b^inf``: ``a`` on negative coordinates, ``b`` from 0 on."""

    a: str = "a"
    b: str = "b"

    def window(self, n0, n1):
        return "".join(self.a if n < 0 else self.b for n in range(n0, n1 + 1))


@dataclass(frozen=True)
class TranslatedConfiguration(Configuration):
    base: Configuration
    g: int

    @property
    def period(self):
        return self.base.period

    def window(self, n0, n1):
        return self.base.window(n0 + self.g, n1 + self.g)

    def translate(self, g):
        return self.base.translate(self.g + g)


@dataclass(frozen=True)
class LatticeConfiguration:
    """A point of A^(Z^2): ``rule(n1, n2) -> label`` (or a constant label)."""

    rule: object = "a"
    periods: tuple | None = (1, 1)

    def symbol(self, n1: int, n2: int) -> str:
        if isinstance(self.rule, str):
            return self.rule
        return self.rule(n1, n2)

    def patch(self, n1: int, n2: int, rho: int) -> str:
        """Row-major (2 rho + 1)^2 patch centred at (n1, n2), first index fastest."""
        return "".join(self.symbol(n1 + i, n2 + j)
                       for j in range(-rho, rho + 1) for i in range(-rho, rho + 1))


# ---------------------------------------------------------------------------
# subshifts

@dataclass(frozen=True, eq=False)
class Subshift:
    """Closed shift-invariant set with an exact dictionary oracle.

    ``kind`` is one of ``periodic``, ``sturmian``, ``substitution``,
    ``splice`` or ``full``; ``params`` holds the JSON-able parameters.
    """

    alphabet: Alphabet
    kind: str
    params: Mapping
    _lang: Callable[[int], frozenset] = field(repr=False, compare=False)
    representatives: tuple = ()
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def language(self, n: int) -> frozenset:
        if n < 1:
            raise ValueError("word length must be >= 1")
        if n not in self._cache:
            self._cache[n] = frozenset(self._lang(n))
        return self._cache[n]

    @property
    def key(self):
        return (self.alphabet.labels, self.kind, json.dumps(self.params, sort_keys=True))

    def __eq__(self, other):
        return isinstance(other, Subshift) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    @property
    def is_finite(self) -> bool:
        return self.kind == "periodic"

    def points(self) -> list[PeriodicConfiguration]:
        """All points of a periodic subshift."""
        if self.kind != "periodic":
            raise ValueError(f"{self.kind} subshift is not finite")
        w = self.params["word"]
        return [PeriodicConfiguration(w, i) for i in range(len(w))]

    def to_record(self) -> dict:
        return {"alphabet": self.alphabet.labels, "kind": self.kind, "parameters": dict(self.params)}

    def to_json(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True)

    @classmethod
    def from_record(cls, rec: Mapping) -> "Subshift":
        kind, p, alph = rec["kind"], dict(rec["parameters"]), rec["alphabet"]
        if kind == "periodic":
            return periodic_subshift(p["word"], alph)
        if kind == "sturmian":
            alpha = Fraction(p["alpha"]) if isinstance(p["alpha"], str) else p["alpha"]
            return sturmian_subshift(alpha, p.get("theta", 0.0), p.get("labels", MECHANICAL_LABELS))
        if kind == "substitution":
            return substitution_subshift(p["rules"], p["seed"])
        if kind == "splice":
            return splice_subshift(p["a"], p["b"], alph)
        if kind == "full":
            return full_shift(alph)
        raise ValueError(f"unknown subshift kind {kind!r}")

    @classmethod
    def from_json(cls, text: str) -> "Subshift":
        return cls.from_record(json.loads(text))


def language(subshift: Subshift, n: int) -> frozenset:
    return subshift.language(n)


def _windows(word: str, n: int) -> set[str]:
    """Length-n windows of the bi-infinite repetition of ``word``."""
    p = len(word)
    rep = word * (n // p + 2)
    return {rep[i:i + n] for i in range(p)}


def periodic_subshift(word: str, alphabet=DEFAULT_ALPHABET) -> Subshift:
    """Orbit of ``word^inf``; a finite subshift with ``len(root)`` points."""
    if not word:
        raise ValueError("periodic subshift needs a nonempty word")
    alphabet = alphabet if isinstance(alphabet, Alphabet) else Alphabet(alphabet)
    alphabet.check_word(word)
    canon = _min_rotation(_primitive_root(word))
    return Subshift(alphabet, "periodic", {"word": canon},
                    lambda n: _windows(canon, n),
                    representatives=(PeriodicConfiguration(canon),))


def _sturmian_factors(alpha: float, n: int, labels: str) -> set[str]:
    # the length-n factor at a site only depends on which arc of the circle,
    # cut at the n+1 points {-j alpha}, its rotation phase falls into
    cuts = np.sort(np.mod(-alpha * np.arange(n + 1), 1.0))
    cuts = np.append(cuts, cuts[0] + 1.0)
    mids = 0.5 * (cuts[:-1] + cuts[1:])
    j = np.arange(n + 1, dtype=float)
    fl = np.floor(j[None, :] * alpha + mids[:, None])
    bits = np.diff(fl, axis=1) > 0
    table = np.array(list(labels))
    return {"".join(table[row.astype(int)]) for row in bits}


def sturmian_subshift(alpha, theta=0.0, labels: str = MECHANICAL_LABELS) -> Subshift:
    """Orbit closure of the mechanical word with slope ``alpha``.

    A :class:`~fractions.Fraction` slope ``p/q`` gives the periodic orbit of
    period ``q``; a float slope is treated as irrational and gives the
    Sturmian subshift with ``n + 1`` factors of each length.
    """
    if isinstance(alpha, Fraction):
        q = alpha.denominator
        theta = Fraction(theta)
        word = mechanical_word(alpha, theta, 0, q - 1).translate(str.maketrans("01", labels))
        return periodic_subshift(word, Alphabet(labels))
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError("irrational slope must lie in (0, 1)")
    return Subshift(Alphabet(labels), "sturmian",
                    {"alpha": alpha, "theta": float(theta), "labels": labels},
                    lambda n: _sturmian_factors(alpha, n, labels),
                    representatives=(MechanicalConfiguration(alpha, float(theta), labels),))


def fibonacci_subshift() -> Subshift:
    return sturmian_subshift(GOLDEN)


def substitution_subshift(rules: Mapping[str, str], seed: str) -> Subshift:
    """Orbit closure of a fixed point of a primitive substitution.

    The dictionary is built from the legal two-letter words (closed under the
    substitution) and their images under a power long enough to cover length n.
    """
    rules = dict(rules)
    alphabet = Alphabet("".join(rules))
    legal = set()
    frontier = {w[i:i + 2] for w in [substitution_iterate(rules, seed, k) for k in range(1, 8)]
                for i in range(len(w) - 1)}
    while frontier - legal:
        legal |= frontier
        frontier = {img[i:i + 2] for u in legal for img in [substitution_iterate(rules, u, 1)]
                    for i in range(len(img) - 1)}
    legal = frozenset(legal)

    def lang(n):
        k = 0
        while min(len(substitution_iterate(rules, c, k)) for c in rules) < n:
            k += 1
        out = set()
        for u in legal:
            w = substitution_iterate(rules, u, k)
            out |= {w[i:i + n] for i in range(len(w) - n + 1)}
        return out

    config = SubstitutionConfiguration(tuple(rules.items()), seed)
    return Subshift(alphabet, "substitution", {"rules": dict(sorted(rules.items())), "seed": seed},
                    lang, representatives=(config,))


def splice_subshift(a: str = "a", b: str = "b", alphabet=DEFAULT_ALPHABET) -> Subshift:
    """Orbit closure of ``a^inf . b^inf``: the splice orbit plus both fixed points."""
    alphabet = alphabet if isinstance(alphabet, Alphabet) else Alphabet(alphabet)
    alphabet.check_word(a + b)
    if a == b:
        raise ValueError("splice needs two distinct letters")
    return Subshift(alphabet, "splice", {"a": a, "b": b},
                    lambda n: {a * k + b * (n - k) for k in range(n + 1)},
                    representatives=(SpliceConfiguration(a, b),))


def full_shift(alphabet=DEFAULT_ALPHABET) -> Subshift:
    alphabet = alphabet if isinstance(alphabet, Alphabet) else Alphabet(alphabet)
    return Subshift(alphabet, "full", {},
                    lambda n: {"".join(t) for t in itertools.product(alphabet.labels, repeat=n)})


def scan_language(config: Configuration, n: int, length: int | None = None) -> set[str]:
    """Length-n windows seen in ``config`` on ``[-L/2, L/2)``, ``L = max(64 n, 4096)``."""
    length = length or max(64 * n, 4096)
    w = config.window(-length // 2, length // 2 - 1)
    return {w[i:i + n] for i in range(len(w) - n + 1)}


# ---------------------------------------------------------------------------
# metrics

def _check_alphabets(X: Subshift, Y: Subshift):
    if X.alphabet != Y.alphabet:
        raise ValueError(f"alphabet mismatch: {X.alphabet.labels!r} vs {Y.alphabet.labels!r}")


def subshift_distance(X: Subshift, Y: Subshift, horizon: int = 64) -> Fraction:
    """Dictionary metric ``2**-n*``, ``n*`` the first length with different dictionaries."""
    _check_alphabets(X, Y)
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    for n in range(1, horizon + 1):
        if X.language(n) != Y.language(n):
            return Fraction(1, 2 ** n)
    return Fraction(0)


def _mismatch_codes(words: Iterable[str], W: int) -> np.ndarray:
    return np.array([[ord(c) for c in w] for w in words], dtype=np.int32).reshape(-1, 2 * W + 1)


def _maxmin(exps: np.ndarray) -> int:
    # distance 2**-e is largest when e is smallest: sup_u inf_v d <-> min_u max_v e
    return int(exps.max(axis=1).min())


def point_hausdorff_distance(X: Subshift, Y: Subshift, window: int = 8) -> Fraction:
    """Hausdorff distance for the two-sided point metric, by brute force on windows.

    The answer is exact when it is at least ``2**-window``; smaller values
    cannot be told apart from 0 inside the window and raise
    :class:`CertificationError` (identical subshifts return 0).
    """
    _check_alphabets(X, Y)
    W = int(window)
    if W < 0:
        raise ValueError("window radius must be nonnegative")
    if X == Y:
        return Fraction(0)
    A = _mismatch_codes(sorted(X.language(2 * W + 1)), W)
    B = _mismatch_codes(sorted(Y.language(2 * W + 1)), W)
    e = min(_maxmin(_exponents(A, B, W)), _maxmin(_exponents(B, A, W)))
    if e > W:
        raise CertificationError(
            f"distance is below 2**-{W}; increase the window to certify it")
    return Fraction(1, 2 ** e)


def _exponents(A: np.ndarray, B: np.ndarray, W: int) -> np.ndarray:
    radius = np.abs(np.arange(-W, W + 1))
    diff = A[:, None, :] != B[None, :, :]
    return np.where(diff, radius[None, None, :], W + 1).min(axis=2)


def min_distance_to_periodic(Y: Subshift, max_period: int, window: int = 8):
    """Smallest point-Hausdorff distance from ``Y`` to a periodic orbit of period <= P.

    Candidates are Lyndon words (one per primitive necklace); ties go to the
    lexicographically smallest word.  Returns ``(distance, word)``.
    """
    if max_period < 1:
        raise ValueError("max_period must be >= 1")
    best = None
    for w in lyndon_words(Y.alphabet.labels, max_period):
        d = point_hausdorff_distance(periodic_subshift(w, Y.alphabet), Y, window)
        if best is None or (d, w) < best:
            best = (d, w)
    return best


# ---------------------------------------------------------------------------
# continued fractions

def continued_fraction(alpha, count: int):
    """First ``count`` partial quotients of ``alpha``; ``(terms, terminated)``.

    Floats are expanded through their exact rational value, so only the
    leading terms (those the float resolves) describe the real number.
    """
    x = Fraction(alpha)
    terms = []
    for _ in range(count):
        a = math.floor(x)
        terms.append(a)
        frac = x - a
        if frac == 0:
            return terms, True
        x = 1 / frac
    return terms, False


def convergents(terms: Sequence[int]) -> list[Fraction]:
    out = []
    p0, q0, p1, q1 = 1, 0, terms[0], 1
    out.append(Fraction(p1, q1))
    for a in terms[1:]:
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        out.append(Fraction(p1, q1))
    return out


class ApproximantList(list):
    """List of ``(p/q, periodic Subshift)``; ``terminated`` flags a rational slope."""

    terminated: bool = False


def convergent_approximants(alpha, count: int, labels: str = MECHANICAL_LABELS) -> ApproximantList:
    """Periodic mechanical subshifts with slopes at the convergents of ``alpha``.

    The integer-part convergent ``0/1`` is skipped, so the golden slope gives
    ``1/1, 1/2, 2/3, 3/5, ...``.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    terms, terminated = continued_fraction(alpha, count + 1)
    conv = [c for c in convergents(terms)[1:]][:count]
    out = ApproximantList((c, sturmian_subshift(c, 0, labels)) for c in conv)
    out.terminated = terminated and len(out) < count
    return out
