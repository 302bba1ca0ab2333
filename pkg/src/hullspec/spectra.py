"""Compact subsets of the real line and the dense Hermitian eigenvalue contract.

Spectra live here as finite unions of closed intervals.  A point is a
degenerate interval ``[x, x]``, so finite-volume eigenvalue lists and Bloch
band unions share one type and the Hausdorff distance between them is exact.
"""
from __future__ import annotations

import bisect
import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "CompactRealSet",
    "HermitianMatrix",
    "SpectralError",
    "NotHermitianError",
    "from_points",
    "union",
    "distance_point_to_set",
    "one_sided_distance",
    "hausdorff_distance",
    "hermitian_eigenvalues",
    "hermitian_eigensystem",
]

HERMITIAN_ATOL = 1e-12
BAND_MERGE_EPS = 1e-9


class SpectralError(RuntimeError):
    """Raised when a dense eigensolver fails to converge."""


class NotHermitianError(ValueError):
    pass


@dataclass(frozen=True)
class CompactRealSet:
    """Finite union of disjoint closed intervals, sorted by left endpoint.

    Use :func:`from_points`, :func:`union` or :meth:`from_intervals` rather than
    the raw constructor; those normalize overlapping input.
    """

    intervals: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        prev_hi = -math.inf
        for lo, hi in self.intervals:
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValueError("interval endpoints must be finite")
            if lo > hi:
                raise ValueError(f"reversed interval [{lo}, {hi}]")
            if lo <= prev_hi:
                raise ValueError("intervals must be sorted with positive gaps")
            prev_hi = hi

    @classmethod
    def from_intervals(cls, intervals: Iterable[Sequence[float]], merge_eps: float = 0.0):
        """Normalize arbitrary (possibly overlapping) intervals."""
        items = sorted((float(lo), float(hi)) for lo, hi in intervals)
        out: list[list[float]] = []
        for lo, hi in items:
            if lo > hi:
                raise ValueError(f"reversed interval [{lo}, {hi}]")
            if out and lo - out[-1][1] <= merge_eps:
                out[-1][1] = max(out[-1][1], hi)
            else:
                out.append([lo, hi])
        return cls(tuple((lo, hi) for lo, hi in out))

    @classmethod
    def interval(cls, lo: float, hi: float):
        return cls(((float(lo), float(hi)),))

    @classmethod
    def point(cls, x: float):
        return cls(((float(x), float(x)),))

    def __len__(self):
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    @property
    def lo(self) -> float:
        return self.intervals[0][0]

    @property
    def hi(self) -> float:
        return self.intervals[-1][1]

    @property
    def measure(self) -> float:
        return sum(hi - lo for lo, hi in self.intervals)

    def shift(self, c: float) -> "CompactRealSet":
        return CompactRealSet(tuple((lo + c, hi + c) for lo, hi in self.intervals))

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return distance_point_to_set(x, self) <= tol

    def endpoints(self) -> np.ndarray:
        return np.array([e for iv in self.intervals for e in iv], dtype=float)

    def max_abs(self) -> float:
        return max(abs(self.lo), abs(self.hi))

    # -- serialization -------------------------------------------------
    def to_json(self) -> str:
        return json.dumps([[_g17(lo), _g17(hi)] for lo, hi in self.intervals])

    @classmethod
    def from_json(cls, text: str) -> "CompactRealSet":
        return cls(tuple((float(lo), float(hi)) for lo, hi in json.loads(text)))

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if header:
            w.writerow(["lo", "hi"])
        for lo, hi in self.intervals:
            w.writerow([format(lo, ".17g"), format(hi, ".17g")])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "CompactRealSet":
        rows = [r for r in csv.reader(io.StringIO(text)) if r]
        if rows and rows[0] == ["lo", "hi"]:
            rows = rows[1:]
        return cls(tuple((float(lo), float(hi)) for lo, hi in rows))


def _g17(x: float):
    # JSON numbers with 17 significant digits; json.loads gives back the same double
    return json.loads(format(x, ".17g"))


def from_points(values: Iterable[float], merge_eps: float = 0.0) -> CompactRealSet:
    """Sort ``values`` and merge neighbours closer than ``merge_eps``."""
    xs = np.sort(np.asarray(list(values) if not isinstance(values, np.ndarray) else values,
                            dtype=float).ravel())
    if xs.size == 0:
        raise ValueError("from_points needs at least one value")
    out: list[list[float]] = [[xs[0], xs[0]]]
    for x in xs[1:]:
        if x - out[-1][1] <= merge_eps:
            out[-1][1] = x
        else:
            out.append([x, x])
    return CompactRealSet(tuple((float(lo), float(hi)) for lo, hi in out))


def union(*sets: CompactRealSet, merge_eps: float = 0.0) -> CompactRealSet:
    """Union of interval sets; touching intervals coalesce."""
    return CompactRealSet.from_intervals(
        (iv for s in sets for iv in s.intervals), merge_eps=merge_eps)


def distance_point_to_set(x: float, A: CompactRealSet) -> float:
    if A.is_empty:
        raise ValueError("distance to the empty set is undefined")
    los = [lo for lo, _ in A.intervals]
    i = bisect.bisect_right(los, x) - 1
    best = math.inf
    if i >= 0:
        lo, hi = A.intervals[i]
        if x <= hi:
            return 0.0
        best = x - hi
    if i + 1 < len(A.intervals):
        best = min(best, A.intervals[i + 1][0] - x)
    return best


def one_sided_distance(A: CompactRealSet, B: CompactRealSet) -> float:
    """sup over x in A of dist(x, B).

    dist(., B) is piecewise linear with local maxima only at midpoints of the
    gaps of B, so on each interval of A the sup is attained at an endpoint or
    at a gap midpoint lying inside it.  A two-pointer sweep visits both lists
    once.
    """
    if A.is_empty or B.is_empty:
        raise ValueError("Hausdorff distance needs nonempty operands")
    bl = B.intervals
    mids = [0.5 * (bl[j][1] + bl[j + 1][0]) for j in range(len(bl) - 1)]
    best = 0.0
    j = 0
    for lo, hi in A.intervals:
        best = max(best, distance_point_to_set(lo, B), distance_point_to_set(hi, B))
        while j < len(mids) and mids[j] < lo:
            j += 1
        k = j
        while k < len(mids) and mids[k] <= hi:
            best = max(best, 0.5 * (bl[k + 1][0] - bl[k][1]))
            k += 1
    return best


def hausdorff_distance(A: CompactRealSet, B: CompactRealSet) -> float:
    return max(one_sided_distance(A, B), one_sided_distance(B, A))


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """Dense complex matrix checked for Hermiticity at construction."""

    data: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.data, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("matrix entries must be finite")
        dev = float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0
        if dev > HERMITIAN_ATOL:
            raise NotHermitianError(f"matrix is not Hermitian (max deviation {dev:.3e})")
        a.setflags(write=False)
        object.__setattr__(self, "data", a)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.data, 2)) if self.n else 0.0

    def eigenvalues(self) -> np.ndarray:
        return hermitian_eigenvalues(self)

    def spectrum(self, merge_eps: float = 0.0) -> CompactRealSet:
        return from_points(self.eigenvalues(), merge_eps)


def _as_array(A) -> np.ndarray:
    return A.data if isinstance(A, HermitianMatrix) else np.asarray(A)


def hermitian_eigenvalues(A) -> np.ndarray:
    """Ascending eigenvalues; accepts a :class:`HermitianMatrix` or a stack of them."""
    try:
        w = np.linalg.eigvalsh(_as_array(A))
    except np.linalg.LinAlgError as exc:
        raise SpectralError(str(exc)) from exc
    if not np.all(np.isfinite(w)):
        raise SpectralError("eigensolver returned non-finite values")
    return w


def hermitian_eigensystem(A, check: bool = True):
    """Eigenvalues and eigenvectors (columns) with a residual check.

    Every pair satisfies ``|Av - lambda v| <= 1e-10 * max(1, |A|)``; a larger
    residual raises :class:`SpectralError` instead of returning bad vectors.
    """
    a = _as_array(A)
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise SpectralError(str(exc)) from exc
    if check and a.size:
        res = np.linalg.norm(a @ v - v * w, axis=0).max()
        bound = 1e-10 * max(1.0, float(np.linalg.norm(a, 2)))
        if res > bound:
            raise SpectralError(f"eigen residual {res:.3e} exceeds {bound:.3e}")
    return w, v
