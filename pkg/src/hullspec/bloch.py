"""Floquet-Bloch fibres, band spectra and the Hofstadter (Harper) fibres.

For a period-p configuration the fibre at momentum k is the p x p matrix

    H(k)[m, (m + h) mod p] += t_h(word at m) * exp(i k h),   H(k)[m, m] += v(word at m)

with the true integer hop ``h`` in the phase, so ``H(k + 2 pi) = H(k)`` and
``H(k + 2 pi / p)`` is unitarily equivalent to ``H(k)``.

Band edges are found by sampling a k grid and polishing every sampled local
extremum of every band with golden-section search.  Each returned spectrum
carries a :class:`Certificate` with the grid, the iterations spent and the
last move of the edge estimates.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .schrodinger import OperatorSpec, local_words
from .spectra import (BAND_MERGE_EPS, CompactRealSet, HermitianMatrix, SpectralError,
                      hermitian_eigenvalues)

__all__ = [
    "BlochFiber",
    "BandSpectrum",
    "Certificate",
    "fiber",
    "fiber_stack",
    "band_spectrum",
    "bloch_vs_finite_volume",
    "hofstadter_fiber",
    "hofstadter_spectrum",
    "butterfly_rows",
    "butterfly_csv",
    "golden_section",
]

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
DEFAULT_MAX_ITER = 200


@dataclass(frozen=True)
class BlochFiber:
    period: int
    k: float
    matrix: HermitianMatrix


@dataclass
class Certificate:
    grid: int
    tol: float
    iterations: int = 0
    edge_error: float = 0.0
    converged: bool = True
    max_iter: int = DEFAULT_MAX_ITER

    def merge(self, other: "Certificate"):
        self.iterations += other.iterations
        self.edge_error = max(self.edge_error, other.edge_error)
        self.converged = self.converged and other.converged

    def to_dict(self) -> dict:
        return {"grid": self.grid, "tol": self.tol, "iterations": self.iterations,
                "edge_error": self.edge_error, "converged": self.converged}


@dataclass
class BandSpectrum:
    bands: list
    spectrum: CompactRealSet
    certificate: Certificate

    def to_dict(self) -> dict:
        return {"bands": [list(b) for b in self.bands],
                "spectrum": [list(iv) for iv in self.spectrum.intervals],
                "certificate": self.certificate.to_dict()}


def _period(x) -> int:
    p = getattr(x, "period", None)
    if p is None:
        raise ValueError("Bloch reduction needs a periodic configuration")
    return int(p)


def _fiber_parts(spec: OperatorSpec, x):
    if spec.dimension != 1:
        raise ValueError("Bloch fibres are implemented for d = 1")
    p = _period(x)
    words = local_words(spec, x, 0, p - 1)
    D = np.diag(np.array([spec.v(w) for w in words], dtype=complex))
    parts = []
    for k in spec.hops:
        h = k[0]
        T = np.zeros((p, p), dtype=complex)
        for m, w in enumerate(words):
            T[m, (m + h) % p] += spec.t(k, w)
        parts.append((h, T))
    return p, D, parts


def fiber_stack(spec: OperatorSpec, x, ks) -> np.ndarray:
    """Fibres at all momenta ``ks`` as an array of shape (len(ks), p, p)."""
    _, D, parts = _fiber_parts(spec, x)
    ks = np.atleast_1d(np.asarray(ks, dtype=float))
    H = np.broadcast_to(D, (len(ks),) + D.shape).copy()
    for h, T in parts:
        H += np.exp(1j * ks * h)[:, None, None] * T[None]
    return H


def fiber(spec: OperatorSpec, x, k: float) -> BlochFiber:
    H = fiber_stack(spec, x, [k])[0]
    return BlochFiber(H.shape[0], float(k), HermitianMatrix(H))


def golden_section(f: Callable[[float], float], a: float, b: float, tol: float,
                   max_iter: int = DEFAULT_MAX_ITER, start: float | None = None):
    """Minimize ``f`` on ``[a, b]``.

    Stops once the bracket is below ``sqrt(tol) / 10`` and the best value moved
    less than ``tol`` in the last step.  Returns
    ``(x_best, f_best, iterations, last_move, converged)``.
    """
    xtol = 0.1 * math.sqrt(tol)
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc, fd = f(c), f(d)
    best_x, best = (c, fc) if fc <= fd else (d, fd)
    if start is not None:
        fs = f(start)
        if fs < best:
            best_x, best = start, fs
    move = math.inf
    for it in range(1, max_iter + 1):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INVPHI * (b - a)
            fc = f(c)
            cand_x, cand = c, fc
        else:
            a, c, fc = c, d, fd
            d = a + INVPHI * (b - a)
            fd = f(d)
            cand_x, cand = d, fd
        move = max(0.0, best - cand)
        if cand < best:
            best_x, best = cand_x, cand
        if b - a < xtol and move < tol:
            return best_x, best, it, move, True
    return best_x, best, max_iter, move, False


def _local_extrema(vals: np.ndarray) -> np.ndarray:
    # indices of cyclic local minima (ties count)
    left, right = np.roll(vals, 1), np.roll(vals, -1)
    return np.flatnonzero((vals <= left) & (vals <= right))


def band_spectrum(spec: OperatorSpec, x, grid: int = 64, tol: float = 1e-10,
                  max_iter: int = DEFAULT_MAX_ITER) -> BandSpectrum:
    """Per-band ``[min_k, max_k]`` of the fibre eigenvalues, with a refinement certificate."""
    if grid < 8:
        raise ValueError("grid must be at least 8")
    p = _period(x)
    # fibres at k and k + 2 pi / p are equivalent; [0, 2 pi / p) is enough
    span = 2 * math.pi / p
    ks = span * np.arange(grid) / grid
    E = hermitian_eigenvalues(fiber_stack(spec, x, ks))
    cert = Certificate(grid, tol, max_iter=max_iter)
    step = span / grid
    bands = []
    for j in range(p):
        def band(k, j=j):
            return float(hermitian_eigenvalues(fiber_stack(spec, x, [k])[0])[j])

        lo = _polish(band, ks, E[:, j], step, tol, max_iter, cert, sign=1.0)
        hi = _polish(band, ks, E[:, j], step, tol, max_iter, cert, sign=-1.0)
        bands.append((lo, hi))
    return BandSpectrum(bands, CompactRealSet.from_intervals(bands, BAND_MERGE_EPS), cert)


def _polish(band, ks, vals, step, tol, max_iter, cert, sign):
    vals = sign * vals
    best = float(vals.min())
    for i in _local_extrema(vals):
        k0 = ks[i]
        _, fb, it, move, ok = golden_section(lambda k: sign * band(k), k0 - step, k0 + step,
                                             tol, max_iter, start=k0)
        cert.merge(Certificate(0, tol, it, move, ok))
        best = min(best, fb)
    return sign * best


def bloch_vs_finite_volume(spec: OperatorSpec, x, cells: int) -> float:
    """Largest gap between ring eigenvalues and the pooled fibre eigenvalues."""
    from .schrodinger import assemble_finite

    p = _period(x)
    if cells < 1:
        raise ValueError("need at least one cell")
    N = p * cells
    ks = 2 * math.pi * np.arange(cells) / N
    fib = np.sort(hermitian_eigenvalues(fiber_stack(spec, x, ks)).ravel())
    ring = assemble_finite(spec, x, N, boundary="periodic").eigenvalues()
    return float(np.max(np.abs(fib - np.sort(ring))))


# ---------------------------------------------------------------------------
# Hofstadter

def _check_flux(pflux: int, qflux: int):
    if qflux < 1:
        raise ValueError("qflux must be >= 1")
    if math.gcd(pflux, qflux) != 1:
        raise ValueError(f"flux {pflux}/{qflux} is not in lowest terms")


def hofstadter_stack(pflux: int, qflux: int, coupling: float, k1, k2) -> np.ndarray:
    k1 = np.atleast_1d(np.asarray(k1, dtype=float))
    k2 = np.atleast_1d(np.asarray(k2, dtype=float))
    q = qflux
    m = np.arange(q)
    H = np.zeros((len(k1), q, q), dtype=complex)
    H[:, m, m] = 2 * coupling * np.cos(2 * np.pi * pflux / q * m[None, :] + k2[:, None])
    up = np.ones((len(k1), q), dtype=complex)
    up[:, q - 1] = np.exp(-1j * q * k1)
    # hop m -> m + 1 (mod q); the wrap carries exp(-i q k1), its partner exp(+i q k1)
    np.add.at(H, (slice(None), m, (m + 1) % q), up)
    np.add.at(H, (slice(None), (m + 1) % q, m), np.conj(up))
    return H


def hofstadter_fiber(pflux: int, qflux: int, coupling: float, k1: float, k2: float) -> HermitianMatrix:
    """Harper fibre at flux ``2 pi pflux / qflux`` (Landau gauge)."""
    _check_flux(pflux, qflux)
    return HermitianMatrix(hofstadter_stack(pflux, qflux, coupling, [k1], [k2])[0])


def hofstadter_spectrum(pflux: int, qflux: int, coupling: float = 1.0, grid: int = 32,
                        tol: float = 1e-10, max_iter: int = DEFAULT_MAX_ITER,
                        return_bands: bool = False):
    """Band union over the magnetic Brillouin zone ``[0, 2 pi / q)^2``.

    Sampled extrema of each band are polished by alternating golden-section
    searches in ``k1`` and ``k2``.
    """
    _check_flux(pflux, qflux)
    if grid < 8:
        raise ValueError("grid must be at least 8")
    q = qflux
    span = 2 * math.pi / q
    g = span * np.arange(grid) / grid
    K1, K2 = np.meshgrid(g, g, indexing="ij")
    E = hermitian_eigenvalues(hofstadter_stack(pflux, q, coupling, K1.ravel(), K2.ravel()))
    E = E.reshape(grid, grid, q)
    cert = Certificate(grid, tol, max_iter=max_iter)
    step = span / grid
    bands = []
    for j in range(q):
        def band(k1, k2, j=j):
            return float(np.linalg.eigvalsh(hofstadter_stack(pflux, q, coupling, [k1], [k2])[0])[j])

        lo = _polish_2d(band, g, E[:, :, j], step, tol, max_iter, cert, 1.0)
        hi = _polish_2d(band, g, E[:, :, j], step, tol, max_iter, cert, -1.0)
        bands.append((lo, hi))
    spec = CompactRealSet.from_intervals(bands, BAND_MERGE_EPS)
    result = BandSpectrum(bands, spec, cert)
    return result if return_bands else spec


def _polish_2d(band, g, vals, step, tol, max_iter, cert, sign):
    vals = sign * vals
    best = float(vals.min())
    i, j = np.unravel_index(np.argmin(vals), vals.shape)
    x, y = g[i], g[j]
    fx = best
    for sweep in range(max_iter):
        x, f1, it1, _, ok1 = golden_section(lambda t: sign * band(t, y), x - step, x + step,
                                            tol, max_iter, start=x)
        y, f2, it2, _, ok2 = golden_section(lambda t: sign * band(x, t), y - step, y + step,
                                            tol, max_iter, start=y)
        move = fx - f2
        fx = min(fx, f2)
        cert.merge(Certificate(0, tol, it1 + it2, abs(move), ok1 and ok2))
        if abs(move) < tol:
            break
    else:
        cert.converged = False
    return sign * min(best, fx)


def butterfly_rows(fluxes, coupling: float = 1.0, grid: int = 32, tol: float = 1e-10):
    """``(pflux, qflux, flux_real, band_lo, band_hi)`` for every band of every flux."""
    rows = []
    for pflux, qflux in fluxes:
        bs = hofstadter_spectrum(pflux, qflux, coupling, grid, tol, return_bands=True)
        for lo, hi in bs.bands:
            rows.append((pflux, qflux, pflux / qflux, lo, hi))
    return rows


def butterfly_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["pflux", "qflux", "flux_real", "band_lo", "band_hi"])
    for p, q, f, lo, hi in rows:
        w.writerow([p, q, format(f, ".17g"), format(lo, ".17g"), format(hi, ".17g")])
    return buf.getvalue()
