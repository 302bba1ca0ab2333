"""Magnetic twists on finite boxes of Z^2 (e/hbar = 1).

Conventions used throughout:

* plaquette ``(n1, n2)`` has lower-left corner ``(n1, n2)``; its flux is
  counted positive counter-clockwise;
* the gauge field is a link variable ``A(p -> q)`` with ``A(q -> p) = -A(p -> q)``.
  In the Landau gauge horizontal links carry 0 and the vertical link
  ``(n1, n2) -> (n1, n2 + 1)`` carries the flux of the plaquettes to its left
  in the same row, counted from column 0;
* longer hops follow the canonical staircase from the lexicographically
  smaller endpoint: first along axis 1, then along axis 2;
* a particle hopping ``p -> q`` picks up ``exp(i A(p -> q))``, i.e.
  ``M[q, p] = t * exp(i A(p -> q))``.  The product of the hop phases around a
  plaquette, walked counter-clockwise, is then ``exp(i flux)``;
* magnetic translations are ``(U(a) psi)(x) = exp(i A(x - a -> x)) psi(x - a)``.

With these, ``U(a) U(b) U(a + b)^-1 = exp(-i Phi_x)`` where ``Phi_x`` is the
flux through the lattice triangle ``x -> x - a -> x - a - b -> x`` (legs along
canonical staircases).  :func:`triangle_flux` computes ``Phi_x`` from the
plaquette fluxes by winding numbers, without touching the gauge field.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

import numpy as np

from .groupoid import Cocycle2, FiniteGroupoid, bilinear_cocycle, crossed_product
from .schrodinger import OperatorSpec, _assemble_2d, validate
from .spectra import HermitianMatrix

__all__ = [
    "FluxField",
    "link_phase",
    "staircase",
    "magnetic_assemble",
    "plaquette_holonomy",
    "gauge_transform",
    "translation_matrix",
    "triangle_flux",
    "magnetic_translation_check",
    "cocycle_from_flux",
    "SIGN_CONVENTION",
]

# U(a)U(b)U(a+b)^-1 = exp(SIGN_CONVENTION * i * Phi_x(0, a, b))
SIGN_CONVENTION = -1


@dataclass(frozen=True)
class FluxField:
    """Uniform flux ``B`` per plaquette, or ``rule(n1, n2) -> flux``."""

    uniform: float | None = 0.0
    rule: Callable | Mapping | None = None

    def __post_init__(self):
        if self.rule is None and not math.isfinite(self.uniform):
            raise ValueError("flux must be finite")

    def __call__(self, n1: int, n2: int) -> float:
        if self.rule is None:
            return self.uniform
        if isinstance(self.rule, Mapping):
            val = self.rule.get((n1, n2), 0.0)
        else:
            val = self.rule(n1, n2)
        if not math.isfinite(val):
            raise ValueError(f"nonfinite flux at plaquette {(n1, n2)}")
        return float(val)


def _column_sum(flux: FluxField, n1: int, n2: int) -> float:
    """Landau vertical link (n1, n2) -> (n1, n2 + 1)."""
    if flux.rule is None:
        return flux.uniform * n1
    if n1 >= 0:
        return sum(flux(m, n2) for m in range(n1))
    return -sum(flux(m, n2) for m in range(n1, 0))


def staircase(p, q) -> list[tuple[int, int]]:
    """Vertices of the canonical lattice path from ``p`` to ``q``."""
    p, q = tuple(p), tuple(q)
    if p > q:
        return staircase(q, p)[::-1]
    path = [p]
    x, y = p
    step = 1 if q[0] > x else -1
    while x != q[0]:
        x += step
        path.append((x, y))
    step = 1 if q[1] > y else -1
    while y != q[1]:
        y += step
        path.append((x, y))
    return path


def link_phase(flux: FluxField, p, q) -> float:
    """``A(p -> q)`` along the canonical staircase."""
    path = staircase(p, q)
    total = 0.0
    for (x0, y0), (x1, y1) in zip(path, path[1:]):
        if x0 == x1:
            if y1 == y0 + 1:
                total += _column_sum(flux, x0, y0)
            else:
                total -= _column_sum(flux, x0, y1)
    return total


def magnetic_assemble(spec: OperatorSpec, flux: FluxField, box, gauge: str = "landau",
                      x=None) -> HermitianMatrix:
    """Open-boundary matrix of the 2D ``spec`` with Peierls phases from ``flux``."""
    if spec.dimension != 2:
        raise ValueError("magnetic assembly needs a 2D spec")
    if gauge != "landau":
        raise ValueError(f"unsupported gauge {gauge!r}")
    validate(spec).raise_if_invalid()
    if not isinstance(flux, FluxField):
        flux = FluxField(float(flux))

    def phase(p, q):
        return np.exp(1j * link_phase(flux, p, q))

    return HermitianMatrix(_assemble_2d(spec, x, box, "open", phase))


def _site(n1, n2, L1):
    return n1 + L1 * n2


def plaquette_holonomy(M, box, n1: int, n2: int) -> complex:
    """Product of hop phases around plaquette (n1, n2), counter-clockwise, unit-normalized."""
    L1, _ = box
    data = M.data if isinstance(M, HermitianMatrix) else M
    loop = [(n1, n2), (n1 + 1, n2), (n1 + 1, n2 + 1), (n1, n2 + 1), (n1, n2)]
    prod = 1.0 + 0j
    for p, q in zip(loop, loop[1:]):
        z = data[_site(*q, L1), _site(*p, L1)]
        prod *= z / abs(z)
    return prod


def gauge_transform(M, chi) -> HermitianMatrix:
    """``D M D^dagger`` with ``D = diag(exp(i chi))``."""
    data = M.data if isinstance(M, HermitianMatrix) else np.asarray(M)
    d = np.exp(1j * np.asarray(chi, dtype=float))
    return HermitianMatrix(d[:, None] * data * np.conj(d)[None, :])


def translation_matrix(flux: FluxField, a, box) -> np.ndarray:
    """Magnetic translation by ``a`` truncated to the box (rows leaving it are zero)."""
    L1, L2 = box
    N = L1 * L2
    U = np.zeros((N, N), dtype=complex)
    for n2 in range(L2):
        for n1 in range(L1):
            m1, m2 = n1 - a[0], n2 - a[1]
            if 0 <= m1 < L1 and 0 <= m2 < L2:
                U[_site(n1, n2, L1), _site(m1, m2, L1)] = np.exp(
                    1j * link_phase(flux, (m1, m2), (n1, n2)))
    return U


def _winding_flux(loop: list[tuple[int, int]], flux: FluxField) -> float:
    """Sum of plaquette fluxes weighted by the winding number of a closed lattice loop."""
    steps = list(zip(loop, loop[1:]))
    verticals = [(x0, min(y0, y1), 1 if y1 > y0 else -1)
                 for (x0, y0), (x1, y1) in steps if x0 == x1 and y0 != y1]
    if not verticals:
        return 0.0
    xs = [p[0] for p in loop]
    ys = [p[1] for p in loop]
    total = 0.0
    for m2 in range(min(ys), max(ys)):
        for m1 in range(min(xs), max(xs)):
            # ray from the plaquette centre towards +x crosses vertical steps at x >= m1 + 1
            w = sum(sgn for x, y, sgn in verticals if y == m2 and x >= m1 + 1)
            if w:
                total += w * flux(m1, m2)
    return total


def triangle_flux(flux: FluxField, x, a, b) -> float:
    """Flux through the lattice triangle ``x -> x - a -> x - a - b -> x``."""
    x = tuple(x)
    p1 = (x[0] - a[0], x[1] - a[1])
    p2 = (p1[0] - b[0], p1[1] - b[1])
    loop = staircase(x, p1) + staircase(p1, p2)[1:] + staircase(p2, x)[1:]
    return _winding_flux(loop, flux)


def magnetic_translation_check(flux, a, b, box, margin: int) -> float:
    """Max deviation of ``U(a) U(b) U(a+b)^-1`` from ``exp(-i Phi_x)`` on interior rows."""
    if not isinstance(flux, FluxField):
        flux = FluxField(float(flux))
    a, b = tuple(a), tuple(b)
    reach = sum(abs(c) for c in a) + sum(abs(c) for c in b)
    if margin < reach:
        raise ValueError("margin must be at least |a| + |b|")
    L1, L2 = box
    interior = [(n1, n2) for n2 in range(margin, L2 - margin) for n1 in range(margin, L1 - margin)]
    if not interior:
        raise ValueError("box too small for the margin")
    ab = (a[0] + b[0], a[1] + b[1])
    P = translation_matrix(flux, a, box) @ translation_matrix(flux, b, box) \
        @ translation_matrix(flux, ab, box).conj().T
    dev = 0.0
    for n1, n2 in interior:
        i = _site(n1, n2, L1)
        row = P[i].copy()
        expect = np.exp(SIGN_CONVENTION * 1j * triangle_flux(flux, (n1, n2), a, b))
        row[i] -= expect
        dev = max(dev, float(np.abs(row).max()))
    return dev


def cocycle_from_flux(B, q: int, n_points: int = 1, generators=None):
    """Magnetic cocycle ``exp(i B n ^ m)`` on ``X x| (Z_q x Z_q)``.

    Needs ``B q`` in ``2 pi Z`` so that the phase only depends on ``n, m``
    mod ``q``.  ``B`` may be given as a :class:`~fractions.Fraction` of ``2 pi``
    (exact) or as a float.  Returns ``(groupoid, cocycle)``.
    """
    if isinstance(B, Fraction):
        frac = B
    else:
        ratio = float(B) * q / (2 * math.pi)
        if abs(ratio - round(ratio)) > 1e-12:
            raise ValueError(f"B * q = {B * q!r} is not a multiple of 2 pi")
        frac = Fraction(round(ratio), q)
    if (frac * q).denominator != 1:
        raise ValueError("B * q must be a multiple of 2 pi")
    if generators is None:
        generators = [list(range(n_points)), list(range(n_points))]
    G = crossed_product(n_points, (q, q), generators)
    num, den = frac.numerator, frac.denominator

    def form(n, m):
        return num * (n[0] * m[1] - n[1] * m[0])

    return G, bilinear_cocycle(G, (q, q), form, den)
